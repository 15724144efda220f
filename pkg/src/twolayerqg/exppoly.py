"""Exact arithmetic for exponential-polynomial functions of time.

The carrier type is a finite sum

    f(t) = sum_j p_j(t) * exp(sigma_j * t),

with pairwise distinct rational exponents sigma_j.  Polynomial
coefficients live in the ring of "exponential constants"
Q[e^c : c rational], i.e. finite sums sum_i q_i * e^{c_i} with rational
q_i and c_i.  That extension is what keeps the ring exactly closed under
the argument shift t -> t - eps: shifting (t^2) e^{2t} produces the
coefficient e^{-2 eps}, which is irrational but still canonically
representable here.  Distinct e^c are linearly independent over the
rationals, so structural equality of the canonical form is genuine
equality of functions.

Closure properties used elsewhere in the package: addition,
multiplication, d/dt, antiderivative (exact for every term), affine
argument substitution t -> a t + b with rational a != 0, b.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import exp as _fexp

import numpy as np

__all__ = ["ExpConst", "ExpPoly", "parse_exppoly", "as_fraction"]


def as_fraction(x) -> Fraction:
    """Coerce ints, strings like '-3/4', and exact floats to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # Binary floats are exact rationals; no rounding happens here.
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class ExpConst:
    """An exact constant of the form sum_i q_i * e^{c_i} (q_i, c_i rational)."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        clean = {}
        for c, q in terms.items():
            c = as_fraction(c)
            q = as_fraction(q)
            if q != 0:
                clean[c] = clean.get(c, Fraction(0)) + q
        self._terms = {c: q for c, q in clean.items() if q != 0}

    @classmethod
    def rational(cls, q) -> "ExpConst":
        return cls({Fraction(0): as_fraction(q)})

    @classmethod
    def e_power(cls, c, coeff=1) -> "ExpConst":
        return cls({as_fraction(c): as_fraction(coeff)})

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        other = _as_expconst(other)
        terms = dict(self._terms)
        for c, q in other._terms.items():
            terms[c] = terms.get(c, Fraction(0)) + q
        return ExpConst(terms)

    __radd__ = __add__

    def __neg__(self):
        return ExpConst({c: -q for c, q in self._terms.items()})

    def __sub__(self, other):
        return self + (-_as_expconst(other))

    def __rsub__(self, other):
        return _as_expconst(other) + (-self)

    def __mul__(self, other):
        other = _as_expconst(other)
        terms = {}
        for c1, q1 in self._terms.items():
            for c2, q2 in other._terms.items():
                c = c1 + c2
                terms[c] = terms.get(c, Fraction(0)) + q1 * q2
        return ExpConst(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        q = as_fraction(other)
        return ExpConst({c: v / q for c, v in self._terms.items()})

    def __eq__(self, other):
        try:
            other = _as_expconst(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # -- queries ----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_rational(self) -> bool:
        return all(c == 0 for c in self._terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not a plain rational")
        return self._terms.get(Fraction(0), Fraction(0))

    def __float__(self) -> float:
        return float(sum(float(q) * _fexp(float(c)) for c, q in self._terms.items()))

    def items(self):
        return sorted(self._terms.items())

    def __repr__(self):
        return f"ExpConst({self})"

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for c, q in self.items():
            if c == 0:
                parts.append(str(q))
            elif q == 1:
                parts.append(f"e({c})")
            else:
                parts.append(f"{q}*e({c})")
        return " + ".join(parts) if len(parts) > 1 else parts[0]


def _as_expconst(x) -> ExpConst:
    if isinstance(x, ExpConst):
        return x
    return ExpConst.rational(as_fraction(x))


_ZERO = Fraction(0)


class ExpPoly:
    """Canonical exponential polynomial sum_j p_j(t) exp(sigma_j t).

    Internally a map ``sigma -> tuple of ExpConst coefficients`` (ascending
    powers, trailing zeros stripped, empty polynomials removed), so equality
    is structural equality of canonical data.
    """

    __slots__ = ("_terms", "_compiled")

    def __init__(self, terms=None):
        canon = {}
        if terms:
            for sigma, coeffs in terms.items():
                sigma = as_fraction(sigma)
                cs = [_as_expconst(c) for c in coeffs]
                while cs and cs[-1].is_zero:
                    cs.pop()
                if cs:
                    if sigma in canon:
                        cs = _poly_add(canon[sigma], tuple(cs))
                    if cs:
                        canon[sigma] = tuple(cs)
                    elif sigma in canon:
                        del canon[sigma]
        self._terms = canon
        self._compiled = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls()

    @classmethod
    def const(cls, q) -> "ExpPoly":
        return cls({_ZERO: (q,)})

    @classmethod
    def t(cls) -> "ExpPoly":
        return cls({_ZERO: (0, 1)})

    @classmethod
    def exp(cls, sigma) -> "ExpPoly":
        return cls({as_fraction(sigma): (1,)})

    @classmethod
    def monomial(cls, coeff, degree: int = 0, sigma=0) -> "ExpPoly":
        coeffs = [0] * degree + [coeff]
        return cls({as_fraction(sigma): tuple(coeffs)})

    @classmethod
    def coerce(cls, x) -> "ExpPoly":
        if isinstance(x, ExpPoly):
            return x
        if isinstance(x, str):
            return parse_exppoly(x)
        return cls.const(as_fraction(x))

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        try:
            other = ExpPoly.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        out = dict(self._terms)
        for s, p in other._terms.items():
            if s in out:
                out[s] = tuple(_poly_add(out[s], p))
            else:
                out[s] = p
        return ExpPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly({s: tuple(-c for c in p) for s, p in self._terms.items()})

    def __sub__(self, other):
        return self + (-ExpPoly.coerce(other))

    def __rsub__(self, other):
        return ExpPoly.coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ExpConst)):
            other = ExpPoly({_ZERO: (other,)})
        try:
            other = ExpPoly.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        out = {}
        for s1, p1 in self._terms.items():
            for s2, p2 in other._terms.items():
                s = s1 + s2
                prod = _poly_mul(p1, p2)
                if s in out:
                    out[s] = tuple(_poly_add(out[s], prod))
                else:
                    out[s] = prod
        return ExpPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = ExpPoly.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted((s, p) for s, p in self._terms.items())))

    # -- calculus ------------------------------------------------------------
    def diff(self, n: int = 1) -> "ExpPoly":
        """n-th derivative; exact since d/dt (p e^{st}) = (p' + s p) e^{st}."""
        out = self
        for _ in range(n):
            terms = {}
            for s, p in out._terms.items():
                dp = tuple((k + 1) * p[k + 1] for k in range(len(p) - 1))
                sp = tuple(s * c for c in p) if s != 0 else ()
                terms[s] = _poly_add(dp, sp)
            out = ExpPoly(terms)
        return out

    def antiderivative(self) -> "ExpPoly":
        """An exact antiderivative with zero integration constant.

        For sigma != 0 the closed form sum_k (-1)^k p^(k) / sigma^(k+1)
        times e^{sigma t} is used; the sigma = 0 part integrates termwise.
        """
        terms = {}
        for s, p in self._terms.items():
            if s == 0:
                terms[s] = tuple([0] + [p[k] / (k + 1) for k in range(len(p))])
            else:
                result = [c / s for c in p]
                deriv = p
                power = s
                sign = -1
                while True:
                    deriv = tuple((k + 1) * deriv[k + 1] for k in range(len(deriv) - 1))
                    if not deriv:
                        break
                    power *= s
                    for k, c in enumerate(deriv):
                        result[k] = result[k] + sign * c / power
                    sign = -sign
                terms[s] = tuple(result)
        return ExpPoly(terms)

    def compose_affine(self, a, b) -> "ExpPoly":
        """Exact substitution t -> a*t + b with rational a != 0 and b."""
        a = as_fraction(a)
        b = as_fraction(b)
        if a == 0:
            raise ValueError("affine substitution needs a != 0")
        out = ExpPoly.zero()
        tsub = ExpPoly({_ZERO: (b, a)})
        for s, p in self._terms.items():
            # p(a t + b) by Horner, times e^{s b} e^{(s a) t}
            acc = ExpPoly.zero()
            for c in reversed(p):
                acc = acc * tsub + ExpPoly({_ZERO: (c,)})
            scale = ExpConst.e_power(s * b) if s != 0 else ExpConst.rational(1)
            out = out + acc * ExpPoly({s * a: (scale,)})
        return out

    def shift(self, eps) -> "ExpPoly":
        """f(t - eps), the time-translation action used by the adjoint table."""
        return self.compose_affine(1, -as_fraction(eps))

    # -- queries ----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return self.diff().is_zero

    def constant_value(self) -> ExpConst:
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        if not self._terms:
            return ExpConst.rational(0)
        return self._terms[_ZERO][0]

    def coordinates(self):
        """Exact coordinates over Q: ((sigma, power, e-exponent), q) pairs.

        Monomials t^k e^{sigma t} e^{c} with distinct (sigma, k, c) are
        linearly independent over Q, which makes exact span computations
        in the symmetry algebra a matter of rational linear algebra.
        """
        for s, p in sorted(self._terms.items()):
            for k, coeff in enumerate(p):
                for c, q in coeff.items():
                    yield (s, k, c), q

    def terms(self):
        return sorted(self._terms.items())

    def eval_exact(self, q) -> ExpConst:
        """Exact value at a rational point, as an exponential constant."""
        q = as_fraction(q)
        total = ExpConst()
        for s, p in self._terms.items():
            acc = ExpConst()
            power = Fraction(1)
            for c in p:
                acc = acc + c * power
                power *= q
            total = total + acc * ExpConst.e_power(s * q)
        return total

    # -- numerics ----------------------------------------------------------
    def _compile(self):
        if self._compiled is None:
            self._compiled = [
                (float(s), np.array([float(c) for c in p], dtype=float))
                for s, p in self._terms.items()
            ]
        return self._compiled

    def __call__(self, t):
        """Evaluate at a float or ndarray of floats."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for s, coeffs in self._compile():
            poly = np.zeros_like(t)
            for c in coeffs[::-1]:
                poly = poly * t + c
            out = out + (poly * np.exp(s * t) if s != 0.0 else poly)
        if out.ndim == 0:
            return float(out)
        return out

    # -- printing ----------------------------------------------------------
    def __repr__(self):
        return f"ExpPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for s, p in sorted(self._terms.items()):
            poly = _poly_str(p)
            if s == 0:
                pieces.append(poly)
            else:
                arg = "t" if s == 1 else ("-t" if s == -1 else f"{s}*t")
                if poly == "1":
                    pieces.append(f"exp({arg})")
                else:
                    pieces.append(f"({poly})*exp({arg})")
        return " + ".join(pieces)


def _poly_add(p1, p2):
    n = max(len(p1), len(p2))
    out = []
    for k in range(n):
        a = p1[k] if k < len(p1) else ExpConst()
        b = p2[k] if k < len(p2) else ExpConst()
        out.append(_as_expconst(a) + _as_expconst(b))
    while out and out[-1].is_zero:
        out.pop()
    return tuple(out)


def _poly_mul(p1, p2):
    out = [ExpConst() for _ in range(len(p1) + len(p2) - 1)]
    for i, a in enumerate(p1):
        for j, b in enumerate(p2):
            out[i + j] = out[i + j] + _as_expconst(a) * _as_expconst(b)
    while out and out[-1].is_zero:
        out.pop()
    return tuple(out)


def _coeff_str(c: ExpConst) -> str:
    if c.is_rational:
        return str(c.rational_value())
    return "(" + str(c) + ")"


def _poly_str(p) -> str:
    parts = []
    for k, c in enumerate(p):
        if c.is_zero:
            continue
        cs = _coeff_str(c)
        if k == 0:
            parts.append(cs)
        else:
            tk = "t" if k == 1 else f"t^{k}"
            parts.append(tk if cs == "1" else f"{cs}*{tk}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Parser for the CLI-facing syntax, e.g. "(3+2t^2)exp(1/2 t)", "t*exp(-t)".
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>exp|e|t)|(?P<op>[()+\-*^]))"
)


class _Parser:
    def __init__(self, text: str):
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip():
                    raise ValueError(f"cannot parse {text!r} near {text[pos:]!r}")
                break
            pos = m.end()
            if m.group("num"):
                self.tokens.append(("num", Fraction(m.group("num"))))
            elif m.group("name"):
                self.tokens.append(("name", m.group("name")))
            else:
                self.tokens.append(("op", m.group("op")))
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise ValueError(f"expected {op!r}, found {val!r}")

    def parse(self) -> ExpPoly:
        value = self.expr()
        if self.i != len(self.tokens):
            raise ValueError(f"trailing input at token {self.peek()!r}")
        return value

    def _sign_run(self) -> int:
        sign = 1
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                if val == "-":
                    sign = -sign
            else:
                return sign

    def expr(self) -> ExpPoly:
        sign = self._sign_run()
        out = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                sign = self._sign_run()
                out = out + self.term() * sign
            else:
                return out

    def term(self) -> ExpPoly:
        out = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.next()
                out = out * self.factor()
            elif kind == "num" or kind == "name" or (kind == "op" and val == "("):
                out = out * self.factor()  # implicit product, e.g. "2t", "(1+t)exp(t)"
            else:
                return out

    def factor(self) -> ExpPoly:
        kind, val = self.next()
        if kind == "num":
            return ExpPoly.const(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return self._maybe_power(inner)
        if kind == "name" and val == "t":
            return self._maybe_power(ExpPoly.t())
        if kind == "name" and val == "e":
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            c = inner.constant_value()
            if not c.is_rational:
                raise ValueError("e(...) takes a rational constant")
            return ExpPoly({_ZERO: (ExpConst.e_power(c.rational_value()),)})
        if kind == "name" and val == "exp":
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return _exp_of_linear(inner)
        raise ValueError(f"unexpected token {val!r}")

    def _maybe_power(self, base: ExpPoly) -> ExpPoly:
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, n = self.next()
            if kind != "num" or n.denominator != 1:
                raise ValueError("exponent must be a nonnegative integer")
            out = ExpPoly.const(1)
            for _ in range(int(n)):
                out = out * base
            return out
        return base


def _exp_of_linear(arg: ExpPoly) -> ExpPoly:
    """exp(c + sigma*t) as an ExpPoly; arg must be affine in t."""
    terms = dict(arg.terms())
    if set(terms) - {_ZERO}:
        raise ValueError("exp(...) argument must be a polynomial in t")
    p = terms.get(_ZERO, ())
    if len(p) > 2:
        raise ValueError("exp(...) argument must be affine in t")
    c = p[0] if len(p) >= 1 else ExpConst()
    s = p[1] if len(p) >= 2 else ExpConst()
    if not (c.is_rational and s.is_rational):
        raise ValueError("exp(...) argument needs rational coefficients")
    coeff = ExpConst.e_power(c.rational_value()) if not c.is_zero else ExpConst.rational(1)
    return ExpPoly({s.rational_value(): (coeff,)})


def parse_exppoly(text: str) -> ExpPoly:
    """Parse the textual exponential-polynomial syntax.

    Accepts sums/differences of products of rationals, ``t`` powers,
    ``exp(<affine in t>)`` and ``e(<rational>)``; multiplication may be
    implicit, e.g. ``(3+2t^2)exp(1/2 t)``.
    """
    return _Parser(text).parse()
