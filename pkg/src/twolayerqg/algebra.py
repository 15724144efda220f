"""Exact arithmetic in the symmetry algebra of the two-layer model.

The algebra is spanned by

    Dt,  Dy,  X(f) = f(t) d_x - f'(t) y (d_psi1 + d_psi2),
    F = d_psi1 - d_psi2,  Z(g) = g(t) (d_psi1 + d_psi2),

with f, g drawn from the exponential-polynomial ring (see
:mod:`twolayerqg.exppoly`).  A general element is

    a*Dt + b*Dy + X(f) + c*F + Z(g),

and the only nonvanishing basis brackets are

    [Dt, X(f)] = X(f'),   [Dt, Z(g)] = Z(g'),   [Dy, X(f)] = -Z(f').

The adjoint action follows the symmetry-analysis sign convention

    Ad(e^{eps*A}) B = B - eps [A,B] + eps^2/2 [A,[A,B]] - ...

so that Ad(e^{eps*Dt}) shifts parameter-function arguments, t -> t - eps.
For elements with no Dt part the series terminates after the second term;
for a pure multiple of Dt it is summed in closed form as an exact argument
shift.  Mixed elements with a Dt part would need a non-terminating series
and are rejected.

Everything here is exact: coefficients are rationals (or rational
combinations of e^{rational}), so closure verdicts for the shipped
subalgebra catalog are decided by rational linear algebra, not numerics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exppoly import ExpPoly, as_fraction, parse_exppoly

__all__ = [
    "AlgebraElement",
    "AdjointSeriesError",
    "DependentGeneratorsError",
    "commutator",
    "adjoint",
    "SubalgebraSpec",
    "subalgebra_closed",
    "structure_subspaces",
    "standard_subalgebra",
    "subalgebra_names",
    "parse_element",
]


class AdjointSeriesError(ValueError):
    """The adjoint series does not terminate for the requested pair."""


class DependentGeneratorsError(ValueError):
    """A subalgebra spec lists linearly dependent generators."""


def _poly(x) -> ExpPoly:
    return ExpPoly.coerce(x)


@dataclass(frozen=True)
class AlgebraElement:
    """a*Dt + b*Dy + X(f) + c*F + Z(g) with exact coefficients."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    f: ExpPoly = field(default_factory=ExpPoly.zero)
    c: Fraction = Fraction(0)
    g: ExpPoly = field(default_factory=ExpPoly.zero)

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))
        object.__setattr__(self, "c", as_fraction(self.c))
        object.__setattr__(self, "f", _poly(self.f))
        object.__setattr__(self, "g", _poly(self.g))

    # vector-space structure
    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(
            self.a + other.a,
            self.b + other.b,
            self.f + other.f,
            self.c + other.c,
            self.g + other.g,
        )

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1) * other

    def __mul__(self, scalar) -> "AlgebraElement":
        s = as_fraction(scalar)
        return AlgebraElement(s * self.a, s * self.b, s * self.f, s * self.c, s * self.g)

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return (-1) * self

    @property
    def is_zero(self) -> bool:
        return (
            self.a == 0
            and self.b == 0
            and self.c == 0
            and self.f.is_zero
            and self.g.is_zero
        )

    # constructors for the basis
    @classmethod
    def Dt(cls, a=1):
        return cls(a=a)

    @classmethod
    def Dy(cls, b=1):
        return cls(b=b)

    @classmethod
    def X(cls, f):
        return cls(f=_poly(f))

    @classmethod
    def F(cls, c=1):
        return cls(c=c)

    @classmethod
    def Z(cls, g):
        return cls(g=_poly(g))

    def coordinates(self):
        """Exact sparse coordinates over Q for linear algebra."""
        coords = {}
        if self.a:
            coords[("a",)] = self.a
        if self.b:
            coords[("b",)] = self.b
        if self.c:
            coords[("c",)] = self.c
        for key, q in self.f.coordinates():
            coords[("X",) + key] = q
        for key, q in self.g.coordinates():
            coords[("Z",) + key] = q
        return coords

    def __str__(self):
        parts = []
        if self.a:
            parts.append(f"{self.a}*Dt" if self.a != 1 else "Dt")
        if self.b:
            parts.append(f"{self.b}*Dy" if self.b != 1 else "Dy")
        if not self.f.is_zero:
            parts.append(f"X({self.f})")
        if self.c:
            parts.append(f"{self.c}*F" if self.c != 1 else "F")
        if not self.g.is_zero:
            parts.append(f"Z({self.g})")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"AlgebraElement({self})"


def commutator(e1: AlgebraElement, e2: AlgebraElement) -> AlgebraElement:
    """[e1, e2]; bilinear and antisymmetric, lands in <X(f), Z(g)>."""
    f = e1.a * e2.f.diff() - e2.a * e1.f.diff()
    g = (
        e1.a * e2.g.diff()
        - e2.a * e1.g.diff()
        - e1.b * e2.f.diff()
        + e2.b * e1.f.diff()
    )
    return AlgebraElement(f=f, g=g)


def adjoint(e: AlgebraElement, epsilon, target: AlgebraElement) -> AlgebraElement:
    """Ad(e^{epsilon * e}) target, exactly.

    Pure time translations act by argument shift; elements without a Dt
    part have a terminating series (nilpotency of degree <= 2).  Mixed
    elements with a Dt part and anything else are rejected: their series
    does not terminate (it cannot occur for basis pairs).
    """
    eps = as_fraction(epsilon)
    if e.a != 0:
        if e.b != 0 or not e.f.is_zero or not e.g.is_zero:
            raise AdjointSeriesError(
                "adjoint series does not terminate for elements mixing Dt "
                "with Dy/X/Z parts; decompose the action instead"
            )
        delta = e.a * eps
        return AlgebraElement(
            target.a,
            target.b,
            target.f.shift(delta),
            target.c,
            target.g.shift(delta),
        )
    ad1 = commutator(e, target)
    ad2 = commutator(e, ad1)
    if not commutator(e, ad2).is_zero:
        raise AdjointSeriesError("adjoint series unexpectedly fails to terminate")
    return target + (-eps) * ad1 + (eps * eps / 2) * ad2


# ---------------------------------------------------------------------------
# Structure subspaces used by the point-symmetry-group computation
# ---------------------------------------------------------------------------

def structure_subspaces() -> dict:
    """Membership predicates for the characteristic subspaces of the algebra.

    Keys: ``g`` (everything), ``g_prime`` = <X, Z>, ``n`` = <Dy, X, F, Z>
    (the nil-radical), ``n_prime`` = <Z>, ``z`` = <X(1), F, Z(1)> (the
    center), and the intersections ``z_cap_g_prime`` = <X(1), Z(1)> and
    ``z_cap_n_prime`` = <Z(1)>.
    """

    def g(e):
        return True

    def g_prime(e):
        return e.a == 0 and e.b == 0 and e.c == 0

    def n(e):
        return e.a == 0

    def n_prime(e):
        return e.a == 0 and e.b == 0 and e.c == 0 and e.f.is_zero

    def z(e):
        return e.a == 0 and e.b == 0 and e.f.is_constant and e.g.is_constant

    def z_cap_g_prime(e):
        return z(e) and e.c == 0

    def z_cap_n_prime(e):
        return z(e) and e.c == 0 and e.f.is_zero

    return {
        "g": g,
        "g_prime": g_prime,
        "n": n,
        "n_prime": n_prime,
        "z": z,
        "z_cap_g_prime": z_cap_g_prime,
        "z_cap_n_prime": z_cap_n_prime,
    }


# ---------------------------------------------------------------------------
# Subalgebra specifications and closure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubalgebraSpec:
    name: str
    generators: tuple
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.generators:
            raise ValueError("a subalgebra needs at least one generator")


def _solve_exact(columns, target):
    """Solve sum_k c_k * columns[k] = target over Q; None if inconsistent.

    ``columns`` and ``target`` are sparse coordinate dicts.
    """
    keys = set(target)
    for col in columns:
        keys |= set(col)
    keys = sorted(keys)
    rows = [[col.get(k, Fraction(0)) for col in columns] + [target.get(k, Fraction(0))] for k in keys]
    ncols = len(columns)
    # Gaussian elimination with exact rationals
    pivot_row = 0
    pivots = []
    for col in range(ncols):
        sel = None
        for r in range(pivot_row, len(rows)):
            if rows[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        rows[pivot_row], rows[sel] = rows[sel], rows[pivot_row]
        pv = rows[pivot_row][col]
        rows[pivot_row] = [v / pv for v in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [v - factor * w for v, w in zip(rows[r], rows[pivot_row])]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == len(rows):
            break
    # consistency: rows with all-zero coefficients must have zero rhs
    for r in range(len(rows)):
        if all(v == 0 for v in rows[r][:ncols]) and rows[r][ncols] != 0:
            return None
    solution = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        solution[col] = rows[i][ncols]
    return solution


def _independent(columns) -> bool:
    """Rank of the sparse columns equals their count."""
    keys = sorted(set().union(*[set(c) for c in columns]))
    rows = [[col.get(k, Fraction(0)) for col in columns] for k in keys]
    rank = 0
    ncols = len(columns)
    for col in range(ncols):
        sel = None
        for r in range(rank, len(rows)):
            if rows[r][col] != 0:
                sel = r
                break
        if sel is None:
            return False
        rows[rank], rows[sel] = rows[sel], rows[rank]
        pv = rows[rank][col]
        rows[rank] = [v / pv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [v - factor * w for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return True


def subalgebra_closed(spec: SubalgebraSpec) -> dict:
    """Check closure of a subalgebra under the bracket, exactly.

    Returns ``{"closed": bool, "bracket_coords": {(i, j): coords-or-None}}``
    where ``coords`` expresses [e_i, e_j] in the generator basis.  Raises
    :class:`DependentGeneratorsError` if the listed generators are not
    linearly independent.
    """
    gens = list(spec.generators)
    columns = [g.coordinates() for g in gens]
    if not _independent(columns):
        raise DependentGeneratorsError(
            f"{spec.name}: generators are linearly dependent"
        )
    closed = True
    coords = {}
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            br = commutator(gens[i], gens[j])
            sol = _solve_exact(columns, br.coordinates())
            coords[(i, j)] = sol
            if sol is None:
                closed = False
    return {"closed": closed, "bracket_coords": coords}


# ---------------------------------------------------------------------------
# The shipped optimal lists of one- and two-dimensional subalgebras
# ---------------------------------------------------------------------------

def _f_or_default(value, default):
    return _poly(default if value is None else value)


def standard_subalgebra(name: str, **params) -> SubalgebraSpec:
    """Build a member of the shipped subalgebra catalog.

    One-dimensional families: ``A1_1(a, b)``, ``A1_2(f, b)``,
    ``A1_3(f, g, b)``.  Two-dimensional families: ``A2_1(kappa, nu, mu,
    rho)``, ``A2_2(nu, kappa, sigma != 0)``, ``A2_3(nu, kappa, mu, rho)``,
    ``A2_4(f, kappa, g, rho; kappa*rho = 0)`` and the families
    ``A2_-1 ... A2_-6`` that admit no classical reduction ansatz.
    Parameter-function arguments accept ExpPoly values or their textual
    syntax; plain numbers mean constant functions.
    """
    key = name.replace("A2_m", "A2_-")
    p = dict(params)

    def take(k, default=None):
        return p.pop(k) if k in p else default

    Dt, Dy = AlgebraElement.Dt, AlgebraElement.Dy
    X, F, Z = AlgebraElement.X, AlgebraElement.F, AlgebraElement.Z

    if key == "A1_1":
        a, b = as_fraction(take("a", 0)), as_fraction(take("b", 0))
        gens = (Dt() + Dy(a) + F(b),)
        used = {"a": a, "b": b}
    elif key == "A1_2":
        f = _f_or_default(take("f"), "t")
        b = as_fraction(take("b", 0))
        gens = (Dy() + X(f) + F(b),)
        used = {"f": f, "b": b}
    elif key == "A1_3":
        f = _f_or_default(take("f"), "1")
        g = _f_or_default(take("g"), "0")
        b = as_fraction(take("b", 0))
        gens = (X(f) + Z(g) + F(b),)
        used = {"f": f, "g": g, "b": b}
    elif key == "A2_1":
        kappa = as_fraction(take("kappa", 0))
        nu = as_fraction(take("nu", 0))
        mu = as_fraction(take("mu", 0))
        rho = as_fraction(take("rho", 0))
        gens = (Dt() + F(kappa), Dy() + X(nu) + Z(mu) + F(rho))
        used = {"kappa": kappa, "nu": nu, "mu": mu, "rho": rho}
    elif key == "A2_2":
        nu = as_fraction(take("nu", 0))
        kappa = as_fraction(take("kappa", 0))
        sigma = as_fraction(take("sigma", 1))
        if sigma == 0:
            raise ValueError("A2_2 requires sigma != 0")
        e = ExpPoly.exp(sigma)
        gens = (Dt() + Dy(nu) + F(kappa), X(e) + Z(nu * sigma * ExpPoly.t() * e))
        used = {"nu": nu, "kappa": kappa, "sigma": sigma}
    elif key == "A2_-1":
        nu = as_fraction(take("nu", 0))
        kappa = as_fraction(take("kappa", 0))
        sigma = as_fraction(take("sigma", 1))
        gens = (Dt() + Dy(nu) + F(kappa), Z(ExpPoly.exp(sigma)))
        used = {"nu": nu, "kappa": kappa, "sigma": sigma}
    elif key == "A2_3":
        nu = as_fraction(take("nu", 0))
        kappa = as_fraction(take("kappa", 0))
        mu = as_fraction(take("mu", 0))
        rho = as_fraction(take("rho", 0))
        gens = (Dt() + Dy(nu) + F(kappa), X(1) + Z(mu) + F(rho))
        used = {"nu": nu, "kappa": kappa, "mu": mu, "rho": rho}
    elif key == "A2_-2":
        nu = as_fraction(take("nu", 0))
        kappa = as_fraction(take("kappa", 0))
        rho = as_fraction(take("rho", 0))
        gens = (Dt() + Dy(nu) + F(kappa), Z(1) + F(rho))
        used = {"nu": nu, "kappa": kappa, "rho": rho}
    elif key == "A2_-3":
        nu = as_fraction(take("nu", 0))
        gens = (Dt() + Dy(nu), F())
        used = {"nu": nu}
    elif key == "A2_4":
        f = _f_or_default(take("f"), "t")
        kappa = as_fraction(take("kappa", 0))
        g = _f_or_default(take("g"), "0")
        rho = as_fraction(take("rho", 0))
        if kappa * rho != 0:
            raise ValueError("A2_4 requires kappa*rho = 0")
        gens = (Dy() + X(f) + F(kappa), X(1) + Z(g) + F(rho))
        used = {"f": f, "kappa": kappa, "g": g, "rho": rho}
    elif key == "A2_-4":
        f = _f_or_default(take("f"), "t")
        g = _f_or_default(take("g"), "0")
        gens = (Dy() + X(f), Z(g) + F())
        used = {"f": f, "g": g}
    elif key == "A2_-5":
        f = _f_or_default(take("f"), "t")
        kappa = as_fraction(take("kappa", 0))
        g = _f_or_default(take("g"), "1")
        if g.is_zero:
            raise ValueError("A2_-5 requires g not identically zero")
        gens = (Dy() + X(f) + F(kappa), Z(g))
        used = {"f": f, "kappa": kappa, "g": g}
    elif key == "A2_-6":
        f1 = _f_or_default(take("f1"), "1")
        g1 = _f_or_default(take("g1"), "0")
        kappa = as_fraction(take("kappa", 0))
        f2 = _f_or_default(take("f2"), "t")
        g2 = _f_or_default(take("g2"), "0")
        rho = as_fraction(take("rho", 0))
        gens = (X(f1) + Z(g1) + F(kappa), X(f2) + Z(g2) + F(rho))
        if not _independent([g.coordinates() for g in gens]):
            raise ValueError(
                "A2_-6 requires the tuples (f1, g1, kappa), (f2, g2, rho) "
                "to be linearly independent"
            )
        used = {"f1": f1, "g1": g1, "kappa": kappa, "f2": f2, "g2": g2, "rho": rho}
    else:
        raise ValueError(f"unknown subalgebra family {name!r}")

    if p:
        raise ValueError(f"{name}: unexpected parameters {sorted(p)}")
    return SubalgebraSpec(name=key, generators=gens, params=used)


def subalgebra_names() -> list[str]:
    return [
        "A1_1",
        "A1_2",
        "A1_3",
        "A2_1",
        "A2_2",
        "A2_-1",
        "A2_3",
        "A2_-2",
        "A2_-3",
        "A2_4",
        "A2_-4",
        "A2_-5",
        "A2_-6",
    ]


# ---------------------------------------------------------------------------
# Textual form of elements: "a*Dt + b*Dy + X(<exp-poly>) + c*F + Z(<exp-poly>)"
# ---------------------------------------------------------------------------

def parse_element(text: str) -> AlgebraElement:
    """Parse the CLI-facing element syntax; round-trips with ``str``."""
    out = AlgebraElement()
    for chunk, sign in _split_top_level(text):
        chunk = chunk.strip()
        if not chunk or chunk == "0":
            continue
        coeff = Fraction(1)
        body = chunk
        if "*" in chunk:
            head, _, rest = chunk.partition("*")
            head = head.strip()
            if rest.strip() in ("Dt", "Dy", "F") or rest.strip().startswith(("X(", "Z(")):
                try:
                    coeff = Fraction(head)
                    body = rest.strip()
                except ValueError:
                    body = chunk
        coeff *= sign
        if body == "Dt":
            out = out + AlgebraElement.Dt(coeff)
        elif body == "Dy":
            out = out + AlgebraElement.Dy(coeff)
        elif body == "F":
            out = out + AlgebraElement.F(coeff)
        elif body.startswith("X(") and body.endswith(")"):
            out = out + AlgebraElement.X(coeff * parse_exppoly(body[2:-1]))
        elif body.startswith("Z(") and body.endswith(")"):
            out = out + AlgebraElement.Z(coeff * parse_exppoly(body[2:-1]))
        else:
            raise ValueError(f"cannot parse element term {chunk!r}")
    return out


def _split_top_level(text: str):
    """Split on +/- outside parentheses, yielding (chunk, sign) pairs."""
    depth = 0
    start = 0
    sign = 1
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start:
            yield text[start:i], sign
            sign = 1 if ch == "+" else -1
            start = i + 1
        elif ch in "+-" and depth == 0 and i == start:
            if ch == "-":
                sign = -sign
            start = i + 1
    yield text[start:], sign
