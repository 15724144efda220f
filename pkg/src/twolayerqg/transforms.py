"""The finite point-symmetry group acting on analytic solutions.

A transform carries the parameter bundle

    t~ = eps1*t + T0,   x~ = eps1*x + f(t),   y~ = eps2*y + Y0,
    psi-~ = eps3*psi- + Psi0,
    psi+~ = eps2*psi+ - 2*eps1*eps2*f'(t)*y + g(t),

with eps_i = +-1, real shifts, and smooth f, g.  Solutions are transformed
symbolically at the evaluator level (argument change plus the affine field
correction); nothing is ever resampled on a grid, so orbit residual tests
see only the discretization error of the verification stencils.

f and g may be exponential polynomials (exact composition arithmetic) or
arbitrary callables wrapped in :class:`CallableTimeFunction`; the group
operations compose callables lazily.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exppoly import ExpPoly, as_fraction
from .solutions import SolutionExpr

__all__ = [
    "PointTransform",
    "CallableTimeFunction",
    "compose",
    "apply_to_solution",
    "apply_discrete",
    "DISCRETE_SYMMETRIES",
]


class CallableTimeFunction:
    """A smooth function of t given by callables (value, derivative).

    Mirrors the slice of the ExpPoly interface the transform group needs:
    ``__call__``, ``diff``, ``compose_affine``, addition and scalar
    multiplication.  Without an explicit derivative a second-order central
    difference (h = 1e-6) stands in, which degrades orbit-test accuracy
    from exact to ~1e-9.
    """

    def __init__(self, fn, derivative=None):
        self._fn = fn
        self._dfn = derivative

    def __call__(self, t):
        return self._fn(np.asarray(t, dtype=float))

    def diff(self):
        if self._dfn is not None:
            return CallableTimeFunction(self._dfn)
        h = 1e-6
        return CallableTimeFunction(lambda t: (self._fn(t + h) - self._fn(t - h)) / (2 * h))

    def compose_affine(self, a, b):
        a, b = float(a), float(b)
        dfn = None
        if self._dfn is not None:
            dfn = lambda t, d=self._dfn: a * d(a * t + b)
        return CallableTimeFunction(lambda t: self._fn(a * t + b), dfn)

    def __add__(self, other):
        other = _timefn(other)
        dfn = None
        if self._dfn is not None:
            od = other.diff()
            dfn = lambda t: self._dfn(t) + od(t)
        return CallableTimeFunction(lambda t: self._fn(t) + other(t), dfn)

    __radd__ = __add__

    def __mul__(self, scalar):
        s = float(scalar)
        dfn = None if self._dfn is None else (lambda t: s * self._dfn(t))
        return CallableTimeFunction(lambda t: s * self._fn(t), dfn)

    __rmul__ = __mul__

    @property
    def is_zero(self):
        return False  # undecidable for black-box callables


def _timefn(x):
    """Coerce to an ExpPoly when possible, else wrap the callable."""
    if isinstance(x, (ExpPoly, CallableTimeFunction)):
        return x
    if callable(x):
        return CallableTimeFunction(x)
    return ExpPoly.coerce(x)


def _fn_is_zero(f) -> bool:
    return isinstance(f, ExpPoly) and f.is_zero


@dataclass(frozen=True)
class PointTransform:
    """Parameter bundle of one finite point symmetry."""

    eps1: int = 1
    eps2: int = 1
    eps3: int = 1
    T0: float = 0.0
    Y0: float = 0.0
    Psi0_minus: float = 0.0
    f: object = field(default_factory=ExpPoly.zero)
    g: object = field(default_factory=ExpPoly.zero)

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3"):
            if getattr(self, name) not in (1, -1):
                raise ValueError(f"{name} must be +1 or -1")
        object.__setattr__(self, "f", _timefn(self.f))
        object.__setattr__(self, "g", _timefn(self.g))

    @classmethod
    def identity(cls) -> "PointTransform":
        return cls()

    # -- group structure -------------------------------------------------
    def inverse(self) -> "PointTransform":
        e1, e2, e3 = self.eps1, self.eps2, self.eps3
        shift_back = lambda fn: fn.compose_affine(e1, -e1 * self.T0)
        f_inv = (-e1) * shift_back(self.f)
        g_inv = (-e2) * shift_back(self.g) + (-2 * e1 * e2 * self.Y0) * shift_back(
            self.f.diff()
        )
        return PointTransform(
            eps1=e1,
            eps2=e2,
            eps3=e3,
            T0=-e1 * self.T0,
            Y0=-e2 * self.Y0,
            Psi0_minus=-e3 * self.Psi0_minus,
            f=f_inv,
            g=g_inv,
        )

    def is_identity(self, tol: float = 0.0, sample=(-1.0, 0.0, 0.5, 2.0)) -> bool:
        if (self.eps1, self.eps2, self.eps3) != (1, 1, 1):
            return False
        if max(abs(self.T0), abs(self.Y0), abs(self.Psi0_minus)) > tol:
            return False
        if _fn_is_zero(self.f) and _fn_is_zero(self.g):
            return True
        ts = np.asarray(sample)
        return bool(
            np.max(np.abs(self.f(ts))) <= tol and np.max(np.abs(self.g(ts))) <= tol
        )


def compose(tr_outer: PointTransform, tr_inner: PointTransform) -> PointTransform:
    """The transform acting as ``tr_outer after tr_inner`` (function composition).

    Parameters are obtained by substituting the inner coordinate change into
    the outer one; for ExpPoly data the result is exact.
    """
    a, b = tr_inner, tr_outer
    e1, e2, e3 = a.eps1 * b.eps1, a.eps2 * b.eps2, a.eps3 * b.eps3
    sub = lambda fn: fn.compose_affine(a.eps1, a.T0)  # t -> eps1_a * t + T0_a
    f_new = b.eps1 * a.f + sub(b.f)
    g_new = (
        b.eps2 * a.g
        + sub(b.g)
        + (-2 * b.eps1 * b.eps2 * a.Y0) * sub(b.f.diff())
    )
    return PointTransform(
        eps1=e1,
        eps2=e2,
        eps3=e3,
        T0=b.eps1 * a.T0 + b.T0,
        Y0=b.eps2 * a.Y0 + b.Y0,
        Psi0_minus=b.eps3 * a.Psi0_minus + b.Psi0_minus,
        f=f_new,
        g=g_new,
    )


def apply_to_solution(tr: PointTransform, s: SolutionExpr) -> SolutionExpr:
    """Pull a solution back through the transform; the result solves the model.

    The returned evaluator satisfies: evaluating it at the transformed
    coordinates reproduces the transformed field values of ``s``.
    """
    e1, e2, e3 = tr.eps1, tr.eps2, tr.eps3
    f, g = tr.f, tr.g
    fprime = f.diff()
    T0, Y0, Psi0 = tr.T0, tr.Y0, tr.Psi0_minus

    def pullback_coords(T, X, Y):
        t = e1 * (np.asarray(T, dtype=float) - T0)
        x = e1 * (np.asarray(X, dtype=float) - np.asarray(f(t)))
        y = e2 * (np.asarray(Y, dtype=float) - Y0)
        return t, x, y

    def evaluate(T, X, Y):
        t, x, y = pullback_coords(T, X, Y)
        p1, p2 = s.evaluate(t, x, y)
        pp, pm = p1 + p2, p1 - p2
        PP = e2 * pp - 2 * e1 * e2 * np.asarray(fprime(t)) * y + np.asarray(g(t))
        PM = e3 * pm + Psi0
        return 0.5 * (PP + PM), 0.5 * (PP - PM)

    locus = None
    if s.singular_locus is not None:
        base_locus = s.singular_locus

        def locus(T, X, Y):
            t, x, y = pullback_coords(T, X, Y)
            return base_locus(t, x, y)

    return SolutionExpr(
        name=f"{s.name}*transform",
        evaluate=evaluate,
        params=dict(s.params),
        provenance=s.provenance + " (acted on by a point symmetry)",
        singular_locus=locus,
        metadata={},
    )


DISCRETE_SYMMETRIES = ("mirror_tx", "mirror_y", "layer_swap")


def apply_discrete(sym: str, s: SolutionExpr) -> SolutionExpr:
    """The three mirror involutions, in layered variables:

    ``mirror_tx``:   psi~i(t, x, y) =  psi_i(-t, -x, y)
    ``mirror_y``:    psi~i(t, x, y) = -psi_i(t, x, -y)
    ``layer_swap``:  (psi~1, psi~2) = (psi2, psi1)

    In barotropic/baroclinic variables these act as (t,x) reversal fixing
    (psi+, psi-), the (y, psi+, psi-) sign flip, and psi- -> -psi-.
    """
    if sym not in DISCRETE_SYMMETRIES:
        raise ValueError(f"unknown discrete symmetry {sym!r}; choose from {DISCRETE_SYMMETRIES}")

    if sym == "mirror_tx":
        mapper = lambda t, X, Y: (-np.asarray(t, float), -np.asarray(X, float), Y)
        post = lambda p1, p2: (p1, p2)
    elif sym == "mirror_y":
        mapper = lambda t, X, Y: (t, X, -np.asarray(Y, float))
        post = lambda p1, p2: (-p1, -p2)
    else:
        mapper = lambda t, X, Y: (t, X, Y)
        post = lambda p1, p2: (p2, p1)

    def evaluate(t, X, Y):
        tt, xx, yy = mapper(t, X, Y)
        return post(*s.evaluate(tt, xx, yy))

    locus = None
    if s.singular_locus is not None:
        base_locus = s.singular_locus

        def locus(t, X, Y):
            tt, xx, yy = mapper(t, X, Y)
            return base_locus(tt, xx, yy)

    return SolutionExpr(
        name=f"{s.name}*{sym}",
        evaluate=evaluate,
        params=dict(s.params),
        provenance=s.provenance + f" (acted on by {sym})",
        singular_locus=locus,
        metadata={},
    )
