"""The catalog of closed-form solutions of the two-layer model.

Each entry builds a :class:`~twolayerqg.solutions.SolutionExpr` whose
evaluator is an exact analytic formula (up to numerical quadrature of
one-dimensional integrals where the formula involves them), in layered
variables.  Every entry ships with a validity predicate for its parameter
branch and, where the formula degenerates, a singular-locus predicate.

Derivation sketches are recorded in the entries' ``provenance`` strings:
the families come from group-invariant reduction of the model under its
one- and two-dimensional symmetry subalgebras (traveling ansatz in one or
two similarity variables), followed by explicit integration.

Also here: exact polynomial kernels of the scale-invariant reduced ODE,
the iterated (Jordan-block) reduction chains for the linear baroclinic
equation, and numerically integrated profiles for the branches the closed
forms do not cover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .exppoly import ExpConst, ExpPoly, as_fraction
from .fields import DomainError
from .solutions import InvalidParameterError, SolutionExpr
from .special import cumulative_integral, expint_upper_scaled

__all__ = [
    "solution_names",
    "build_solution",
    "eval_solution",
    "solution_help",
    "polynomial_solutions",
    "polynomial_ode_residual",
    "extended_reduction_chain",
    "ChainResult",
    "whittaker_profile",
    "a21_general_profile",
    "a23_exponential_profile",
]

GUARD_REL = 1e-8  # relative width of the excluded band around singular denominators


def _num(params, key, default):
    return float(params.pop(key, default))


def _expoly(params, key, default):
    val = params.pop(key, default)
    if isinstance(val, ExpPoly):
        return val
    return ExpPoly.coerce(val)


def _fn_of_one(params, key, default):
    """A scalar-profile parameter: ExpPoly, callable, or constant."""
    val = params.pop(key, default)
    if isinstance(val, ExpPoly) or callable(val):
        return val
    return ExpPoly.coerce(val)


def _check_consumed(params, name):
    if params:
        raise InvalidParameterError(f"{name}: unknown parameters {sorted(params)}")


def _guard(value, scale, what):
    if abs(value) < GUARD_REL * max(abs(scale), 1.0):
        raise InvalidParameterError(
            f"parameter point too close to the singular denominator {what}"
        )


def _bb_to_layered(pp, pm):
    return 0.5 * (pp + pm), 0.5 * (pp - pm)


# ---------------------------------------------------------------------------
# Entry builders
# ---------------------------------------------------------------------------

def _build_rossby_classic(**params):
    k = _num(params, "k", 3)
    l = _num(params, "l", 2)
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    amp_bt = _num(params, "amp_bt", 1.0)
    amp_bc = _num(params, "amp_bc", 0.5)
    phase_bt = _num(params, "phase_bt", 0.0)
    phase_bc = _num(params, "phase_bc", 0.0)
    _check_consumed(params, "rossby_classic")
    K2 = k * k + l * l
    if K2 == 0:
        raise InvalidParameterError("rossby_classic: (k, l) must not both vanish")
    om_bt = beta * k / K2
    om_bc = beta * k / (K2 + 2 * F)

    def evaluate(t, X, Y):
        phase = k * np.asarray(X) + l * np.asarray(Y)
        pp = amp_bt * np.cos(phase + om_bt * np.asarray(t) + phase_bt)
        pm = amp_bc * np.cos(phase + om_bc * np.asarray(t) + phase_bc)
        return _bb_to_layered(pp, pm)

    return SolutionExpr(
        name="rossby_classic",
        evaluate=evaluate,
        params={
            "k": k, "l": l, "beta": beta, "F": F,
            "amp_bt": amp_bt, "amp_bc": amp_bc,
            "phase_bt": phase_bt, "phase_bc": phase_bc,
            "omega_bt": om_bt, "omega_bc": om_bc,
        },
        provenance=(
            "plane-wave reduction p = x - f*y with constant f = -l/k and "
            "imaginary exponent; barotropic and baroclinic modes with "
            "frequencies beta*k/(k^2+l^2) and beta*k/(k^2+l^2+2F)"
        ),
        metadata={"periodic": True, "default_t": 0.4},
    )


def _build_rossby_channel(**params):
    k = int(_num(params, "k", 1))
    n = int(_num(params, "n", 1))
    Lx = _num(params, "Lx", 2 * math.pi)
    Ly = _num(params, "Ly", 2 * math.pi)
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    amp_bt = _num(params, "amp_bt", 1.0)
    amp_bc = _num(params, "amp_bc", 0.0)
    _check_consumed(params, "rossby_channel")
    if k < 1 or n < 1:
        raise InvalidParameterError("rossby_channel: k and n must be positive integers")
    if amp_bt * amp_bc != 0:
        # The standing-in-y pattern superposes (k, +n) and (k, -n) plane
        # waves; with both modes active the cross bracket {psi+, psi-} of
        # non-parallel components survives, so only single-mode standing
        # waves are exact.
        raise InvalidParameterError(
            "rossby_channel: one of amp_bt, amp_bc must vanish (mixed "
            "standing modes are not an exact solution)"
        )
    kh = 2 * math.pi * k / Lx
    lh = math.pi * n / Ly
    K2 = kh * kh + lh * lh
    om_bt = beta * kh / K2
    om_bc = beta * kh / (K2 + 2 * F)

    def evaluate(t, X, Y):
        sy = np.sin(lh * np.asarray(Y))
        pp = amp_bt * np.cos(kh * np.asarray(X) + om_bt * np.asarray(t)) * sy
        pm = amp_bc * np.cos(kh * np.asarray(X) + om_bc * np.asarray(t)) * sy
        return _bb_to_layered(pp, pm)

    return SolutionExpr(
        name="rossby_channel",
        evaluate=evaluate,
        params={
            "k": k, "n": n, "Lx": Lx, "Ly": Ly, "beta": beta, "F": F,
            "amp_bt": amp_bt, "amp_bc": amp_bc,
            "omega_bt": om_bt, "omega_bc": om_bc,
        },
        provenance=(
            "superposition of two opposite-l plane waves producing a "
            "standing meridional structure sin(n*pi*y/Ly); satisfies rigid "
            "walls at y = 0 and y = Ly"
        ),
        metadata={"periodic": True, "channel_compatible": True, "default_t": 0.4},
    )


def _build_rossby_generalized(**params):
    f = _expoly(params, "f", "1/4 t")
    lam1 = _num(params, "lam1", 0.5)
    lam2 = _num(params, "lam2", 0.5)
    c1 = _num(params, "c1", 1.0)
    c2 = _num(params, "c2", 1.0)
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    t_range = params.pop("t_range", (-2.0, 2.0))
    _check_consumed(params, "rossby_generalized")
    if lam1 == 0 or lam2 == 0:
        raise InvalidParameterError("rossby_generalized: lam1 and lam2 must be nonzero")

    fp = f.diff()
    fpp = f.diff(2)
    H = ExpPoly.const(1) + f * f
    Hp = H.diff()
    hf_corr = (H * fpp).diff()  # (H f'')' shifts the barotropic part

    t0, t1 = float(t_range[0]), float(t_range[1])
    probe = np.linspace(t0, t1, 1024)
    den = 2 * F - lam1**2 * H(probe)
    sign_change = np.any(den[:-1] * den[1:] <= 0)
    near_zero = np.min(np.abs(den)) < GUARD_REL * max(
        2 * F, lam1**2 * float(np.max(H(probe)))
    )
    if sign_change or near_zero:
        raise InvalidParameterError(
            "rossby_generalized: 2F - lam1^2 * H(t) vanishes inside t_range "
            "(singular baroclinic integrand)"
        )
    I1 = cumulative_integral(lambda q: 1.0 / H(q), t0, t1)
    I2 = cumulative_integral(
        lambda q: (2 * Hp(q) * F + beta * lam1 * H(q)) / ((2 * F - lam1**2 * H(q)) * H(q)),
        t0,
        t1,
    )
    # antiderivative constants are gauge (they rescale c1, c2); anchor at t0
    anchor = (0.0, 0.0)

    def evaluate(t, X, Y):
        t = np.asarray(t, dtype=float)
        if np.any(t < t0) or np.any(t > t1):
            raise InvalidParameterError(
                f"rossby_generalized: requested t outside quadrature range {t_range}"
            )
        Ht = H(t)
        p = np.asarray(X) - f(t) * np.asarray(Y)
        what = (c1 / Ht) * np.exp(lam2 * p - (beta / lam2) * (I1(t) + anchor[0]))
        vhat = (c2 / Ht) * np.exp(lam1 * p + (I2(t) + anchor[1]))
        w = what + 2 * fpp(t) * p / beta - 2 * hf_corr(t) / beta**2
        pp = w - fp(t) * np.asarray(Y) ** 2
        return _bb_to_layered(pp, vhat)

    return SolutionExpr(
        name="rossby_generalized",
        evaluate=evaluate,
        params={
            "f": f, "lam1": lam1, "lam2": lam2, "c1": c1, "c2": c2,
            "beta": beta, "F": F, "t_range": (t0, t1),
        },
        provenance=(
            "reduction along p = x - f(t)*y with arbitrary smooth f; "
            "separable exponent in p with quadratures of 1/H and the "
            "baroclinic rate, H = 1 + f^2; time-dependent f adds the "
            "-f'(t) y^2 tilt to the barotropic part"
        ),
        metadata={"default_t": 0.4},
    )


def _build_a12_constant_coefficient(**params):
    fconst = _num(params, "f", -2.0 / 3.0)
    m = _num(params, "m", 0.5)
    lam = _num(params, "lam", 0.25)
    c = _num(params, "c", 1.0)
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    _check_consumed(params, "a12_constant_coefficient")
    H = 1 + fconst * fconst
    A = 1.0 / H
    if m == 0:
        raise InvalidParameterError("a12_constant_coefficient: m must be nonzero")
    _guard(m * m * H - 2 * F, max(m * m * H, 2 * F), "m^2*H - 2F")
    # prescribe a root m of the characteristic cubic and solve for kappa
    kappa = (lam * m * m + beta * m - 2 * A * F * lam) / (m**3 - 2 * A * F * m)

    def evaluate(t, X, Y):
        qbar = np.asarray(t) / H
        r = np.asarray(X) - fconst * np.asarray(Y) - kappa * qbar
        pm = (c / H) * np.exp(lam * qbar + m * r)
        pp = np.zeros_like(pm + np.asarray(X) * 0.0)
        return _bb_to_layered(pp, pm)

    return SolutionExpr(
        name="a12_constant_coefficient",
        evaluate=evaluate,
        params={
            "f": fconst, "m": m, "lam": lam, "c": c,
            "kappa": kappa, "beta": beta, "F": F,
        },
        provenance=(
            "constant-f reduction with the extra translation symmetry in the "
            "slow variable: traveling profile exp(m*(p - kappa*q) + lam*q), "
            "kappa fixed by the constant-coefficient characteristic cubic"
        ),
        metadata={"default_t": 0.4},
    )


def _build_a13_decoupled(**params):
    f = _expoly(params, "f", "1")
    g = _fn_of_one(params, "g", ExpPoly.t())
    zeta1 = _fn_of_one(params, "zeta1", np.sin)
    zeta2 = _fn_of_one(params, "zeta2", np.cos)
    theta1 = _fn_of_one(params, "theta1", ExpPoly.coerce("1/10"))
    theta2 = _fn_of_one(params, "theta2", ExpPoly.zero())
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    _check_consumed(params, "a13_decoupled")
    if f.is_zero:
        raise InvalidParameterError("a13_decoupled: f must not vanish identically")
    f_static = f.diff().is_zero
    if not f_static:
        # With time-dependent f the baroclinic profile must be affine in the
        # similarity variable: the exact residual of the full model is
        # 2 f f' zeta2''.  Anything else only solves the model when f' = 0.
        if not (isinstance(zeta2, ExpPoly) and zeta2.diff(2).is_zero):
            raise InvalidParameterError(
                "a13_decoupled: time-dependent f requires an affine zeta2 "
                "(the exact solution degenerates otherwise)"
            )
    if isinstance(g, ExpPoly):
        G = g.antiderivative()
        Gfun = G
    else:
        Gfun = cumulative_integral(lambda q: np.asarray(g(q), float), -4.0, 4.0)
    fp = f.diff()
    root2F = math.sqrt(2 * F)

    def ptilde(t, Y):
        return f(t) * np.asarray(Y) - Gfun(np.asarray(t))

    def singular_locus(t, X, Y):
        ft = np.abs(np.asarray(f(t), dtype=float))
        bad = ft < 1e-8
        shape = np.broadcast_shapes(np.shape(bad), np.shape(X))
        return np.broadcast_to(bad, shape)

    def evaluate(t, X, Y):
        t = np.asarray(t, dtype=float)
        pt = ptilde(t, Y)
        ft = np.asarray(f(t))
        pp = (
            np.asarray(zeta1(pt)) / ft**2
            - (beta / 3.0) * np.asarray(Y) ** 3
            - 2 * ((np.asarray(fp(t)) * np.asarray(Y) - np.asarray(g(t))) / ft) * np.asarray(X)
        )
        pm = (
            np.asarray(zeta2(pt))
            + np.asarray(theta1(t)) * np.exp(root2F * np.asarray(Y))
            + np.asarray(theta2(t)) * np.exp(-root2F * np.asarray(Y))
        )
        return _bb_to_layered(pp, pm)

    return SolutionExpr(
        name="a13_decoupled",
        evaluate=evaluate,
        params={
            "f": f, "g": g, "zeta1": zeta1, "zeta2": zeta2,
            "theta1": theta1, "theta2": theta2, "beta": beta, "F": F,
        },
        provenance=(
            "x-linear ansatz decoupled case: free profile zeta1 of the "
            "similarity variable f(t)*y - int g, cubic beta correction in y, "
            "and baroclinic exp(+-sqrt(2F) y) modes with free time factors"
        ),
        singular_locus=singular_locus,
        metadata={"default_t": 0.4},
    )


def _build_a21_constant_wind(**params):
    kappa = _num(params, "kappa", 1.0)
    nu = _num(params, "nu", 0.5)
    c1 = _num(params, "c1", 0.0)
    c2 = _num(params, "c2", 0.0)
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    _check_consumed(params, "a21_constant_wind")
    slope = 2 * F * kappa / beta

    def evaluate(t, X, Y):
        p = np.asarray(X) - nu * np.asarray(Y)
        kt = kappa * np.asarray(t)
        ones = np.ones_like(p + np.asarray(t))
        return slope * p + c1 + kt * ones, -slope * p + c2 - kt * ones

    gamma_minus = 2 * slope  # psi- = 2*slope*p + 2*kappa*t + (c1 - c2)
    return SolutionExpr(
        name="a21_constant_wind",
        evaluate=evaluate,
        params={"kappa": kappa, "nu": nu, "c1": c1, "c2": c2, "beta": beta, "F": F},
        provenance=(
            "traveling reduction p = x - nu*y, fully singular case rho = mu = 0: "
            "stream functions linear in (x, y, t), a constant wind in both layers"
        ),
        metadata={
            "default_t": 0.4,
            "steady": True,
            "solver_background": {
                "gamma_plus": 0.0,
                "delta_plus": 0.0,
                "gamma_minus": gamma_minus,
                "delta_minus": -nu * gamma_minus,
                "alpha_minus": c1 - c2,
                "alpha_minus_rate": 2 * kappa,
            },
        },
    )


def _build_a21_exponential(**params):
    mu = _num(params, "mu", 1.0)
    kappa = _num(params, "kappa", 1.0)
    nu = _num(params, "nu", 0.0)
    c1 = _num(params, "c1", 0.5)
    c2 = _num(params, "c2", 0.5)
    c3 = _num(params, "c3", 0.0)
    c4 = _num(params, "c4", 0.0)
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    _check_consumed(params, "a21_exponential")
    if not mu > 0:
        raise InvalidParameterError(
            "a21_exponential requires mu > 0 (the oscillatory branch is "
            "a21_upper_rossby, the fully singular one a21_constant_wind)"
        )
    rate = math.sqrt(beta / (2 * mu * (1 + nu * nu)))
    slope = 2 * F * kappa / (2 * F * mu + beta)

    def evaluate(t, X, Y):
        p = np.asarray(X) - nu * np.asarray(Y)
        kt = kappa * np.asarray(t)
        v1 = c1 * np.exp(rate * p) + c2 * np.exp(-rate * p) + slope * p + c3
        v2 = -slope * p + c4
        ones = np.ones_like(p + np.asarray(t))
        return v1 + kt * ones + 2 * mu * np.asarray(Y), v2 - kt * ones

    return SolutionExpr(
        name="a21_exponential",
        evaluate=evaluate,
        params={
            "mu": mu, "kappa": kappa, "nu": nu,
            "c1": c1, "c2": c2, "c3": c3, "c4": c4, "beta": beta, "F": F,
        },
        provenance=(
            "traveling reduction, semi-coupled branch rho = mu > 0: real "
            "exponentials exp(+-sqrt(beta/(2 mu (1+nu^2))) p) in the upper "
            "layer over a constant-wind lower layer"
        ),
        metadata={"default_t": 0.4},
    )


def _build_a21_upper_rossby(**params):
    mu = _num(params, "mu", -1.0)
    kappa = _num(params, "kappa", 1.0)
    nu = _num(params, "nu", 0.0)
    c1 = _num(params, "c1", 1.0)
    c2 = _num(params, "c2", 0.0)
    c3 = _num(params, "c3", 0.0)
    c4 = _num(params, "c4", 0.0)
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    _check_consumed(params, "a21_upper_rossby")
    if not mu < 0:
        raise InvalidParameterError("a21_upper_rossby requires mu < 0")
    amu = -mu
    _guard(2 * F * amu - beta, max(2 * F * amu, beta), "2F|mu| - beta")
    freq = math.sqrt(beta / (2 * amu * (1 + nu * nu)))
    slope = 2 * F * kappa / (2 * F * amu - beta)

    def evaluate(t, X, Y):
        p = np.asarray(X) - nu * np.asarray(Y)
        kt = kappa * np.asarray(t)
        v1 = c1 * np.cos(freq * p) + c2 * np.sin(freq * p) - slope * p + c3
        v2 = slope * p + c4
        ones = np.ones_like(p + np.asarray(t))
        return v1 + kt * ones + 2 * mu * np.asarray(Y), v2 - kt * ones

    return SolutionExpr(
        name="a21_upper_rossby",
        evaluate=evaluate,
        params={
            "mu": mu, "kappa": kappa, "nu": nu,
            "c1": c1, "c2": c2, "c3": c3, "c4": c4, "beta": beta, "F": F,
        },
        provenance=(
            "traveling reduction, oscillatory branch rho = mu < 0: a single "
            "stationary wave in the upper layer over a constant wind below"
        ),
        metadata={"default_t": 0.4},
    )


def _build_a22_expintegral(**params):
    nu = _num(params, "nu", 1.0)
    sigma = _num(params, "sigma", 1.0)
    kappa = _num(params, "kappa", 1.0)
    c1 = _num(params, "c1", 0.0)
    c2 = _num(params, "c2", 0.0)
    c3 = _num(params, "c3", 0.0)
    c4 = _num(params, "c4", 0.0)
    c5 = _num(params, "c5", 0.0)
    c6 = _num(params, "c6", 0.0)
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    _check_consumed(params, "a22_expintegral")
    if sigma == 0:
        raise InvalidParameterError("a22_expintegral requires sigma != 0")
    a = math.sqrt(2 * F)

    def u_of(t, Y):
        # u = nu + sigma*p with p = y - nu*t
        return nu + sigma * (np.asarray(Y) - nu * np.asarray(t))

    def singular_locus(t, X, Y):
        return u_of(t, Y) <= 1e-10

    def evaluate(t, X, Y):
        t = np.asarray(t, dtype=float)
        p = np.asarray(Y) - nu * t
        u = nu + sigma * p
        if np.any(u <= 0):
            raise InvalidParameterError(
                "a22_expintegral: nu + sigma*p <= 0 hits the logarithmic branch "
                "point; the solution is defined on nu + sigma*p > 0"
            )
        lnu = np.log(u)
        v1 = (
            (nu / sigma) * beta * lnu * (p**2 + 2 * (nu / sigma) * p + (nu / sigma) ** 2)
            - (beta / 3.0)
            * (p**3 + (9 * nu / (2 * sigma)) * p**2 + (6 * nu**2 / sigma**2) * p
               + (3 * nu**3 / (2 * sigma**3)))
            + c1 * p**2 + c2 * p + c3
        )
        z = (a / sigma) * u
        ei_part = expint_upper_scaled(z) + expint_upper_scaled(-z)
        v2 = (
            (kappa / sigma) * (2 * lnu + ei_part)
            + c4 * np.exp(a * p) + c5 * np.exp(-a * p) + c6
        )
        pp = v1 - 2 * sigma * p * np.asarray(X)
        pm = v2 + 2 * kappa * t * np.ones_like(pp)
        return _bb_to_layered(pp, pm)

    return SolutionExpr(
        name="a22_expintegral",
        evaluate=evaluate,
        params={
            "nu": nu, "sigma": sigma, "kappa": kappa,
            "c1": c1, "c2": c2, "c3": c3, "c4": c4, "c5": c5, "c6": c6,
            "beta": beta, "F": F,
        },
        provenance=(
            "two-dimensional reduction with exponential-in-t symmetry: cubic "
            "log profile in the barotropic part and the exponential-integral "
            "pair E(z)e^z + E(-z)e^{-z} in the baroclinic part, on the branch "
            "nu + sigma*p > 0"
        ),
        singular_locus=singular_locus,
        metadata={"default_t": 0.25},
    )


def _build_a23_trigonometric(**params):
    nu = _num(params, "nu", 1.0)
    mu = _num(params, "mu", 1.0)
    rho = _num(params, "rho", 1.0)
    kappa = _num(params, "kappa", 1.0)
    c1 = _num(params, "c1", 0.0)
    c2 = _num(params, "c2", 0.0)
    c3 = _num(params, "c3", 0.0)
    c4 = _num(params, "c4", 0.0)
    A1 = _num(params, "A1", 1.0)
    A2 = _num(params, "A2", 0.0)
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    _check_consumed(params, "a23_trigonometric")
    if rho == 0:
        raise InvalidParameterError("a23_trigonometric requires rho != 0")
    dm = nu - mu
    gamma2 = -2 * F * (dm * dm / rho + rho)
    gamma1 = dm * dm / rho - rho
    _guard(gamma1, max(abs(dm * dm / rho), abs(rho)), "gamma1")
    if not gamma2 / gamma1 > 0:
        raise InvalidParameterError(
            "a23_trigonometric: violated branch predicate gamma2/gamma1 > 0 "
            "(the other branch is exponential; see a23_exponential_profile)"
        )
    freq = math.sqrt(gamma2 / gamma1)
    d3 = 2 * F * beta * mu * dm / (3 * rho)
    d2 = -2 * c1 * F * dm / rho
    d1 = -2 * ((beta * mu + c2 * F) * dm / rho - (2 * F * kappa - beta * rho))
    d0 = 2 * (c1 - c3 * F) * dm / rho + c4

    def v1_of(p):
        return (
            A1 * np.sin(freq * p) + A2 * np.cos(freq * p)
            - (d3 * p**3 + d2 * p**2 + d1 * p + d0) / gamma2
            + (gamma1 / gamma2**2) * (6 * d3 * p + 2 * d2)
        )

    def evaluate(t, X, Y):
        t = np.asarray(t, dtype=float)
        p = np.asarray(Y) - nu * t
        v1 = v1_of(p)
        v2 = (dm * v1 - beta * mu * p**3 / 3 + c1 * p**2 + c2 * p + c3) / rho
        pp = v1 + 2 * mu * np.asarray(X)
        pm = v2 + 2 * kappa * t * np.ones_like(pp) + 2 * rho * np.asarray(X)
        return _bb_to_layered(pp, pm)

    return SolutionExpr(
        name="a23_trigonometric",
        evaluate=evaluate,
        params={
            "nu": nu, "mu": mu, "rho": rho, "kappa": kappa,
            "c1": c1, "c2": c2, "c3": c3, "c4": c4, "A1": A1, "A2": A2,
            "beta": beta, "F": F, "gamma1": gamma1, "gamma2": gamma2,
        },
        provenance=(
            "two-dimensional reduction with x-linear fields in both modes: "
            "meridional traveling wave sin/cos(sqrt(gamma2/gamma1) p) over a "
            "cubic polynomial tail, on the branch gamma2/gamma1 > 0"
        ),
        metadata={"default_t": 0.4},
    )


def _build_a24_polynomial(**params):
    f = _expoly(params, "f", "exp(1/2 t)")
    kappa = _num(params, "kappa", 1.0)
    rho = _num(params, "rho", 0.0)
    c = _num(params, "c", 0.0)
    theta = _fn_of_one(params, "theta", ExpPoly.zero())
    beta = _num(params, "beta", 1.0)
    F = _num(params, "F", 1.0)
    _check_consumed(params, "a24_polynomial")
    if kappa * rho != 0:
        raise InvalidParameterError(
            "a24_polynomial: violated subalgebra constraint kappa*rho = 0"
        )
    fp = f.diff()
    g = f.diff(2)  # compatibility constraint: the gauge profile is f''/beta

    def evaluate(t, X, Y):
        t = np.asarray(t, dtype=float)
        gv = np.asarray(g(t)) / beta
        fv = np.asarray(f(t))
        fpv = np.asarray(fp(t))
        Ya = np.asarray(Y)
        Xa = np.asarray(X)
        pp = np.asarray(theta(t)) - fpv * Ya**2 - 2 * gv * (fv * Ya - Xa)
        pm = (
            -(2 * kappa / beta) * fpv
            + (beta * rho / F) * t
            + c
            + 2 * kappa * Ya
            - 2 * rho * (fv * Ya - Xa)
        ) * np.ones_like(pp)
        return _bb_to_layered(pp, pm)

    return SolutionExpr(
        name="a24_polynomial",
        evaluate=evaluate,
        params={
            "f": f, "kappa": kappa, "rho": rho, "c": c, "theta": theta,
            "beta": beta, "F": F,
        },
        provenance=(
            "stationary-similarity reduction in p = t with the compatibility "
            "constraint g = f''/beta: polynomial fields with time-dependent "
            "coefficients, gauge profile theta(t) free"
        ),
        metadata={"default_t": 0.4},
    )


def _build_appendix_chain(**params):
    m = int(_num(params, "m", 3))
    lam = params.pop("lam", Fraction(1))
    component = int(_num(params, "component", m))
    c = params.pop("c", None)
    amp = _num(params, "amp", 1.0)
    _check_consumed(params, "appendix_chain")
    if not 1 <= component <= m:
        raise InvalidParameterError("appendix_chain: 1 <= component <= m required")
    if c is None:
        c = tuple(Fraction(1) for _ in range(m))
    chain = extended_reduction_chain(m, lam, ExpPoly.const(1), c, (-4.0, 4.0))
    v = chain.functions[component - 1]

    def evaluate(t, X, Y):
        pm = amp * v(np.asarray(X, float), np.asarray(t, float))
        pp = np.zeros_like(pm + np.asarray(Y) * 0.0)
        return _bb_to_layered(pp, pm)

    return SolutionExpr(
        name=f"appendix_chain_m{m}",
        evaluate=evaluate,
        params={"m": m, "lam": lam, "c": tuple(c), "component": component, "amp": amp,
                "beta": 1.0, "F": 1.0},
        provenance=(
            "iterated Jordan-block reduction of the linear baroclinic "
            "equation with A = 1 (beta = F = 1): component "
            f"{component} of the length-{m} chain, lifted to the full model "
            "as a purely baroclinic x-t field"
        ),
        metadata={"default_t": 0.4, "chain": chain},
    )


_REGISTRY = {
    "rossby_classic": _build_rossby_classic,
    "rossby_channel": _build_rossby_channel,
    "rossby_generalized": _build_rossby_generalized,
    "a12_constant_coefficient": _build_a12_constant_coefficient,
    "a13_decoupled": _build_a13_decoupled,
    "a21_constant_wind": _build_a21_constant_wind,
    "a21_exponential": _build_a21_exponential,
    "a21_upper_rossby": _build_a21_upper_rossby,
    "a22_expintegral": _build_a22_expintegral,
    "a23_trigonometric": _build_a23_trigonometric,
    "a24_polynomial": _build_a24_polynomial,
    "appendix_chain": _build_appendix_chain,
}


def solution_names() -> list[str]:
    return sorted(_REGISTRY)


def build_solution(name: str, **params) -> SolutionExpr:
    try:
        builder = _REGISTRY[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown solution {name!r}; available: {', '.join(solution_names())}"
        ) from None
    return builder(**params)


def eval_solution(name: str, params: dict, t, x, y):
    """Evaluate a named catalog solution at (t, x, y); layered variables."""
    sol = build_solution(name, **dict(params))
    return sol.evaluate(t, x, y)


def solution_help() -> list[tuple[str, str]]:
    """(name, provenance) for every entry with default parameters."""
    out = []
    for name in solution_names():
        try:
            sol = build_solution(name)
            out.append((name, sol.provenance))
        except Exception as exc:  # pragma: no cover - defensive
            out.append((name, f"unavailable: {exc}"))
    return out


# ---------------------------------------------------------------------------
# Polynomial kernels of the scale-invariant reduced ODE
# ---------------------------------------------------------------------------

def polynomial_solutions(lambda_k: int, kappa_F, beta, max_degree: int = 8):
    """Exact polynomial kernel of

        r v''' + (lam + 2) v'' + (beta - 2*kF*r) v' - 2*kF*(lam + 2) v = 0

    at lam = -lambda_k (a positive integer), over the rationals.  Returns a
    list of coefficient vectors (ascending powers, Fractions); empty if no
    polynomial solution of degree <= max_degree exists.
    """
    if lambda_k < 1:
        raise InvalidParameterError("lambda_k must be a positive integer")
    k = int(lambda_k)
    kF = as_fraction(kappa_F)
    b = as_fraction(beta)
    d = int(max_degree)
    # residual coefficient of r^n:
    #   (n+2)(n+1)(n+2-k) a_{n+2} + beta (n+1) a_{n+1} - 2 kF (n+2-k) a_n
    rows = []
    for nn in range(d + 1):
        row = [Fraction(0)] * (d + 1)
        if nn + 2 <= d:
            row[nn + 2] += Fraction((nn + 2) * (nn + 1) * (nn + 2 - k))
        if nn + 1 <= d:
            row[nn + 1] += b * (nn + 1)
        row[nn] += -2 * kF * (nn + 2 - k)
        rows.append(row)
    return _nullspace(rows, d + 1)


def polynomial_ode_residual(coeffs, lambda_k: int, kappa_F, beta):
    """Exact residual coefficients of the reduced ODE on a rational polynomial."""
    k = int(lambda_k)
    kF = as_fraction(kappa_F)
    b = as_fraction(beta)
    a = [as_fraction(v) for v in coeffs]
    d = len(a) - 1
    res = {}
    for nn in range(d + 1):
        total = Fraction(0)
        if nn + 2 <= d:
            total += Fraction((nn + 2) * (nn + 1) * (nn + 2 - k)) * a[nn + 2]
        if nn + 1 <= d:
            total += b * (nn + 1) * a[nn + 1]
        total += -2 * kF * (nn + 2 - k) * a[nn]
        if total != 0:
            res[nn] = total
    return res


def _nullspace(rows, ncols):
    """Kernel basis of a rational matrix via Gauss-Jordan elimination."""
    mat = [list(r) for r in rows]
    nrows = len(mat)
    pivots = {}
    rank = 0
    for col in range(ncols):
        sel = None
        for r in range(rank, nrows):
            if mat[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        mat[rank], mat[sel] = mat[sel], mat[rank]
        pv = mat[rank][col]
        mat[rank] = [v / pv for v in mat[rank]]
        for r in range(nrows):
            if r != rank and mat[r][col] != 0:
                factor = mat[r][col]
                mat[r] = [v - factor * w for v, w in zip(mat[r], mat[rank])]
        pivots[col] = rank
        rank += 1
    basis = []
    free = [c for c in range(ncols) if c not in pivots]
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for col, r in pivots.items():
            vec[col] = -mat[r][fc]
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# Extended (Jordan-block) reduction chains for the linear baroclinic equation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainResult:
    """Chain of solutions v^a(p, q) of v_ppq - 2 (A v)_q + v_p = 0.

    ``functions[a-1]`` evaluates v^a; ``phis[b-1]`` the profile functions
    phi^b(q); ``zeta`` the integrating exponent.  ``exact`` marks the fully
    symbolic path (constant A, rational lambda).
    """

    functions: tuple
    phis: tuple
    zeta: object
    exact: bool
    lam: object


def extended_reduction_chain(m: int, lam, A, c, q_range) -> ChainResult:
    """Build the length-m chain for the m-fold copy of the linear equation.

    ``A`` is the (positive) coefficient profile: a constant / constant
    ExpPoly gives the exact symbolic path; a callable of q is integrated by
    adaptive quadrature to 1e-10.  A complex ``lam`` returns the real and
    imaginary parts as two real chains: ``(ChainResult_re, ChainResult_im)``.
    """
    if m < 1:
        raise InvalidParameterError("extended_reduction_chain needs m >= 1")
    if len(c) < m:
        raise InvalidParameterError("need one integration constant per chain slot")
    q0, q1 = float(q_range[0]), float(q_range[1])

    if isinstance(lam, complex):
        chain = _chain_numeric(m, lam, A, c, q0, q1)
        re = ChainResult(
            tuple(_wrap_part(fn, np.real) for fn in chain.functions),
            tuple(_wrap_part(fn, np.real) for fn in chain.phis),
            chain.zeta, False, lam,
        )
        im = ChainResult(
            tuple(_wrap_part(fn, np.imag) for fn in chain.functions),
            tuple(_wrap_part(fn, np.imag) for fn in chain.phis),
            chain.zeta, False, lam,
        )
        return re, im

    if isinstance(A, ExpPoly) and A.is_constant or isinstance(A, (int, float, Fraction)):
        Aconst = A.constant_value().rational_value() if isinstance(A, ExpPoly) else as_fraction(A)
        return _chain_exact(m, as_fraction(lam), Aconst, c, q0, q1)
    return _chain_numeric(m, float(lam), A, c, q0, q1)


def _chain_exact(m, lam, Aconst, c, q0, q1) -> ChainResult:
    den = 2 * Aconst - lam * lam
    if den == 0:
        raise InvalidParameterError(
            "extended_reduction_chain: 2A - lambda^2 = 0 (denominator root)"
        )
    # zeta = -lam (q - qm) / den, anchored at the window midpoint (the
    # anchor is pure gauge but controls the numerical scale of the chain)
    qm = (as_fraction(q0) + as_fraction(q1)) / 2
    rate = -lam / den
    e_minus_zeta = ExpPoly({-rate: (ExpConst.e_power(rate * qm),)})
    e_plus_zeta = ExpPoly({rate: (ExpConst.e_power(-rate * qm),)})
    zeta_poly = ExpPoly.monomial(rate, 1) + ExpPoly.const(-rate * qm)

    phis = [as_fraction(c[0]) * e_minus_zeta]
    for k in range(2, m + 1):
        prev = phis[-1]
        integrand = (prev + 2 * lam * prev.diff()) * e_plus_zeta
        if k >= 3:
            integrand = integrand + phis[-2].diff() * e_plus_zeta
        integrand = integrand * (Fraction(1) / den)
        J = integrand.antiderivative()
        J0 = J.eval_exact(qm)
        Jn = J - ExpPoly({Fraction(0): (J0,)})
        phis.append(as_fraction(c[k - 1]) * e_minus_zeta + e_minus_zeta * Jn)

    functions = tuple(_chain_component(lam, phis, a) for a in range(1, m + 1))
    return ChainResult(functions, tuple(_expoly_callable(p) for p in phis),
                       zeta_poly, True, lam)


def _expoly_callable(p: ExpPoly):
    return lambda q: p(np.asarray(q, dtype=float))


def _chain_component(lam, phis, a):
    lamf = complex(lam) if isinstance(lam, complex) else float(lam)
    parts = [(phis[b - 1], a - b, 1.0 / math.factorial(a - b)) for b in range(1, a + 1)]

    def v(p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        total = 0.0
        for phi, power, fact in parts:
            total = total + np.asarray(phi(q)) * p**power * fact
        return np.exp(lamf * p) * total

    return v


def _chain_numeric(m, lam, A, c, q0, q1) -> ChainResult:
    Afun = (lambda q: np.asarray(A(np.asarray(q, float)), dtype=float)) if callable(A) else (
        lambda q: np.full_like(np.asarray(q, float), float(A))
    )
    dense = np.linspace(q0, q1, 4097)
    Av = Afun(dense)
    den = 2 * Av - (lam * lam if not isinstance(lam, complex) else lam * lam)
    if np.min(np.abs(den)) < 1e-10 * max(1.0, float(np.max(np.abs(den)))):
        idx = int(np.argmin(np.abs(den)))
        raise InvalidParameterError(
            f"extended_reduction_chain: denominator 2A - lambda^2 has a root "
            f"near q = {dense[idx]:.6g}"
        )
    from scipy.interpolate import CubicSpline

    Aspline = CubicSpline(dense, Av)
    Aq = Aspline.derivative()
    cc = [complex(v) if isinstance(lam, complex) else float(v) for v in c]

    zeta_raw = cumulative_integral(
        lambda q: (2 * Aq(q) - lam) / (2 * Aspline(q) - lam * lam), q0, q1
    )
    qm = 0.5 * (q0 + q1)
    zshift = zeta_raw(qm)
    zeta = lambda q: zeta_raw(q) - zshift  # anchored at the midpoint, as above

    def phi_factory(values):
        spline = CubicSpline(dense, values)
        return spline

    phis = []
    phi1 = cc[0] * np.exp(-zeta(dense))
    phis.append(phi_factory(phi1))
    for k in range(2, m + 1):
        prev = phis[-1]
        prev_d = prev.derivative()
        if k >= 3:
            prev2_d = phis[-2].derivative()
            integrand = lambda q: (
                (prev(q) + 2 * lam * prev_d(q) + prev2_d(q))
                / (2 * Aspline(q) - lam * lam)
                * np.exp(zeta(q))
            )
        else:
            integrand = lambda q: (
                (prev(q) + 2 * lam * prev_d(q))
                / (2 * Aspline(q) - lam * lam)
                * np.exp(zeta(q))
            )
        J_raw = cumulative_integral(integrand, q0, q1)
        Jm = J_raw(qm)
        vals = cc[k - 1] * np.exp(-zeta(dense)) + np.exp(-zeta(dense)) * (
            J_raw(dense) - Jm
        )
        phis.append(phi_factory(vals))

    functions = tuple(_chain_component(lam, phis, a) for a in range(1, m + 1))
    return ChainResult(functions, tuple(phis), zeta, False, lam)


def _wrap_part(fn, part):
    def wrapped(*args):
        return part(fn(*args))

    return wrapped


# ---------------------------------------------------------------------------
# Numerically integrated profiles for branches without shipped closed forms
# ---------------------------------------------------------------------------

def whittaker_profile(kappa_F: float, beta: float, r_range, c3: float = 0.0,
                      amp: float = 1.0):
    """The lam = -2 scale-invariant profile by numeric integration.

    The reduced ODE degenerates to r v''' + (beta - 2 kF r) v' = 0; with
    w = v' this is r w'' + (beta - 2 kF r) w = 0, integrated from
    series-consistent data at small r (w ~ a1 r - a1 beta r^2/2 + ...).
    Returns a callable v(r) on ``r_range``; its ODE residual is the test
    oracle for the antiderivative-form solution.
    """
    r0, r1 = float(r_range[0]), float(r_range[1])
    if not 0 < r0 < r1:
        raise InvalidParameterError("whittaker_profile needs 0 < r0 < r1")
    eps = min(r0, 1e-3)
    # series w = sum a_n r^n with a0 = 0, recursion
    # (n+1) n a_{n+1} + beta a_n - 2 kF a_{n-1} = 0
    a = [0.0, amp]
    for n in range(1, 12):
        nxt = (2 * kappa_F * a[n - 1] - beta * a[n]) / ((n + 1) * n)
        a.append(nxt)
    w_eps = sum(an * eps**n for n, an in enumerate(a))
    wp_eps = sum(n * an * eps ** (n - 1) for n, an in enumerate(a) if n >= 1)

    def rhs(r, y):
        w, wp = y
        return [wp, -(beta - 2 * kappa_F * r) * w / r]

    sol = solve_ivp(rhs, (eps, r1), [w_eps, wp_eps], rtol=1e-11, atol=1e-13,
                    dense_output=True)
    if not sol.success:
        raise DomainError(f"whittaker_profile: integration failed: {sol.message}")

    grid = np.linspace(eps, r1, 4097)
    w_vals = sol.sol(grid)[0]
    from scipy.interpolate import CubicSpline

    wspline = CubicSpline(grid, w_vals)
    vspline = wspline.antiderivative()

    def v(r):
        r = np.asarray(r, dtype=float)
        if np.any(r < eps) or np.any(r > r1):
            raise DomainError("whittaker_profile: r outside the integrated range")
        return c3 + vspline(r)

    return v


def a21_general_profile(mu, rho, kappa, nu, beta, F, p_range,
                        init=(1.0, 0.0, 0.5, 0.0), consts=(0.0, 0.0)):
    """Nonsingular traveling reduction, solved as the integrated 2nd-order system.

    Requires rho != +-mu.  ``init`` = (v1, v1', v2, v2') at the left end of
    ``p_range``; ``consts`` are the two integration constants.  Returns
    (v1, v2) callables; the third-order reduced system is the test oracle.
    """
    if abs(rho - mu) < 1e-12 or abs(rho + mu) < 1e-12:
        raise InvalidParameterError(
            "a21_general_profile: rho = +-mu are the singular branches with "
            "their own closed-form entries"
        )
    common = 1 + nu * nu
    C1, C2 = consts

    def rhs(p, y):
        v1, v1p, v2, v2p = y
        coupl = F * mu * (v1 - v2) - F * rho * (v1 + v2) - 2 * F * kappa * p
        v1pp = (coupl + beta * v1 - C1) / ((rho + mu) * common)
        v2pp = (C2 + coupl - beta * v2) / ((rho - mu) * common)
        return [v1p, v1pp, v2p, v2pp]

    p0, p1 = float(p_range[0]), float(p_range[1])
    sol = solve_ivp(rhs, (p0, p1), list(init), rtol=1e-11, atol=1e-13,
                    dense_output=True)
    if not sol.success:
        raise DomainError(f"a21_general_profile: integration failed: {sol.message}")

    def v1(p):
        return sol.sol(np.asarray(p, float))[0]

    def v2(p):
        return sol.sol(np.asarray(p, float))[2]

    return v1, v2


def a23_exponential_profile(nu, mu, rho, kappa, beta, F, p_range,
                            consts=(0.0, 0.0, 0.0, 0.0), init=(1.0, 0.0)):
    """The gamma2/gamma1 < 0 branch of the x-linear traveling reduction.

    Ships as a numeric solve only: v1'' = -(gamma2 v1 + cubic)/gamma1 from
    ``init`` = (v1, v1') at the left end, v2 recovered from the integrated
    first equation.  Returns (v1, v2) callables.
    """
    if rho == 0:
        raise InvalidParameterError("a23_exponential_profile requires rho != 0")
    dm = nu - mu
    gamma2 = -2 * F * (dm * dm / rho + rho)
    gamma1 = dm * dm / rho - rho
    if gamma1 == 0 or gamma2 / gamma1 > 0:
        raise InvalidParameterError(
            "a23_exponential_profile: branch predicate gamma2/gamma1 < 0 violated"
        )
    c1, c2, c3, c4 = consts
    d3 = 2 * F * beta * mu * dm / (3 * rho)
    d2 = -2 * c1 * F * dm / rho
    d1 = -2 * ((beta * mu + c2 * F) * dm / rho - (2 * F * kappa - beta * rho))
    d0 = 2 * (c1 - c3 * F) * dm / rho + c4

    def rhs(p, y):
        v1, v1p = y
        poly = d3 * p**3 + d2 * p**2 + d1 * p + d0
        return [v1p, -(gamma2 * v1 + poly) / gamma1]

    p0, p1 = float(p_range[0]), float(p_range[1])
    sol = solve_ivp(rhs, (p0, p1), list(init), rtol=1e-11, atol=1e-13,
                    dense_output=True)
    if not sol.success:
        raise DomainError(f"a23_exponential_profile: integration failed: {sol.message}")

    def v1(p):
        return sol.sol(np.asarray(p, float))[0]

    def v2(p):
        p = np.asarray(p, float)
        return (dm * v1(p) - beta * mu * p**3 / 3 + c1 * p**2 + c2 * p + c3) / rho

    return v1, v2
