"""Potential vorticities, tendencies, and PDE residuals for the two-layer model.

Layered form (stream functions psi1, psi2):

    Q1_t + {psi1, Q1} = 0,      Q1 = lap(psi1) + beta*y - F*(psi1 - psi2),
    Q2_t + {psi2, Q2} = 0,      Q2 = lap(psi2) + beta*y + F*(psi1 - psi2).

Barotropic/baroclinic form (psi+ = psi1 + psi2, psi- = psi1 - psi2):

    Q+_t + (1/2)({psi+, Q+} + {psi-, Q-}) = 0,   Q+ = lap(psi+) + 2*beta*y,
    Q-_t + (1/2)({psi+, Q-} + {psi-, Q+}) = 0,   Q- = lap(psi-) - 2*F*psi-.

The 1/2 factors and sign conventions are pinned by the equivalence tests:
summing/differencing the layered tendencies must reproduce the
barotropic/baroclinic ones after the linear change of variables.

``pde_residual`` discretizes an *analytic* solution: it samples the stream
functions at t - dt, t, t + dt, forms Q_t by a central time difference and
the brackets by interior central differences (no wrap), and reports the
worst-case and RMS residual over interior nodes.  A two-cell halo is
excluded so every reported node uses full-order stencils.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (
    DomainError,
    Field2D,
    GridSpec,
    coordinate_fields,
    laplacian,
    poisson_bracket,
)

__all__ = [
    "ModelParams",
    "LayerState",
    "SingularEvaluationError",
    "potential_vorticity",
    "tendency",
    "pde_residual",
    "residual_record",
]

LAYERED = "layered"
BB = "barotropic_baroclinic"


class SingularEvaluationError(DomainError):
    """An analytic solution was requested at (or too near) its singular locus."""


@dataclass(frozen=True)
class ModelParams:
    """Rossby parameter beta and internal rotational Froude number F."""

    beta: float
    F: float

    def __post_init__(self):
        if not (self.beta > 0 and self.F > 0):
            raise DomainError("ModelParams requires beta > 0 and F > 0")


@dataclass(frozen=True)
class LayerState:
    """Two stream-function fields at one time, in either variable system.

    ``psi1``/``psi2`` hold (psi1, psi2) in the layered representation and
    (psi+, psi-) in the barotropic/baroclinic one.
    """

    t: float
    psi1: Field2D
    psi2: Field2D
    representation: str = LAYERED

    def __post_init__(self):
        if self.representation not in (LAYERED, BB):
            raise DomainError(f"unknown representation {self.representation!r}")
        if self.psi1.grid != self.psi2.grid:
            raise DomainError("both fields of a LayerState must share one grid")

    @property
    def grid(self) -> GridSpec:
        return self.psi1.grid

    def to_layered(self) -> "LayerState":
        if self.representation == LAYERED:
            return self
        return LayerState(
            self.t,
            (self.psi1 + self.psi2) * 0.5,
            (self.psi1 - self.psi2) * 0.5,
            LAYERED,
        )

    def to_barotropic_baroclinic(self) -> "LayerState":
        if self.representation == BB:
            return self
        return LayerState(self.t, self.psi1 + self.psi2, self.psi1 - self.psi2, BB)


def potential_vorticity(
    state: LayerState, params: ModelParams, scheme: str = "fd2"
) -> tuple[Field2D, Field2D]:
    """(Q1, Q2) or (Q+, Q-), matching the state's representation."""
    _, y = coordinate_fields(state.grid)
    if state.representation == LAYERED:
        shear = state.psi1 - state.psi2
        q1 = laplacian(state.psi1, scheme) + params.beta * y - params.F * shear
        q2 = laplacian(state.psi2, scheme) + params.beta * y + params.F * shear
        return q1, q2
    qp = laplacian(state.psi1, scheme) + 2 * params.beta * y
    qm = laplacian(state.psi2, scheme) - 2 * params.F * state.psi2
    return qp, qm


def tendency(
    state: LayerState, params: ModelParams, scheme: str = "fd2"
) -> tuple[Field2D, Field2D]:
    """Right-hand sides (dQ1/dt, dQ2/dt) or (dQ+/dt, dQ-/dt)."""
    qa, qb = potential_vorticity(state, params, scheme)
    if state.representation == LAYERED:
        return (
            -1 * poisson_bracket(state.psi1, qa, scheme),
            -1 * poisson_bracket(state.psi2, qb, scheme),
        )
    jpp = poisson_bracket(state.psi1, qa, scheme)
    jmm = poisson_bracket(state.psi2, qb, scheme)
    jpm = poisson_bracket(state.psi1, qb, scheme)
    jmp = poisson_bracket(state.psi2, qa, scheme)
    return (-0.5 * (jpp + jmm), -0.5 * (jpm + jmp))


# ---------------------------------------------------------------------------
# Residuals of analytic solutions
# ---------------------------------------------------------------------------

def _dx_i(v, hx):
    return (v[:, 2:] - v[:, :-2])[1:-1, :] / (2 * hx)


def _dy_i(v, hy):
    return (v[2:, :] - v[:-2, :])[:, 1:-1] / (2 * hy)


def _lap_i(v, hx, hy):
    d2x = (v[1:-1, 2:] - 2 * v[1:-1, 1:-1] + v[1:-1, :-2]) / hx**2
    d2y = (v[2:, 1:-1] - 2 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / hy**2
    return d2x + d2y


def _sample(solution, t, X, Y):
    psi1, psi2 = solution.evaluate(t, X, Y)
    psi1 = np.asarray(psi1, dtype=float)
    psi2 = np.asarray(psi2, dtype=float)
    if psi1.shape != X.shape or psi2.shape != X.shape:
        raise DomainError("solution evaluator must broadcast over the grid")
    if not (np.all(np.isfinite(psi1)) and np.all(np.isfinite(psi2))):
        raise SingularEvaluationError(
            f"solution {getattr(solution, 'name', '?')} evaluated to non-finite "
            f"values at t={t}"
        )
    return psi1, psi2


def _check_singular(solution, t, X, Y):
    locus = getattr(solution, "singular_locus", None)
    if locus is None:
        return
    hit = np.asarray(locus(t, X, Y))
    if np.any(hit):
        i = np.argwhere(hit)[0]
        raise SingularEvaluationError(
            f"solution {getattr(solution, 'name', '?')} is undefined on its "
            f"singular locus at t={t}, x={X[tuple(i)]:.6g}, y={Y[tuple(i)]:.6g}"
        )


def pde_residual(
    solution,
    params: ModelParams,
    grid: GridSpec,
    t: float,
    dt: float,
    form: str = LAYERED,
    halo: int = 2,
) -> tuple[float, float]:
    """(max_residual, rms_residual) of an analytic solution on a grid.

    ``solution`` must expose ``evaluate(t, X, Y) -> (psi1, psi2)`` in layered
    variables (vectorized over ndarrays) and may expose ``singular_locus``.
    ``form`` selects which pair of equations is discretized; both vanish on
    exact solutions, at the discretization order O(h^2 + dt^2).

    ``halo`` >= 2 is the number of boundary cells excluded from the report;
    convergence studies should scale it with the resolution so coarse and
    fine runs are judged on the same physical window.
    """
    if dt <= 0:
        raise DomainError("pde_residual requires dt > 0")
    if halo < 2:
        raise DomainError("pde_residual needs halo >= 2 (stencil support)")
    X, Y = grid.meshgrid()
    hx, hy = grid.hx, grid.hy
    beta, F = params.beta, params.F

    samples = {}
    for tau in (t - dt, t, t + dt):
        _check_singular(solution, tau, X, Y)
        samples[tau] = _sample(solution, tau, X, Y)

    def q_pair(tau):
        p1, p2 = samples[tau]
        if form == LAYERED:
            shear = (p1 - p2)[1:-1, 1:-1]
            qa = _lap_i(p1, hx, hy) + beta * Y[1:-1, 1:-1] - F * shear
            qb = _lap_i(p2, hx, hy) + beta * Y[1:-1, 1:-1] + F * shear
        else:
            pp, pm = p1 + p2, p1 - p2
            qa = _lap_i(pp, hx, hy) + 2 * beta * Y[1:-1, 1:-1]
            qb = _lap_i(pm, hx, hy) - 2 * F * pm[1:-1, 1:-1]
        return qa, qb

    qa_m, qb_m = q_pair(t - dt)
    qa_0, qb_0 = q_pair(t)
    qa_p, qb_p = q_pair(t + dt)
    qa_t = (qa_p - qa_m) / (2 * dt)
    qb_t = (qb_p - qb_m) / (2 * dt)

    p1, p2 = samples[t]
    if form == LAYERED:
        f1, f2 = p1, p2
    else:
        f1, f2 = p1 + p2, p1 - p2

    # bracket of the (offset-1) q arrays against the full psi arrays;
    # everything lands on the offset-2 interior
    def bracket(psi_full, q_off1):
        px = _dx_i(psi_full, hx)[1:-1, 1:-1]
        py = _dy_i(psi_full, hy)[1:-1, 1:-1]
        qx = _dx_i(q_off1, hx)
        qy = _dy_i(q_off1, hy)
        return px * qy - py * qx

    if form == LAYERED:
        r1 = qa_t[1:-1, 1:-1] + bracket(f1, qa_0)
        r2 = qb_t[1:-1, 1:-1] + bracket(f2, qb_0)
    else:
        r1 = qa_t[1:-1, 1:-1] + 0.5 * (bracket(f1, qa_0) + bracket(f2, qb_0))
        r2 = qb_t[1:-1, 1:-1] + 0.5 * (bracket(f1, qb_0) + bracket(f2, qa_0))

    res = np.stack([r1, r2])
    extra = halo - 2
    if extra > 0:
        res = res[:, extra:-extra, extra:-extra]
    if res.size == 0:
        raise DomainError("pde_residual: halo leaves no interior nodes")
    return float(np.max(np.abs(res))), float(np.sqrt(np.mean(res**2)))


def residual_record(
    name: str, grid: GridSpec, dt: float, max_res: float, l2_res: float
) -> str:
    """Single-line machine-readable residual report."""
    h = max(grid.hx, grid.hy)
    return (
        f"solution={name} grid={grid.nx}x{grid.ny} h={h:.17g} dt={dt:.17g} "
        f"max_res={max_res:.17g} l2_res={l2_res:.17g}"
    )
