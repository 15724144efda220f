"""Boundary conditions for the channel geometries and symmetry compatibility.

The physical settings are a channel with rigid walls y = 0, Y that is
infinite or periodic in x, and a closed rectangle with additional walls
x = -L, L.  The wall conditions are

    d(psi_i)/dx = 0          on  y in {0, Y},
    d/dt [mean_x d(psi_i)/dy] = 0   on  y in {0, Y}   (circulation),

plus the x-wall analogues (d(psi_i)/dy = 0 and conserved x-circulation)
for the closed rectangle.

``transform_preserves_bvp`` decides whether a point symmetry maps this
boundary value problem to itself.  The analytic predicate encodes the
classification: channel settings (infinite or x-periodic) admit exactly
the transforms with eps2 = +1, Y0 = 0 and f'' = 0 (time shifts, gauges,
x shifts, and Galilean boosts); the closed rectangle additionally forces
f = 0, leaving only time shifts and gauges, so the only group-invariant
solutions realizable there are stationary.  The empirical mode checks the
same statement on a probe: walls must map onto walls and the transformed
probe's wall residuals must stay below tolerance.  Both modes agree on
transforms from the continuous group (all eps = +1), which is the group
the classification concerns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exppoly import ExpPoly
from .fields import DomainError
from .model import LayerState
from .transforms import PointTransform

__all__ = [
    "BoundarySetting",
    "bc_residual",
    "transform_preserves_bvp",
]

KINDS = ("infinite", "periodic_channel", "limited_rectangle")
EMPIRICAL_TOL = 1e-6  # an order above discretization noise at default grids


@dataclass(frozen=True)
class BoundarySetting:
    kind: str
    L: float = math.inf  # east-west half-length (finite for the rectangle)
    Y: float = math.pi   # channel width

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"setting kind must be one of {KINDS}")
        if not self.Y > 0:
            raise DomainError("channel width Y must be positive")
        if self.kind == "limited_rectangle" and not math.isfinite(self.L):
            raise DomainError("limited_rectangle requires a finite east-west length L")
        if self.kind == "limited_rectangle" and not self.L > 0:
            raise DomainError("east-west half-length L must be positive")


# ---------------------------------------------------------------------------
# Wall residuals of grid states
# ---------------------------------------------------------------------------

def _ddx_rows(values, hx, periodic=True):
    if periodic:
        return (np.roll(values, -1, axis=-1) - np.roll(values, 1, axis=-1)) / (2 * hx)
    out = np.empty_like(values)
    out[..., 1:-1] = (values[..., 2:] - values[..., :-2]) / (2 * hx)
    out[..., 0] = (-3 * values[..., 0] + 4 * values[..., 1] - values[..., 2]) / (2 * hx)
    out[..., -1] = (3 * values[..., -1] - 4 * values[..., -2] + values[..., -3]) / (2 * hx)
    return out


def _wall_dy(values, hy, row):
    if row == 0:
        return (-3 * values[0] + 4 * values[1] - values[2]) / (2 * hy)
    return (3 * values[-1] - 4 * values[-2] + values[-3]) / (2 * hy)


def bc_residual(
    state: LayerState,
    setting: BoundarySetting,
    prev_state: LayerState,
    dt: float,
) -> dict:
    """Wall-condition residuals of a state (and circulation rates vs prev).

    States live on channel-topology grids (walls on the first/last rows).
    For the closed rectangle, the first/last columns are interpreted as the
    x walls (sample the closed interval [-L, L] onto the nx columns).
    Returns one entry per condition and layer plus ``max_violation``.
    """
    if dt <= 0:
        raise DomainError("bc_residual needs dt > 0 for circulation rates")
    grid = state.grid
    if grid.topology != "channel":
        raise DomainError(
            "bc_residual expects states on a channel grid (walls on rows)"
        )
    if state.grid != prev_state.grid:
        raise DomainError("bc_residual: states must share one grid")
    limited = setting.kind == "limited_rectangle"
    periodic_x = not limited
    cur = state.to_layered()
    prev = prev_state.to_layered()
    out = {}
    for name, fld, fld_prev in (
        ("psi1", cur.psi1.values, prev.psi1.values),
        ("psi2", cur.psi2.values, prev.psi2.values),
    ):
        dx = _ddx_rows(fld, grid.hx, periodic=periodic_x)
        out[f"{name}_dx_south"] = float(np.max(np.abs(dx[0])))
        out[f"{name}_dx_north"] = float(np.max(np.abs(dx[-1])))
        for wall, row in (("south", 0), ("north", -1)):
            circ = float(np.mean(_wall_dy(fld, grid.hy, row)))
            circ_prev = float(np.mean(_wall_dy(fld_prev, grid.hy, row)))
            out[f"{name}_circ_rate_{wall}"] = abs(circ - circ_prev) / dt
        if limited:
            dy = np.empty_like(fld)
            dy[1:-1] = (fld[2:] - fld[:-2]) / (2 * grid.hy)
            dy[0] = _wall_dy(fld, grid.hy, 0)
            dy[-1] = _wall_dy(fld, grid.hy, -1)
            out[f"{name}_dy_west"] = float(np.max(np.abs(dy[:, 0])))
            out[f"{name}_dy_east"] = float(np.max(np.abs(dy[:, -1])))
            for wall, col in (("west", 0), ("east", -1)):
                cx = _ddx_rows(fld, grid.hx, periodic=False)
                cxp = _ddx_rows(fld_prev, grid.hx, periodic=False)
                rate = abs(float(np.mean(cx[:, col])) - float(np.mean(cxp[:, col]))) / dt
                out[f"{name}_circx_rate_{wall}"] = rate
    out["max_violation"] = max(v for k, v in out.items() if k != "max_violation")
    return out


# ---------------------------------------------------------------------------
# Symmetry compatibility
# ---------------------------------------------------------------------------

def _fn_second_derivative_zero(f) -> bool:
    return isinstance(f, ExpPoly) and f.diff(2).is_zero


def _fn_zero(f) -> bool:
    return isinstance(f, ExpPoly) and f.is_zero


def _predicate(tr: PointTransform, setting: BoundarySetting):
    """(preserved, witness) by the symmetry classification of the walls."""
    witness = {}
    if not isinstance(tr.f, ExpPoly):
        raise DomainError(
            "the analytic predicate needs an exponential-polynomial f; use "
            "mode='empirical' for black-box parameter functions"
        )
    checks = []
    checks.append(("eps2 = +1 (y reflection moves the walls)", tr.eps2 == 1))
    checks.append(("Y0 = 0 (y shift moves the walls)", tr.Y0 == 0))
    if setting.kind in ("infinite", "periodic_channel"):
        checks.append(
            ("f'' = 0 (acceleration breaks wall circulation)",
             _fn_second_derivative_zero(tr.f))
        )
    else:
        checks.append(
            ("f = 0 (x shifts and boosts move or break the x walls)",
             _fn_zero(tr.f))
        )
    failed = [label for label, ok in checks if not ok]
    witness["failed_conditions"] = failed
    return (not failed), witness


class _Probe:
    """A wall-compatible probe field with closed-form derivatives.

    Not itself a solution of the model; the boundary conditions are
    statements about fields and their wall traces, so a generic smooth
    wall-compatible field is the sharper test.  Its x profile has zero
    x-mean (so the base wall circulations vanish identically despite the
    time-dependent amplitude) and, on the rectangle, vanishes to second
    order at the x walls.
    """

    def __init__(self, setting: BoundarySetting):
        self.setting = setting
        Y = setting.Y
        self.ly = 2 * math.pi / Y  # generic interior structure in y
        if setting.kind == "limited_rectangle":
            self.L = setting.L
        else:
            self.L = math.pi if not math.isfinite(setting.L) else setting.L
        self.kx = math.pi / self.L

    def _fx(self, x):
        if self.setting.kind == "limited_rectangle":
            # sin^2(u) cos(u), u = pi (x+L)/(2L): value and slope vanish at
            # the x walls, and the x-mean is exactly zero
            u = 0.5 * self.kx * (np.asarray(x) + self.L)
            return np.sin(u) ** 2 * np.cos(u)
        return np.cos(self.kx * np.asarray(x))

    def _dfx(self, x):
        if self.setting.kind == "limited_rectangle":
            u = 0.5 * self.kx * (np.asarray(x) + self.L)
            du = 0.5 * self.kx
            return du * (2 * np.sin(u) * np.cos(u) ** 2 - np.sin(u) ** 3)
        return -self.kx * np.sin(self.kx * np.asarray(x))

    def dpsi_plus(self, t, x, y):
        base = 1 + np.asarray(t) / 3
        return (
            base * self._dfx(x) * np.sin(self.ly * y),
            base * self._fx(x) * self.ly * np.cos(self.ly * y),
        )

    def dpsi_minus(self, t, x, y):
        base = 1 - np.asarray(t) / 4
        return (
            base * self._dfx(x) * np.sin(self.ly * y),
            base * self._fx(x) * self.ly * np.cos(self.ly * y),
        )


def _transformed_wall_residuals(tr: PointTransform, setting: BoundarySetting,
                                probe: _Probe, times):
    """Exact wall residuals of the transformed probe (no grid noise).

    The transformed fields are
        psi+~(T,X,Y) = eps2 psi+(t,x,y) - 2 eps1 eps2 f'(t) y + g(t),
        psi-~(T,X,Y) = eps3 psi-(t,x,y) + Psi0,
    with t = eps1(T - T0), x = eps1(X - f(t)), y = eps2(Y - Y0); their
    derivatives follow by the chain rule from the probe's closed forms.
    """
    e1, e2, e3 = tr.eps1, tr.eps2, tr.eps3
    fprime = tr.f.diff()
    Y = setting.Y
    limited = setting.kind == "limited_rectangle"
    L = probe.L
    nx = 129
    xs = np.linspace(-L, L, nx) if limited else np.linspace(-L, L, nx, endpoint=False)
    out = {}

    def fields_dx_dy(T, X, Yc):
        t = e1 * (np.asarray(T, float) - tr.T0)
        x = e1 * (np.asarray(X, float) - np.asarray(tr.f(t)))
        y = e2 * (np.asarray(Yc, float) - tr.Y0)
        ppx, ppy = probe.dpsi_plus(t, x, y)
        pmx, pmy = probe.dpsi_minus(t, x, y)
        # d/dX = eps1 d/dx; d/dY = eps2 d/dy (+ the shear correction in psi+)
        PP_X = e2 * ppx * e1
        PP_Y = e2 * ppy * e2 - 2 * e1 * e2 * np.asarray(fprime(t)) * e2
        PM_X = e3 * pmx * e1
        PM_Y = e3 * pmy * e2
        p1x, p1y = 0.5 * (PP_X + PM_X), 0.5 * (PP_Y + PM_Y)
        p2x, p2y = 0.5 * (PP_X - PM_X), 0.5 * (PP_Y - PM_Y)
        return (p1x, p1y), (p2x, p2y)

    # y walls: dpsi/dx = 0 and circulation conservation
    dxmax = 0.0
    circ_rate = 0.0
    for wall_y in (0.0, Y):
        circs = {1: [], 2: []}
        for T in times:
            (p1x, p1y), (p2x, p2y) = fields_dx_dy(T, xs, wall_y)
            dxmax = max(dxmax, float(np.max(np.abs(p1x))), float(np.max(np.abs(p2x))))
            circs[1].append(float(np.mean(p1y)))
            circs[2].append(float(np.mean(p2y)))
        for i in (1, 2):
            rates = np.diff(circs[i]) / np.diff(times)
            if len(rates):
                circ_rate = max(circ_rate, float(np.max(np.abs(rates))))
    out["wall_dpsi_dx"] = dxmax
    out["wall_circulation_rate"] = circ_rate

    if limited:
        ys = np.linspace(0.0, Y, 65)
        dymax = 0.0
        circx_rate = 0.0
        for wall_x in (-L, L):
            circs = {1: [], 2: []}
            for T in times:
                (p1x, p1y), (p2x, p2y) = fields_dx_dy(T, wall_x, ys)
                dymax = max(dymax, float(np.max(np.abs(p1y))), float(np.max(np.abs(p2y))))
                circs[1].append(float(np.mean(p1x)))
                circs[2].append(float(np.mean(p2x)))
            for i in (1, 2):
                rates = np.diff(circs[i]) / np.diff(times)
                if len(rates):
                    circx_rate = max(circx_rate, float(np.max(np.abs(rates))))
        out["xwall_dpsi_dy"] = dymax
        out["xwall_circulation_rate"] = circx_rate
    return out


def _domain_maps_to_itself(tr: PointTransform, setting: BoundarySetting) -> bool:
    walls = {0.0, setting.Y}
    mapped = {tr.eps2 * 0.0 + tr.Y0, tr.eps2 * setting.Y + tr.Y0}
    if any(min(abs(m - w) for w in walls) > 1e-12 for m in mapped):
        return False
    if setting.kind == "limited_rectangle":
        # x walls at -L, L must be fixed as a set at every time: requires
        # the x map X = eps1 x + f(t) to send {-L, L} to {-L, L}
        fvals = np.asarray(tr.f(np.linspace(-1.0, 2.0, 13)), dtype=float)
        if np.max(np.abs(fvals)) > 1e-12:
            return False
    return True


def transform_preserves_bvp(
    tr: PointTransform,
    setting: BoundarySetting,
    mode: str = "predicate",
    tol: float = EMPIRICAL_TOL,
) -> dict:
    """Does the transform map the boundary value problem to itself?

    Returns ``{"preserved": bool, "witness": {...}}``.  Mode ``predicate``
    decides from the transform parameters (f, g exponential polynomials);
    ``empirical`` applies the transform to a wall-compatible probe and
    measures the wall residuals (tolerance ``tol``), after checking that
    the walls map onto walls; ``both`` requires agreement and returns the
    combined verdict.
    """
    if mode not in ("predicate", "empirical", "both"):
        raise DomainError("mode must be predicate, empirical, or both")
    if mode in ("predicate", "both"):
        ok_p, witness_p = _predicate(tr, setting)
    if mode in ("empirical", "both"):
        probe = _Probe(setting)
        times = (0.15, 0.4, 0.75)
        if not _domain_maps_to_itself(tr, setting):
            ok_e = False
            witness_e = {"domain": "walls do not map onto walls"}
        else:
            residuals = _transformed_wall_residuals(tr, setting, probe, times)
            ok_e = max(residuals.values()) <= tol
            witness_e = residuals
    if mode == "predicate":
        return {"preserved": ok_p, "witness": witness_p}
    if mode == "empirical":
        return {"preserved": ok_e, "witness": witness_e}
    agree = ok_p == ok_e
    return {
        "preserved": ok_p and ok_e,
        "witness": {
            "predicate": witness_p,
            "empirical": witness_e,
            "modes_agree": agree,
        },
    }
