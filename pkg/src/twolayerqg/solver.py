"""Time integration of the two-layer model in barotropic/baroclinic form.

The prognostic variables are the potential-vorticity perturbations

    q+ = lap(psi+),      q- = (lap - 2F) psi-,

advanced by

    q+_t = -1/2 ({psi+, q+} + {psi-, q-}) - beta psi+_x,
    q-_t = -1/2 ({psi+, q-} + {psi-, q+}) - beta psi-_x,

with psi recovered each substage by the spectral inversions (mu = 0 with
the zero-mean gauge for the barotropic part, mu = 2F for the baroclinic
part).  Schemes: classic RK4 (default, no artificial filtering) and
leapfrog with a Robert-Asselin filter (the meteorological standard; its
weak damping excludes it from conservation acceptance runs).

Several exact solutions carry stream-function parts that are affine in
(x, y) (uniform winds, uniform shears).  Those parts cannot live in the
periodic arrays, so a run may declare an :class:`AffineBackground` with

    B+/- = gamma*x + delta*y  (velocities u = -delta, v = gamma).

The advection of and by the background is added analytically to the
tendencies; the uniform part of q- (which is physical: a uniform psi-
feeds the baroclinic vorticity) lives in the k = 0 mode of the array and
evolves with the constant drift the model dictates.  Galilean boosts are
the special case delta+ = -2c.

Channel grids integrate the wall-vanishing subspace (FFT in x, sine modes
in y); initial states must vanish on the walls.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dstn, idstn

from .fields import DomainError, Field2D, GridSpec, coordinate_fields, ddx, ddy
from .model import BB, LayerState, ModelParams

__all__ = [
    "SolverConfig",
    "AffineBackground",
    "SolverBlowupError",
    "step",
    "run",
    "diagnostics",
    "RunResult",
    "DIAGNOSTICS_HEADER",
]

DIAGNOSTICS_HEADER = "step,t,energy,enstrophy1,enstrophy2,circ_south,circ_north"


class SolverBlowupError(DomainError):
    """NaN detected during integration; carries the last healthy step index."""

    def __init__(self, message, last_healthy_step):
        super().__init__(message)
        self.last_healthy_step = last_healthy_step


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    steps: int
    scheme: str = "rk4"
    ra_filter: float = 0.01
    dealias: bool = False

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError("SolverConfig: dt must be positive")
        if self.steps < 0:
            raise DomainError("SolverConfig: steps must be nonnegative")
        if self.scheme not in ("rk4", "leapfrog_ra"):
            raise DomainError("SolverConfig: scheme must be rk4 or leapfrog_ra")
        if not 0 <= self.ra_filter <= 0.1:
            raise DomainError("SolverConfig: ra_filter must lie in [0, 0.1]")


@dataclass(frozen=True)
class AffineBackground:
    """Affine stream-function parts B = gamma*x + delta*y per mode."""

    gamma_plus: float = 0.0
    delta_plus: float = 0.0
    gamma_minus: float = 0.0
    delta_minus: float = 0.0

    @classmethod
    def boost(cls, c: float) -> "AffineBackground":
        """Uniform zonal wind c in both layers (psi+ -> psi+ - 2*c*y)."""
        return cls(delta_plus=-2.0 * c)

    @property
    def is_zero(self) -> bool:
        return (
            self.gamma_plus == 0
            and self.delta_plus == 0
            and self.gamma_minus == 0
            and self.delta_minus == 0
        )

    def fields(self, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
        X, Y = grid.meshgrid()
        return (
            self.gamma_plus * X + self.delta_plus * Y,
            self.gamma_minus * X + self.delta_minus * Y,
        )


# ---------------------------------------------------------------------------
# Spectral backends
# ---------------------------------------------------------------------------

class _PeriodicBackend:
    def __init__(self, grid: GridSpec, params: ModelParams, dealias: bool):
        if grid.topology != "doubly_periodic":
            raise DomainError("periodic backend needs a doubly periodic grid")
        self.grid = grid
        self.params = params
        kx = 2 * np.pi * np.fft.fftfreq(grid.nx, d=grid.hx)
        ky = 2 * np.pi * np.fft.fftfreq(grid.ny, d=grid.hy)
        self.KX, self.KY = np.meshgrid(kx, ky)
        self.K2 = self.KX**2 + self.KY**2
        inv_lap = np.zeros_like(self.K2)
        nz = self.K2 > 0
        inv_lap[nz] = -1.0 / self.K2[nz]
        self.inv_lap = inv_lap  # zero-mean gauge at k = 0
        self.inv_helm = -1.0 / (self.K2 + 2 * params.F)
        if dealias:
            kmax_x = np.max(np.abs(kx)) * 2 / 3
            kmax_y = np.max(np.abs(ky)) * 2 / 3
            self.mask = (np.abs(self.KX) <= kmax_x) & (np.abs(self.KY) <= kmax_y)
        else:
            self.mask = None

    def dx(self, v):
        return np.real(np.fft.ifft2(1j * self.KX * np.fft.fft2(v)))

    def dy(self, v):
        return np.real(np.fft.ifft2(1j * self.KY * np.fft.fft2(v)))

    def psi_plus(self, qp):
        return np.real(np.fft.ifft2(self.inv_lap * np.fft.fft2(qp)))

    def psi_minus(self, qm):
        return np.real(np.fft.ifft2(self.inv_helm * np.fft.fft2(qm)))

    def q_plus(self, pp):
        return np.real(np.fft.ifft2(-self.K2 * np.fft.fft2(pp)))

    def q_minus(self, pm):
        return np.real(np.fft.ifft2(-(self.K2 + 2 * self.params.F) * np.fft.fft2(pm)))

    def _dealias(self, v):
        if self.mask is None:
            return v
        return np.real(np.fft.ifft2(self.mask * np.fft.fft2(v)))

    def jacobian(self, a, b):
        out = self.dx(a) * self.dy(b) - self.dy(a) * self.dx(b)
        return self._dealias(out)


class _ChannelBackend:
    """FFT in x, wall-vanishing sine modes in y, second-order FD for y slopes."""

    def __init__(self, grid: GridSpec, params: ModelParams, dealias: bool):
        self.grid = grid
        self.params = params
        nyn = grid.ny_nodes
        kx = 2 * np.pi * np.fft.fftfreq(grid.nx, d=grid.hx)
        self.kx = kx
        m = np.arange(1, nyn - 1)
        self.lam_y = (2 * np.cos(np.pi * m / (nyn - 1)) - 2) / grid.hy**2
        self.K2x = kx**2
        self.mask = None
        if dealias:
            self.mask = np.abs(kx) <= np.max(np.abs(kx)) * 2 / 3

    def dx(self, v):
        return np.real(np.fft.ifft(1j * self.kx[None, :] * np.fft.fft(v, axis=1), axis=1))

    def dy(self, v):
        out = np.empty_like(v)
        hy = self.grid.hy
        out[1:-1] = (v[2:] - v[:-2]) / (2 * hy)
        out[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * hy)
        out[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * hy)
        return out

    def _helm_solve(self, rhs, mu):
        # interior rows in the mixed FFT-x / DST-y basis
        fhat = np.fft.fft(rhs[1:-1], axis=1)
        shat = dstn(fhat, type=1, axes=[0])
        denom = -self.K2x[None, :] + self.lam_y[:, None] - mu
        shat = shat / denom
        out = np.zeros_like(rhs)
        out[1:-1] = np.real(np.fft.ifft(idstn(shat, type=1, axes=[0]), axis=1))
        return out

    def _apply(self, v, mu):
        fhat = np.fft.fft(v[1:-1], axis=1)
        shat = dstn(fhat, type=1, axes=[0])
        shat = shat * (-self.K2x[None, :] + self.lam_y[:, None] - mu)
        out = np.zeros_like(v)
        out[1:-1] = np.real(np.fft.ifft(idstn(shat, type=1, axes=[0]), axis=1))
        return out

    def psi_plus(self, qp):
        return self._helm_solve(qp, 0.0)

    def psi_minus(self, qm):
        return self._helm_solve(qm, 2 * self.params.F)

    def q_plus(self, pp):
        return self._apply(pp, 0.0)

    def q_minus(self, pm):
        return self._apply(pm, 2 * self.params.F)

    def _dealias(self, v):
        if self.mask is None:
            return v
        return np.real(np.fft.ifft(self.mask[None, :] * np.fft.fft(v, axis=1), axis=1))

    def jacobian(self, a, b):
        out = self.dx(a) * self.dy(b) - self.dy(a) * self.dx(b)
        return self._dealias(out)


def _make_backend(grid, params, dealias):
    if grid.topology == "doubly_periodic":
        return _PeriodicBackend(grid, params, dealias)
    return _ChannelBackend(grid, params, dealias)


# ---------------------------------------------------------------------------
# Tendencies and steppers
# ---------------------------------------------------------------------------

def _tendencies(be, params, bg: AffineBackground, qp, qm):
    # overflow here just propagates NaN/inf, which the step loop detects
    with np.errstate(over="ignore", invalid="ignore"):
        return _tendencies_raw(be, params, bg, qp, qm)


def _tendencies_raw(be, params, bg: AffineBackground, qp, qm):
    beta, F = params.beta, params.F
    pp = be.psi_plus(qp)
    pm = be.psi_minus(qm)
    ppx, ppy = be.dx(pp), be.dy(pp)
    pmx, pmy = be.dx(pm), be.dy(pm)
    qpx, qpy = be.dx(qp), be.dy(qp)
    qmx, qmy = be.dx(qm), be.dy(qm)

    jpp = be.jacobian(pp, qp)
    jmm = be.jacobian(pm, qm)
    jpm = be.jacobian(pp, qm)
    jmp = be.jacobian(pm, qp)

    gp, dp = bg.gamma_plus, bg.delta_plus
    gm, dm = bg.gamma_minus, bg.delta_minus

    tp = -0.5 * (
        jpp + jmm + 2 * beta * ppx
        + gp * qpy - dp * qpx + gm * qmy - dm * qmx
        - 2 * F * (dm * pmx - gm * pmy)
    )
    tm = -0.5 * (
        jpm + jmp + 2 * beta * pmx
        + gp * qmy - dp * qmx + gm * qpy - dm * qpx
        - 2 * F * (dm * ppx - gm * ppy)
    )
    # uniform drift of the baroclinic vorticity induced by the background
    tm = tm - 0.5 * (2 * beta * gm - 2 * F * (gp * dm - dp * gm))
    # the barotropic array stays zero-mean (gauge); its uniform drift is
    # -beta*gamma_plus and is tracked outside the array
    tp = tp - np.mean(tp)
    return tp, tm


@dataclass
class _RunState:
    qp: np.ndarray
    qm: np.ndarray
    t: float
    m_plus: float = 0.0


def _rk4_step(be, params, bg, st: _RunState, dt) -> _RunState:
    def f(qp, qm):
        return _tendencies(be, params, bg, qp, qm)

    k1p, k1m = f(st.qp, st.qm)
    k2p, k2m = f(st.qp + 0.5 * dt * k1p, st.qm + 0.5 * dt * k1m)
    k3p, k3m = f(st.qp + 0.5 * dt * k2p, st.qm + 0.5 * dt * k2m)
    k4p, k4m = f(st.qp + dt * k3p, st.qm + dt * k3m)
    qp = st.qp + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
    qm = st.qm + dt / 6 * (k1m + 2 * k2m + 2 * k3m + k4m)
    m_plus = st.m_plus - params.beta * bg.gamma_plus * dt
    return _RunState(qp, qm, st.t + dt, m_plus)


class _LeapfrogStepper:
    """Leapfrog with Robert-Asselin filtering; RK4 bootstraps the first step."""

    def __init__(self, be, params, bg, ra):
        self.be = be
        self.params = params
        self.bg = bg
        self.ra = ra
        self.prev: _RunState | None = None

    def step(self, st: _RunState, dt) -> _RunState:
        if self.prev is None:
            self.prev = st
            return _rk4_step(self.be, self.params, self.bg, st, dt)
        tp, tm = _tendencies(self.be, self.params, self.bg, st.qp, st.qm)
        qp_new = self.prev.qp + 2 * dt * tp
        qm_new = self.prev.qm + 2 * dt * tm
        # filter the center level
        qp_f = st.qp + self.ra * (qp_new - 2 * st.qp + self.prev.qp)
        qm_f = st.qm + self.ra * (qm_new - 2 * st.qm + self.prev.qm)
        m_plus = st.m_plus - self.params.beta * self.bg.gamma_plus * dt
        self.prev = _RunState(qp_f, qm_f, st.t, st.m_plus)
        return _RunState(qp_new, qm_new, st.t + dt, m_plus)


# ---------------------------------------------------------------------------
# Public interface
# ---------------------------------------------------------------------------

def _state_to_q(state: LayerState, params, be, bg: AffineBackground) -> _RunState:
    st = state.to_barotropic_baroclinic()
    Bp, Bm = bg.fields(state.grid)
    phip = st.psi1.values - Bp
    phim = st.psi2.values - Bm
    if state.grid.topology == "channel":
        if not bg.is_zero:
            raise DomainError("channel runs do not support affine backgrounds")
        wall = max(np.max(np.abs(phip[0])), np.max(np.abs(phip[-1])),
                   np.max(np.abs(phim[0])), np.max(np.abs(phim[-1])))
        scale = max(np.max(np.abs(phip)), np.max(np.abs(phim)), 1e-30)
        if wall > 1e-10 * scale:
            raise DomainError(
                "channel solver integrates wall-vanishing fields; the initial "
                "state has nonzero stream function on a wall"
            )
    phip = phip - np.mean(phip)
    return _RunState(be.q_plus(phip), be.q_minus(phim), float(state.t))


def _q_to_state(st: _RunState, grid, params, be, bg: AffineBackground) -> LayerState:
    Bp, Bm = bg.fields(grid)
    pp = be.psi_plus(st.qp) + Bp
    pm = be.psi_minus(st.qm) + Bm
    return LayerState(st.t, Field2D(grid, pp), Field2D(grid, pm), BB)


def _check_cfl(state: LayerState, cfg: SolverConfig, bg: AffineBackground):
    # differencing the affine background across the periodic wrap would
    # produce spurious huge velocities; treat it analytically instead
    grid = state.grid
    st = state.to_barotropic_baroclinic()
    Bp, Bm = bg.fields(grid)
    umax = 0.0
    for vals in (st.psi1.values - Bp, st.psi2.values - Bm):
        f = Field2D(grid, vals)
        umax = max(umax, np.max(np.abs(ddy(f).values)), np.max(np.abs(ddx(f).values)))
    umax += max(
        abs(bg.gamma_plus) + abs(bg.delta_plus),
        abs(bg.gamma_minus) + abs(bg.delta_minus),
    )
    h = min(grid.hx, grid.hy)
    if cfg.dt * umax / h > 0.5:
        warnings.warn(
            f"advective CFL number {cfg.dt * umax / h:.2f} exceeds 0.5; "
            "the integration may be unstable",
            stacklevel=3,
        )


def step(
    state: LayerState,
    params: ModelParams,
    cfg: SolverConfig,
    background: AffineBackground = AffineBackground(),
) -> LayerState:
    """Advance one time step; accepts and returns full stream-function states."""
    be = _make_backend(state.grid, params, cfg.dealias)
    st = _state_to_q(state, params, be, background)
    if not np.all(np.isfinite(st.qp)) or not np.all(np.isfinite(st.qm)):
        raise SolverBlowupError("non-finite initial state", last_healthy_step=-1)
    if cfg.scheme == "rk4":
        st = _rk4_step(be, params, background, st, cfg.dt)
    else:
        st = _LeapfrogStepper(be, params, background, cfg.ra_filter).step(st, cfg.dt)
    return _q_to_state(st, state.grid, params, be, background)


def diagnostics(state: LayerState, params: ModelParams) -> dict:
    """Energy, layer enstrophies, and wall circulations of a state.

    energy     = 1/2 int |grad psi1|^2 + |grad psi2|^2 + F (psi1-psi2)^2
    enstrophy_i = 1/2 int (Q_i - beta y)^2
    circulation = (1/Lx) int d(psi1+psi2)/dy dx  at the south/north rows
    (per-layer wall values are reported by the boundary-condition module).
    """
    grid = state.grid
    st = state.to_layered()
    p1, p2 = st.psi1.values, st.psi2.values
    area_w = grid.hx * grid.hy
    scheme = "spectral" if grid.topology == "doubly_periodic" else "fd2"
    g1x, g1y = ddx(st.psi1, scheme).values, ddy(st.psi1, scheme).values
    g2x, g2y = ddx(st.psi2, scheme).values, ddy(st.psi2, scheme).values
    shear = p1 - p2
    energy = 0.5 * area_w * float(
        np.sum(g1x**2 + g1y**2 + g2x**2 + g2y**2 + params.F * shear**2)
    )

    from .fields import laplacian

    lap1 = laplacian(st.psi1, scheme).values
    lap2 = laplacian(st.psi2, scheme).values
    qa1 = lap1 - params.F * shear
    qa2 = lap2 + params.F * shear
    ens1 = 0.5 * area_w * float(np.sum(qa1**2))
    ens2 = 0.5 * area_w * float(np.sum(qa2**2))

    dpsum_y = g1y + g2y
    circ_south = float(np.mean(dpsum_y[0, :]))
    circ_north = float(np.mean(dpsum_y[-1, :]))
    return {
        "t": st.t,
        "energy": energy,
        "enstrophy1": ens1,
        "enstrophy2": ens2,
        "circ_south": circ_south,
        "circ_north": circ_north,
    }


@dataclass
class RunResult:
    times: list
    diagnostics: list
    initial: LayerState
    final: LayerState
    field_files: list = field(default_factory=list)
    diagnostics_file: str = ""


def _initial_state(initial, grid, t0, params, background):
    if isinstance(initial, LayerState):
        return initial.to_barotropic_baroclinic(), background
    # a solution expression: sample it, honoring its background metadata
    if grid is None:
        raise DomainError("run: a grid is required to sample a solution expression")
    md = getattr(initial, "metadata", {})
    if background.is_zero and "solver_background" in md:
        sb = md["solver_background"]
        background = AffineBackground(
            gamma_plus=sb.get("gamma_plus", 0.0),
            delta_plus=sb.get("delta_plus", 0.0),
            gamma_minus=sb.get("gamma_minus", 0.0),
            delta_minus=sb.get("delta_minus", 0.0),
        )
    t0 = md.get("default_t", 0.0) if t0 is None else t0
    X, Y = grid.meshgrid()
    p1, p2 = initial.evaluate(t0, X, Y)
    state = LayerState(
        t0,
        Field2D(grid, p1 + 0 * X),
        Field2D(grid, p2 + 0 * X),
    ).to_barotropic_baroclinic()
    return state, background


def run(
    initial,
    params: ModelParams,
    cfg: SolverConfig,
    output_every: int = 0,
    outdir=None,
    grid: GridSpec = None,
    t0: float = None,
    background: AffineBackground = AffineBackground(),
) -> RunResult:
    """Integrate from a LayerState or a catalog solution; record diagnostics.

    ``output_every > 0`` writes field files (psi1/psi2) and appends to a
    diagnostics CSV under ``outdir`` every that many steps.  NaNs abort via
    :class:`SolverBlowupError` carrying the last healthy step index.
    """
    state0, background = _initial_state(initial, grid, t0, params, background)
    grid = state0.grid
    be = _make_backend(grid, params, cfg.dealias)
    _check_cfl(state0, cfg, background)
    st = _state_to_q(state0, params, be, background)

    stepper = None
    if cfg.scheme == "leapfrog_ra":
        stepper = _LeapfrogStepper(be, params, background, cfg.ra_filter)

    files = []
    diag_rows = []
    times = []
    diag_path = None
    if outdir is not None:
        import os

        os.makedirs(outdir, exist_ok=True)
        diag_path = os.path.join(outdir, "diagnostics.csv")
        with open(diag_path, "w") as fh:
            fh.write(DIAGNOSTICS_HEADER + "\n")

    def record(istep, rstate):
        full = _q_to_state(rstate, grid, params, be, background)
        diag = diagnostics(full, params)
        diag["step"] = istep
        times.append(rstate.t)
        diag_rows.append(diag)
        if diag_path is not None:
            with open(diag_path, "a") as fh:
                fh.write(
                    f"{istep},{rstate.t:.17g},{diag['energy']:.17g},"
                    f"{diag['enstrophy1']:.17g},{diag['enstrophy2']:.17g},"
                    f"{diag['circ_south']:.17g},{diag['circ_north']:.17g}\n"
                )
        if outdir is not None and output_every > 0:
            from .fields import write_field

            import os

            lay = full.to_layered()
            for tag, fld in (("psi1", lay.psi1), ("psi2", lay.psi2)):
                path = os.path.join(outdir, f"{tag}_{istep:06d}.dat")
                write_field(fld, full.t, path)
                files.append(path)
        return full

    initial_full = record(0, st)
    last_full = initial_full
    for istep in range(1, cfg.steps + 1):
        if cfg.scheme == "rk4":
            st = _rk4_step(be, params, background, st, cfg.dt)
        else:
            st = stepper.step(st, cfg.dt)
        if not (np.all(np.isfinite(st.qp)) and np.all(np.isfinite(st.qm))):
            raise SolverBlowupError(
                f"non-finite fields at step {istep}; last healthy step was "
                f"{istep - 1}",
                last_healthy_step=istep - 1,
            )
        if output_every > 0 and istep % output_every == 0:
            last_full = record(istep, st)
        elif istep == cfg.steps:
            last_full = record(istep, st)

    return RunResult(
        times=times,
        diagnostics=diag_rows,
        initial=initial_full,
        final=last_full,
        field_files=files,
        diagnostics_file=diag_path or "",
    )
