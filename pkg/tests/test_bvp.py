"""Wall conditions and symmetry compatibility of the boundary value problems."""

import numpy as np
import pytest

from twolayerqg.bvp import BoundarySetting, bc_residual, transform_preserves_bvp
from twolayerqg.catalog import build_solution
from twolayerqg.exppoly import ExpPoly, parse_exppoly
from twolayerqg.fields import DomainError, Field2D, GridSpec
from twolayerqg.model import LayerState
from twolayerqg.transforms import PointTransform

TWO_PI = 2 * np.pi


def channel_states(solution, grid, t, dt):
    X, Y = grid.meshgrid()
    p1, p2 = solution.evaluate(t, X, Y)
    p1p, p2p = solution.evaluate(t - dt, X, Y)
    cur = LayerState(t, Field2D(grid, p1), Field2D(grid, p2))
    prev = LayerState(t - dt, Field2D(grid, p1p), Field2D(grid, p2p))
    return cur, prev


def test_zero_state_zero_residuals():
    grid = GridSpec(16, 16, TWO_PI, np.pi, topology="channel")
    z = np.zeros(grid.shape)
    st = LayerState(0.0, Field2D(grid, z), Field2D(grid, z))
    rep = bc_residual(st, BoundarySetting("periodic_channel", Y=np.pi), st, dt=1e-2)
    assert rep["max_violation"] == 0.0


def test_channel_wave_satisfies_walls():
    Ly = np.pi
    grid = GridSpec(48, 48, TWO_PI, Ly, topology="channel")
    sol = build_solution("rossby_channel", k=1, n=2, Lx=TWO_PI, Ly=Ly)
    cur, prev = channel_states(sol, grid, t=0.5, dt=1e-3)
    rep = bc_residual(cur, BoundarySetting("periodic_channel", Y=Ly), prev, dt=1e-3)
    # psi vanishes on the walls, so the along-wall x derivative is exactly
    # zero and the x-averaged circulation sits at round-off
    assert rep["psi1_dx_south"] <= 1e-12
    assert rep["psi1_dx_north"] <= 1e-12
    assert rep["psi1_circ_rate_south"] <= 1e-8
    assert rep["max_violation"] <= 1e-8


def test_time_dependent_shear_violates_walls():
    # a quadratic-in-y barotropic part with time-dependent coefficient
    # breaks the circulation condition by an O(1) rate
    Ly = np.pi
    grid = GridSpec(32, 32, TWO_PI, Ly, topology="channel")
    sol = build_solution(
        "a13_decoupled",
        f="1+1/4 t",
        zeta2=parse_exppoly("0"),
        zeta1=lambda s: 0 * np.asarray(s),
        theta1=0,
        theta2=0,
    )
    cur, prev = channel_states(sol, grid, t=0.5, dt=1e-3)
    rep = bc_residual(cur, BoundarySetting("periodic_channel", Y=Ly), prev, dt=1e-3)
    assert rep["psi1_circ_rate_north"] >= 0.05


def test_bc_residual_validates_grid():
    grid = GridSpec(16, 16, TWO_PI, TWO_PI)  # periodic, no walls
    z = np.zeros(grid.shape)
    st = LayerState(0.0, Field2D(grid, z), Field2D(grid, z))
    with pytest.raises(DomainError, match="channel"):
        bc_residual(st, BoundarySetting("periodic_channel"), st, 1e-2)


def test_setting_validation():
    with pytest.raises(DomainError, match="finite"):
        BoundarySetting("limited_rectangle")
    BoundarySetting("limited_rectangle", L=2.0, Y=1.0)
    with pytest.raises(DomainError, match="kind"):
        BoundarySetting("open_ocean")


SETTINGS = [
    BoundarySetting("infinite", Y=np.pi),
    BoundarySetting("periodic_channel", L=np.pi, Y=np.pi),
    BoundarySetting("limited_rectangle", L=np.pi, Y=np.pi),
]


@pytest.mark.parametrize("mode", ["predicate", "empirical"])
def test_galilean_boost_channel_vs_rectangle(mode):
    boost = PointTransform(f=parse_exppoly("1/2 t"))
    for setting in SETTINGS[:2]:
        assert transform_preserves_bvp(boost, setting, mode)["preserved"]
    assert not transform_preserves_bvp(boost, SETTINGS[2], mode)["preserved"]


@pytest.mark.parametrize("mode", ["predicate", "empirical"])
def test_acceleration_rejected_everywhere(mode):
    acc = PointTransform(f=parse_exppoly("t^2"))
    for setting in SETTINGS:
        assert not transform_preserves_bvp(acc, setting, mode)["preserved"]


@pytest.mark.parametrize("mode", ["predicate", "empirical"])
def test_gauges_and_time_shift_preserved_everywhere(mode):
    for tr in (
        PointTransform(g=parse_exppoly("1+t^2")),
        PointTransform(T0=1.5),
        PointTransform(Psi0_minus=0.7),
        PointTransform(f=ExpPoly.zero(), g=ExpPoly.exp(1)),
    ):
        for setting in SETTINGS:
            assert transform_preserves_bvp(tr, setting, mode)["preserved"]


@pytest.mark.parametrize("mode", ["predicate", "empirical"])
def test_x_shift_channel_only(mode):
    xshift = PointTransform(f=ExpPoly.const(0.8))
    for setting in SETTINGS[:2]:
        assert transform_preserves_bvp(xshift, setting, mode)["preserved"]
    assert not transform_preserves_bvp(xshift, SETTINGS[2], mode)["preserved"]


@pytest.mark.parametrize("mode", ["predicate", "empirical"])
def test_y_shift_rejected(mode):
    yshift = PointTransform(Y0=0.4)
    for setting in SETTINGS:
        res = transform_preserves_bvp(yshift, setting, mode)
        assert not res["preserved"]


def test_predicate_requires_exppoly():
    tr = PointTransform(f=lambda t: np.sin(t))
    with pytest.raises(DomainError, match="empirical"):
        transform_preserves_bvp(tr, SETTINGS[0], "predicate")
    # empirical mode handles black-box parameter functions
    res = transform_preserves_bvp(tr, SETTINGS[0], "empirical")
    assert not res["preserved"]  # sin has nonzero second derivative


def random_continuous_transform(rng):
    from tests.test_exppoly import random_exppoly

    kind = rng.choice(["gauge", "shift", "boost", "accel", "yshift", "mixed"])
    f = ExpPoly.zero()
    g = random_exppoly(rng)
    T0 = float(rng.uniform(-1, 1))
    Y0 = 0.0
    if kind == "shift":
        f = ExpPoly.const(rng.uniform(-1, 1))
    elif kind == "boost":
        f = ExpPoly.monomial(rng.uniform(-1, 1), 1) + ExpPoly.const(rng.uniform(-1, 1))
    elif kind == "accel":
        f = random_exppoly(rng)
    elif kind == "yshift":
        Y0 = float(rng.uniform(0.1, 1.0))
    elif kind == "mixed":
        f = random_exppoly(rng)
        Y0 = float(rng.choice([0.0, rng.uniform(0.1, 1.0)]))
    return PointTransform(T0=T0, Y0=Y0, Psi0_minus=float(rng.uniform(-1, 1)), f=f, g=g)


def test_predicate_empirical_agreement_random():
    import random

    rng = random.Random(21)
    for setting in SETTINGS:
        for _ in range(50):
            tr = random_continuous_transform(rng)
            res_p = transform_preserves_bvp(tr, setting, "predicate")
            res_e = transform_preserves_bvp(tr, setting, "empirical")
            assert res_p["preserved"] == res_e["preserved"], (
                setting.kind,
                str(tr.f),
                tr.Y0,
                res_p,
                res_e,
            )


def test_restriction_monotonicity():
    # preserved(limited) subset preserved(periodic) subset preserved(infinite)
    import random

    rng = random.Random(22)
    inf_s, per_s, lim_s = SETTINGS
    for _ in range(40):
        tr = random_continuous_transform(rng)
        p_inf = transform_preserves_bvp(tr, inf_s)["preserved"]
        p_per = transform_preserves_bvp(tr, per_s)["preserved"]
        p_lim = transform_preserves_bvp(tr, lim_s)["preserved"]
        assert (not p_lim or p_per) and (not p_per or p_inf)
