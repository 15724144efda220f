"""Potential vorticity, tendency equivalence, and residual machinery."""

import numpy as np
import pytest

from twolayerqg.fields import Field2D, GridSpec, coordinate_fields
from twolayerqg.model import (
    BB,
    LAYERED,
    LayerState,
    ModelParams,
    SingularEvaluationError,
    pde_residual,
    potential_vorticity,
    residual_record,
    tendency,
)

TWO_PI = 2 * np.pi


def grid64(n=64):
    return GridSpec(n, n, TWO_PI, TWO_PI)


def state_from(grid, f1, f2, rep=LAYERED, t=0.0):
    X, Y = grid.meshgrid()
    return LayerState(t, Field2D(grid, f1(X, Y)), Field2D(grid, f2(X, Y)), rep)


class _Solution:
    """Minimal analytic-solution stub for residual tests."""

    def __init__(self, name, fn, locus=None):
        self.name = name
        self._fn = fn
        if locus is not None:
            self.singular_locus = locus

    def evaluate(self, t, X, Y):
        return self._fn(t, X, Y)


def test_pv_rest_state_is_beta_y():
    grid = grid64(16)
    params = ModelParams(beta=1.0, F=1.0)
    st = state_from(grid, lambda X, Y: 0 * X, lambda X, Y: 0 * X)
    q1, q2 = potential_vorticity(st, params)
    _, y = coordinate_fields(grid)
    assert (q1 - y).max_abs() == 0.0
    assert (q2 - y).max_abs() == 0.0


def test_pv_analytic_oracle_layered():
    grid = grid64(64)
    params = ModelParams(beta=1.0, F=1.0)
    st = state_from(grid, lambda X, Y: np.sin(X), lambda X, Y: 0 * X)
    q1, q2 = potential_vorticity(st, params)
    X, Y = grid.meshgrid()
    assert np.max(np.abs(q1.values - (-2 * np.sin(X) + Y))) <= 1e-3
    assert np.max(np.abs(q2.values - (np.sin(X) + Y))) <= 1e-3


def test_pv_analytic_oracle_bb():
    grid = grid64(64)
    params = ModelParams(beta=1.5, F=1.0)
    st = state_from(grid, lambda X, Y: 0 * X, lambda X, Y: np.sin(X), rep=BB)
    qp, qm = potential_vorticity(st, params)
    X, Y = grid.meshgrid()
    assert np.max(np.abs(qm.values - (-3 * np.sin(X)))) <= 1e-3
    assert np.max(np.abs(qp.values - 2 * 1.5 * Y)) == pytest.approx(0.0, abs=1e-12)


def test_pv_linearity_in_psi():
    rng = np.random.default_rng(3)
    grid = grid64(16)
    params = ModelParams(beta=1.0, F=2.0)

    def rand_state():
        return LayerState(
            0.0,
            Field2D(grid, rng.standard_normal(grid.shape)),
            Field2D(grid, rng.standard_normal(grid.shape)),
        )

    a, b = rand_state(), rand_state()
    zero = state_from(grid, lambda X, Y: 0 * X, lambda X, Y: 0 * X)
    ab = LayerState(0.0, a.psi1 + b.psi1, a.psi2 + b.psi2)
    for i in range(2):
        q_ab = potential_vorticity(ab, params)[i]
        q_a = potential_vorticity(a, params)[i]
        q_b = potential_vorticity(b, params)[i]
        q_0 = potential_vorticity(zero, params)[i]
        assert (q_ab - q_a - q_b + q_0).max_abs() <= 1e-12


def test_tendency_zero_state():
    grid = grid64(16)
    params = ModelParams(beta=1.0, F=1.0)
    st = state_from(grid, lambda X, Y: 0 * X, lambda X, Y: 0 * X)
    t1, t2 = tendency(st, params)
    assert t1.max_abs() == 0.0
    assert t2.max_abs() == 0.0


def test_tendency_zonal_flow_interior():
    # psi1 = psi2 = -U*y: Q depends only on y, so the advection term vanishes
    grid = grid64(32)
    params = ModelParams(beta=1.0, F=1.0)
    st = state_from(grid, lambda X, Y: -2.0 * Y, lambda X, Y: -2.0 * Y)
    t1, t2 = tendency(st, params)
    # coordinate field y is not periodic; judge interior nodes only
    assert np.max(np.abs(t1.values[2:-2, 2:-2])) <= 1e-12
    assert np.max(np.abs(t2.values[2:-2, 2:-2])) <= 1e-12


def test_representation_round_trip():
    rng = np.random.default_rng(4)
    grid = grid64(16)
    st = LayerState(
        0.5,
        Field2D(grid, rng.standard_normal(grid.shape)),
        Field2D(grid, rng.standard_normal(grid.shape)),
    )
    back = st.to_barotropic_baroclinic().to_layered()
    assert (back.psi1 - st.psi1).max_abs() <= 1e-15
    assert (back.psi2 - st.psi2).max_abs() <= 1e-15


def test_tendency_equivalence_between_representations():
    # Both the discrete bracket and the discrete PV map are bilinear, so the
    # sum/difference identity between representations holds to round-off,
    # comfortably inside the O(h^2) the contract asks for.
    for n in (32, 64):
        grid = grid64(n)
        st = state_from(
            grid,
            lambda X, Y: np.sin(X) * np.cos(2 * Y),
            lambda X, Y: np.cos(2 * X + Y),
        )
        params = ModelParams(beta=1.0, F=1.0)
        l1, l2 = tendency(st, params)
        bp, bm = tendency(st.to_barotropic_baroclinic(), params)
        e_plus = (l1 + l2 - bp).values[2:-2, 2:-2]
        e_minus = (l1 - l2 - bm).values[2:-2, 2:-2]
        assert max(np.max(np.abs(e_plus)), np.max(np.abs(e_minus))) <= 1e-11


def test_pde_residual_zero_solution():
    grid = grid64(16)
    params = ModelParams(beta=1.0, F=1.0)
    sol = _Solution("zero", lambda t, X, Y: (0 * X, 0 * X))
    mx, l2 = pde_residual(sol, params, grid, t=0.3, dt=1e-2)
    assert mx <= 1e-13
    assert l2 <= 1e-13


def test_pde_residual_converges_on_exact_wave():
    # classic barotropic Rossby wave, k=3, l=2, beta=F=1
    beta, F, k, l = 1.0, 1.0, 3, 2
    om = beta * k / (k**2 + l**2)

    def fn(t, X, Y):
        w = np.cos(k * X + l * Y + om * t)
        return 0.5 * w, 0.5 * w

    sol = _Solution("wave", fn)
    params = ModelParams(beta=beta, F=F)
    res = []
    for n, dt in ((32, 2e-2), (64, 1e-2)):
        mx, _ = pde_residual(sol, params, grid64(n), t=0.4, dt=dt)
        res.append(mx)
    assert res[0] / res[1] >= 3.5
    # both equation systems see the same exact solution
    for form in (LAYERED, BB):
        mx, _ = pde_residual(sol, params, grid64(48), t=0.4, dt=1e-2, form=form)
        assert mx <= 5e-2


def test_pde_residual_singular_locus_reported():
    sol = _Solution(
        "singular",
        lambda t, X, Y: (0 * X, 0 * X),
        locus=lambda t, X, Y: X > 3.0,
    )
    with pytest.raises(SingularEvaluationError, match="singular"):
        pde_residual(sol, ModelParams(1.0, 1.0), grid64(16), t=0.0, dt=1e-2)


def test_residual_record_format():
    grid = GridSpec(64, 32, TWO_PI, TWO_PI)
    line = residual_record("demo", grid, dt=1e-3, max_res=1.5e-4, l2_res=3e-5)
    assert line.startswith("solution=demo grid=64x32 h=")
    fields = dict(item.split("=") for item in line.split())
    # 17 significant digits round-trip exactly
    assert float(fields["dt"]) == 1e-3
    assert float(fields["max_res"]) == 1.5e-4
    assert float(fields["l2_res"]) == 3e-5
