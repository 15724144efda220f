"""Exponential integrals against independent oracles; quadrature accuracy."""

import numpy as np
import pytest
from scipy import special as sps
from scipy.integrate import quad

from twolayerqg.special import (
    QuadratureError,
    cumulative_integral,
    expint_e1,
    expint_ei,
    expint_upper,
    expint_upper_scaled,
)


def test_e1_matches_scipy():
    x = np.concatenate([np.linspace(1e-3, 1, 40), np.linspace(1, 40, 60)])
    ours = expint_e1(x)
    ref = sps.exp1(x)
    assert np.max(np.abs(ours - ref) / ref) <= 1e-12


def test_ei_matches_scipy():
    x = np.linspace(1e-3, 30, 80)
    ours = expint_ei(x)
    ref = sps.expi(x)
    assert np.max(np.abs(ours - ref) / np.abs(ref).clip(1e-3)) <= 1e-11


def test_upper_quadrature_oracle():
    # independent oracle: direct numerical quadrature of the defining integral
    for w in (0.25, 1.0, 3.0):
        val, err = quad(lambda t: np.exp(-t) / t, w, np.inf, epsabs=1e-13, epsrel=1e-12)
        assert expint_upper(w) == pytest.approx(val, rel=1e-10)
    # principal value at negative argument: quad's Cauchy-weight rule
    w = -1.5
    pv, _ = quad(lambda t: np.exp(-t), w, 60.0, weight="cauchy", wvar=0.0)
    assert expint_upper(w) == pytest.approx(pv, rel=1e-9)


def test_upper_scaled_large_argument():
    w = np.array([50.0, 200.0, 700.0])
    # e^w E1(w) ~ 1/w for large w
    vals = expint_upper_scaled(w)
    assert np.allclose(vals, 1 / w, rtol=0.05)


def test_upper_rejects_zero():
    with pytest.raises(ValueError):
        expint_upper(0.0)


def test_cumulative_integral_exact_function():
    F = cumulative_integral(np.cos, 0.0, 3.0, tol=1e-12)
    t = np.linspace(0, 3, 100)
    assert np.max(np.abs(F(t) - np.sin(t))) <= 1e-10


def test_cumulative_integral_rejects_singular():
    with pytest.raises(QuadratureError):
        cumulative_integral(lambda t: 1.0 / (t - 0.5), 0.0, 1.0)
