"""Exactness tests for the exponential-polynomial ring."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from twolayerqg.exppoly import ExpConst, ExpPoly, parse_exppoly


def random_exppoly(rng, max_terms=2, max_degree=3, sigma_pool=(-2, -1, 0, 1, 2)):
    out = ExpPoly.zero()
    for _ in range(rng.randint(1, max_terms)):
        sigma = Fraction(rng.choice(sigma_pool))
        for k in range(rng.randint(1, max_degree + 1)):
            coeff = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            out = out + ExpPoly.monomial(coeff, k, sigma)
    return out


def test_ring_axioms_random():
    rng = random.Random(7)
    for _ in range(50):
        a, b, c = (random_exppoly(rng) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) * c == a * c + b * c
        assert a + ExpPoly.zero() == a
        assert a - a == ExpPoly.zero()


def test_diff_product_rule():
    rng = random.Random(8)
    for _ in range(25):
        a, b = random_exppoly(rng), random_exppoly(rng)
        assert (a * b).diff() == a.diff() * b + a * b.diff()


def test_antiderivative_inverts_diff():
    rng = random.Random(9)
    for _ in range(25):
        a = random_exppoly(rng)
        assert a.antiderivative().diff() == a


def test_shift_is_exact_and_invertible():
    f = parse_exppoly("(3+2t^2)exp(1/2 t)")
    g = f.shift(Fraction(3, 2))
    # shifting back restores the canonical form bit-for-bit
    assert g.shift(Fraction(-3, 2)) == f
    # pointwise agreement with the analytic shift
    for t in (-1.0, 0.0, 0.7, 2.5):
        expect = (3 + 2 * (t - 1.5) ** 2) * math.exp(0.5 * (t - 1.5))
        assert g(t) == pytest.approx(expect, rel=1e-14)


def test_compose_affine_reflection():
    f = parse_exppoly("t^3 + exp(2t)")
    g = f.compose_affine(-1, 0)
    for t in (-0.3, 0.0, 1.2):
        assert g(t) == pytest.approx((-t) ** 3 + math.exp(-2 * t), rel=1e-14)
    assert g.compose_affine(-1, 0) == f


def test_exp_shift_produces_econst_coefficient():
    f = ExpPoly.exp(2)
    g = f.shift(1)  # e^{2(t-1)} = e^{-2} e^{2t}
    ((sigma, coeffs),) = g.terms()
    assert sigma == 2
    assert coeffs[0] == ExpConst.e_power(-2)
    assert float(g(0.0)) == pytest.approx(math.exp(-2.0), rel=1e-15)


def test_vectorized_evaluation():
    f = parse_exppoly("(1+t)exp(-t) + 2t^2")
    t = np.linspace(-1, 1, 11)
    expect = (1 + t) * np.exp(-t) + 2 * t**2
    assert np.allclose(f(t), expect, rtol=1e-14)


def test_parser_round_trip():
    rng = random.Random(10)
    for _ in range(40):
        f = random_exppoly(rng)
        assert parse_exppoly(str(f)) == f
    # shifted forms print e(...) factors and still round-trip
    f = parse_exppoly("(1+t)exp(1/3 t)").shift(Fraction(1, 2))
    assert parse_exppoly(str(f)) == f


def test_parser_examples():
    assert parse_exppoly("0") == ExpPoly.zero()
    assert parse_exppoly("-2") == ExpPoly.const(-2)
    assert parse_exppoly("3t^2+1") == (
        ExpPoly.monomial(3, 2) + ExpPoly.const(1)
    )
    assert parse_exppoly("t*exp(2t)") == ExpPoly.monomial(1, 1, 2)
    assert parse_exppoly("exp(-t)") == ExpPoly.exp(-1)
    assert parse_exppoly("exp(1/2 t)") == ExpPoly.exp(Fraction(1, 2))
    with pytest.raises(ValueError):
        parse_exppoly("exp(t^2)")
    with pytest.raises(ValueError):
        parse_exppoly("q + 1")


def test_constant_detection():
    assert ExpPoly.const(Fraction(5, 3)).is_constant
    assert not ExpPoly.t().is_constant
    assert not ExpPoly.exp(1).is_constant
    c = parse_exppoly("2e(1)+1").constant_value()
    assert float(c) == pytest.approx(2 * math.e + 1)


def test_coordinates_are_exact():
    f = parse_exppoly("(1/2 + t)exp(2t) + 3t")
    coords = dict(f.coordinates())
    assert coords[(Fraction(2), 0, Fraction(0))] == Fraction(1, 2)
    assert coords[(Fraction(2), 1, Fraction(0))] == Fraction(1)
    assert coords[(Fraction(0), 1, Fraction(0))] == Fraction(3)
