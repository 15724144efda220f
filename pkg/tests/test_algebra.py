"""Bracket relations, adjoint table, structure subspaces, and closure checks."""

import random
from fractions import Fraction

import pytest

from twolayerqg.algebra import (
    AdjointSeriesError,
    AlgebraElement,
    DependentGeneratorsError,
    SubalgebraSpec,
    adjoint,
    commutator,
    parse_element,
    standard_subalgebra,
    structure_subspaces,
    subalgebra_closed,
    subalgebra_names,
)
from twolayerqg.exppoly import ExpPoly, parse_exppoly

Dt, Dy = AlgebraElement.Dt, AlgebraElement.Dy
X, F, Z = AlgebraElement.X, AlgebraElement.F, AlgebraElement.Z


def random_element(rng, with_exp=True):
    from tests.test_exppoly import random_exppoly

    sigma_pool = (-1, 0, 1) if with_exp else (0,)
    return AlgebraElement(
        a=Fraction(rng.randint(-2, 2)),
        b=Fraction(rng.randint(-2, 2)),
        f=random_exppoly(rng, max_terms=2, max_degree=3, sigma_pool=sigma_pool),
        c=Fraction(rng.randint(-2, 2)),
        g=random_exppoly(rng, max_terms=2, max_degree=3, sigma_pool=sigma_pool),
    )


# -- commutator -----------------------------------------------------------

def test_basis_brackets():
    t2 = parse_exppoly("t^2")
    assert commutator(Dt(), X(t2)) == X(parse_exppoly("2t"))
    assert commutator(Dt(), Z(ExpPoly.t())) == Z(ExpPoly.const(1))
    assert commutator(Dy(), X(ExpPoly.exp(2))) == Z(-2 * ExpPoly.exp(2))
    assert commutator(X("t"), X("t^3")).is_zero
    assert commutator(X("t"), Z("exp(t)")).is_zero
    assert commutator(Dt(), Dy()).is_zero
    for e in (Dt(), Dy(), X("t"), Z("exp(-t)")):
        assert commutator(F(), e).is_zero


def test_bracket_bilinear_antisymmetric():
    rng = random.Random(11)
    for _ in range(30):
        e1, e2 = random_element(rng), random_element(rng)
        assert commutator(e1, e2) == (-1) * commutator(e2, e1)
        e3 = random_element(rng)
        lhs = commutator(e1 + 2 * e3, e2)
        rhs = commutator(e1, e2) + 2 * commutator(e3, e2)
        assert lhs == rhs


def test_jacobi_identity_exact():
    rng = random.Random(12)
    for _ in range(200):
        a, b, c = (random_element(rng) for _ in range(3))
        total = (
            commutator(commutator(a, b), c)
            + commutator(commutator(b, c), a)
            + commutator(commutator(c, a), b)
        )
        assert total.is_zero


# -- adjoint ------------------------------------------------------------------

def test_adjoint_table_examples():
    # Ad(e^{eps Z(g)}) Dt = Dt + eps Z(g') with g = t^3, eps = 2
    out = adjoint(Z("t^3"), 2, Dt())
    assert out == Dt() + Z(parse_exppoly("6t^2"))
    # Ad(e^{eps Dt}) Z(t) = Z(t - eps) with eps = 1
    out = adjoint(Dt(), 1, Z("t"))
    assert out == Z(parse_exppoly("t - 1"))
    # central F acts trivially on everything
    rng = random.Random(13)
    for _ in range(10):
        tgt = random_element(rng)
        assert adjoint(F(), Fraction(3, 2), tgt) == tgt


def test_adjoint_table_full():
    rng = random.Random(14)
    from tests.test_exppoly import random_exppoly

    for _ in range(40):
        f = random_exppoly(rng)
        g = random_exppoly(rng)
        eps = Fraction(rng.randint(-3, 3), rng.randint(1, 4))
        assert adjoint(Z(g), eps, Dt()) == Dt() + Z(eps * g.diff())
        assert adjoint(X(f), eps, Dt()) == Dt() + X(eps * f.diff())
        assert adjoint(X(f), eps, Dy()) == Dy() - Z(eps * f.diff())
        assert adjoint(Dy(), eps, X(f)) == X(f) + Z(eps * f.diff())
        assert adjoint(Dt(), eps, X(f)) == X(f.shift(eps))
        assert adjoint(Dt(), eps, Z(g)) == Z(g.shift(eps))


def test_adjoint_is_hom_on_basis():
    rng = random.Random(15)
    from tests.test_exppoly import random_exppoly

    basis = [
        Dt(),
        Dy(),
        X(random_exppoly(rng)),
        F(),
        Z(random_exppoly(rng)),
    ]
    for act in basis:
        for b1 in basis:
            for b2 in basis:
                eps = Fraction(1, 2)
                lhs = adjoint(act, eps, commutator(b1, b2))
                rhs = commutator(adjoint(act, eps, b1), adjoint(act, eps, b2))
                assert lhs == rhs


def test_adjoint_rejects_mixed_time_part():
    with pytest.raises(AdjointSeriesError):
        adjoint(Dt() + X("t"), 1, Dy())


# -- structure subspaces --------------------------------------------------------

def test_structure_memberships():
    sub = structure_subspaces()
    x1z1 = X("1") + Z("1")
    assert sub["z_cap_g_prime"](x1z1)
    assert not sub["n"](Dt())
    zero = AlgebraElement()
    for pred in sub.values():
        assert pred(zero)
    assert sub["z"](F())
    assert not sub["z"](X("t"))
    assert sub["n_prime"](Z("exp(t)"))
    assert not sub["n_prime"](X("1"))


def test_derived_series_facts():
    rng = random.Random(16)
    sub = structure_subspaces()
    for _ in range(40):
        e1, e2 = random_element(rng), random_element(rng)
        n1 = AlgebraElement(0, e1.b, e1.f, e1.c, e1.g)  # project into n
        n2 = AlgebraElement(0, e2.b, e2.f, e2.c, e2.g)
        br = commutator(n1, n2)
        assert sub["n_prime"](br)
        z = AlgebraElement(f=ExpPoly.zero(), g=e2.g)  # element of n'
        assert commutator(n1, z).is_zero


# -- subalgebra closure -----------------------------------------------------------

def test_a2_2_closure_coordinates():
    spec = standard_subalgebra("A2_2", nu=1, sigma=2, kappa=0)
    report = subalgebra_closed(spec)
    assert report["closed"]
    coords = report["bracket_coords"][(0, 1)]
    assert coords == [Fraction(0), Fraction(2)]  # [e1,e2] = 2*e2


def test_one_dimensional_trivially_closed():
    spec = standard_subalgebra("A1_1", a=2, b=3)
    assert subalgebra_closed(spec)["closed"]


def test_mutated_a2_2_not_closed():
    sigma, nu = Fraction(2), Fraction(1)
    e = ExpPoly.exp(sigma)
    bad_z = nu * sigma * ExpPoly.t() * ExpPoly.t() * e  # t^2 e^{sigma t}
    spec = SubalgebraSpec(
        name="A2_2_mutated",
        generators=(
            AlgebraElement.Dt() + AlgebraElement.Dy(nu),
            AlgebraElement.X(e) + AlgebraElement.Z(bad_z),
        ),
    )
    report = subalgebra_closed(spec)
    assert not report["closed"]
    assert report["bracket_coords"][(0, 1)] is None


def test_dependent_generators_rejected():
    spec = SubalgebraSpec(
        name="degenerate",
        generators=(X("t"), 2 * X("t")),
    )
    with pytest.raises(DependentGeneratorsError):
        subalgebra_closed(spec)


def test_whole_catalog_closed_over_samples():
    rng = random.Random(17)
    for name in subalgebra_names():
        for _ in range(5):
            params = _sample_params(name, rng)
            spec = standard_subalgebra(name, **params)
            report = subalgebra_closed(spec)
            assert report["closed"], (name, params)


def _sample_params(name, rng):
    def q(lo=-3, hi=3, nonzero=False):
        while True:
            v = Fraction(rng.randint(lo, hi), rng.randint(1, 3))
            if v != 0 or not nonzero:
                return v

    from tests.test_exppoly import random_exppoly

    if name == "A1_1":
        return {"a": q(), "b": q()}
    if name == "A1_2":
        return {"f": random_exppoly(rng), "b": q()}
    if name == "A1_3":
        return {"f": random_exppoly(rng), "g": random_exppoly(rng), "b": q()}
    if name == "A2_1":
        return {"kappa": q(), "nu": q(), "mu": q(), "rho": q()}
    if name in ("A2_2", "A2_-1"):
        return {"nu": q(), "kappa": q(), "sigma": q(nonzero=True)}
    if name == "A2_3":
        return {"nu": q(), "kappa": q(), "mu": q(), "rho": q()}
    if name == "A2_-2":
        return {"nu": q(), "kappa": q(), "rho": q()}
    if name == "A2_-3":
        return {"nu": q()}
    if name == "A2_4":
        # kappa*rho = 0 constraint
        if rng.random() < 0.5:
            return {"f": random_exppoly(rng), "kappa": q(), "g": random_exppoly(rng), "rho": 0}
        return {"f": random_exppoly(rng), "kappa": 0, "g": random_exppoly(rng), "rho": q()}
    if name == "A2_-4":
        return {"f": random_exppoly(rng), "g": random_exppoly(rng)}
    if name == "A2_-5":
        g = random_exppoly(rng)
        if g.is_zero:
            g = ExpPoly.const(1)
        return {"f": random_exppoly(rng), "kappa": q(), "g": g}
    if name == "A2_-6":
        return {
            "f1": ExpPoly.const(1),
            "g1": random_exppoly(rng),
            "kappa": q(),
            "f2": ExpPoly.t() + random_exppoly(rng),
            "g2": random_exppoly(rng),
            "rho": q(),
        }
    raise AssertionError(name)


def test_constraint_validation():
    with pytest.raises(ValueError, match="sigma"):
        standard_subalgebra("A2_2", sigma=0)
    with pytest.raises(ValueError, match="kappa"):
        standard_subalgebra("A2_4", kappa=1, rho=1)
    with pytest.raises(ValueError, match="not identically zero"):
        standard_subalgebra("A2_-5", g=0)
    with pytest.raises(ValueError, match="independent"):
        standard_subalgebra("A2_-6", f1="t", g1="0", kappa=0, f2="2t", g2="0", rho=0)


# -- element parsing -------------------------------------------------------------

def test_element_round_trip():
    rng = random.Random(18)
    for _ in range(30):
        e = random_element(rng)
        assert parse_element(str(e)) == e
    e = parse_element("2*Dt + Dy + X((3+2t^2)exp(1/2 t)) + -1/2*F + Z(t)")
    assert e.a == 2 and e.b == 1 and e.c == Fraction(-1, 2)
    assert e.f == parse_exppoly("(3+2t^2)exp(1/2 t)")
