from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from risklens.core_numeric import SetDescriptor
from risklens.distributions import ExtendedCDF, chi_eval
from risklens.errors import DomainError, NotLessRiskAverse
from risklens.outside_option import (
    OORepresentation,
    construct_v_prop2,
    effective_utility,
    exercise_probability,
    fit_representation,
    identify_F,
    image_hull,
    is_concentrated_on_image,
    primitive_representation,
    verify_representation,
)
from risklens.preferences import RiskAttitude, less_risk_averse_crossratio

X3 = (0.0, 1.0, 2.0)
IDENT = RiskAttitude(X3, X3)
HALF_AT_1 = ExtendedCDF.from_atoms([(1.0, 0.5)], 0.5)
seeds = st.integers(0, 2**32 - 1)


def test_effective_utility_examples():
    assert effective_utility(IDENT, ExtendedCDF.worthless()) == IDENT
    v = RiskAttitude((0.0, 1.0), (0.0, 1.0))
    assert effective_utility(v, ExtendedCDF.point(0.5)).values == (0.5, 1.0)
    assert effective_utility(IDENT, HALF_AT_1).values == pytest.approx((0.5, 1.0, 2.0))


def test_exercise_probability():
    np.testing.assert_allclose(exercise_probability(IDENT, HALF_AT_1), [0.5, 1.0, 1.0])
    np.testing.assert_allclose(exercise_probability(IDENT, ExtendedCDF.worthless()), [1, 1, 1])


def test_identify_worked_example():
    ident = identify_F(RiskAttitude(X3, (0.0, 0.5, 1.5)), IDENT)
    assert ident.F == HALF_AT_1
    assert ident.lam == 1.0 and ident.alpha == 1.0 and ident.beta == 0.5


def test_identify_steeper_example():
    ident = identify_F(RiskAttitude(X3, (0.0, 1.0, 3.0)), IDENT)
    assert ident.F == HALF_AT_1
    assert ident.lam == 2.0 and ident.alpha == 0.5 and ident.beta == 0.5


def test_identify_same_attitude_gives_worthless_option():
    # F = 1 everywhere, an atom at min v would be equivalent
    ident = identify_F(IDENT, IDENT)
    assert ident.F == ExtendedCDF.worthless()
    assert effective_utility(IDENT, ident.F) == IDENT
    assert effective_utility(IDENT, ExtendedCDF.point(0.0)) == IDENT


def test_identify_errors():
    with pytest.raises(NotLessRiskAverse):
        identify_F(RiskAttitude(X3, (0.0, 1.0, 1.5)), IDENT)
    with pytest.raises(DomainError):
        identify_F(RiskAttitude(X3, (1.0, 1.0, 1.0)), IDENT)


def test_verify_representation_examples():
    u = RiskAttitude(X3, (0.0, 0.5, 1.5))
    ident = identify_F(u, IDENT)
    assert verify_representation(u, OORepresentation(IDENT, ident.F, ident.alpha, ident.beta))
    rep = OORepresentation(IDENT, ExtendedCDF.worthless())
    assert verify_representation(IDENT, rep)
    fit = fit_representation(IDENT, rep)
    assert (fit.alpha, fit.beta) == (1.0, 0.0)
    assert not verify_representation(RiskAttitude(X3, (0.0, 1.0, 1.9)), OORepresentation(IDENT, ExtendedCDF.point(0.0)))


def test_verify_constant_u():
    flat = RiskAttitude(X3, (2.0, 2.0, 2.0))
    assert not verify_representation(flat, OORepresentation(IDENT, ExtendedCDF.worthless()))
    assert verify_representation(flat, OORepresentation(IDENT, ExtendedCDF.point(5.0)))


def test_verify_rejects_decreasing_fit():
    down = RiskAttitude(X3, (2.0, 1.0, 0.0))
    assert fit_representation(down, OORepresentation(IDENT, ExtendedCDF.worthless())) is None


def test_representation_validation():
    with pytest.raises(DomainError):
        OORepresentation(IDENT, HALF_AT_1, alpha=0.0)
    with pytest.raises(DomainError):
        fit_representation(RiskAttitude((5.0,), (1.0,)), OORepresentation(IDENT, HALF_AT_1))


def test_primitive_construction_examples():
    u = RiskAttitude((0.0, 1.0), (3.0, 5.0))
    v = construct_v_prop2(u, ExtendedCDF.point(0.0))
    assert v.values == pytest.approx((1.0, 3.0), abs=1e-12)
    assert construct_v_prop2(u, ExtendedCDF.worthless()).values == pytest.approx(u.values, abs=1e-12)
    w = construct_v_prop2(RiskAttitude((0.0, 1.0), (0.0, 1.0)), ExtendedCDF.from_atoms([(0.0, 0.5)], 0.5))
    assert w.values == pytest.approx((0.0, 1.0), abs=1e-12)


def test_primitive_representation_constants():
    u = RiskAttitude((0.0, 1.0), (3.0, 5.0))
    rep = primitive_representation(u, ExtendedCDF.point(0.0))
    assert rep.alpha == pytest.approx(1.0)
    assert rep.beta == pytest.approx(-2.0)
    assert verify_representation(u, rep, 1e-12)


def test_image_hull():
    assert image_hull(IDENT) == SetDescriptor.interval(0, 2)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_identification_recovers_canonical_F(seed):
    v, F = gen.identification_instance(np.random.default_rng(seed))
    u = effective_utility(v, F)
    ident = identify_F(u, v)
    want = gen.canonical_F(F, v)
    assert abs(ident.F.neg_inf_mass - want.neg_inf_mass) < 1e-9
    np.testing.assert_allclose(ident.F(v.array), want(v.array), atol=1e-9)
    assert is_concentrated_on_image(ident.F, v)
    assert verify_representation(u, OORepresentation(v, ident.F, ident.alpha, ident.beta))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_slopes_are_lambda_times_F(seed):
    v, F = gen.identification_instance(np.random.default_rng(seed))
    ident = identify_F(effective_utility(v, F), v)
    left = np.asarray(ident.phi.xs[:-1])
    np.testing.assert_allclose(ident.phi.slopes, ident.lam * np.atleast_1d(ident.F(left)), atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_less_risk_averse_attitudes_are_representable(seed):
    u, v = gen.pratt_pair(np.random.default_rng(seed))
    if u.is_constant or v.is_constant or not less_risk_averse_crossratio(u, v):
        return
    ident = identify_F(u, v)
    assert verify_representation(u, OORepresentation(v, ident.F, ident.alpha, ident.beta))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_available_option_never_hurts(seed):
    rng = np.random.default_rng(seed)
    F = gen.mixed_cdf(rng)
    if F.neg_inf_mass > 0:
        return
    n = int(rng.integers(1, 6))
    v = RiskAttitude(tuple(float(i) for i in range(n)), tuple(rng.uniform(-4, 4, size=n)))
    assert np.all(effective_utility(v, F).array >= v.array - 1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_primitive_construction_roundtrip(seed):
    u, F = gen.primitive_instance(np.random.default_rng(seed))
    v = construct_v_prop2(u, F)
    assert verify_representation(u, OORepresentation(v, F), 1e-9)
    # the constructed attitude lands where the option is not worthless
    if F.neg_inf_mass == 0:
        assert np.all(np.atleast_1d(F(v.array)) > 0)
    np.testing.assert_allclose(np.atleast_1d(chi_eval(F, v.array)) - u.array,
                               chi_eval(F, v.values[0]) - u.values[0], atol=1e-9)
