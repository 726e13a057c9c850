from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from risklens.comparative_statics import (
    CaraSpec,
    PhysicalOutsideOption,
    cara_effective_rho,
    cara_numeric_check,
    induce_F,
    mcs_part_a_check,
    mcs_part_b_check,
)
from risklens.distributions import ExtendedCDF, concentrated_on
from risklens.errors import DomainError, NumericalFailure
from risklens.preferences import RiskAttitude

X3 = (0.0, 1.0, 2.0)
IDENT = RiskAttitude(X3, X3)
seeds = st.integers(0, 2**32 - 1)


def test_induce_F_examples():
    assert induce_F(PhysicalOutsideOption(1.0), IDENT) == ExtendedCDF.worthless()
    mu = PhysicalOutsideOption(0.5, ((1.0, 0.5),))
    assert induce_F(mu, IDENT) == ExtendedCDF.from_atoms([(1.0, 0.5)], 0.5)
    third = PhysicalOutsideOption(0.0, tuple((x, 1 / 3) for x in X3))
    F = induce_F(third, IDENT)
    assert [a.at for a in F.atoms] == list(X3)
    assert all(a.mass == pytest.approx(1 / 3) for a in F.atoms)


def test_induce_F_merges_equal_values():
    v = RiskAttitude(X3, (0.0, 1.0, 1.0))
    F = induce_F(PhysicalOutsideOption(0.0, ((1.0, 0.5), (2.0, 0.5))), v)
    assert F == ExtendedCDF.point(1.0)


def test_induce_F_rejects_foreign_option():
    with pytest.raises(DomainError):
        induce_F(PhysicalOutsideOption(0.5, ((7.0, 0.5),)), IDENT)


def test_physical_option_validation():
    with pytest.raises(DomainError):
        PhysicalOutsideOption(0.5, ((1.0, 0.6),))
    with pytest.raises(DomainError):
        PhysicalOutsideOption(1.5, ((1.0, -0.5),))


def test_part_a_examples():
    F = ExtendedCDF.from_atoms([(0.0, 0.5), (2.0, 0.5)])
    res = mcs_part_a_check(IDENT, F, F)
    assert res.lra and res.rhr and res.agree
    res = mcs_part_a_check(IDENT, F, ExtendedCDF.from_atoms([(0.0, 0.25), (2.0, 0.75)]))
    assert res.agree
    G = ExtendedCDF.from_atoms([(0.0, 0.1), (2.0, 0.9)])
    res = mcs_part_a_check(IDENT, F, G)
    assert res.rhr and res.lra


def test_part_a_rejects_option_that_vanishes_inside():
    # a sure option at the top makes the effective utility constant
    F = ExtendedCDF.from_atoms([(0.0, 0.5), (2.0, 0.5)])
    with pytest.raises(DomainError):
        mcs_part_a_check(IDENT, F, ExtendedCDF.point(2.0))


def test_part_a_preconditions():
    F = ExtendedCDF.from_atoms([(0.0, 0.5), (2.0, 0.5)])
    with pytest.raises(DomainError):
        mcs_part_a_check(IDENT, F, ExtendedCDF.point(0.5))
    with pytest.raises(DomainError):
        mcs_part_a_check(IDENT, F, ExtendedCDF.from_atoms([(1.0, 0.5), (2.0, 0.5)]))


def test_part_b_examples():
    mu = PhysicalOutsideOption(0.5, ((1.0, 0.5),))
    res = mcs_part_b_check(IDENT, IDENT, mu)
    assert res.lra_u and res.lra_v
    convex = RiskAttitude(X3, (0.0, 0.5, 1.5))
    res = mcs_part_b_check(IDENT, convex, mu)
    assert res.lra_v and res.lra_u
    res = mcs_part_b_check(convex, IDENT, mu)
    assert not res.lra_v and not res.lra_u


def test_part_b_rejects_mismatched_alternatives():
    with pytest.raises(DomainError):
        mcs_part_b_check(IDENT, RiskAttitude((0.0, 1.0), (0.0, 1.0)), PhysicalOutsideOption(1.0))


def test_cara_closed_form():
    assert cara_effective_rho(CaraSpec(2.0, 0.5, 0.0)) == 1.5
    assert cara_effective_rho(CaraSpec(3.0, 0.0, 0.0)) == 3.0
    assert cara_effective_rho(CaraSpec(1.0, 1.0, 0.0)) == 0.0


def test_cara_spec_validation():
    with pytest.raises(DomainError):
        CaraSpec(1.0, -0.5, 0.0)


def test_cara_grid_example():
    res = cara_numeric_check(CaraSpec(2.0, 0.5, 0.0), lo=-6.0, n=4001, window=(-5.0, -1.0))
    assert res.max_abs_err < 0.015
    assert res.rho_closed_form == 1.5
    assert res.x.size == res.v.size == res.u.size == 4001
    assert res.rho_x.size == res.rho_hat.size == 3999


def test_cara_no_outside_option():
    res = cara_numeric_check(CaraSpec(1.0, 0.0, 0.0), lo=-6.0, n=4001)
    assert res.max_abs_err < 1e-6
    np.testing.assert_allclose(res.u, res.v, atol=1e-12)


def test_cara_risk_neutral_truth():
    res = cara_numeric_check(CaraSpec(0.0, 0.7, 0.0), lo=-6.0, n=4001)
    assert res.rho_closed_form == pytest.approx(-0.7)
    assert res.max_abs_err < 1e-6


def test_cara_converges_quadratically():
    errs = [cara_numeric_check(CaraSpec(2.0, 0.5, 0.0), -6.0, n, window=(-5.0, -1.0)).max_abs_err
            for n in (501, 1001, 2001, 4001)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert all(3.0 < a / b < 5.0 for a, b in zip(errs, errs[1:]))


def test_cara_errors():
    with pytest.raises(NumericalFailure):
        cara_numeric_check(CaraSpec(500.0, 0.5, 0.0), lo=-6.0, n=401)
    with pytest.raises(DomainError):
        cara_numeric_check(CaraSpec(2.0, 0.5, 0.0), lo=-6.0, n=4)
    with pytest.raises(DomainError):
        cara_numeric_check(CaraSpec(2.0, 0.5, 0.0), lo=1.0, n=100)
    with pytest.raises(DomainError):
        cara_numeric_check(CaraSpec(2.0, 0.5, 0.0), lo=-6.0, n=100, window=(5.0, 6.0))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_induced_F_concentrated_on_image(seed):
    v, _, mu = gen.attitude_shift_instance(np.random.default_rng(seed))
    assert concentrated_on(induce_F(mu, v), v.image(), allow_neg_inf=True)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_part_a_agreement(seed):
    v, F, F_hat = gen.option_shift_instance(np.random.default_rng(seed))
    assert mcs_part_a_check(v, F, F_hat).agree


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_part_b_agreement(seed):
    v, v_hat, mu = gen.attitude_shift_instance(np.random.default_rng(seed))
    assert mcs_part_b_check(v, v_hat, mu).agree
