from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from risklens.core_numeric import pwl_is_convex
from risklens.errors import DomainError, NotLessRiskAverse
from risklens.preferences import (
    CrossRatioViolation,
    OrdinalViolation,
    RiskAttitude,
    SimpleLottery,
    arrow_pratt_index,
    construct_phi_greatest,
    crossratio_violation,
    expected_utility,
    less_risk_averse_crossratio,
    less_risk_averse_oracle,
    lottery_margins,
    oracle_lotteries,
)

X3 = (0.0, 1.0, 2.0)
IDENT = RiskAttitude(X3, X3)
CONVEX = RiskAttitude(X3, (0.0, 0.5, 1.5))
CONCAVE = RiskAttitude(X3, (0.0, 1.0, 1.5))
seeds = st.integers(0, 2**32 - 1)


def test_expected_utility_examples():
    assert expected_utility(IDENT, SimpleLottery.degenerate(1.0)) == 1.0
    p = SimpleLottery(((0.0, 1 / 3), (2.0, 2 / 3)))
    assert expected_utility(CONVEX, p) == pytest.approx(1.0, abs=1e-15)
    for x in X3:
        assert expected_utility(CONCAVE, SimpleLottery.degenerate(x)) == CONCAVE(x)


def test_expected_utility_rejects_foreign_outcomes():
    with pytest.raises(DomainError):
        expected_utility(IDENT, SimpleLottery.degenerate(5.0))


def test_lottery_validation():
    with pytest.raises(DomainError):
        SimpleLottery(((0.0, 0.5), (1.0, 0.4)))
    with pytest.raises(DomainError):
        SimpleLottery(((0.0, 1.5), (1.0, -0.5)))
    assert SimpleLottery(((1.0, 0.5), (1.0, 0.5), (2.0, 0.0))).support == ((1.0, 1.0),)


def test_attitude_validation():
    with pytest.raises(DomainError):
        RiskAttitude((), ())
    with pytest.raises(DomainError):
        RiskAttitude((0.0, 0.0), (1.0, 2.0))
    with pytest.raises(DomainError):
        RiskAttitude((0.0,), (float("nan"),))
    u = RiskAttitude((2.0, 0.0), (5.0, 1.0))
    assert u.alternatives == (0.0, 2.0) and u.values == (1.0, 5.0)


def test_crossratio_examples():
    assert less_risk_averse_crossratio(CONCAVE, CONCAVE)
    assert less_risk_averse_crossratio(CONVEX, IDENT)
    assert not less_risk_averse_crossratio(CONCAVE, IDENT)


def test_crossratio_witness_is_the_classic_lottery():
    violation = crossratio_violation(CONCAVE, IDENT)
    assert isinstance(violation, CrossRatioViolation)
    assert (violation.x, violation.y, violation.z) == X3
    assert violation.ratio_u == 0.5 and violation.ratio_v == 1.0
    lottery, x = violation.witness()
    assert x == 1.0
    assert lottery.as_dict() == pytest.approx({0.0: 1 / 3, 2.0: 2 / 3})
    u_margin, v_margin = lottery_margins(CONCAVE, IDENT, lottery, x)
    assert u_margin == pytest.approx(0.0, abs=1e-15)
    assert v_margin == pytest.approx(-1 / 3)


def test_strict_witness_has_both_margins_nonzero():
    violation = crossratio_violation(CONCAVE, IDENT)
    lottery, x = violation.strict_witness(CONCAVE, IDENT)
    u_margin, v_margin = lottery_margins(CONCAVE, IDENT, lottery, x)
    assert u_margin > 1e-3 and v_margin < -1e-3


def test_ordinal_violation_reported_first():
    u = RiskAttitude(X3, (0.0, 2.0, 1.0))
    violation = crossratio_violation(u, IDENT)
    assert isinstance(violation, OrdinalViolation)
    lottery, x = violation.witness()
    u_margin, v_margin = lottery_margins(u, IDENT, lottery, x)
    assert u_margin >= 0 and v_margin < 0


def test_oracle_examples():
    assert less_risk_averse_oracle(CONCAVE, CONCAVE).holds
    assert less_risk_averse_oracle(CONVEX, IDENT).holds
    res = less_risk_averse_oracle(CONCAVE, IDENT)
    assert not res.holds
    w = res.violation
    assert w.x == 1.0
    assert w.u_margin >= 0 and w.v_margin < 0
    # the oracle scans the j/64 grid, so its first hit is the grid point nearest 1/3 from above
    assert w.lottery.as_dict() == {0.0: 22 / 64, 2.0: 42 / 64}


def test_oracle_lottery_matrix_shape_and_rows():
    P = oracle_lotteries(3, 10, seed=1)
    assert P.shape == (3 + 3 * 63 + 10, 3)
    np.testing.assert_allclose(P.sum(axis=1), 1.0)
    assert np.all(P >= 0)
    np.testing.assert_array_equal(P, oracle_lotteries(3, 10, seed=1))


def test_oracle_rejects_zero_trials():
    with pytest.raises(DomainError):
        less_risk_averse_oracle(IDENT, IDENT, trials=0)


def test_phi_greatest_examples():
    phi = construct_phi_greatest(CONVEX, IDENT)
    assert phi.knots == [(0, 0), (1, 0.5), (2, 1.5)]
    assert construct_phi_greatest(IDENT, IDENT).knots == [(0, 0), (1, 1), (2, 2)]
    v = RiskAttitude(X3, (0.0, 10.0, 20.0))
    assert construct_phi_greatest(CONVEX, v).knots == [(0, 0), (10, 0.5), (20, 1.5)]


def test_phi_greatest_errors():
    with pytest.raises(NotLessRiskAverse) as info:
        construct_phi_greatest(CONCAVE, IDENT)
    assert isinstance(info.value.violation, CrossRatioViolation)
    flat = RiskAttitude(X3, (1.0, 1.0, 1.0))
    with pytest.raises(DomainError):
        construct_phi_greatest(flat, flat)


def test_ties_in_v_need_equal_u():
    v = RiskAttitude(X3, (0.0, 1.0, 1.0))
    assert construct_phi_greatest(RiskAttitude(X3, (0.0, 2.0, 2.0)), v).knots == [(0, 0), (1, 2)]
    assert not less_risk_averse_crossratio(RiskAttitude(X3, (0.0, 2.0, 3.0)), v)


def test_constant_v_only_admits_constant_u():
    flat = RiskAttitude(X3, (1.0, 1.0, 1.0))
    assert less_risk_averse_crossratio(RiskAttitude(X3, (4.0, 4.0, 4.0)), flat)
    assert not less_risk_averse_crossratio(IDENT, flat)


def test_jump_at_the_top_stays_finite_on_a_grid():
    xs = tuple(np.linspace(0, 1, 11))
    v = RiskAttitude(xs, xs)
    u = v.with_values(xs[:-1] + (2.0,))
    phi = construct_phi_greatest(u, v)
    assert phi.slopes[-1] > phi.slopes[:-1].max()
    np.testing.assert_allclose(phi(v.array), u.array, atol=1e-12)


@pytest.mark.parametrize("fn, expected, tol", [
    (lambda x: x, 0.0, 1e-6),
    (lambda x: -np.exp(-2 * x), -2.0, 1e-3),
    (lambda x: -np.exp(-x), -1.0, 1e-3),
])
def test_arrow_pratt_index(fn, expected, tol):
    xs = np.round(np.arange(0, 1001) * 1e-3, 12)
    u = RiskAttitude.from_function(xs, fn)
    idx = np.array([r for _, r in arrow_pratt_index(u, 1e-3)])
    assert idx.size == 999
    assert np.max(np.abs(idx - expected)) < tol


def test_arrow_pratt_errors():
    with pytest.raises(DomainError):
        arrow_pratt_index(RiskAttitude((0.0, 1.0, 3.0), (0.0, 1.0, 2.0)))
    with pytest.raises(DomainError):
        arrow_pratt_index(RiskAttitude(X3, (2.0, 1.0, 0.0)))
    with pytest.raises(DomainError):
        arrow_pratt_index(RiskAttitude((0.0, 1.0), (0.0, 1.0)))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_phi_reproduces_u_and_is_convex(seed):
    u, v = gen.pratt_pair(np.random.default_rng(seed))
    if v.is_constant or not less_risk_averse_crossratio(u, v):
        return
    phi = construct_phi_greatest(u, v)
    np.testing.assert_allclose(phi(v.array), u.array, atol=1e-12)
    assert pwl_is_convex(phi)
    assert np.all(phi.slopes >= 0)


@settings(max_examples=100, deadline=None)
@given(seeds, st.floats(0.1, 10.0), st.floats(-10.0, 10.0))
def test_affine_invariance(seed, scale, shift):
    u, v = gen.pratt_pair(np.random.default_rng(seed))
    assert less_risk_averse_crossratio(u.affine(scale, shift), v) == less_risk_averse_crossratio(u, v)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_transitivity(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    xs = tuple(float(i) for i in range(n))
    w = RiskAttitude(xs, tuple(np.sort(rng.integers(0, 6, size=n)).astype(float)))
    v = w.with_values(np.exp(rng.uniform(0, 1) * w.array) if rng.uniform() < 0.7 else rng.integers(0, 6, size=n))
    u = v.with_values(np.exp(rng.uniform(0, 1) * v.array) if rng.uniform() < 0.7 else rng.integers(0, 6, size=n))
    if less_risk_averse_crossratio(u, v) and less_risk_averse_crossratio(v, w):
        assert less_risk_averse_crossratio(u, w)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_oracle_agrees_with_crossratio(seed):
    u, v = gen.pratt_pair(np.random.default_rng(seed))
    res = less_risk_averse_oracle(u, v, trials=100, seed=seed)
    assert res.holds == less_risk_averse_crossratio(u, v)
    if not res.holds:
        lottery, x = res.violation.witness()
        u_margin, v_margin = lottery_margins(u, v, lottery, x)
        assert (u_margin >= -1e-9 and v_margin < -1e-9) or (u_margin > 1e-9 and v_margin <= 1e-9)
