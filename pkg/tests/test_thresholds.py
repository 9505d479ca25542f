"""Profitability threshold searches across evaluators and modes."""
import pytest

from duomine.errors import InvalidPartition, NoSignChange
from duomine.thresholds import (
    convergence_study,
    make_evaluator,
    profitable_threshold,
    threshold_curve,
)
from duomine.params import TieBreakParams

# bisection results at tol=1e-8, frozen as regression anchors
SYMMETRIC = {2: 0.26638046, 3: 0.22565504, 4: 0.21488653}
SINGLE_N8 = 0.25189201
BOB_AT_016 = 0.21062557


def test_symmetric_thresholds_markov():
    for n_cap, expected in SYMMETRIC.items():
        r = profitable_threshold("symmetric", "markov", n_cap)
        assert r.threshold == pytest.approx(expected, abs=2e-5)
        assert r.bracket[0] <= r.threshold <= r.bracket[1]


def test_analytic_evaluators_agree_with_markov():
    for evaluator, n_cap in (("analytic-n2", 2), ("analytic-n4", 4)):
        a = profitable_threshold("symmetric", evaluator, n_cap)
        m = profitable_threshold("symmetric", "markov", n_cap)
        assert a.threshold == pytest.approx(m.threshold, abs=3e-5)


def test_single_attacker_cap_two_is_one_third():
    r = profitable_threshold("single", "markov", 2)
    assert r.threshold == pytest.approx(1.0 / 3.0, abs=2e-5)


def test_single_attacker_cap_eight():
    r = profitable_threshold("single", "markov", 8)
    assert r.threshold == pytest.approx(SINGLE_N8, abs=2e-5)


def test_bob_threshold_at_the_curve_minimum():
    r = profitable_threshold("bob", "markov", 4, alpha1=0.16)
    assert r.threshold == pytest.approx(BOB_AT_016, abs=2e-5)
    assert r.alpha1 == 0.16


def test_bob_curve_dips_then_rises():
    curve = threshold_curve([0.05, 0.16, 0.30], n_cap=4)
    low, mid, high = (r.threshold for r in curve)
    assert low > mid < high


def test_bob_mode_requires_alpha1():
    with pytest.raises(InvalidPartition):
        profitable_threshold("bob", "markov", 4)


def test_other_modes_reject_alpha1():
    with pytest.raises(InvalidPartition):
        profitable_threshold("symmetric", "markov", 4, alpha1=0.2)


def test_analytic_evaluator_rejects_wrong_cap():
    with pytest.raises(InvalidPartition):
        profitable_threshold("symmetric", "analytic-n2", 4)
    with pytest.raises(InvalidPartition):
        make_evaluator("analytic-n4", 3, TieBreakParams())


def test_unknown_mode_and_evaluator():
    with pytest.raises(InvalidPartition):
        profitable_threshold("alice", "markov", 4)
    with pytest.raises(InvalidPartition):
        profitable_threshold("symmetric", "oracle", 4)


def test_no_sign_change_when_interval_misses_the_boundary():
    with pytest.raises(NoSignChange, match="never"):
        profitable_threshold("symmetric", "markov", 4, lo=0.02, hi=0.10)
    with pytest.raises(NoSignChange, match="always"):
        profitable_threshold("symmetric", "markov", 4, lo=0.30, hi=0.45)


def test_monte_carlo_evaluator_lands_close():
    r = profitable_threshold(
        "symmetric", "monte-carlo", 2, tol=1e-3, blocks=200_000, seed=17
    )
    assert r.threshold == pytest.approx(SYMMETRIC[2], abs=0.02)


def test_convergence_study_small_caps():
    results = convergence_study(n_caps=(2, 3, 4, 5), mode="symmetric")
    values = [r.threshold for r in results]
    assert values == sorted(values, reverse=True)
    singles = convergence_study(n_caps=(2, 3, 4, 5), mode="single")
    for two, one in zip(results, singles):
        assert two.threshold < one.threshold


def test_honest_majority_flag():
    r = profitable_threshold("symmetric", "markov", 4)
    # at the symmetric threshold the honest pool still holds a strict majority
    assert r.honest_majority_ok
