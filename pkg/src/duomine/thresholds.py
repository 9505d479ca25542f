"""Profitability thresholds: where relative revenue starts to exceed hashrate.

A withholding attack pays off once the attacker's share of main-chain blocks
exceeds her share of hashrate. The threshold finder scans the excess-share
function f(x) = share(x) - x over a hashrate interval, brackets its sign
change, and bisects. Three sweep modes cover the questions asked of the model:

* symmetric - both attackers hold x; threshold of either (they are equal).
* single    - one attacker holds x, the other is absent.
* bob       - Alice's hashrate is fixed, Bob's x varies; Bob's threshold.

Evaluators: the two closed forms (caps 2 and 4), the exact chain for any cap,
and Monte Carlo with common random numbers (the same seed at every probe, so
the noise cancels across probes and bisection remains stable).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import chain, closedform, simulate
from .errors import InvalidPartition, NonMonotone, NoSignChange
from .params import HashrateProfile, ProtocolParams, Scenario, TieBreakParams, validate_scenario

EVALUATORS = ("markov", "analytic-n2", "analytic-n4", "monte-carlo")
MODES = ("symmetric", "single", "bob")
MIN_SHARE = 0.01


@dataclass(frozen=True)
class ThresholdResult:
    mode: str
    evaluator: str
    n_cap: int
    threshold: float
    bracket: tuple[float, float]
    evaluations: int
    honest_majority_ok: bool
    alpha1: float | None = None


def _scenario(a1: float, a2: float, n_cap: int, tiebreak: TieBreakParams) -> Scenario:
    # the search interval deliberately crosses into honest-minority territory
    return validate_scenario(
        HashrateProfile(a1, a2),
        tiebreak,
        ProtocolParams(n_cap=n_cap, honest_majority_required=False),
    )


def make_evaluator(
    evaluator: str,
    n_cap: int,
    tiebreak: TieBreakParams,
    blocks: int = 2_000_000,
    seed: int = 0,
) -> Callable[[float, float], tuple[float, float, float]]:
    """Return shares(a1, a2) -> relative revenues under the given evaluator."""
    if evaluator == "analytic-n2" or evaluator == "analytic-n4":
        cap = 2 if evaluator == "analytic-n2" else 4
        if n_cap != cap:
            raise InvalidPartition(f"evaluator {evaluator} requires cap {cap}, got {n_cap}")
        fn = closedform.reward_rates_n2 if cap == 2 else closedform.reward_rates_n4

        def shares(a1: float, a2: float):
            return closedform.relative_revenue(fn(a1, a2, 1.0 - a1 - a2, tiebreak))

    elif evaluator == "markov":

        def shares(a1: float, a2: float):
            return chain.reward_rates(_scenario(a1, a2, n_cap, tiebreak)).relative

    elif evaluator == "monte-carlo":

        def shares(a1: float, a2: float):
            return simulate.run(_scenario(a1, a2, n_cap, tiebreak), blocks, seed=seed).relative

    else:
        raise InvalidPartition(f"unknown evaluator {evaluator!r}; choose from {EVALUATORS}")
    return shares


def profitable_threshold(
    mode: str = "symmetric",
    evaluator: str = "markov",
    n_cap: int = 4,
    alpha1: float | None = None,
    tiebreak: TieBreakParams | None = None,
    lo: float = MIN_SHARE,
    hi: float | None = None,
    tol: float = 1e-5,
    blocks: int = 2_000_000,
    seed: int = 0,
    prescan: int = 33,
) -> ThresholdResult:
    """Smallest hashrate at which the probed attacker out-earns her share."""
    tiebreak = (tiebreak or TieBreakParams()).validate()
    if mode not in MODES:
        raise InvalidPartition(f"unknown mode {mode!r}; choose from {MODES}")
    if mode == "bob":
        if alpha1 is None:
            raise InvalidPartition("mode 'bob' needs alpha1, the fixed hashrate of the other attacker")
        if hi is None:
            hi = min(0.49, 1.0 - alpha1 - MIN_SHARE)
    else:
        if alpha1 is not None:
            raise InvalidPartition(f"mode {mode!r} does not take alpha1")
        if hi is None:
            hi = 0.49
    if not lo < hi:
        raise InvalidPartition(f"empty search interval [{lo}, {hi}]")

    shares = make_evaluator(evaluator, n_cap, tiebreak, blocks=blocks, seed=seed)
    if mode == "symmetric":
        f = lambda x: shares(x, x)[0] - x
    elif mode == "single":
        f = lambda x: shares(x, 0.0)[0] - x
    else:
        f = lambda x: shares(alpha1, x)[1] - x

    evaluations = 0

    def probe(x: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return f(x)

    xs = [lo + (hi - lo) * i / (prescan - 1) for i in range(prescan)]
    fs = [probe(x) for x in xs]
    brackets = [i for i in range(prescan - 1) if (fs[i] <= 0.0) != (fs[i + 1] <= 0.0)]
    if not brackets:
        side = "never" if all(v <= 0.0 for v in fs) else "always"
        raise NoSignChange(
            f"share minus hashrate is {side} positive on [{lo:.4f}, {hi:.4f}] ({mode}, cap {n_cap})"
        )
    if len(brackets) > 1:
        raise NonMonotone(
            f"{len(brackets)} profitability boundaries on [{lo:.4f}, {hi:.4f}]; refine the interval"
        )
    b_lo, b_hi = xs[brackets[0]], xs[brackets[0] + 1]
    neg_low = fs[brackets[0]] <= 0.0
    while b_hi - b_lo > tol:
        mid = 0.5 * (b_lo + b_hi)
        if (probe(mid) <= 0.0) == neg_low:
            b_lo = mid
        else:
            b_hi = mid
    threshold = 0.5 * (b_lo + b_hi)

    a1, a2 = {
        "symmetric": (threshold, threshold),
        "single": (threshold, 0.0),
        "bob": (alpha1, threshold),
    }[mode]
    honest_ok = 1.0 - a1 - a2 > max(a1, a2)
    return ThresholdResult(
        mode=mode,
        evaluator=evaluator,
        n_cap=n_cap,
        threshold=threshold,
        bracket=(b_lo, b_hi),
        evaluations=evaluations,
        honest_majority_ok=honest_ok,
        alpha1=alpha1,
    )


def threshold_curve(
    alpha1_values,
    evaluator: str = "markov",
    n_cap: int = 4,
    tiebreak: TieBreakParams | None = None,
    tol: float = 1e-5,
    blocks: int = 2_000_000,
    seed: int = 0,
) -> list[ThresholdResult]:
    """Bob's threshold as a function of Alice's fixed hashrate."""
    return [
        profitable_threshold(
            mode="bob", evaluator=evaluator, n_cap=n_cap, alpha1=float(a1),
            tiebreak=tiebreak, tol=tol, blocks=blocks, seed=seed,
        )
        for a1 in alpha1_values
    ]


def convergence_study(
    n_caps=tuple(range(2, 9)),
    mode: str = "symmetric",
    evaluator: str = "markov",
    alpha1: float | None = None,
    tiebreak: TieBreakParams | None = None,
    tol: float = 1e-5,
) -> list[ThresholdResult]:
    """Threshold of each cap, to see where growing the cap stops helping."""
    return [
        profitable_threshold(
            mode=mode, evaluator=evaluator, n_cap=n, alpha1=alpha1,
            tiebreak=tiebreak, tol=tol,
        )
        for n in n_caps
    ]
