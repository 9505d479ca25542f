"""Transient revenue across difficulty-adjustment epochs.

Withholding lowers the main-chain yield: only a fraction n of mined blocks
settle, so the first epoch after the attack starts stretches by 1/n while the
difficulty still assumes an honest network. Each retarget then rescales the
difficulty by observed progress. Time is measured in pre-attack block
intervals: difficulty starts at 1, the global hashrate starts at 1, and one
honest block settles per interval before the attack.

With epoch index k >= 1, hashrate S_k during epoch k (S_0 = 1), cap yield n
and E blocks per epoch, the recursion collapses to

    duration_1 = E / (n * S_1),   difficulty_1 = 1,
    difficulty_k = n * S_{k-1},   duration_k = E * S_{k-1} / S_k   (k >= 2).

An attacker is called profitable once her cumulative settled blocks per unit
time exceed what honest mining over the same epochs would have paid her,
i.e. alpha_1 times the honest counterfactual block rate under the same
hashrate schedule. For constant hashrate that baseline is exactly alpha_1 and
the cumulative attack rate is s_1 * k * n / (1 + (k-1) * n), which crosses
alpha_1 after a closed-form number of epochs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from . import chain
from .errors import DivergentSchedule, NeverProfitable
from .params import Scenario


@dataclass(frozen=True)
class GrowthSchedule:
    """Global hashrate per epoch, relative to the pre-attack level.

    kind 'constant' keeps S_k = 1; 'geometric' grows it by `factor` each
    epoch; 'multipliers' applies an explicit per-epoch factor sequence
    (repeating 1.0 once exhausted).
    """

    kind: str = "constant"
    factor: float = 1.0
    multipliers: tuple[float, ...] = ()

    def validate(self) -> "GrowthSchedule":
        if self.kind not in ("constant", "geometric", "multipliers"):
            raise DivergentSchedule(f"unknown schedule kind {self.kind!r}")
        if self.kind == "geometric" and not (math.isfinite(self.factor) and self.factor > 0.0):
            raise DivergentSchedule(f"geometric factor {self.factor!r} must be finite and positive")
        if self.kind == "multipliers":
            if not self.multipliers:
                raise DivergentSchedule("multiplier schedule is empty")
            for m in self.multipliers:
                if not (math.isfinite(m) and m > 0.0):
                    raise DivergentSchedule(f"multiplier {m!r} must be finite and positive")
        return self

    def hashrate(self, epoch: int) -> float:
        """S_k for epoch k >= 0 (S_0 = 1)."""
        if epoch <= 0 or self.kind == "constant":
            return 1.0
        if self.kind == "geometric":
            try:
                s = self.factor ** epoch
            except OverflowError:
                raise DivergentSchedule(
                    f"hashrate schedule leaves (0, inf) at epoch {epoch}"
                ) from None
        else:
            s = 1.0
            for m in self.multipliers[:epoch]:
                s *= m
        if not math.isfinite(s) or s <= 0.0:
            raise DivergentSchedule(f"hashrate schedule leaves (0, inf) at epoch {epoch}")
        return s


@dataclass(frozen=True)
class EpochRow:
    """One difficulty period of the transient."""

    epoch: int
    hashrate: float
    difficulty: float
    duration: float               # pre-attack block intervals
    blocks_mined: float
    credits: tuple[float, float, float]
    absolute_rates: tuple[float, float, float]
    cumulative_rate1: float
    baseline_rate1: float

    @property
    def profitable(self) -> bool:
        return self.cumulative_rate1 > self.baseline_rate1


@dataclass(frozen=True)
class TransientReport:
    shares: tuple[float, float, float]
    yield_per_block: float
    rows: tuple[EpochRow, ...] = field(repr=False)
    profitable_after: int | None

    @property
    def epochs(self) -> int:
        return len(self.rows)


def steady_shares(scenario: Scenario) -> tuple[tuple[float, float, float], float]:
    """Relative revenues and main-chain yield per mined block at steady attack."""
    rep = chain.reward_rates(scenario)
    return rep.relative, rep.yield_per_block


def simulate_epochs(
    scenario: Scenario,
    epochs: int,
    schedule: GrowthSchedule | None = None,
    shares: tuple[float, float, float] | None = None,
    yield_per_block: float | None = None,
) -> TransientReport:
    """Walk `epochs` difficulty periods under the attack.

    The per-epoch expectations (shares, yield) come from the steady-state
    chain unless given explicitly; the transient is in the difficulty and the
    wall-clock durations, not in the within-epoch composition.
    """
    schedule = (schedule or GrowthSchedule()).validate()
    if shares is None or yield_per_block is None:
        shares, yield_per_block = steady_shares(scenario)
    n = yield_per_block
    E = float(scenario.protocol.blocks_per_epoch)
    alpha1 = scenario.alpha1

    rows: list[EpochRow] = []
    difficulty = 1.0
    attack_time = 0.0
    honest_time = 0.0
    profitable_after = None
    for k in range(1, epochs + 1):
        s_k = schedule.hashrate(k)
        s_prev = schedule.hashrate(k - 1)
        duration = E * difficulty / (n * s_k)
        # honest counterfactual under the same schedule: difficulty_k = S_{k-1}
        honest_time += E * s_prev / s_k
        attack_time += duration
        mined = E / n
        credits = tuple(share * E for share in shares)
        rates = tuple(c / duration for c in credits)
        cum_rate1 = shares[0] * E * k / attack_time
        baseline1 = alpha1 * E * k / honest_time
        row = EpochRow(
            epoch=k,
            hashrate=s_k,
            difficulty=difficulty,
            duration=duration,
            blocks_mined=mined,
            credits=credits,
            absolute_rates=rates,
            cumulative_rate1=cum_rate1,
            baseline_rate1=baseline1,
        )
        rows.append(row)
        if profitable_after is None and row.profitable:
            profitable_after = k
        difficulty = n * s_k
    return TransientReport(
        shares=shares,
        yield_per_block=n,
        rows=tuple(rows),
        profitable_after=profitable_after,
    )


def epochs_to_days(
    epochs: int, blocks_per_epoch: int = 2016, minutes_per_block: float = 10.0
) -> float:
    """Wall-clock days spanned by `epochs` difficulty periods at the pre-attack pace."""
    return epochs * blocks_per_epoch * minutes_per_block / (24.0 * 60.0)


def load_multipliers(path) -> GrowthSchedule:
    """Read a hashrate schedule file: one per-epoch multiplier per line.

    Blank lines and text after '#' are ignored.
    """
    values: list[float] = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise DivergentSchedule(f"bad multiplier line {raw!r}") from None
    return GrowthSchedule(kind="multipliers", multipliers=tuple(values)).validate()


def profitable_delay(
    scenario: Scenario,
    schedule: GrowthSchedule | None = None,
    max_epochs: int = 100_000,
) -> int:
    """Number of difficulty periods until the attack has paid for itself."""
    schedule = (schedule or GrowthSchedule()).validate()
    shares, n = steady_shares(scenario)
    alpha1 = scenario.alpha1
    if shares[0] <= alpha1:
        raise NeverProfitable(
            f"steady share {shares[0]:.6f} does not exceed hashrate {alpha1:.6f}"
        )
    if schedule.kind == "constant":
        # s1 * k * n / (1 + (k-1) * n) > alpha1
        k = alpha1 * (1.0 - n) / (n * (shares[0] - alpha1))
        k_star = max(1, math.floor(k) + 1)
        if k_star > max_epochs:
            raise NeverProfitable(f"no crossing within {max_epochs} epochs")
        return k_star
    E = float(scenario.protocol.blocks_per_epoch)
    difficulty = 1.0
    attack_time = 0.0
    honest_time = 0.0
    for k in range(1, max_epochs + 1):
        s_k = schedule.hashrate(k)
        attack_time += E * difficulty / (n * s_k)
        honest_time += E * schedule.hashrate(k - 1) / s_k
        if shares[0] * k / attack_time > alpha1 * k / honest_time:
            return k
        difficulty = n * s_k
    raise NeverProfitable(f"no crossing within {max_epochs} epochs")
