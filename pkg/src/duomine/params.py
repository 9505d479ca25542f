"""Scenario parameters: hashrates, tie-break weights, protocol constants.

Conventions used across the package: Alice and Bob are the two independent
block-withholding miners, Henry is the aggregated honest pool. alpha1, alpha2
and alpha_h are their hashrate shares and must partition 1. gamma_i is the
fraction of honest hashrate that mines on attacker i's branch during a two-way
tie with the public chain; theta1/theta2 split the honest hashrate in a
three-way tie. beta_i = gamma_i / (gamma1 + gamma2) weights the honest pool
between the two attacker branches when their chains tie with each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import IntEnum

from .errors import HonestMinority, InvalidPartition, UndefinedBeta

PARTITION_TOL = 1e-9


class MinerId(IntEnum):
    ALICE = 0
    BOB = 1
    HENRY = 2


@dataclass(frozen=True)
class HashrateProfile:
    """Hashrate shares of the three parties.  alpha_h may be omitted."""

    alpha1: float
    alpha2: float
    alpha_h: float | None = None

    def normalized(self) -> "HashrateProfile":
        """Fill in alpha_h = 1 - alpha1 - alpha2 when it was omitted."""
        if self.alpha_h is not None:
            return self
        return replace(self, alpha_h=1.0 - self.alpha1 - self.alpha2)

    def validate(self) -> "HashrateProfile":
        prof = self.normalized()
        shares = (prof.alpha1, prof.alpha2, prof.alpha_h)
        for a in shares:
            if not math.isfinite(a) or a < 0.0 or a > 1.0:
                raise InvalidPartition(f"hashrate {a!r} outside [0, 1]")
        if abs(sum(shares) - 1.0) > PARTITION_TOL:
            raise InvalidPartition(
                f"hashrates sum to {sum(shares)!r}, expected 1 within {PARTITION_TOL}"
            )
        return prof

    def share(self, miner: MinerId) -> float:
        prof = self.normalized()
        return (prof.alpha1, prof.alpha2, prof.alpha_h)[miner]


@dataclass(frozen=True)
class TieBreakParams:
    """Branch-choice weights used when equal-length chains compete."""

    gamma1: float = 0.5
    gamma2: float = 0.5
    theta1: float = 1.0 / 3.0
    theta2: float = 1.0 / 3.0

    def validate(self) -> "TieBreakParams":
        for name in ("gamma1", "gamma2"):
            g = getattr(self, name)
            if not math.isfinite(g) or g < 0.0 or g > 1.0:
                raise InvalidPartition(f"{name}={g!r} outside [0, 1]")
        for name in ("theta1", "theta2"):
            t = getattr(self, name)
            if not math.isfinite(t) or t < 0.0:
                raise InvalidPartition(f"{name}={t!r} must be >= 0")
        if self.theta1 + self.theta2 > 1.0 + PARTITION_TOL:
            raise InvalidPartition(
                f"theta1 + theta2 = {self.theta1 + self.theta2!r} exceeds 1"
            )
        return self

    @property
    def beta1(self) -> float:
        s = self.gamma1 + self.gamma2
        if s <= 0.0:
            raise UndefinedBeta("beta undefined: gamma1 + gamma2 == 0")
        return self.gamma1 / s

    @property
    def beta2(self) -> float:
        return 1.0 - self.beta1


@dataclass(frozen=True)
class ProtocolParams:
    """Chain-level constants independent of who is attacking."""

    n_cap: int = 4                   # private chains publish in full at this length
    blocks_per_epoch: int = 2016     # difficulty retarget window, main-chain blocks
    honest_majority_required: bool = True

    def validate(self) -> "ProtocolParams":
        if int(self.n_cap) != self.n_cap or self.n_cap < 2:
            raise InvalidPartition(f"n_cap={self.n_cap!r} must be an integer >= 2")
        if int(self.blocks_per_epoch) != self.blocks_per_epoch or self.blocks_per_epoch < 1:
            raise InvalidPartition(
                f"blocks_per_epoch={self.blocks_per_epoch!r} must be a positive integer"
            )
        return self


@dataclass(frozen=True)
class Scenario:
    """A validated attack scenario.  Build through validate_scenario()."""

    profile: HashrateProfile
    tiebreak: TieBreakParams = field(default_factory=TieBreakParams)
    protocol: ProtocolParams = field(default_factory=ProtocolParams)

    @property
    def alpha1(self) -> float:
        return self.profile.alpha1

    @property
    def alpha2(self) -> float:
        return self.profile.alpha2

    @property
    def alpha_h(self) -> float:
        return self.profile.alpha_h


def validate_scenario(
    profile: HashrateProfile,
    tiebreak: TieBreakParams | None = None,
    protocol: ProtocolParams | None = None,
) -> Scenario:
    """Validate all parameters and return a normalized scenario.

    Raises InvalidPartition for malformed shares/weights and HonestMinority
    when the honest pool does not strictly out-hash each attacker (unless the
    protocol explicitly waives that check). Revalidating a scenario's own
    fields returns an equal scenario.
    """
    tiebreak = (tiebreak or TieBreakParams()).validate()
    protocol = (protocol or ProtocolParams()).validate()
    prof = profile.validate()
    if protocol.honest_majority_required:
        biggest = max(prof.alpha1, prof.alpha2)
        if not prof.alpha_h > biggest:
            raise HonestMinority(
                f"honest share {prof.alpha_h!r} must exceed max attacker share {biggest!r}"
            )
    return Scenario(profile=prof, tiebreak=tiebreak, protocol=protocol)


def symmetric_scenario(
    alpha: float,
    n_cap: int = 4,
    tiebreak: TieBreakParams | None = None,
    honest_majority_required: bool = True,
) -> Scenario:
    """Both attackers hold the same share alpha; honest pool gets the rest."""
    return validate_scenario(
        HashrateProfile(alpha, alpha),
        tiebreak,
        ProtocolParams(n_cap=n_cap, honest_majority_required=honest_majority_required),
    )
