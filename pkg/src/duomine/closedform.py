"""Closed-form steady-state revenue rates for private-chain caps 2 and 4.

All quantities are expected block counts per attack round (one round = the
interval between consecutive visits to the all-caught-up root state), so they
share the normalization of the root probability. Relative revenue divides a
party's rate by the total rate, i.e. by the expected main-chain growth per
round. The expressions are polynomial in the hashrates and tie-break weights
and evaluate exactly when given exact (Fraction) inputs.

The cap-4 expressions are long; `duomine.diagnostics` re-derives both caps
from the protocol rules in exact rational arithmetic and confirms that these
polynomials agree with the rule-generated chain identically (see README,
"closed-form verification notes").
"""
from __future__ import annotations

from .errors import UndefinedBeta, ZeroTotal
from .params import TieBreakParams

Rates = tuple[float, float, float]


def p000_n2(a1: float, a2: float, ah: float) -> float:
    """Stationary probability of the root state at cap 2."""
    return 1 / (1 + a1 + a2 + a1 * ah + 2 * a1 * a2 + a2 * ah + 2 * a1 * a2 * ah)


def reward_rates_n2(a1: float, a2: float, ah: float, tiebreak: TieBreakParams) -> Rates:
    """Per-round credited blocks (attacker1, attacker2, honest) at cap 2."""
    g1, g2 = tiebreak.gamma1, tiebreak.gamma2
    t1, t2 = tiebreak.theta1, tiebreak.theta2
    r1 = (
        2 * a1 * a1 * (1 + ah)
        + (a2 + ah) * a1 * ah * g1
        + a1 * a2 * ah
        + 4 * a1 * a1 * a2 * (1 + ah)
        + 2 * a1 * a2 * ah * ah * t1
    )
    r2 = (
        2 * a2 * a2 * (1 + ah)
        + (a1 + ah) * ah * a2 * g2
        + a1 * a2 * ah
        + 4 * a2 * a2 * a1 * (1 + ah)
        + 2 * a1 * a2 * ah * ah * t2
    )
    rh = (
        a1 * ah * ah * (2 - g1)
        + 2 * a1 * a2 * ah * ah * (2 - t1 - t2)
        + ah
        + a2 * ah * ah * (2 - g2)
        + a1 * a2 * ah * (2 - g1 - g2)
    )
    return (r1, r2, rh)


def reward_rates_n4(a1: float, a2: float, ah: float, tiebreak: TieBreakParams) -> Rates:
    """Per-round credited blocks (attacker1, attacker2, honest) at cap 4.

    Requires gamma1 + gamma2 > 0 so the attacker-vs-attacker tie weights
    beta_i = gamma_i / (gamma1 + gamma2) are defined.
    """
    g1, g2 = tiebreak.gamma1, tiebreak.gamma2
    t1, t2 = tiebreak.theta1, tiebreak.theta2
    if g1 + g2 == 0:
        raise UndefinedBeta("reward_rates_n4 needs gamma1 + gamma2 > 0")
    b1 = g1 / (g1 + g2)
    b2 = g2 / (g1 + g2)
    r1 = (
        4 * a1**4 * (1 + ah)
        + 3 * a1**3 * ah**2
        + 16 * a1**4 * a2
        + 4 * a1**2 * ah
        + 40 * a1**4 * a2**2 * (1 + 2 * a2)
        + a1 * a2 * ah * (1 + g1 + 2 * t1 * ah)
        + 10 * a1**2 * a2 * ah
        + 20 * a1**3 * a2 * ah * (3 * a2 + a1)
        + 15 * a1**3 * a2 * ah**2
        + 4 * a1**4 * a2**2 * ah * (1 + ah)
        + 4 * a1**4 * a2**3 * ah**2 * (b1 + 20)
        + 5 * a1**5 * a2**3 * ah
        + 4 * a1**4 * a2**3 * ah * (a2 + 21)
        + 3 * a1**3 * a2**4 * ah**2 * b1
        + a1 * ah**2 * g1
        + 12 * a1**2 * a2**2 * ah**2 * b1
        + a1**2 * a2**2 * ah**3 * b1 * (3 * a1 + 2 * a2)
        + 6 * a1**3 * a2**3 * ah**2 * (10 * ah * b1 + 1)
    )
    r2 = (
        4 * a2**4 * (1 + ah)
        + 3 * a2**3 * ah**2
        + 16 * a1 * a2**4
        + 4 * a2**2 * ah
        + 40 * a1**2 * a2**4 * (1 + 2 * a1)
        + a1 * a2 * ah * (1 + g2 + 2 * t2 * ah)
        + 10 * a1 * a2**2 * ah
        + 20 * a1 * a2**3 * ah * (3 * a1 + a2)
        + 15 * a1 * a2**3 * ah**2
        + 4 * a1**2 * a2**4 * ah * (1 + ah)
        + 4 * a1**3 * a2**4 * ah**2 * (b2 + 20)
        + 5 * a1**3 * a2**5 * ah
        + 4 * a1**3 * a2**4 * ah * (a1 + 21)
        + 3 * a1**4 * a2**3 * ah**2 * b2
        + a2 * ah**2 * g2
        + 12 * a1**2 * a2**2 * ah**2 * b2
        + a1**2 * a2**2 * ah**3 * b2 * (2 * a1 + 3 * a2)
        + 6 * a1**3 * a2**3 * ah**2 * (10 * ah * b2 + 1)
    )
    rh = (
        a1 * ah**2 * (2 - g1)
        + a2 * ah**2 * (2 - g2)
        + a1**2 * a2**3 * ah**3 * (2 * b1 + b2)
        + 2 * a1 * a2 * ah**2 * (2 - t1 - t2)
        + a1**2 * a2**2 * ah**2 * (6 + 4 * a1 * a2)
        + a1**3 * a2**2 * ah**3 * (b1 + 2 * b2)
        + a1 * a2 * ah * (2 - g1 - g2)
        + a1**3 * a2**3 * ah * (a1 + a2)
        + a1**3 * a2**4 * ah**2 * (2 * b1 + b2)
        + ah
        + a1**4 * a2**3 * ah**2 * (b1 + 2 * b2)
        + 20 * a1**3 * a2**3 * ah**3
        + 2 * a1**4 * a2**4 * ah
    )
    return (r1, r2, rh)


def relative_revenue(rates: Rates) -> Rates:
    """Normalize reward rates to shares of the main chain."""
    total = rates[0] + rates[1] + rates[2]
    if total == 0:
        raise ZeroTotal("all reward rates are zero")
    return (rates[0] / total, rates[1] / total, rates[2] / total)
