"""Exact cross-checks between the closed forms and the rule-generated chain.

The revenue rates of the rule-generated chain are rational functions of the
hashrates and tie weights, and so are the closed forms. Comparing them in
exact rational arithmetic at random rational points is therefore a polynomial
identity test: agreement at a handful of independent points makes a hidden
algebraic difference vanishingly unlikely, with no float tolerance to hide it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import chain, closedform
from .params import TieBreakParams


@dataclass(frozen=True)
class IdentityReport:
    n_cap: int
    points: int
    identical: bool
    max_abs_error: Fraction
    worst_point: dict | None


def random_rational_atoms(rng: random.Random) -> dict[str, Fraction]:
    """A strictly positive rational scenario with an honest majority."""
    a1 = Fraction(rng.randint(1, 40), 128)
    a2 = Fraction(rng.randint(1, 40), 128)
    atoms = {
        "a1": a1,
        "a2": a2,
        "ah": 1 - a1 - a2,
        "g1": Fraction(rng.randint(0, 16), 16),
        "g2": Fraction(rng.randint(1, 16), 16),
        "t1": Fraction(rng.randint(0, 8), 24),
        "t2": Fraction(rng.randint(0, 8), 24),
    }
    return atoms


def verify_closed_form(n_cap: int, points: int = 8, seed: int = 1789) -> IdentityReport:
    """Exactly compare `closedform` rates with the chain at `points` random
    rational scenarios for cap 2 or cap 4."""
    fn = {2: closedform.reward_rates_n2, 4: closedform.reward_rates_n4}[n_cap]
    ts = chain.build_transition_system(n_cap)
    rng = random.Random(seed)
    worst = Fraction(0)
    worst_point = None
    for _ in range(points):
        atoms = random_rational_atoms(rng)
        tb = TieBreakParams(gamma1=atoms["g1"], gamma2=atoms["g2"],
                            theta1=atoms["t1"], theta2=atoms["t2"])
        exact, _ = chain.exact_reward_rates(ts, atoms)
        closed = fn(atoms["a1"], atoms["a2"], atoms["ah"], tb)
        err = max(abs(e - c) for e, c in zip(exact, closed))
        if err > worst:
            worst = err
            worst_point = {k: str(v) for k, v in atoms.items()}
    return IdentityReport(n_cap=n_cap, points=points, identical=worst == 0,
                          max_abs_error=worst, worst_point=worst_point)


def verify_all(points: int = 8, seed: int = 1789) -> list[IdentityReport]:
    return [verify_closed_form(n_cap, points, seed) for n_cap in (2, 4)]
