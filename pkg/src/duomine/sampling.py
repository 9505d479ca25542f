"""Seeded random scenario generation for tests and diagnostics."""
from __future__ import annotations

import numpy as np

from .params import HashrateProfile, ProtocolParams, Scenario, TieBreakParams, validate_scenario


def scenario_grid(
    count: int,
    seed: int,
    n_cap: int = 4,
    max_attacker: float = 0.45,
    min_share: float = 0.01,
    randomize_tiebreak: bool = True,
) -> list[Scenario]:
    """Draw `count` valid scenarios, reproducibly for a given seed.

    Honest-majority is not enforced; the closed forms and the chain are
    defined on the whole simplex interior.
    """
    rng = np.random.default_rng(seed)
    out: list[Scenario] = []
    while len(out) < count:
        a1 = rng.uniform(min_share, max_attacker)
        a2 = rng.uniform(min_share, max_attacker)
        if a1 + a2 > 1.0 - min_share:
            continue
        if randomize_tiebreak:
            g1, g2 = rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)
            t1 = rng.uniform(0.0, 1.0)
            t2 = rng.uniform(0.0, 1.0 - t1)
            tb = TieBreakParams(g1, g2, t1, t2)
        else:
            tb = TieBreakParams()
        out.append(
            validate_scenario(
                HashrateProfile(a1, a2),
                tb,
                ProtocolParams(n_cap=n_cap, honest_majority_required=False),
            )
        )
    return out
