"""Block-tree engine tests built from hand-worked event traces."""
import numpy as np
import pytest

from duomine import engine
from duomine.engine import GENESIS, World, apply, choice_affiliations, flush, step, validate_world
from duomine.errors import InconsistentState, UndefinedBeta
from duomine.params import MinerId, Scenario, TieBreakParams, symmetric_scenario

A, B, H = MinerId.ALICE, MinerId.BOB, MinerId.HENRY
N = 4


def play(moves, n_cap=N):
    """Apply (winner, branch) moves from genesis; return world and step list."""
    world = GENESIS
    steps = []
    for move in moves:
        winner, branch = move if isinstance(move, tuple) else (move, None)
        world, rec = apply(world, winner, n_cap, branch)
        validate_world(world, n_cap)
        steps.append(rec)
    return world, steps


def test_honest_block_settles_immediately():
    world, steps = play([H])
    assert world == GENESIS
    assert steps[0].credits == (0, 0, 1)
    assert steps[0].orphans == (0, 0, 0)
    assert steps[0].to_root


def test_withheld_block_opens_private_chain():
    world, steps = play([A])
    assert not world.is_root
    assert world.private_length(A) == 1
    assert world.private_length(B) == 0
    assert world.public_length() == 0
    assert steps[0].credits == (0, 0, 0)
    assert steps[0].orphans == (0, 0, 0)


def test_lead_two_release_wins_whole_round():
    # two withheld blocks beat the single honest block that triggers release
    world, steps = play([A, A, H])
    assert world == GENESIS
    assert steps[-1].credits == (2, 0, 0)
    assert steps[-1].orphans == (0, 0, 1)


def test_lead_one_release_after_two_honest_blocks():
    world, steps = play([A, A, A, H, H])
    assert steps[-2].credits == (0, 0, 0)  # lead still 2 after the first
    assert world == GENESIS
    assert steps[-1].credits == (3, 0, 0)
    assert steps[-1].orphans == (0, 0, 2)


def test_matched_release_creates_tie():
    world, steps = play([A, H])
    assert world.is_tie
    assert set(world.head_affiliations()) == {A, H}
    assert world.private_length(A) == 0
    assert steps[-1].credits == (0, 0, 0)
    assert steps[-1].orphans == (0, 0, 0)


def test_tie_resolution_by_honest_on_attacker_branch():
    world, steps = play([A, H, (H, A)])
    assert world == GENESIS
    assert steps[-1].credits == (1, 0, 1)
    assert steps[-1].orphans == (0, 0, 1)


def test_tie_resolution_by_honest_on_own_branch():
    world, steps = play([A, H, (H, H)])
    assert world == GENESIS
    assert steps[-1].credits == (0, 0, 2)
    assert steps[-1].orphans == (1, 0, 0)


def test_tie_resolution_by_idle_attacker_publishes():
    # Bob has no private chain, so his block resolves the tie for the branch
    # he picked and he collects the extension reward
    world, steps = play([A, H, (B, A)])
    assert world == GENESIS
    assert steps[-1].credits == (1, 1, 0)
    assert steps[-1].orphans == (0, 0, 1)


def test_tie_owner_extends_own_branch():
    world, steps = play([A, H, (A, None)])
    assert world == GENESIS
    assert steps[-1].credits == (2, 0, 0)
    assert steps[-1].orphans == (0, 0, 1)


def test_three_way_tie_formation_and_resolution():
    world, steps = play([A, B, H])
    assert set(world.head_affiliations()) == {A, B, H}
    assert steps[-1].credits == (0, 0, 0)
    for branch, credits, orphans in (
        (A, (1, 0, 1), (0, 1, 1)),
        (B, (0, 1, 1), (1, 0, 1)),
        (H, (0, 0, 2), (1, 1, 0)),
    ):
        resolved, rec = apply(world, H, N, branch)
        assert resolved == GENESIS
        assert rec.credits == credits
        assert rec.orphans == orphans


def test_release_chain_reaction():
    # the honest block pulls Alice level, and Bob's lead-one release over the
    # joined tie ends the round in his favor
    world, steps = play([A, B, B, H])
    assert world == GENESIS
    assert steps[-1].credits == (0, 2, 0)
    assert steps[-1].orphans == (1, 0, 1)


def test_double_release_forms_attacker_tie():
    world, steps = play([A, A, B, B, H])
    assert world.is_tie
    assert set(world.head_affiliations()) == {A, B}
    assert world.public_length() == 2
    assert steps[-1].credits == (0, 0, 0)
    assert steps[-1].orphans == (0, 0, 1)  # the honest trigger block dies

    resolved, rec = apply(world, H, N, A)
    assert resolved == GENESIS
    assert rec.credits == (2, 0, 1)
    assert rec.orphans == (0, 2, 0)


def test_long_private_chain_ignores_tie_then_snipes():
    # Bob sits on three blocks while Alice and Henry tie; the resolution block
    # lifts the public chain to within one of Bob, and he takes the round
    world, steps = play([B, B, B, A, H])
    assert world.is_tie
    assert set(world.head_affiliations()) == {A, H}
    assert world.private_length(B) == 3

    resolved, rec = apply(world, H, N, H)
    assert resolved == GENESIS
    assert rec.credits == (0, 3, 0)
    assert rec.orphans == (1, 0, 2)


def test_fork_at_public_tip_and_cap_release():
    # Bob forks at the public tip rather than the round root; Alice's capped
    # release then orphans both the honest block and Bob's fork
    world, steps = play([A, A, A, H, B])
    assert world.public_length() == 1
    assert world.private_length(A) == 3
    assert world.private_length(B) == 1

    resolved, rec = apply(world, A, N, None)
    assert resolved == GENESIS
    assert rec.credits == (4, 0, 0)
    assert rec.orphans == (0, 1, 1)


def test_orphan_candidates_can_return():
    # Bob forks above the first honest block; Alice's reorg would orphan it,
    # but Bob's equal-length branch keeps it alive and a resolution in Bob's
    # favor settles it
    world, steps = play([A, A, A, H, B, B, H])
    assert world.is_tie
    assert set(world.head_affiliations()) == {A, B}
    assert steps[-1].credits == (0, 0, 0)
    # the trigger block dies at once; the first honest block lives on Bob's branch
    assert steps[-1].orphans == (0, 0, 1)

    resolved, rec = apply(world, H, N, B)
    assert resolved == GENESIS
    assert rec.credits == (0, 2, 2)
    assert rec.orphans == (3, 0, 0)


def test_forfeit_on_shorter_chain():
    # Bob forks at the tip with one block; Alice's three-block reorg leaves
    # him strictly behind and he abandons the fork
    world, steps = play([A, A, A, H, B, H])
    assert world == GENESIS
    assert steps[-1].credits == (3, 0, 0)
    assert steps[-1].orphans == (0, 1, 2)


def test_canonical_form_ignores_construction_order():
    w1, _ = play([A, B])
    w2, _ = play([B, A])
    assert w1 == w2
    assert hash(w1) == hash(w2)


def test_choice_tables():
    tie_ah, _ = play([A, H])
    assert choice_affiliations(tie_ah, H) == ((A, "g1"), (H, "g1c"))
    assert choice_affiliations(tie_ah, B) == ((A, "g1"), (H, "g1c"))
    assert choice_affiliations(tie_ah, A) is None

    tie_bh, _ = play([B, H])
    assert choice_affiliations(tie_bh, H) == ((B, "g2"), (H, "g2c"))

    tie_ab, _ = play([A, A, B, B, H])
    assert choice_affiliations(tie_ab, H) == ((A, "b1"), (B, "b2"))

    three, _ = play([A, B, H])
    assert choice_affiliations(three, H) == ((A, "t1"), (B, "t2"), (H, "t3"))

    long_bob, _ = play([B, B, B, A, H])
    assert choice_affiliations(long_bob, B) is None
    assert choice_affiliations(long_bob, H) == ((A, "g1"), (H, "g1c"))

    assert choice_affiliations(GENESIS, H) is None


def test_invalid_branch_choice_rejected():
    tie_ah, _ = play([A, H])
    with pytest.raises(InconsistentState):
        apply(tie_ah, H, N, B)
    with pytest.raises(InconsistentState):
        apply(tie_ah, H, N, None)
    with pytest.raises(InconsistentState):
        engine.resolve_tie(GENESIS, H, symmetric_scenario(0.2))


def test_undefined_attacker_tie_weights():
    scenario = symmetric_scenario(0.3, tiebreak=TieBreakParams(gamma1=0.0, gamma2=0.0))
    tie_ab, _ = play([A, A, B, B, H])
    rng = np.random.default_rng(0)
    with pytest.raises(UndefinedBeta):
        step(tie_ab, H, scenario, rng)


def test_flush_prefers_honest_then_alice():
    assert flush(GENESIS).credits == (0, 0, 0)

    lone, _ = play([A])
    rec = flush(lone)
    assert rec.credits == (1, 0, 0)

    tie_ah, _ = play([A, H])
    rec = flush(tie_ah)
    assert rec.credits == (0, 0, 1)
    assert rec.orphans == (1, 0, 0)

    tie_ab, _ = play([A, A, B, B, H])
    rec = flush(tie_ab)
    assert rec.credits == (2, 0, 0)
    assert rec.orphans == (0, 2, 0)

    long_bob, _ = play([B, B, B, A, H])
    rec = flush(long_bob)
    assert rec.credits == (0, 3, 0)
    assert rec.orphans == (1, 0, 1)


def test_random_walk_conserves_blocks():
    scenario = symmetric_scenario(0.3, n_cap=4)
    rng = np.random.default_rng(1234)
    world = GENESIS
    mined = 0
    credits = np.zeros(3, dtype=int)
    orphans = np.zeros(3, dtype=int)
    probs = [scenario.alpha1, scenario.alpha2, scenario.alpha_h]
    for _ in range(5000):
        winner = MinerId(rng.choice(3, p=probs))
        world, rec = step(world, winner, scenario, rng)
        validate_world(world, scenario.protocol.n_cap)
        mined += 1
        credits += rec.credits
        orphans += rec.orphans
    rec = flush(world)
    credits += rec.credits
    orphans += rec.orphans
    assert credits.sum() + orphans.sum() == mined


def test_random_walk_various_caps():
    for n_cap, seed in ((2, 7), (3, 8), (6, 9), (8, 10)):
        scenario = symmetric_scenario(0.28, n_cap=n_cap)
        rng = np.random.default_rng(seed)
        world = GENESIS
        total = np.zeros(3, dtype=int)
        steps = 0
        for _ in range(2000):
            winner = MinerId(rng.choice(3, p=[0.28, 0.28, 0.44]))
            world, rec = step(world, winner, scenario, rng)
            validate_world(world, n_cap)
            total += rec.credits
            total += rec.orphans
            steps += 1
        rec = flush(world)
        total += rec.credits
        total += rec.orphans
        assert total.sum() == steps
