"""Monte Carlo simulation of the withholding game.

The simulator never re-implements protocol logic: it materializes the engine's
transition system into flat arrays and replays it. Two execution paths share
one random-number discipline (one uniform per block for the winner, one more
only when that winner faces a branch choice), so they visit identical
trajectories from the same seed:

* `run` walks the precompiled tables, with a numba kernel when available;
* `run_reference` drives `engine.step` world by world.

Batch means over contiguous block ranges give standard errors for the revenue
shares, which is what convergence tests compare against the chain solution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import chain
from .engine import GENESIS, atom_value, flush, step
from .errors import InvalidPartition
from .params import MinerId, Scenario

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

CHUNK = 1 << 22
_WINNER_RANK = {"a1": 0, "a2": 1, "ah": 2}


@dataclass(eq=False)
class SimResult:
    """Settled block counts of one simulation run."""

    blocks: int
    seed: int
    credits: tuple[int, int, int]
    orphans: tuple[int, int, int]
    rounds: int
    batch_credits: np.ndarray
    batch_orphans: np.ndarray

    @property
    def relative(self) -> tuple[float, float, float]:
        total = sum(self.credits)
        return tuple(c / total for c in self.credits)

    @property
    def rates(self) -> tuple[float, float, float]:
        return tuple(c / self.rounds for c in self.credits)

    @property
    def yield_per_block(self) -> float:
        return sum(self.credits) / self.blocks

    @property
    def main_chain_length(self) -> int:
        return sum(self.credits)

    @property
    def main_blocks_per_round(self) -> float:
        return sum(self.credits) / self.rounds

    @property
    def mined_blocks_per_round(self) -> float:
        return self.blocks / self.rounds

    def relative_stderr(self) -> tuple[float, float, float]:
        """Standard error of each relative share, from batch means."""
        totals = self.batch_credits.sum(axis=1, keepdims=True)
        keep = totals[:, 0] > 0
        shares = self.batch_credits[keep] / totals[keep]
        n = shares.shape[0]
        if n < 2:
            return (float("inf"),) * 3
        return tuple(float(x) for x in shares.std(axis=0, ddof=1) / np.sqrt(n))


class _Tables:
    """Flat-array image of a transition system under one scenario."""

    def __init__(self, scenario: Scenario):
        ts = chain.transition_system_for(scenario)
        order = sorted(range(len(ts.edges)),
                       key=lambda i: (ts.edges[i].source, _WINNER_RANK[ts.edges[i].winner_atom]))
        edges = [ts.edges[i] for i in order]
        n_groups = ts.size * 3
        offsets = np.zeros(n_groups + 1, dtype=np.int64)
        for e in edges:
            offsets[e.source * 3 + _WINNER_RANK[e.winner_atom] + 1] += 1
        np.cumsum(offsets, out=offsets)
        self.offsets = offsets
        self.targets = np.array([e.target for e in edges], dtype=np.int64)
        self.credits = np.array([e.credits for e in edges], dtype=np.int64)
        self.orphans = np.array([e.orphans for e in edges], dtype=np.int64)
        # cumulative raw choice weights per group; the sampler multiplies the
        # uniform by the group total, matching engine.step bit for bit
        cum = np.ones(len(edges), dtype=np.float64)
        for g in range(n_groups):
            lo, hi = offsets[g], offsets[g + 1]
            if hi - lo > 1:
                acc = 0.0
                for k in range(lo, hi):
                    acc += atom_value(edges[k].choice_atom, scenario)
                    cum[k] = acc
        self.choice_cum = cum
        self.root = ts.root
        self.states = ts.states
        self.a1 = float(scenario.alpha1)
        self.a12 = float(scenario.alpha1 + scenario.alpha2)


def _walk_tables(state, u, offsets, targets, cum, credits, orphans,
                 a1, a12, root, block, total_blocks, per_batch, n_batch,
                 bcred, borph, rounds):
    i = 0
    # a block may need two uniforms; refill (discarding any single leftover,
    # as the reference path does) rather than straddle the chunk boundary
    while block < total_blocks and i + 2 <= u.shape[0]:
        x = u[i]
        i += 1
        if x < a1:
            w = 0
        elif x < a12:
            w = 1
        else:
            w = 2
        g = state * 3 + w
        lo = offsets[g]
        hi = offsets[g + 1]
        e = lo
        if hi - lo > 1:
            y = u[i] * cum[hi - 1]
            i += 1
            while e < hi - 1 and y >= cum[e]:
                e += 1
        b = block // per_batch
        if b >= n_batch:
            b = n_batch - 1
        bcred[b, 0] += credits[e, 0]
        bcred[b, 1] += credits[e, 1]
        bcred[b, 2] += credits[e, 2]
        borph[b, 0] += orphans[e, 0]
        borph[b, 1] += orphans[e, 1]
        borph[b, 2] += orphans[e, 2]
        state = targets[e]
        if state == root:
            rounds += 1
        block += 1
    return state, block, i, rounds


_kernel = njit(cache=True, nogil=True)(_walk_tables) if njit is not None else _walk_tables


def run(scenario: Scenario, blocks: int, seed: int = 0, batches: int = 100) -> SimResult:
    """Simulate `blocks` mined blocks and settle everything at the end."""
    if blocks < 1:
        raise InvalidPartition(f"blocks={blocks!r} must be positive")
    batches = max(1, min(batches, blocks))
    tables = _Tables(scenario)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    bcred = np.zeros((batches, 3), dtype=np.int64)
    borph = np.zeros((batches, 3), dtype=np.int64)
    per_batch = blocks // batches
    state, block, rounds = tables.root, 0, 0
    while block < blocks:
        u = rng.random(min(CHUNK, 2 * (blocks - block) + 2))
        state, block, _, rounds = _kernel(
            state, u, tables.offsets, tables.targets, tables.choice_cum,
            tables.credits, tables.orphans, tables.a1, tables.a12,
            tables.root, block, blocks, per_batch, batches, bcred, borph, rounds)
    if state != tables.root:
        rec = flush(tables.states[state])
        bcred[-1] += np.asarray(rec.credits, dtype=np.int64)
        borph[-1] += np.asarray(rec.orphans, dtype=np.int64)
        rounds += 1
    credits = tuple(int(c) for c in bcred.sum(axis=0))
    orphans = tuple(int(o) for o in borph.sum(axis=0))
    if sum(credits) + sum(orphans) != blocks:
        raise InvalidPartition("settled plus orphaned blocks do not add up to blocks mined")
    return SimResult(blocks=blocks, seed=seed, credits=credits, orphans=orphans,
                     rounds=rounds, batch_credits=bcred, batch_orphans=borph)


class _ArrayRNG:
    """random() source replaying the chunked uniform stream of `run`."""

    def __init__(self, rng: np.random.Generator, blocks: int):
        self._rng = rng
        self._blocks = blocks
        self._consumed = 0
        self._buf = np.empty(0)
        self._pos = 0

    def begin_block(self, remaining: int) -> None:
        if self._pos + 2 > self._buf.shape[0]:
            self._buf = self._rng.random(min(CHUNK, 2 * remaining + 2))
            self._pos = 0

    def random(self) -> float:
        x = self._buf[self._pos]
        self._pos += 1
        return float(x)


def run_reference(scenario: Scenario, blocks: int, seed: int = 0, batches: int = 1) -> SimResult:
    """Pure-engine twin of `run`; identical output for identical arguments."""
    if blocks < 1:
        raise InvalidPartition(f"blocks={blocks!r} must be positive")
    batches = max(1, min(batches, blocks))
    rng = _ArrayRNG(np.random.default_rng(np.random.SeedSequence(seed)), blocks)
    bcred = np.zeros((batches, 3), dtype=np.int64)
    borph = np.zeros((batches, 3), dtype=np.int64)
    per_batch = blocks // batches
    a1 = float(scenario.alpha1)
    a12 = float(scenario.alpha1 + scenario.alpha2)
    world = GENESIS
    rounds = 0
    for block in range(blocks):
        rng.begin_block(blocks - block)
        x = rng.random()
        winner = MinerId(0 if x < a1 else (1 if x < a12 else 2))
        world, rec = step(world, winner, scenario, rng)
        b = min(block // per_batch, batches - 1)
        bcred[b] += np.asarray(rec.credits, dtype=np.int64)
        borph[b] += np.asarray(rec.orphans, dtype=np.int64)
        if world.is_root:
            rounds += 1
    if not world.is_root:
        rec = flush(world)
        bcred[-1] += np.asarray(rec.credits, dtype=np.int64)
        borph[-1] += np.asarray(rec.orphans, dtype=np.int64)
        rounds += 1
    credits = tuple(int(c) for c in bcred.sum(axis=0))
    orphans = tuple(int(o) for o in borph.sum(axis=0))
    if sum(credits) + sum(orphans) != blocks:
        raise InvalidPartition("settled plus orphaned blocks do not add up to blocks mined")
    return SimResult(blocks=blocks, seed=seed, credits=credits, orphans=orphans,
                     rounds=rounds, batch_credits=bcred, batch_orphans=borph)
