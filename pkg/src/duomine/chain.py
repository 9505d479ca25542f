"""Steady-state revenue via an exact Markov chain over engine worlds.

Every reachable world is enumerated once per (cap, active-miner) combination
by driving the rule engine, and each transition is labeled with symbolic
probability atoms (hashrates, tie weights) plus the blocks it settles. The
structure is cached, so re-evaluating a different scenario on the same
structure only multiplies numbers into the cached edges; threshold searches
rely on this. Revenue rates are reported per round, a round being the walk
between consecutive visits to the empty world, which makes them directly
comparable with the closed forms in `closedform`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .engine import GENESIS, World, apply, atom_value, choice_affiliations, validate_world
from .errors import SingularSystem, StateExplosion
from .params import MinerId, Scenario

MAX_STATES = 500_000
DENSE_LIMIT = 2_000
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    winner_atom: str
    choice_atom: str | None
    credits: tuple[int, int, int]
    orphans: tuple[int, int, int]


@dataclass(frozen=True)
class TransitionSystem:
    n_cap: int
    active: tuple[bool, bool, bool]
    states: tuple[World, ...]
    edges: tuple[Edge, ...]
    root: int = 0

    @property
    def size(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class RevenueReport:
    """Per-round revenue summary of one scenario."""

    rates: tuple[float, float, float]
    orphan_rates: tuple[float, float, float]
    relative: tuple[float, float, float]
    yield_per_block: float
    blocks_per_round: float
    states: int


def build_transition_system(n_cap: int, active=(True, True, True), max_states=MAX_STATES) -> TransitionSystem:
    miners = [m for m, on in zip((MinerId.ALICE, MinerId.BOB, MinerId.HENRY), active) if on]
    index: dict[World, int] = {GENESIS: 0}
    states: list[World] = [GENESIS]
    edges: list[Edge] = []
    queue: deque[int] = deque([0])
    while queue:
        src = queue.popleft()
        world = states[src]
        for winner in miners:
            choices = choice_affiliations(world, winner)
            moves = [(None, None)] if choices is None else [(affil, atom) for affil, atom in choices]
            for branch, atom in moves:
                nxt, rec = apply(world, winner, n_cap, branch)
                dst = index.get(nxt)
                if dst is None:
                    validate_world(nxt, n_cap)
                    dst = len(states)
                    if dst >= max_states:
                        raise StateExplosion(f"more than {max_states} worlds at cap {n_cap}")
                    index[nxt] = dst
                    states.append(nxt)
                    queue.append(dst)
                edges.append(Edge(src, dst, WINNER_ATOMS[winner], atom, rec.credits, rec.orphans))
    return TransitionSystem(n_cap, tuple(active), tuple(states), tuple(edges))


WINNER_ATOMS = {MinerId.ALICE: "a1", MinerId.BOB: "a2", MinerId.HENRY: "ah"}


@lru_cache(maxsize=64)
def _cached_system(n_cap: int, active: tuple[bool, bool, bool]) -> TransitionSystem:
    return build_transition_system(n_cap, active)


def transition_system_for(scenario: Scenario) -> TransitionSystem:
    active = (scenario.alpha1 > 0.0, scenario.alpha2 > 0.0, scenario.alpha_h > 0.0)
    return _cached_system(scenario.protocol.n_cap, active)


def edge_probability(edge: Edge, scenario: Scenario) -> float:
    p = atom_value(edge.winner_atom, scenario)
    if edge.choice_atom is not None:
        p *= atom_value(edge.choice_atom, scenario)
    return p


def edge_list(ts: TransitionSystem, scenario: Scenario) -> str:
    """Render the chain as plain text, one `source target prob r1 r2 rh` line per edge."""
    lines = []
    for e in ts.edges:
        p = edge_probability(e, scenario)
        c = e.credits
        lines.append(f"{e.source} {e.target} {p:.12g} {c[0]} {c[1]} {c[2]}")
    return "\n".join(lines) + "\n"


def stationary_distribution(ts: TransitionSystem, scenario: Scenario) -> np.ndarray:
    """Stationary probabilities of the world chain under `scenario`."""
    n = ts.size
    src = np.fromiter((e.source for e in ts.edges), dtype=np.int64, count=len(ts.edges))
    dst = np.fromiter((e.target for e in ts.edges), dtype=np.int64, count=len(ts.edges))
    prob = np.fromiter((edge_probability(e, scenario) for e in ts.edges), dtype=np.float64, count=len(ts.edges))
    if n <= DENSE_LIMIT:
        P = np.zeros((n, n))
        np.add.at(P, (src, dst), prob)
        A = P.T - np.eye(n)
        A[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        try:
            pi = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from None
        residual = float(np.max(np.abs(pi @ P - pi)))
    else:
        import scipy.sparse
        import scipy.sparse.linalg

        P = scipy.sparse.coo_matrix((prob, (src, dst)), shape=(n, n)).tocsr()
        A = (P.T - scipy.sparse.identity(n, format="csr")).tolil()
        A[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        try:
            pi = scipy.sparse.linalg.spsolve(A.tocsr(), b)
        except RuntimeError as exc:
            raise SingularSystem(str(exc)) from None
        residual = float(np.max(np.abs(pi * P - pi)))
    if not np.isfinite(pi).all() or residual > RESIDUAL_TOL:
        raise SingularSystem(f"stationary solve residual {residual:.3e}")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def reward_rates(scenario: Scenario, ts: TransitionSystem | None = None) -> RevenueReport:
    """Per-round credited and orphaned block rates plus relative revenue."""
    if ts is None:
        ts = transition_system_for(scenario)
    pi = stationary_distribution(ts, scenario)
    credit_flow = np.zeros(3)
    orphan_flow = np.zeros(3)
    for e in ts.edges:
        w = pi[e.source] * edge_probability(e, scenario)
        if w == 0.0:
            continue
        credit_flow += w * np.asarray(e.credits)
        orphan_flow += w * np.asarray(e.orphans)
    root_mass = pi[ts.root]
    if root_mass <= 0.0:
        raise SingularSystem("empty world is not recurrent")
    rates = credit_flow / root_mass
    orphans = orphan_flow / root_mass
    total = float(credit_flow.sum())
    relative = credit_flow / total if total > 0.0 else credit_flow
    return RevenueReport(
        rates=tuple(float(x) for x in rates),
        orphan_rates=tuple(float(x) for x in orphans),
        relative=tuple(float(x) for x in relative),
        yield_per_block=total,
        blocks_per_round=float(1.0 / root_mass),
        states=ts.size,
    )


def _atom_fraction(name: str, values: dict[str, Fraction]) -> Fraction:
    if name in values:
        return values[name]
    one = Fraction(1)
    if name == "g1c":
        return one - values["g1"]
    if name == "g2c":
        return one - values["g2"]
    if name == "t3":
        return one - values["t1"] - values["t2"]
    if name == "b1":
        return values["g1"] / (values["g1"] + values["g2"])
    if name == "b2":
        return values["g2"] / (values["g1"] + values["g2"])
    raise KeyError(name)


def exact_reward_rates(ts: TransitionSystem, atoms: dict[str, Fraction]) -> tuple[list[Fraction], Fraction]:
    """Rational-arithmetic cross-check of `reward_rates`.

    `atoms` maps a1/a2/ah/g1/g2/t1/t2 to Fractions. Returns the per-round
    credited rates and the yield per mined block, both exact.
    """
    n = ts.size
    zero = Fraction(0)
    P: list[dict[int, Fraction]] = [dict() for _ in range(n)]
    for e in ts.edges:
        p = _atom_fraction(e.winner_atom, atoms)
        if e.choice_atom is not None:
            p *= _atom_fraction(e.choice_atom, atoms)
        P[e.source][e.target] = P[e.source].get(e.target, zero) + p

    # solve pi (P - I) = 0 with sum(pi) = 1 by Gaussian elimination on A x = b
    A = [[P[j].get(i, zero) - (Fraction(1) if i == j else zero) for j in range(n)] for i in range(n)]
    A[n - 1] = [Fraction(1)] * n
    b = [zero] * (n - 1) + [Fraction(1)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise SingularSystem("exact stationary system is singular")
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        inv = 1 / A[col][col]
        A[col] = [v * inv for v in A[col]]
        b[col] *= inv
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [v - f * w for v, w in zip(A[r], A[col])]
                b[r] -= f * b[col]
    pi = b

    flow = [zero, zero, zero]
    for e in ts.edges:
        p = _atom_fraction(e.winner_atom, atoms)
        if e.choice_atom is not None:
            p *= _atom_fraction(e.choice_atom, atoms)
        w = pi[e.source] * p
        for i in range(3):
            flow[i] += w * e.credits[i]
    root_mass = pi[ts.root]
    rates = [f / root_mass for f in flow]
    return rates, sum(flow)
