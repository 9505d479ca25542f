"""Protocol rule engine: one block event at a time, applied to a block tree.

This module is the single implementation of the withholding protocol; the
Monte Carlo simulator and the Markov chain builder both drive it, so they
cannot drift apart. The world keeps only the *pending* region above the last
settled block (the root): the public chain suffix, up to two private chains,
and, during ties, the set of equal-depth competing public heads.

Rules implemented (Alice is evaluated before Bob wherever order matters):

* Mining target. Henry mines on the public head; during a tie he picks a
  branch by the tie weights. An attacker extends her private chain whenever
  she has one; otherwise she mines on the public head and withholds the new
  block (it starts a private chain forked at the head). During a tie an
  attacker with no private chain behaves like the honest pool: she picks a
  branch with the same weights and *publishes* the block, resolving the tie.
  An attacker owning a tie branch mines on it and publishes (winning the tie).
  An attacker with a private chain ignores ties and keeps mining privately.

* Releases. Whenever the public chain gets longer, each attacker re-evaluates:
  a private chain shorter than the public chain is abandoned; a private chain
  leading by 0 or 1 is published in full (lead 1 wins outright, lead 0 creates
  an equal-depth tie). A private chain reaching the cap is published
  unconditionally. A private chain whose fork point is no longer on any public
  head's path is also published at once: waiting is only safe while the public
  chain builds on the fork, so a stranded lead is cashed in (or abandoned)
  immediately. Publications change the public chain and re-trigger the other
  attacker, to a fixed point (chain reaction).

* Tie affiliations. A branch published by an attacker keeps her affiliation
  for the rest of the release cascade (so two chains published in the same
  cascade form an attacker-vs-attacker tie). A tie resolved by a mined block,
  or a cascade that quiesces without a tie, leaves a plain public head again.

* Settlement. Blocks are credited only once every surviving head and private
  chain descends from them; blocks that no surviving chain can extend are
  orphaned. Nothing is counted twice and nothing is counted early.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InconsistentState, UndefinedBeta
from .params import MinerId, Scenario

ALICE, BOB, HENRY = MinerId.ALICE, MinerId.BOB, MinerId.HENRY

# atom names for transition probabilities: winner draws and branch choices
WINNER_ATOM = {ALICE: "a1", BOB: "a2", HENRY: "ah"}

# branch-choice distributions keyed by the set of competing affiliations.
# gXc is the complement 1-gammaX; t3 is 1-theta1-theta2.
CHOICE_TABLE: dict[frozenset, tuple[tuple[int, str], ...]] = {
    frozenset((ALICE, HENRY)): ((ALICE, "g1"), (HENRY, "g1c")),
    frozenset((BOB, HENRY)): ((BOB, "g2"), (HENRY, "g2c")),
    frozenset((ALICE, BOB)): ((ALICE, "b1"), (BOB, "b2")),
    frozenset((ALICE, BOB, HENRY)): ((ALICE, "t1"), (BOB, "t2"), (HENRY, "t3")),
}


def atom_value(name: str, scenario: Scenario) -> float:
    tb = scenario.tiebreak
    if name == "a1":
        return scenario.alpha1
    if name == "a2":
        return scenario.alpha2
    if name == "ah":
        return scenario.alpha_h
    if name == "g1":
        return tb.gamma1
    if name == "g1c":
        return 1.0 - tb.gamma1
    if name == "g2":
        return tb.gamma2
    if name == "g2c":
        return 1.0 - tb.gamma2
    if name == "t1":
        return tb.theta1
    if name == "t2":
        return tb.theta2
    if name == "t3":
        return 1.0 - tb.theta1 - tb.theta2
    if name == "b1":
        return tb.beta1  # raises UndefinedBeta when gamma1+gamma2 == 0
    if name == "b2":
        return tb.beta2
    raise KeyError(name)


@dataclass(frozen=True)
class World:
    """Pending block tree. parents[i] is the parent index (-1 = settled root),
    owners[i] the miner of block i. heads are (node, affiliation) pairs of the
    competing public heads (one entry means no tie; node -1 means the root is
    the public tip). a_tip/a_fork and b_tip/b_fork delimit the private chains
    (-1 = none / forked at the root)."""

    parents: tuple[int, ...] = ()
    owners: tuple[int, ...] = ()
    heads: tuple[tuple[int, int], ...] = ((-1, HENRY),)
    a_tip: int = -1
    a_fork: int = -1
    b_tip: int = -1
    b_fork: int = -1

    @property
    def is_root(self) -> bool:
        return not self.parents

    @property
    def is_tie(self) -> bool:
        return len(self.heads) > 1

    def head_affiliations(self) -> tuple[int, ...]:
        return tuple(affil for _, affil in self.heads)

    def tip(self, miner: MinerId) -> int:
        return self.a_tip if miner == ALICE else self.b_tip

    def depth(self, node: int) -> int:
        d = 0
        while node != -1:
            node = self.parents[node]
            d += 1
        return d

    def public_length(self) -> int:
        return self.depth(self.heads[0][0])

    def private_length(self, miner: MinerId) -> int:
        tip = self.a_tip if miner == ALICE else self.b_tip
        fork = self.a_fork if miner == ALICE else self.b_fork
        if tip == -1:
            return 0
        return self.depth(tip) - self.depth(fork)


GENESIS = World()


@dataclass(frozen=True)
class Step:
    """Settled outcome of one block event."""

    credits: tuple[int, int, int]
    orphans: tuple[int, int, int]
    to_root: bool


def choice_affiliations(world: World, winner: MinerId) -> tuple[tuple[int, str], ...] | None:
    """Branch choices open to `winner`, or None when its move is determined."""
    if not world.is_tie:
        return None
    if winner != HENRY:
        if world.tip(winner) != -1:
            return None  # long private chain: ignores the tie
        if any(affil == winner for _, affil in world.heads):
            return None  # owns a branch: mines on it
    table = CHOICE_TABLE.get(frozenset(world.head_affiliations()))
    if table is None:
        raise InconsistentState(f"unexpected tie affiliations {world.head_affiliations()}")
    return table


def step(world: World, winner: MinerId, scenario: Scenario, rng) -> tuple[World, Step]:
    """Apply one mined block, sampling any branch choice from `rng`."""
    choices = choice_affiliations(world, winner)
    branch = None
    if choices is not None:
        weights = [atom_value(a, scenario) for _, a in choices]
        total = sum(weights)
        if total <= 0.0:
            raise UndefinedBeta("no positive branch-choice weight in tie")
        u = rng.random() * total
        acc = 0.0
        branch = choices[-1][0]
        for (affil, _), w in zip(choices, weights):
            acc += w
            if u < acc:
                branch = affil
                break
    return apply(world, winner, scenario.protocol.n_cap, branch)


def resolve_tie(world: World, winner: MinerId, scenario: Scenario, rng=None, branch=None):
    """Convenience wrapper for stepping a world that is in a tie."""
    if not world.is_tie:
        raise InconsistentState("resolve_tie called on a world without a tie")
    if branch is not None:
        return apply(world, winner, scenario.protocol.n_cap, branch)
    return step(world, winner, scenario, rng)


def apply(world: World, winner: MinerId, n_cap: int, branch: int | None = None) -> tuple[World, Step]:
    """Deterministic core of `step`: the branch choice, when one is needed,
    is passed explicitly as the affiliation of the chosen head."""
    parents = list(world.parents)
    owners = list(world.owners)
    heads = list(world.heads)
    tips = {ALICE: world.a_tip, BOB: world.b_tip}
    forks = {ALICE: world.a_fork, BOB: world.b_fork}

    def depth(node: int) -> int:
        d = 0
        while node != -1:
            node = parents[node]
            d += 1
        return d

    def head_for(affil: int) -> int:
        for node, a in heads:
            if a == affil:
                return node
        raise InconsistentState(f"no head with affiliation {affil}")

    # --- place the new block ---------------------------------------------
    choices = choice_affiliations(world, winner)
    if choices is not None:
        valid = {affil for affil, _ in choices}
        if branch not in valid:
            raise InconsistentState(f"winner {winner} must choose a branch among {sorted(valid)}")

    withheld = False
    if winner == HENRY:
        parent = head_for(branch) if world.is_tie else heads[0][0]
    else:
        tip = tips[winner]
        if tip != -1:
            parent = tip
            withheld = True
        elif world.is_tie:
            own = [node for node, a in heads if a == winner]
            parent = own[0] if own else head_for(branch)
        else:
            parent = heads[0][0]
            withheld = True

    new_idx = len(parents)
    parents.append(parent)
    owners.append(int(winner))

    changed = {ALICE: False, BOB: False}
    forced: int | None = None
    if withheld:
        if tips[winner] == -1:
            forks[winner] = parent
        tips[winner] = new_idx
        if depth(new_idx) - depth(forks[winner]) >= n_cap:
            forced = winner
    else:
        # a mined public block extends one branch past the others: resolved
        heads = [(new_idx, int(HENRY))]
        for m in (ALICE, BOB):
            if m != winner:
                changed[m] = True

    # --- release / forfeit fixed point ------------------------------------
    def fork_on_chain(fork: int) -> bool:
        if fork == -1:
            return True
        for node, _ in heads:
            while node != -1:
                if node == fork:
                    return True
                node = parents[node]
        return False

    for _ in range(4 * (n_cap + 2)):
        fired = False
        for me in (ALICE, BOB):
            tip = tips[me]
            if tip == -1:
                continue
            if not (changed[me] or forced == me):
                continue
            force_now = forced == me
            changed[me] = False
            if force_now:
                forced = None
            pub = depth(heads[0][0])
            total = depth(tip)
            other = BOB if me == ALICE else ALICE
            if total < pub:
                tips[me] = -1
                forks[me] = -1
                fired = True
            elif force_now or total - pub <= 1 or not fork_on_chain(forks[me]):
                # waiting is only safe while the public chain builds on the
                # fork point; once it does not, the lead is cashed in at once
                if total == pub and force_now:
                    raise InconsistentState("cap release without a strict lead")
                if total > pub:
                    heads = [(tip, int(me))]
                    changed[other] = True
                else:
                    heads.append((tip, int(me)))
                tips[me] = -1
                forks[me] = -1
                fired = True
        if not fired and forced is None:
            break
    else:
        raise InconsistentState("release cascade did not reach a fixed point")

    # --- settlement --------------------------------------------------------
    def path(node: int) -> list[int]:
        out = []
        while node != -1:
            out.append(node)
            node = parents[node]
        out.reverse()
        return out

    key_nodes = [node for node, _ in heads]
    for m in (ALICE, BOB):
        if tips[m] != -1:
            key_nodes.append(tips[m])

    live: set[int] = set()
    for node in key_nodes:
        while node != -1 and node not in live:
            live.add(node)
            node = parents[node]

    orphans = [0, 0, 0]
    for idx in range(len(parents)):
        if idx not in live:
            orphans[owners[idx]] += 1

    paths = [path(n) for n in key_nodes]
    settled: list[int] = []
    for depth_i, node in enumerate(paths[0]):
        if all(len(p) > depth_i and p[depth_i] == node for p in paths[1:]):
            settled.append(node)
        else:
            break

    credits = [0, 0, 0]
    for node in settled:
        credits[owners[node]] += 1

    settled_set = set(settled)
    kept = [idx for idx in range(len(parents)) if idx in live and idx not in settled_set]
    new_root_old = settled[-1] if settled else -1

    new_world = _normalize(parents, owners, kept, new_root_old, heads, tips, forks)
    if len(heads) == 1:
        # quiesced without a tie: the public head is plain again
        new_world = World(
            new_world.parents,
            new_world.owners,
            ((new_world.heads[0][0], int(HENRY)),),
            new_world.a_tip,
            new_world.a_fork,
            new_world.b_tip,
            new_world.b_fork,
        )
    rec = Step(credits=tuple(credits), orphans=tuple(orphans), to_root=new_world.is_root)
    return new_world, rec


def _normalize(parents, owners, kept, new_root_old, heads, tips, forks) -> World:
    """Re-index the kept nodes canonically so equal worlds compare equal.

    Children are ordered by their recursive (owner, marks, children) signature,
    which makes the index assignment independent of construction history.
    """
    kept_set = set(kept)

    def remap_base(node: int) -> int:
        # nodes at or below the settled point collapse onto the new root
        return -1 if (node == new_root_old or node not in kept_set) else node

    marks: dict[int, list] = {idx: [] for idx in kept}
    for node, affil in heads:
        n = remap_base(node)
        if n != -1:
            marks[n].append(("head", affil))
    for label, m in (("atip", ALICE), ("btip", BOB)):
        if tips[m] != -1:
            marks[remap_base(tips[m])].append((label,))
    for label, m in (("afork", ALICE), ("bfork", BOB)):
        if tips[m] != -1:
            n = remap_base(forks[m])
            if n != -1:
                marks[n].append((label,))

    children: dict[int, list[int]] = {-1: []}
    for idx in kept:
        children.setdefault(idx, [])
    for idx in kept:
        children.setdefault(remap_base(parents[idx]), []).append(idx)

    sig_cache: dict[int, tuple] = {}

    def signature(idx: int) -> tuple:
        if idx not in sig_cache:
            kids = tuple(sorted(signature(c) for c in children.get(idx, ())))
            sig_cache[idx] = (owners[idx], tuple(sorted(marks[idx])), kids)
        return sig_cache[idx]

    order: list[int] = []

    def visit(idx: int) -> None:
        for c in sorted(children.get(idx, ()), key=signature):
            order.append(c)
            visit(c)

    visit(-1)
    new_index = {old: i for i, old in enumerate(order)}

    def remap(node: int) -> int:
        node = remap_base(node)
        return -1 if node == -1 else new_index[node]

    new_parents = tuple(remap(parents[idx]) for idx in order)
    new_owners = tuple(owners[idx] for idx in order)
    new_heads = tuple(sorted((remap(node), affil) for node, affil in heads))
    a_tip, b_tip = remap(tips[ALICE]), remap(tips[BOB])
    a_fork = remap(forks[ALICE]) if tips[ALICE] != -1 else -1
    b_fork = remap(forks[BOB]) if tips[BOB] != -1 else -1
    return World(new_parents, new_owners, new_heads, a_tip, a_fork, b_tip, b_fork)


def flush(world: World) -> Step:
    """Settle everything at the end of a run: an unresolved tie falls to the
    Henry-affiliated branch (then Alice's, then Bob's), and a private chain is
    published only if strictly longer than the public chain (Alice first)."""
    if world.is_root:
        return Step((0, 0, 0), (0, 0, 0), True)
    parents = list(world.parents)
    owners = list(world.owners)

    def depth(node: int) -> int:
        d = 0
        while node != -1:
            node = parents[node]
            d += 1
        return d

    heads = sorted(world.heads, key=lambda h: {HENRY: 0, ALICE: 1, BOB: 2}[h[1]])
    winner_head = heads[0][0]
    for m, tip in ((ALICE, world.a_tip), (BOB, world.b_tip)):
        if tip != -1 and depth(tip) > depth(winner_head):
            winner_head = tip

    credits = [0, 0, 0]
    main = set()
    node = winner_head
    while node != -1:
        credits[owners[node]] += 1
        main.add(node)
        node = parents[node]
    orphans = [0, 0, 0]
    for idx in range(len(parents)):
        if idx not in main:
            orphans[owners[idx]] += 1
    return Step(tuple(credits), tuple(orphans), True)


def validate_world(world: World, n_cap: int) -> None:
    """Structural invariants; raises InconsistentState on violation."""
    n = len(world.parents)
    for idx, parent in enumerate(world.parents):
        if not -1 <= parent < idx:
            raise InconsistentState("parents must precede children in index order")
    if not 1 <= len(world.heads) <= 3:
        raise InconsistentState("head count out of range")
    affils = world.head_affiliations()
    if len(set(affils)) != len(affils):
        raise InconsistentState("duplicate head affiliations")
    depths = {world.depth(node) for node, _ in world.heads}
    if len(depths) != 1:
        raise InconsistentState("competing heads must have equal depth")
    if not world.is_tie and world.heads[0][1] != HENRY:
        raise InconsistentState("a lone public head must be plain")
    pub = world.public_length()
    for m, tip, fork in ((ALICE, world.a_tip, world.a_fork), (BOB, world.b_tip, world.b_fork)):
        if tip == -1:
            continue
        if m in affils:
            raise InconsistentState("tie branch owner cannot also hold a private chain")
        seg = 0
        node = tip
        while node != fork:
            if node == -1:
                raise InconsistentState("private fork is not an ancestor of its tip")
            if world.owners[node] != m:
                raise InconsistentState("private chain contains a foreign block")
            node = world.parents[node]
            seg += 1
        if not 1 <= seg <= n_cap - 1:
            raise InconsistentState(f"private chain length {seg} out of range")
        if world.depth(tip) < pub + 1:
            raise InconsistentState("private chain must lead the public chain")
        on_chain = fork == -1
        for head, _ in world.heads:
            node = head
            while node != -1 and not on_chain:
                on_chain = node == fork
                node = world.parents[node]
        if not on_chain:
            raise InconsistentState("private fork left the public chain without a release")
    live = set()
    for node in [h for h, _ in world.heads] + [t for t in (world.a_tip, world.b_tip) if t != -1]:
        while node != -1:
            live.add(node)
            node = world.parents[node]
    if len(live) != n:
        raise InconsistentState("world contains unreachable blocks")
