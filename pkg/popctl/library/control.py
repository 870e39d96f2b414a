# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Decision procedure for the random population control problem.

The candidate set V is the downward closure of its maximal bounded
commits, entries in {0, …, |S|, ω}. It starts with the all-ω commit of
every action and shrinks until a fixpoint is reached:

- the closure pass cuts out of every commit the configurations that leave
  the ideal of V in one step;
- the path pass cuts out the configurations that cannot be routed into the
  target ideal inside V (a sequential flow instance).

Both passes find a minimal bad configuration x below a commit c and
replace c by the maximal bounded commits below c that avoid everything
above x. The answer is positive iff the commit with ω on the initial state
and 0 elsewhere survives.
"""
# pylint: disable=too-many-arguments, too-many-locals
import itertools
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from popctl.library.common import (
    BudgetExceededError,
    InvariantError,
    resolve_limit
)
from popctl.library.flowproblem import FlowInstance, path_exists, solve_sequential_flow
from popctl.library.maxflow import max_flow
from popctl.library.model import (
    OMEGA,
    IdealSet,
    Mdp,
    SymbolicCommit,
    SymbolicConfig,
    antichain,
    finite_part,
    omega_count,
    symbolic_leq
)


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClosureWitness:
    """A configuration reachable in one step but outside the candidate ideal.

    Attributes:
        target (Tuple[int]): The configuration u, entries at most |S|+1.
        plan (Tuple): ((source, target), tokens) moves producing u.
    """
    target: Tuple[int, ...]
    plan: Tuple[Tuple[Tuple[int, int], int], ...]

    def source(self, width: int) -> Tuple[int, ...]:
        """Tokens taken from every state by the plan."""
        moved = [0] * width
        for (s, _), tokens in self.plan:
            moved[s] += tokens
        return tuple(moved)


@dataclass(frozen=True)
class Removal:
    """One maximal candidate commit cut down by a pass.

    Attributes:
        commit (SymbolicCommit): The replaced commit.
        reason (str): "closure" or "path".
        iteration (int): Outer iteration, starting at 1.
        witness (ClosureWitness | None): Witness for closure removals.
        pieces (Tuple[SymbolicCommit]): Maximal commits below `commit` kept
            by the pass.
    """
    commit: SymbolicCommit
    reason: str
    iteration: int
    witness: Optional[ClosureWitness] = None
    pieces: Tuple[SymbolicCommit, ...] = ()


def count_bounded(maxima: Iterable[SymbolicConfig], bound: int) -> int:
    """
    Number of configurations with entries in {0, …, bound, ω} below some
    configuration of `maxima`.
    """
    top = bound + 1

    def rank(entry):
        return top if entry == OMEGA else min(int(entry), bound)

    @lru_cache(maxsize=None)
    def count(rows: FrozenSet[Tuple[int, ...]]) -> int:
        if not rows:
            return 0
        if not next(iter(rows)):
            return 1
        total = 0
        for value in range(top + 1):
            total += count(frozenset(row[1:] for row in rows if row[0] >= value))
        return total

    return count(frozenset(tuple(rank(e) for e in m) for m in maxima))


@dataclass(frozen=True)
class CandidateSet:
    """Candidate commits of the decision procedure.

    Attributes:
        mdp (Mdp): Agent MDP with the dummy action.
        commits (FrozenSet[SymbolicCommit]): Maximal commits of V.
        finals (SymbolicCommit): ω on the target states with the dummy action.
        trace (Tuple[Removal]): Removals so far, in order.
    """
    mdp: Mdp
    commits: FrozenSet[SymbolicCommit]
    finals: SymbolicCommit
    trace: Tuple[Removal, ...] = field(default=())

    def __post_init__(self):
        bound = self.mdp.num_states
        if any(x != OMEGA and x > bound for c in self.commits for x in c.config):
            raise ValueError("candidate entries must be at most |S| or ω")

    def size(self) -> int:
        """Number of bounded commits in the ideal of V."""
        return sum(count_bounded([c.config for c in self.commits if c.action == a],
                                 self.mdp.num_states)
                   for a in range(self.mdp.num_actions))

    def ideal(self) -> IdealSet:
        """The candidates as a normalized ideal set."""
        return IdealSet.of(self.commits)

    def __contains__(self, commit: SymbolicCommit) -> bool:
        return any(c.action == commit.action and symbolic_leq(commit.config, c.config)
                   for c in self.commits)


@dataclass(frozen=True)
class DecideResult:
    """Outcome of `decide`.

    Attributes:
        answer (bool): True iff arbitrarily many tokens can be controlled.
        fixpoint (CandidateSet): Final candidate set.
        iterations (int): Outer iterations run.
        trajectory (Tuple[int]): Size of V at the start and after each iteration.
    """
    answer: bool
    fixpoint: CandidateSet
    iterations: int
    trajectory: Tuple[int, ...]

    def initial_removals(self) -> Tuple[Removal, ...]:
        """Removals that cut the commit with ω on the initial state out of V."""
        start = initial_symbolic(self.fixpoint.mdp)
        return tuple(r for r in self.fixpoint.trace
                     if symbolic_leq(start, r.commit.config)
                     and not any(symbolic_leq(start, p.config) for p in r.pieces))


def initial_symbolic(mdp: Mdp) -> SymbolicConfig:
    """ω on the initial state, 0 elsewhere."""
    return tuple(OMEGA if s == mdp.initial else 0 for s in range(mdp.num_states))


def final_commit(mdp: Mdp) -> SymbolicCommit:
    """ω on the target states, 0 elsewhere, with the dummy action."""
    mdp = mdp.with_dummy()
    return SymbolicCommit(tuple(OMEGA if s in mdp.finals else 0 for s in range(mdp.num_states)),
                          mdp.dummy)


def init_candidates(mdp: Mdp, *, cap: Optional[int] = None) -> CandidateSet:
    """
    The all-ω commit of every action of `mdp` and of the dummy action.

    Raises:
        ValueError: If `mdp` has more states than the decide cap.
    """
    cap = resolve_limit(cap, "decide_states")
    if mdp.num_states > cap:
        raise ValueError(f"decide is limited to {cap} states, got {mdp.num_states}")
    mdp = mdp.with_dummy()
    top = (OMEGA,) * mdp.num_states
    commits = frozenset(SymbolicCommit(top, action) for action in range(mdp.num_actions))
    return CandidateSet(mdp, commits, final_commit(mdp))


def split_commit(commit: SymbolicCommit, bad: Tuple[int, ...],
                 bound: int) -> List[SymbolicCommit]:
    """
    Maximal commits below `commit`, entries at most `bound` or ω, that
    contain no configuration above `bad`.
    """
    pieces = []
    for s, tokens in enumerate(bad):
        if tokens == 0:
            continue
        config = list(commit.config)
        config[s] = min(config[s], tokens - 1, bound)
        pieces.append(SymbolicCommit(tuple(config), commit.action))
    return pieces


def _successor_maxima(mdp: Mdp, commit: SymbolicCommit, bound: int) -> List[Tuple[int, ...]]:
    """Maximal one-step successors of the ideal of `commit`, clamped at `bound`."""
    width = mdp.num_states
    result = {(0,) * width}
    for s, count in enumerate(commit.config):
        if count == 0:
            continue
        succ = mdp.successors(s, commit.action)
        if count == OMEGA:
            spreads = [[(t, bound) for t in succ]]
        else:
            spreads = [Counter(combo).items() for combo in
                       itertools.combinations_with_replacement(succ, int(count))]
        merged = set()
        for base in result:
            for spread in spreads:
                vector = list(base)
                for t, moved in spread:
                    vector[t] = min(bound, vector[t] + moved)
                merged.add(tuple(vector))
        result = set(antichain(merged))
    return sorted(result)


def _transport_plan(mdp: Mdp, commit: SymbolicCommit, target: Tuple[int, ...]):
    graph = nx.DiGraph()
    for s, supply in enumerate(commit.config):
        if supply == 0:
            continue
        for t in mdp.successors(s, commit.action):
            if target[t]:
                graph.add_edge(("s", s), ("t", t))
    for t, tokens in enumerate(target):
        if tokens:
            graph.add_edge(("t", t), ("u", t), capacity=tokens)
    sources = {("s", s): (None if supply == OMEGA else int(supply))
               for s, supply in enumerate(commit.config) if supply}
    value, flow = max_flow(graph, sources, [("u", t) for t, n in enumerate(target) if n])
    if value != sum(target):
        raise InvariantError(f"no transport plan for {target}")
    plan = []
    for (kind, s), edges in sorted(flow.items()):
        if kind != "s":
            continue
        for (_, t), tokens in sorted(edges.items()):
            plan.append(((s, t), tokens))
    return tuple(plan)


def _leaves(mdp: Mdp, candidates: IdealSet, config: Tuple[int, ...], action: int) -> bool:
    """True if some one-step successor of the counted `config` lies outside `candidates`."""
    configs = candidates.configs()
    successors = _successor_maxima(mdp, SymbolicCommit(config, action), mdp.num_states + 1)
    return any(not any(symbolic_leq(u, v) for v in configs) for u in successors)


def closure_violation(mdp: Mdp, candidates: IdealSet,
                      commit: SymbolicCommit) -> Optional[ClosureWitness]:
    """
    Lexicographically smallest configuration u with entries at most |S|+1,
    outside the ideal of `candidates`, that some configuration below
    `commit` reaches in one step under its action.

    Args:
        mdp (Mdp): Agent MDP.
        candidates (IdealSet): Current candidate set.
        commit (SymbolicCommit): The commit to check.

    Returns:
        ClosureWitness | None: The witness with a transport plan, or None.
    """
    bound = mdp.num_states + 1
    maxima = _successor_maxima(mdp, commit, bound)
    configs = candidates.configs()

    def outside(vector):
        return not any(symbolic_leq(vector, v) for v in configs)

    viable = [u for u in maxima if outside(u)]
    if not viable:
        return None
    prefix: Tuple[int, ...] = ()
    for k in range(mdp.num_states):
        for value in range(bound + 1):
            chosen = [u for u in viable
                      if u[k] >= value and outside(prefix + (value,) + u[k + 1:])]
            if chosen:
                prefix += (value,)
                viable = chosen
                break
    return ClosureWitness(prefix, _transport_plan(mdp, commit, prefix))


def minimal_leaving(mdp: Mdp, candidates: IdealSet, commit: SymbolicCommit,
                    witness: ClosureWitness) -> Tuple[int, ...]:
    """
    Shrink the source of a closure witness to a minimal configuration that
    still leaves `candidates` in one step.
    """
    config = list(witness.source(mdp.num_states))
    for s in range(mdp.num_states):
        while config[s] > 0:
            config[s] -= 1
            if not _leaves(mdp, candidates, tuple(config), commit.action):
                config[s] += 1
                break
    return tuple(config)


def _path_instance(mdp: Mdp, candidates: IdealSet, config: SymbolicConfig) -> FlowInstance:
    final = final_commit(mdp)
    finals = IdealSet.of([final])
    if not candidates.contains(final.config, final.action):
        candidates = candidates.union(finals)
    return FlowInstance.create(mdp, config, candidates, finals)


def path_check(mdp: Mdp, candidates: IdealSet, commit: SymbolicCommit, *,
               cache: Optional[dict] = None) -> bool:
    """
    Sequential flow check of one commit: can every configuration below it
    be routed into the target ideal inside the candidates?

    Args:
        mdp (Mdp): Agent MDP with the dummy action.
        candidates (IdealSet): Current candidates, containing the final commit.
        commit (SymbolicCommit): The commit to check.
        cache (dict | None): Semigroup cache shared by checks on the same candidates.

    Raises:
        BudgetExceededError: If the flow solver runs out of budget.
    """
    mdp = mdp.with_dummy()
    return solve_sequential_flow(_path_instance(mdp, candidates, commit.config),
                                 cache=cache, prune=True)


def minimal_stuck(mdp: Mdp, candidates: IdealSet, commit: SymbolicCommit, *,
                  cache: Optional[dict] = None,
                  max_tokens: Optional[int] = None) -> Optional[Tuple[int, ...]]:
    """
    A minimal configuration below `commit` without a path into the target
    ideal.

    States are first dropped from `commit` while the sequential flow check
    keeps failing. The ω-entries left are then instantiated with 1, 2, …
    tokens until the explicit search fails, and the configuration found is
    shrunk one token at a time.

    Args:
        mdp (Mdp): Agent MDP with the dummy action.
        candidates (IdealSet): Current candidates.
        commit (SymbolicCommit): A commit failing `path_check`.
        cache (dict | None): Semigroup cache shared with `path_check`.
        max_tokens (int | None): Largest instantiation of ω tried.

    Returns:
        Tuple[int] | None: The configuration, None if no instantiation up
        to `max_tokens` fails.
    """
    mdp = mdp.with_dummy()
    max_tokens = resolve_limit(max_tokens, "witness_tokens")
    instance = _path_instance(mdp, candidates, commit.config)
    support = list(commit.config)
    for s, entry in enumerate(commit.config):
        if entry == 0:
            continue
        trial = support[:s] + [0] + support[s + 1:]
        trial_instance = _path_instance(mdp, candidates, tuple(trial))
        if not solve_sequential_flow(trial_instance, cache=cache, prune=True):
            support = trial
    for tokens in range(1, max_tokens + 1):
        config = [tokens if entry == OMEGA else int(entry) for entry in support]
        if not path_exists(instance, config):
            break
    else:
        return None
    for s in range(mdp.num_states):
        while config[s] > 0:
            config[s] -= 1
            if path_exists(instance, config):
                config[s] += 1
                break
    return tuple(config)


def _refine(commit, bound, find_bad):
    """
    Split `commit` until no piece contains a bad configuration.

    `find_bad` maps a commit to a minimal bad configuration below it, or None.

    Returns:
        Tuple[List[SymbolicCommit], list]: The clean maximal pieces and the
        bad configurations found.
    """
    queue = [commit]
    seen = {commit}
    clean = []
    found = []
    while queue:
        piece = queue.pop()
        bad = find_bad(piece)
        if bad is None:
            clean.append(piece)
            continue
        found.append(bad)
        for part in split_commit(piece, bad, bound):
            if part not in seen:
                seen.add(part)
                queue.append(part)
    kept = set(antichain(c.config for c in clean))
    return sorted(SymbolicCommit(config, commit.action) for config in kept), found


def _closure_pass(mdp, ideal, order, iteration):
    def find_bad(piece):
        found = closure_violation(mdp, ideal, piece)
        return None if found is None else minimal_leaving(mdp, ideal, piece, found)

    removals = []
    for commit in order:
        witness = closure_violation(mdp, ideal, commit)
        if witness is None:
            continue
        pieces, _ = _refine(commit, mdp.num_states, find_bad)
        removals.append(Removal(commit, "closure", iteration, witness, tuple(pieces)))
    return removals


def _path_pass(mdp, ideal, order, iteration):
    bound = mdp.num_states
    cache: dict = {}
    verdicts: Dict[SymbolicConfig, bool] = {}
    passed: List[SymbolicConfig] = []
    stuck: List[Tuple[int, ...]] = []

    def find_bad(piece):
        config = piece.config
        for known in stuck:
            if symbolic_leq(known, config):
                return known
        if config not in verdicts:
            if any(symbolic_leq(config, p) for p in passed):
                verdicts[config] = True
            else:
                verdicts[config] = path_check(mdp, ideal, piece, cache=cache)
                if verdicts[config]:
                    passed.append(config)
        if verdicts[config]:
            return None
        bad = minimal_stuck(mdp, ideal, piece, cache=cache)
        if bad is None:
            raise BudgetExceededError(
                f"budget exhausted: no stuck instantiation with at most "
                f"{resolve_limit(None, 'witness_tokens')} tokens per state below {config}")
        stuck.append(bad)
        return bad

    removals = []
    ranked = sorted(order, key=lambda c: (omega_count(c.config), finite_part(c.config)),
                    reverse=True)
    for commit in ranked:
        pieces, found = _refine(commit, bound, find_bad)
        if found:
            removals.append(Removal(commit, "path", iteration, pieces=tuple(pieces)))
    positions = {commit: i for i, commit in enumerate(order)}
    return sorted(removals, key=lambda r: positions[r.commit])


def decide(mdp: Mdp, *, cap: Optional[int] = None,
           shuffle_seed: Optional[int] = None) -> DecideResult:
    """
    Decide whether arbitrarily many tokens can almost-surely be brought to
    the target states.

    Args:
        mdp (Mdp): Agent MDP.
        cap (int | None): Maximum number of states.
        shuffle_seed (int | None): Shuffle the commit order of every pass.
            The fixpoint does not depend on it.

    Returns:
        DecideResult: Answer, fixpoint and progress record.

    Raises:
        ValueError: If `mdp` exceeds the state cap.
        BudgetExceededError: If a sub-check runs out of budget; the answer is
            then unknown and `partial` holds the candidate set reached so far.
    """
    candidates = init_candidates(mdp, cap=cap)
    mdp = candidates.mdp
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    commits = set(candidates.commits)
    trace: List[Removal] = []
    trajectory = [candidates.size()]
    iteration = 0
    while True:
        iteration += 1
        removed_any = False
        for name, run in (("closure", _closure_pass), ("path", _path_pass)):
            order = sorted(commits)
            if rng is not None:
                rng.shuffle(order)
            ideal = IdealSet.of(commits)
            try:
                removals = run(mdp, ideal, order, iteration)
            except BudgetExceededError as e:
                partial = CandidateSet(mdp, frozenset(commits), candidates.finals, tuple(trace))
                raise BudgetExceededError(str(e), partial=partial) from e
            for removal in removals:
                commits.discard(removal.commit)
            for removal in removals:
                commits.update(removal.pieces)
            commits = set(IdealSet.of(commits).commits)
            log.debug("iteration %d %s pass: %d of %d maximal commits split",
                      iteration, name, len(removals), len(order))
            trace.extend(removals)
            removed_any = removed_any or bool(removals)
            current = CandidateSet(mdp, frozenset(commits), candidates.finals)
            if candidates.finals not in current:
                raise InvariantError("the final commit was removed")
        trajectory.append(current.size())
        if not removed_any:
            break

    start = initial_symbolic(mdp)
    answer = any(SymbolicCommit(start, a) in current for a in range(mdp.num_actions))
    fixpoint = CandidateSet(mdp, frozenset(commits), candidates.finals, tuple(trace))
    log.info("decided %s after %d iterations", answer, iteration)
    return DecideResult(answer, fixpoint, iteration, tuple(trajectory))
