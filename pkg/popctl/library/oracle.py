# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Fixed-population ground truth.

For a given number of tokens N this module builds the counting product of
N copies of an MDP (configurations are token-count vectors), computes the
largest winning arena for reaching "every token on a target state", and
simulates the safe random walk inside that arena.
"""
import logging
import random
import statistics
from collections import Counter, deque
from dataclasses import dataclass, field
from multiprocessing import Process, Queue
from typing import Dict, FrozenSet, Mapping, Optional, Set, Tuple

from popctl.library.common import Budget, InvariantError, resolve_limit
from popctl.library.model import (
    Configuration,
    Mdp,
    initial_configuration,
    is_final_configuration,
    step_supports
)


log = logging.getLogger(__name__)

Commit = Tuple[Configuration, int]


@dataclass(frozen=True)
class WinningRegion:
    """Largest winning arena of the N-token counting product.

    Attributes:
        mdp (Mdp): Agent MDP.
        tokens (int): Population size N.
        states (FrozenSet[Configuration]): Configurations of the region.
        arena (Mapping[Configuration, Tuple[int]]): Retained actions per configuration.
        successors (Mapping[Commit, FrozenSet[Configuration]]): Successor sets of
            the retained commits.
    """
    mdp: Mdp
    tokens: int
    states: FrozenSet[Configuration]
    arena: Mapping[Configuration, Tuple[int, ...]]
    successors: Mapping[Commit, FrozenSet[Configuration]] = field(repr=False)

    @property
    def start(self) -> Configuration:
        """Initial configuration i^(N)."""
        return initial_configuration(self.mdp, self.tokens)

    def contains_start(self) -> bool:
        """True if the initial configuration is winning."""
        return self.start in self.states

    def commits(self) -> Set[Commit]:
        """All retained (configuration, action) pairs."""
        return {(config, action) for config, actions in self.arena.items() for action in actions}

    def audit(self) -> bool:
        """
        Re-run both deletion passes on the region.

        Returns:
            bool: True if nothing would be deleted, i.e. the region is a fixpoint.
        """
        commits = self.commits()
        states, kept = _refine(self.mdp, set(self.states), set(commits), self.successors)
        return states == set(self.states) and kept == commits


def _backward_reachable(mdp, states, commits, successors):
    predecessors: Dict[Configuration, list] = {}
    for commit in commits:
        for succ in successors[commit]:
            predecessors.setdefault(succ, []).append(commit[0])
    reached = {c for c in states if is_final_configuration(mdp, c)}
    queue = deque(reached)
    while queue:
        config = queue.popleft()
        for pred in predecessors.get(config, ()):
            if pred not in reached:
                reached.add(pred)
                queue.append(pred)
    return reached


def _refine(mdp, states, commits, successors):
    # users[c] lists the commits that may move a token configuration into c
    users: Dict[Configuration, list] = {}
    for commit in commits:
        for succ in successors[commit]:
            users.setdefault(succ, []).append(commit)

    removed = deque(c for c in {succ for k in commits for succ in successors[k]}
                    if c not in states)
    while True:
        while removed:
            config = removed.popleft()
            for commit in users.get(config, ()):
                commits.discard(commit)
        reached = _backward_reachable(mdp, states, commits, successors)
        dropped = states - reached
        if not dropped:
            return states, commits
        log.debug("dropping %d configurations without a path to the target", len(dropped))
        states = reached
        commits = {k for k in commits if k[0] in states}
        removed.extend(dropped)


def winning_region(mdp: Mdp, tokens: int, *, budget: Optional[int] = None) -> WinningRegion:
    """
    Compute the winning region of the N-token counting product.

    Starts from every commit over the configurations reachable from i^(N)
    and alternates deleting commits with a successor outside the current
    state set and deleting states without a path to a final configuration.

    Args:
        mdp (Mdp): Agent MDP.
        tokens (int): Population size N >= 0.
        budget (int | None): Cap on materialized configurations.

    Returns:
        WinningRegion: The fixpoint.

    Raises:
        ValueError: If `tokens` is negative.
        BudgetExceededError: If more configurations than `budget` are reached.
    """
    if tokens < 0:
        raise ValueError("population size must be >= 0")
    counter = Budget("oracle_configurations", resolve_limit(budget, "oracle_configurations"))
    start = initial_configuration(mdp, tokens)
    counter.charge()
    seen = {start}
    queue = deque([start])
    successors: Dict[Commit, FrozenSet[Configuration]] = {}
    while queue:
        config = queue.popleft()
        for action in range(mdp.num_actions):
            succ = step_supports(mdp, config, action)
            successors[config, action] = succ
            for nxt in succ:
                if nxt not in seen:
                    counter.charge()
                    seen.add(nxt)
                    queue.append(nxt)
    log.debug("explored %d configurations with %d tokens", len(seen), tokens)

    states, commits = _refine(mdp, set(seen), set(successors), successors)
    arena: Dict[Configuration, list] = {}
    for config, action in sorted(commits):
        arena.setdefault(config, []).append(action)
    return WinningRegion(
        mdp=mdp,
        tokens=tokens,
        states=frozenset(states),
        arena={config: tuple(actions) for config, actions in arena.items()},
        successors={k: successors[k] for k in commits},
    )


def is_winnable(mdp: Mdp, tokens: int, *, budget: Optional[int] = None) -> bool:
    """True iff i^(N) belongs to the winning region for N = `tokens`."""
    return winning_region(mdp, tokens, budget=budget).contains_start()


@dataclass(frozen=True)
class SimulationResult:
    """Outcome of a batch of safe random walk episodes.

    Attributes:
        runs (int): Number of episodes.
        successes (int): Episodes reaching a final configuration within the step limit.
        histogram (Dict[int, int]): Steps needed by successful episodes, and their count.
    """
    runs: int
    successes: int
    histogram: Dict[int, int]

    @property
    def failures(self) -> int:
        """Episodes that hit the step limit."""
        return self.runs - self.successes

    def median_steps(self) -> Optional[float]:
        """Median step count over successful episodes, None if there are none."""
        if not self.histogram:
            return None
        return statistics.median(Counter(self.histogram).elements())


def _step(mdp, config, action, rng):
    vector = [0] * mdp.num_states
    for state, count in enumerate(config):
        succ = mdp.successors(state, action)
        for _ in range(count):
            vector[rng.choice(succ)] += 1
    return tuple(vector)


def run_episode(region: WinningRegion, seed: int, index: int, max_steps: int) -> Optional[int]:
    """
    Play one safe random walk episode.

    The generator is seeded from (`seed`, `index`), so episodes do not depend
    on how they are scheduled.

    Returns:
        int | None: Steps until every token is final, None if `max_steps` ran out.

    Raises:
        InvariantError: If the walk reaches a non-final configuration without
            retained actions.
    """
    rng = random.Random(f"{seed}:{index}")
    mdp = region.mdp
    config = region.start
    for steps in range(max_steps + 1):
        if is_final_configuration(mdp, config):
            return steps
        if steps == max_steps:
            break
        actions = region.arena.get(config)
        if not actions:
            raise InvariantError(f"no retained action at configuration {config}")
        config = _step(mdp, config, rng.choice(actions), rng)
    return None


def _worker(region, seed, indices, max_steps, queue):
    queue.put([(index, run_episode(region, seed, index, max_steps)) for index in indices])


def simulate(mdp: Mdp, tokens: int, runs: int, max_steps: int, seed: int, *,
             max_processes: int = 1, region: Optional[WinningRegion] = None,
             budget: Optional[int] = None) -> SimulationResult:
    """
    Run safe random walk episodes inside the winning region.

    At each configuration the walk picks a retained action uniformly; each
    token then moves to a uniformly chosen successor.

    Args:
        mdp (Mdp): Agent MDP.
        tokens (int): Population size N.
        runs (int): Number of episodes.
        max_steps (int): Step limit per episode.
        seed (int): Base seed.
        max_processes (int): Worker processes; results do not depend on it.
        region (WinningRegion | None): Precomputed region for `mdp` and `tokens`.
        budget (int | None): Cap passed to `winning_region`.

    Returns:
        SimulationResult: Success count and step histogram.

    Raises:
        ValueError: If the start configuration is not winning.
    """
    if region is None:
        region = winning_region(mdp, tokens, budget=budget)
    if not region.contains_start():
        raise ValueError(f"start configuration with {tokens} tokens is not in the winning region")

    indices = list(range(runs))
    outcomes = []
    if max_processes <= 1 or runs < 2:
        outcomes = [(index, run_episode(region, seed, index, max_steps)) for index in indices]
    else:
        chunks = [indices[i::max_processes] for i in range(max_processes)]
        procs = []
        for chunk in chunks:
            if not chunk:
                continue
            queue = Queue()
            proc = Process(target=_worker, args=(region, seed, chunk, max_steps, queue))
            proc.start()
            procs.append((proc, queue))
        for proc, queue in procs:
            outcomes.extend(queue.get())
            proc.join()

    histogram: Dict[int, int] = {}
    for _, steps in sorted(outcomes):
        if steps is not None:
            histogram[steps] = histogram.get(steps, 0) + 1
    successes = sum(histogram.values())
    log.debug("simulated %d episodes, %d successes", runs, successes)
    return SimulationResult(runs=runs, successes=successes,
                            histogram=dict(sorted(histogram.items())))
