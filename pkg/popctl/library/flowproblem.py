# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Sequential flow problem.

An instance asks whether every configuration below an initial symbolic
configuration has a path into the target ideal while every step uses a
commit of the arena ideal. Instances with largest constant 1 and at most
one counted token are decided with the flow semigroup; the others are
first reduced to constant 1 by splitting the finitely many counted tokens
into private copies of the MDP. `bounded_path_oracle` answers the same
question by explicit search for small populations.
"""
# pylint: disable=too-many-arguments, too-many-locals
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from popctl.library.common import Budget, BudgetExceededError, InputError, resolve_limit
from popctl.library.model import (
    DUMMY,
    OMEGA,
    IdealSet,
    Mdp,
    SymbolicCommit,
    SymbolicConfig,
    finite_part,
    format_config,
    largest_constant,
    parse_commit,
    parse_document,
    parse_entry,
    render_ideal_set,
    render_mdp,
    step_supports
)
from popctl.library.semigroup import (
    FlowSemigroup,
    action_flows,
    close_flow_semigroup,
    decide_flow_condition,
    maximal_action_flows,
    satisfies_flow_condition
)


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowInstance:
    """Instance of the sequential flow problem.

    Build instances with `FlowInstance.create`, which drops target commits
    outside the arena.

    Attributes:
        mdp (Mdp): Agent MDP.
        initial (SymbolicConfig): Initial symbolic configuration w0.
        arena (IdealSet): Arena W.
        targets (IdealSet): Targets F, contained in W.
        private (bool): Counted tokens already sit in private copies.
    """
    mdp: Mdp
    initial: SymbolicConfig
    arena: IdealSet
    targets: IdealSet
    private: bool = False

    def __post_init__(self):
        if len(self.initial) != self.mdp.num_states:
            raise ValueError("initial configuration does not match the MDP")
        for commit in self.arena.commits + self.targets.commits:
            if len(commit.config) != self.mdp.num_states or commit.action >= self.mdp.num_actions:
                raise ValueError("commit does not match the MDP")
        if not self.arena.contains(self.initial):
            raise ValueError("initial configuration is not in the arena")

    @classmethod
    def create(cls, mdp: Mdp, initial: SymbolicConfig, arena: IdealSet,
               targets: IdealSet, *, private: bool = False) -> "FlowInstance":
        """Normalize targets into the arena and build the instance."""
        kept = [c for c in targets if arena.contains(c.config, c.action)]
        if len(kept) != len(targets):
            log.warning("dropping %d target commits outside the arena", len(targets) - len(kept))
        return cls(mdp, tuple(initial), arena, IdealSet.of(kept), private)

    @property
    def largest_constant(self) -> int:
        """Largest finite entry of w0, W and F."""
        return max(largest_constant(self.initial), self.arena.largest_constant(),
                   self.targets.largest_constant())

    @property
    def needs_reduction(self) -> bool:
        """
        True unless the flow semigroup decides the instance as it stands:
        constants above 1, or two counted tokens that could share a state.
        """
        if self.private:
            return False
        return self.largest_constant > 1 or finite_part(self.initial) > 1

    def target_states(self) -> Tuple[int, ...]:
        """States with a nonzero entry in some target commit."""
        return tuple(s for s in range(self.mdp.num_states)
                     if any(c.config[s] != 0 for c in self.targets))


def parse_flow_instance(text: str) -> FlowInstance:
    """
    Parse an instance file: an MDP followed by `w0:`, `commit:` and
    `target:` lines. Commits may use the reserved dummy action.
    """
    mdp, extra = parse_document(text, extra_keys=("w0", "commit", "target"))
    if any(tokens and tokens[-1] == DUMMY for key in ("commit", "target")
           for _, tokens in extra[key]):
        mdp = mdp.with_dummy()
    if len(extra["w0"]) != 1:
        raise InputError("exactly one 'w0' line is required")
    number, tokens = extra["w0"][0]
    if len(tokens) != mdp.num_states:
        raise InputError(f"expected {mdp.num_states} entries", number)
    initial = tuple(parse_entry(token, number) for token in tokens)
    arena = IdealSet.of(parse_commit(mdp, t, n) for n, t in extra["commit"])
    targets = IdealSet.of(parse_commit(mdp, t, n) for n, t in extra["target"])
    try:
        return FlowInstance.create(mdp, initial, arena, targets)
    except ValueError as e:
        raise InputError(str(e)) from e


def render_flow_instance(instance: FlowInstance) -> str:
    """Print an instance in the format read by `parse_flow_instance`."""
    return (render_mdp(instance.mdp)
            + f"w0: {format_config(instance.initial)}\n"
            + render_ideal_set(instance.arena, instance.mdp)
            + render_ideal_set(instance.targets, instance.mdp, key="target"))


def copied_mdp(mdp: Mdp, copies: int) -> Mdp:
    """
    Disjoint union of `copies` copies of `mdp` sharing one action alphabet.

    State s of copy j (1-based) gets index (j-1)·|S| + s and name `s@j`.
    The initial state is the one of the last copy.
    """
    width = mdp.num_states
    states = tuple(f"{name}@{j}" for j in range(1, copies + 1) for name in mdp.states)
    trans = tuple(
        tuple(tuple(offset + t for t in mdp.successors(s, a)) for a in range(mdp.num_actions))
        for offset in range(0, copies * width, width) for s in range(width))
    finals = frozenset(offset + s for offset in range(0, copies * width, width)
                       for s in mdp.finals)
    return Mdp(states, mdp.actions, trans, (copies - 1) * width + mdp.initial, finals)


def _psi(commit: SymbolicCommit, width: int, tokens: int, counter: Budget):
    """Commits of the copied MDP whose copy-sum is dominated by `commit`."""
    bound = commit.config
    remaining = list(bound)
    placement: List[Optional[int]] = []
    images = []

    def place(copy):
        if copy == tokens:
            counter.charge()
            config = [0] * (width * (tokens + 1))
            for j, s in enumerate(placement):
                if s is not None:
                    config[j * width + s] = 1
            for s in range(width):
                if bound[s] == OMEGA:
                    config[tokens * width + s] = OMEGA
                elif remaining[s] >= 1:
                    config[tokens * width + s] = 1
            images.append(SymbolicCommit(tuple(config), commit.action))
            return
        for s in range(width):
            if remaining[s] >= 1:
                remaining[s] -= 1
                placement.append(s)
                place(copy + 1)
                placement.pop()
                remaining[s] += 1
        placement.append(None)
        place(copy + 1)
        placement.pop()

    place(0)
    return images


def reduce_to_constant_one(instance: FlowInstance, *, cap: Optional[int] = None,
                           budget: Optional[int] = None) -> FlowInstance:
    """
    Reduce an instance to an equivalent one with largest constant 1.

    With K the sum of the finite entries of w0, the MDP is copied K+1
    times. Each counted token of w0 gets a private copy holding exactly that
    token (entry 1); the ω-entries of w0 go to the last copy. Arena and
    targets are replaced by all commits with {0, 1} entries on the private
    copies and {0, 1, ω} entries on the last copy whose copy-sum is
    dominated by an original commit.

    Instances that need no reduction are returned unchanged.

    Raises:
        BudgetExceededError: If K exceeds `cap` (default |S|²) or the
            commit enumeration exceeds `budget`.
    """
    if not instance.needs_reduction:
        return instance
    mdp = instance.mdp
    width = mdp.num_states
    tokens = int(finite_part(instance.initial))
    cap = resolve_limit(cap, "reduction_tokens")
    if cap is None:
        cap = width * width
    if tokens > cap:
        raise BudgetExceededError(f"budget exhausted: {tokens} counted tokens > {cap}")
    counter = Budget("ideal_commits", resolve_limit(budget, "ideal_commits"))
    initial = reduced_initial(instance.initial)
    arena = IdealSet.of(image for commit in instance.arena
                        for image in _psi(commit, width, tokens, counter))
    targets = IdealSet.of(image for commit in instance.targets
                          for image in _psi(commit, width, tokens, counter))
    log.debug("reduced %d counted tokens: %d states, %d arena commits",
              tokens, width * (tokens + 1), len(arena))
    return FlowInstance.create(copied_mdp(mdp, tokens + 1), initial, arena, targets,
                               private=True)


def reduced_initial(initial: SymbolicConfig) -> SymbolicConfig:
    """
    Initial configuration of the reduced instance: the i-th counted token
    gets entry 1 in copy i, ω-entries go to the last copy.
    """
    width = len(initial)
    tokens = int(finite_part(initial))
    config = [0] * (width * (tokens + 1))
    copy = 0
    for s, entry in enumerate(initial):
        if entry == OMEGA:
            config[tokens * width + s] = OMEGA
        else:
            for _ in range(int(entry)):
                config[copy * width + s] = 1
                copy += 1
    return tuple(config)


def _single_token_targets(instance: FlowInstance):
    """States from which one token can reach a target state inside the arena."""
    mdp = instance.mdp
    occupied = [any(c.config[s] for c in instance.arena) for s in range(mdp.num_states)]
    good = {s for s in range(mdp.num_states) if any(c.config[s] for c in instance.targets)}
    predecessors: Dict[int, set] = {}
    for commit in instance.arena:
        for s, entry in enumerate(commit.config):
            if entry:
                for t in mdp.successors(s, commit.action):
                    if occupied[t] or t in good:
                        predecessors.setdefault(t, set()).add(s)
    queue = deque(good)
    while queue:
        t = queue.popleft()
        for s in predecessors.get(t, ()):
            if s not in good:
                good.add(s)
                queue.append(s)
    return good


def path_exists(instance: FlowInstance, config, *, budget: Optional[int] = None) -> bool:
    """
    Explicit search for a path from a counted configuration into the target
    ideal, every step using a commit of the arena ideal.

    Raises:
        BudgetExceededError: If more configurations than `budget` are explored.
    """
    counter = Budget("path_configurations", resolve_limit(budget, "path_configurations"))
    mdp = instance.mdp
    config = tuple(config)
    seen = {config}
    queue = deque([config])
    while queue:
        current = queue.popleft()
        if instance.targets.contains(current):
            return True
        for action in range(mdp.num_actions):
            if not instance.arena.contains(current, action):
                continue
            for succ in step_supports(mdp, current, action):
                if succ not in seen and (instance.arena.contains(succ)
                                         or instance.targets.contains(succ)):
                    counter.charge()
                    seen.add(succ)
                    queue.append(succ)
    return False


def semigroup_for(instance: FlowInstance, *, budget: Optional[int] = None,
                  stop=None, prune: bool = False) -> Optional[FlowSemigroup]:
    """
    Flow semigroup of an instance with largest constant 1, None if the
    arena has no action flow. With `prune` only the maximal action flows
    generate it.
    """
    enumerate_flows = maximal_action_flows if prune else action_flows
    generators = enumerate_flows(instance.mdp, instance.arena, instance.targets)
    if not generators:
        return None
    return close_flow_semigroup(generators, budget=budget, stop=stop)


def solve_sequential_flow(instance: FlowInstance, *, shortcuts: bool = True,
                          cache: Optional[dict] = None, budget: Optional[int] = None,
                          prune: bool = False) -> bool:
    """
    Decide a sequential flow instance.

    Instances whose initial configuration already lies in the target ideal
    are positive. Otherwise the instance is reduced to constant 1, its
    action flows are closed into the flow semigroup and the flow condition
    is checked against the target states.

    With `shortcuts` enabled two exact pre-checks run first: an occupied
    state from which no single token can reach the targets makes the answer
    false, and an initial configuration without ω is decided by explicit
    search.

    Args:
        instance (FlowInstance): The instance.
        shortcuts (bool): Enable the exact pre-checks.
        cache (dict | None): Semigroups keyed by number of counted tokens.
            Valid only for instances sharing arena and targets.
        budget (int | None): Cap on semigroup elements.
        prune (bool): Generate the semigroup from the maximal action flows only.

    Returns:
        bool: The answer.

    Raises:
        BudgetExceededError: If a resource cap is hit before an answer is known.
    """
    if instance.targets.contains(instance.initial):
        return True
    if all(entry == 0 for entry in instance.initial):
        return bool(instance.targets)
    if shortcuts:
        good = _single_token_targets(instance)
        if any(entry and s not in good for s, entry in enumerate(instance.initial)):
            return False
        if OMEGA not in instance.initial:
            return path_exists(instance, instance.initial)

    tokens = int(finite_part(instance.initial))
    if not instance.needs_reduction:
        initial = instance.initial
    else:
        initial = reduced_initial(instance.initial)
    if cache is not None and tokens in cache:
        finals, semigroup = cache[tokens]
    else:
        reduced = reduce_to_constant_one(instance)
        finals = reduced.target_states()
        stop = None
        if cache is None:
            def stop(flow):
                return satisfies_flow_condition(flow, initial, finals)
        semigroup = semigroup_for(reduced, budget=budget, stop=stop, prune=prune)
        if cache is not None:
            cache[tokens] = (finals, semigroup)
    if semigroup is None:
        return False
    return decide_flow_condition(semigroup, initial, finals)


def bounded_path_oracle(instance: FlowInstance, max_tokens: Optional[int] = None, *,
                        budget: Optional[int] = None) -> List[Tuple[int, bool]]:
    """
    Path feasibility for small instantiations of w0.

    For every N up to `max_tokens` the ω-entries of w0 are replaced by N and
    the resulting largest configuration of the ideal is searched explicitly.
    Smaller configurations of the ideal have a path whenever it has one.

    Returns:
        List[Tuple[int, bool]]: (N, feasible) pairs for N = 0..max_tokens.
    """
    max_tokens = resolve_limit(max_tokens, "path_oracle_tokens")
    results = []
    for tokens in range(max_tokens + 1):
        config = tuple(tokens if entry == OMEGA else int(entry) for entry in instance.initial)
        results.append((tokens, path_exists(instance, config, budget=budget)))
    return results
