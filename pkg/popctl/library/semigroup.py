# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Closure engines for flow and cut semigroups.

Action flows abstract one controller step inside an arena. Closing them
under the maxmin product and the iteration of idempotents gives the flow
semigroup, whose elements decide whether unboundedly many tokens can be
routed into the targets. The cut semigroup is the dual closure and is only
built at tiny sizes to cross-validate the flow side.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, List, Optional, Tuple

from popctl.library.common import Budget, BudgetExceededError, resolve_limit
from popctl.library.model import OMEGA, IdealSet, Mdp, SymbolicConfig, antichain, symbolic_leq
from popctl.library.semiring import (
    CutMatrix,
    FlowMatrix,
    Sval,
    cut_from_flow,
    cut_iterate,
    cut_product,
    flow_dom,
    flow_im,
    flow_iterate,
    flow_product
)


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowSemigroup:
    """Closure of a set of generators under product and iteration.

    Attributes:
        generators (Tuple): Generators, sorted by packed value.
        elements (Tuple): All elements found, in insertion order.
        complete (bool): False when the closure stopped early (budget or witness).
        products (int): Products computed.
        iterations (int): Idempotents iterated.
    """
    generators: Tuple
    elements: Tuple
    complete: bool = True
    products: int = 0
    iterations: int = 0

    def __len__(self):
        return len(self.elements)

    def __contains__(self, item):
        return item in set(self.elements)

    def audit(self) -> bool:
        """Check product closure and closure under iteration of idempotents."""
        members = set(self.elements)
        for x in self.elements:
            square = flow_product(x, x)
            if square == x and flow_iterate(x) not in members:
                return False
            for y in self.elements:
                if flow_product(x, y) not in members:
                    return False
        return True


def _close(generators, product, iterate, key, budget, stop=None):
    """
    Worklist closure shared by flows and cuts.

    Returns:
        Tuple[list, bool, int, int]: elements, complete, products, iterations.
    """
    elements = {}
    queue = deque()
    counts = {'products': 0, 'iterations': 0}
    found = []

    def add(item):
        if item in elements:
            return
        budget.charge(partial=list(elements))
        elements[item] = None
        queue.append(item)
        if stop is not None and stop(item):
            found.append(item)

    for item in sorted(set(generators), key=key):
        add(item)
    processed: List[Hashable] = []
    while queue and not found:
        x = queue.popleft()
        processed.append(x)
        for y in processed:
            counts['products'] += 1
            xy = product(x, y)
            add(xy)
            if y is x:
                if xy == x:
                    counts['iterations'] += 1
                    add(iterate(x))
            else:
                counts['products'] += 1
                add(product(y, x))
    return list(elements), not queue, counts['products'], counts['iterations']


def _dominated(config: SymbolicConfig, maxima: List[SymbolicConfig]) -> bool:
    return any(symbolic_leq(config, m) for m in maxima)


def _row_choices(entry, successors):
    """Possible (ones, infinities) bitmasks of a row under a commit entry."""
    if entry == 0:
        return [(0, 0)]
    if entry == 1:
        return [(0, 0)] + [(1 << t, 0) for t in successors]
    choices = []
    for values in itertools.product((0, 1, 3), repeat=len(successors)):
        ones = sum(1 << t for t, v in zip(successors, values) if v == 1)
        infinities = sum(1 << t for t, v in zip(successors, values) if v == 3)
        choices.append((ones, infinities))
    return choices


def action_flows(mdp: Mdp, arena: IdealSet, targets: Optional[IdealSet] = None, *,
                 budget: Optional[int] = None) -> Tuple[FlowMatrix, ...]:
    """
    Enumerate the action flows of an arena with largest constant 1.

    An action flow f has entries in {0, 1, ∞}, is supported by the
    transitions of one action a, satisfies (dom f, a) ∈ arena, and its image
    im f is dominated by a configuration of the arena or of the targets.

    Rows are enumerated per maximal commit: a 0-entry forces a zero row and
    a 1-entry allows at most a single 1.

    Args:
        mdp (Mdp): Agent MDP.
        arena (IdealSet): Arena with entries in {0, 1, ω}.
        targets (IdealSet | None): Target ideal, also accepted as image.
        budget (int | None): Cap on enumerated candidates.

    Returns:
        Tuple[FlowMatrix]: Distinct action flows sorted by packed value.

    Raises:
        ValueError: If the arena has a constant above 1.
        BudgetExceededError: If more candidates than `budget` are enumerated.
    """
    if arena.largest_constant() > 1:
        raise ValueError("action flows need an arena with largest constant 1")
    counter = Budget("action_flows", resolve_limit(budget, "action_flows"))
    images = arena.configs()
    if targets is not None:
        images = images + targets.configs()
    found = set()
    for commit in arena:
        choices = [_row_choices(entry, mdp.successors(s, commit.action))
                   for s, entry in enumerate(commit.config)]
        for rows in itertools.product(*choices):
            counter.charge()
            support = tuple(ones | infinities for ones, infinities in rows)
            infinities = tuple(inf for _, inf in rows)
            flow = FlowMatrix(mdp.num_states, (support, infinities, infinities))
            if flow not in found and _dominated(flow_im(flow), images):
                found.add(flow)
    log.debug("enumerated %d action flows over %d commits", len(found), len(arena))
    return tuple(sorted(found, key=FlowMatrix.pack))


def _flows_below(mdp: Mdp, commit, image: SymbolicConfig):
    """Largest action flows of `commit` whose image is dominated by `image`."""
    width = mdp.num_states
    succ = [mdp.successors(s, commit.action) for s in range(width)]
    omega_rows = [s for s in range(width) if commit.config[s] == OMEGA]
    one_rows = [s for s in range(width) if commit.config[s] == 1]
    infinities = tuple(
        sum(1 << t for t in succ[s] if image[t] == OMEGA) if commit.config[s] == OMEGA else 0
        for s in range(width))
    picks = [[None] + [t for t in succ[s] if image[t] != 0] for s in one_rows]
    for chosen in itertools.product(*picks):
        taken = [t for t in chosen if t is not None and image[t] == 1]
        if len(taken) != len(set(taken)):
            continue
        ones = [0] * width
        for s, t in zip(one_rows, chosen):
            if t is not None:
                ones[s] |= 1 << t
        open_columns = [t for t in range(width) if image[t] == 1 and t not in taken]
        feeders = [[None] + [s for s in omega_rows if t in succ[s]] for t in open_columns]
        for fed in itertools.product(*feeders):
            rows = list(ones)
            for t, s in zip(open_columns, fed):
                if s is not None:
                    rows[s] |= 1 << t
            support = tuple(r | inf for r, inf in zip(rows, infinities))
            yield FlowMatrix(width, (support, infinities, infinities))


def flow_leq(f: FlowMatrix, g: FlowMatrix) -> bool:
    """Entrywise order on flows."""
    return all(a & ~b == 0 for fl, gl in zip(f.layers, g.layers) for a, b in zip(fl, gl))


def maximal_action_flows(mdp: Mdp, arena: IdealSet, targets: Optional[IdealSet] = None, *,
                         budget: Optional[int] = None) -> Tuple[FlowMatrix, ...]:
    """
    The maximal action flows of an arena with largest constant 1.

    Every action flow lies below one of them. Products and iteration are
    monotone, so the semigroup they generate dominates every element of the
    semigroup of all action flows, and the flow condition, which is upward
    closed, holds in one iff it holds in the other.

    Args:
        mdp (Mdp): Agent MDP.
        arena (IdealSet): Arena with entries in {0, 1, ω}.
        targets (IdealSet | None): Target ideal, also accepted as image.
        budget (int | None): Cap on enumerated candidates.

    Returns:
        Tuple[FlowMatrix]: The maximal flows sorted by packed value.

    Raises:
        ValueError: If the arena has a constant above 1.
        BudgetExceededError: If more candidates than `budget` are enumerated.
    """
    if arena.largest_constant() > 1:
        raise ValueError("action flows need an arena with largest constant 1")
    counter = Budget("action_flows", resolve_limit(budget, "action_flows"))
    images = arena.configs()
    if targets is not None:
        images = images + targets.configs()
    images = antichain(images)
    found = set()
    for commit in arena:
        for image in images:
            for flow in _flows_below(mdp, commit, image):
                counter.charge()
                found.add(flow)
    maxima = [f for f in found if not any(g != f and flow_leq(f, g) for g in found)]
    log.debug("%d maximal action flows over %d commits", len(maxima), len(arena))
    return tuple(sorted(maxima, key=FlowMatrix.pack))


def is_action_flow(flow: FlowMatrix, mdp: Mdp, arena: IdealSet,
                   targets: Optional[IdealSet] = None) -> bool:
    """Replay the definition of an action flow on `flow`."""
    if flow.dim != mdp.num_states or flow.has_entry(Sval.OMEGA):
        return False
    images = arena.configs() + (targets.configs() if targets is not None else [])
    if not _dominated(flow_im(flow), images):
        return False
    dom = flow_dom(flow)
    for action in range(mdp.num_actions):
        supported = all(flow.layers[0][s] & ~sum(1 << t for t in mdp.successors(s, action)) == 0
                        for s in range(flow.dim))
        if supported and arena.contains(dom, action):
            return True
    return False


def close_flow_semigroup(generators: Iterable[FlowMatrix], *, budget: Optional[int] = None,
                         stop: Optional[Callable[[FlowMatrix], bool]] = None) -> FlowSemigroup:
    """
    Close flows under maxmin product and iteration of idempotents.

    Elements are inserted in worklist order, starting from the generators
    sorted by packed value, so the result is deterministic.

    Args:
        generators (Iterable[FlowMatrix]): Nonempty set of flows.
        budget (int | None): Cap on the number of elements.
        stop (callable | None): Stop as soon as an element satisfies it; the
            result is then flagged incomplete.

    Returns:
        FlowSemigroup: The closure.

    Raises:
        ValueError: If `generators` is empty.
        BudgetExceededError: If the closure outgrows `budget`; `partial`
            carries the incomplete semigroup.
    """
    generators = tuple(sorted(set(generators), key=FlowMatrix.pack))
    if not generators:
        raise ValueError("a semigroup needs at least one generator")
    counter = Budget("semigroup_elements", resolve_limit(budget, "semigroup_elements"))
    try:
        elements, complete, products, iterations = _close(
            generators, flow_product, flow_iterate, FlowMatrix.pack, counter, stop)
    except BudgetExceededError as e:
        partial = FlowSemigroup(generators, tuple(e.partial), complete=False)
        raise BudgetExceededError(str(e), partial=partial) from e
    log.debug("flow semigroup: %d generators, %d elements, %d products",
              len(generators), len(elements), products)
    return FlowSemigroup(generators, tuple(elements), complete, products, iterations)


def satisfies_flow_condition(flow: FlowMatrix, initial: SymbolicConfig,
                             finals: Iterable[int]) -> bool:
    """
    True if every ω-entry of `initial` reaches `finals` with value >= ω and
    every 1-entry reaches `finals` with value >= 1.
    """
    mask = sum(1 << t for t in set(finals))
    for s, entry in enumerate(initial):
        if entry == 0:
            continue
        layer = flow.layers[1] if entry == OMEGA else flow.layers[0]
        if not layer[s] & mask:
            return False
    return True


def decide_flow_condition(semigroup: FlowSemigroup, initial: SymbolicConfig,
                          finals: Iterable[int]) -> bool:
    """
    Decide the flow condition on a closed semigroup.

    Args:
        semigroup (FlowSemigroup): Closure of the action flows.
        initial (SymbolicConfig): Entries in {0, 1, ω}.
        finals (Iterable[int]): Target states.

    Returns:
        bool: True if some element routes every occupied initial state into
        `finals` (with value >= ω for ω-entries and >= 1 for 1-entries).

    Raises:
        ValueError: If `initial` has an entry other than 0, 1 and ω.
        BudgetExceededError: If the semigroup is incomplete and none of its
            elements is a witness.
    """
    if any(entry not in (0, 1, OMEGA) for entry in initial):
        raise ValueError("initial configuration must have entries in {0, 1, ω}")
    if all(entry == 0 for entry in initial):
        return True
    finals = list(finals)
    if any(satisfies_flow_condition(f, initial, finals) for f in semigroup.elements):
        return True
    if not semigroup.complete:
        raise BudgetExceededError("flow semigroup is incomplete", partial=semigroup)
    return False


def close_cut_semigroup(mdp: Mdp, arena: IdealSet, targets: Optional[IdealSet] = None, *,
                        cap: Optional[int] = None,
                        budget: Optional[int] = None) -> Tuple[CutMatrix, ...]:
    """
    Symbolic mincut semigroup generated by the cuts of the action flows.

    Raises:
        ValueError: If the MDP has more states than `cap`.
        BudgetExceededError: If the closure outgrows `budget`.
    """
    cap = resolve_limit(cap, "cut_semigroup_states")
    if mdp.num_states > cap:
        raise ValueError(f"cut semigroups are limited to {cap} states")
    generators = {cut_from_flow(f, cap=cap) for f in action_flows(mdp, arena, targets)}
    if not generators:
        return ()
    counter = Budget("semigroup_elements", resolve_limit(budget, "semigroup_elements"))
    elements, _, _, _ = _close(generators, cut_product, cut_iterate,
                               lambda cut: cut.entries, counter)
    return tuple(elements)


def dump_semigroup(semigroup: FlowSemigroup) -> str:
    """
    One line per element, `G` for generators and `E` for the others,
    followed by the rows of the matrix separated by `/`.
    """
    generators = set(semigroup.generators)
    lines = []
    for element in semigroup.elements:
        marker = "G" if element in generators else "E"
        lines.append(f"{marker} {element.dump().replace(chr(10), '/')}")
    return "\n".join(lines) + "\n"
