# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Flows, cuts and pipelines over the chain 0 < 1 < ω < ∞.

Flows are S×S matrices multiplied in the (max, min) semiring. Cuts are
2^S×2^S matrices multiplied in the (min, max) semiring, or in the tropical
(min, +) semiring for tropical cuts. The maps `cut_from_flow` and
`flow_from_cut` translate between both worlds.

A flow is stored as three bit layers: row s of layer k is the set of t with
f(s, t) > k, encoded as an integer bitmask. The maxmin product is then three
boolean matrix products.
"""
# pylint: disable=too-many-locals
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Optional, Sequence, Tuple, Union

import networkx as nx

from popctl.library.common import resolve_limit
from popctl.library.maxflow import max_flow
from popctl.library.model import OMEGA, SymbolicConfig


class Sval(IntEnum):
    """Values of the chain semirings."""
    ZERO = 0
    ONE = 1
    OMEGA = 2
    INFTY = 3

    def __str__(self):
        return "01wi"[self.value]

    @classmethod
    def parse(cls, char: str) -> "Sval":
        """Value for one of the characters `0 1 w i`."""
        return cls("01wi".index(char))


Layers = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class FlowMatrix:
    """Square matrix over `Sval`.

    Attributes:
        dim (int): Number of states.
        layers (Layers): `layers[k][s]` is the bitmask of t with entry > k.
    """
    dim: int
    layers: Layers

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("flow dimension must be >= 1")
        full = (1 << self.dim) - 1
        if len(self.layers) != 3 or any(len(layer) != self.dim for layer in self.layers):
            raise ValueError("flow layers do not match the dimension")
        for lower, upper in zip(self.layers, self.layers[1:]):
            if any(u & ~l for l, u in zip(lower, upper)):
                raise ValueError("flow layers must be nested")
        if any(row & ~full for row in self.layers[0]):
            raise ValueError("flow entry out of range")

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence[Union[Sval, int]]]) -> "FlowMatrix":
        """Build a flow from a square table of values."""
        dim = len(rows)
        if any(len(row) != dim for row in rows):
            raise ValueError("flow must be square")
        layers = []
        for level in range(3):
            layers.append(tuple(sum(1 << t for t, value in enumerate(row) if int(value) > level)
                                for row in rows))
        return cls(dim, tuple(layers))

    @classmethod
    def parse(cls, text: str) -> "FlowMatrix":
        """Parse the dump format: one row per line, characters `0 1 w i`."""
        rows = [line.split("#", 1)[0].strip() for line in text.splitlines()]
        return cls.from_entries([[Sval.parse(c) for c in row] for row in rows if row])

    def entry(self, s: int, t: int) -> Sval:
        """Entry f(s, t)."""
        return Sval(sum((layer[s] >> t) & 1 for layer in self.layers))

    def entries(self) -> Tuple[Tuple[Sval, ...], ...]:
        """The matrix as a table of values."""
        return tuple(tuple(self.entry(s, t) for t in range(self.dim)) for s in range(self.dim))

    def pack(self) -> int:
        """Two bits per entry, row-major, entry (0, 0) least significant."""
        value = 0
        for s in range(self.dim):
            for t in range(self.dim):
                value |= int(self.entry(s, t)) << (2 * (s * self.dim + t))
        return value

    def dump(self) -> str:
        """Row-major characters `0 1 w i`, one row per line."""
        return "\n".join("".join(str(v) for v in row) for row in self.entries())

    def has_entry(self, value: Sval) -> bool:
        """True if some entry equals `value`."""
        return any(v == value for row in self.entries() for v in row)

    def __mul__(self, other: "FlowMatrix") -> "FlowMatrix":
        return flow_product(self, other)


def flow_identity(dim: int) -> FlowMatrix:
    """Diagonal ∞, zero elsewhere."""
    diagonal = tuple(1 << s for s in range(dim))
    return FlowMatrix(dim, (diagonal, diagonal, diagonal))


def flow_zero(dim: int) -> FlowMatrix:
    """All-zero flow."""
    zero = (0,) * dim
    return FlowMatrix(dim, (zero, zero, zero))


def flow_product(f: FlowMatrix, g: FlowMatrix) -> FlowMatrix:
    """
    Maxmin product: (f·g)(s, t) = max_r min(f(s, r), g(r, t)).

    Raises:
        ValueError: If dimensions differ.
    """
    if f.dim != g.dim:
        raise ValueError("flow dimensions differ")
    layers = []
    for left, right in zip(f.layers, g.layers):
        rows = []
        for row in left:
            acc = 0
            for r in _bits(row):
                acc |= right[r]
            rows.append(acc)
        layers.append(tuple(rows))
    return FlowMatrix(f.dim, tuple(layers))


def flow_is_idempotent(e: FlowMatrix) -> bool:
    """True if e·e = e."""
    return flow_product(e, e) == e


def _round_up(values: Iterable[Sval]):
    total = 0
    for value in values:
        if value >= Sval.OMEGA:
            return OMEGA
        total += int(value)
    return total if total <= 1 else OMEGA


def flow_dom(f: FlowMatrix) -> SymbolicConfig:
    """Row sums rounded up: 0 ↦ 0, 1 ↦ 1, anything larger ↦ ω."""
    return tuple(_round_up(row) for row in f.entries())


def flow_im(f: FlowMatrix) -> SymbolicConfig:
    """Column sums rounded up: 0 ↦ 0, 1 ↦ 1, anything larger ↦ ω."""
    table = f.entries()
    return tuple(_round_up(table[s][t] for s in range(f.dim)) for t in range(f.dim))


def _stable_mask(e: FlowMatrix):
    ones = [e.layers[0][s] & ~e.layers[1][s] for s in range(e.dim)]
    # into[t] = states t0 with e(t0, t) >= ω
    into = [sum(1 << t0 for t0 in range(e.dim) if (e.layers[1][t0] >> t) & 1)
            for t in range(e.dim)]
    return ones, into


def flow_unstable(e: FlowMatrix, s: int, t: int) -> bool:
    """
    True if the 1-entry (s, t) of the idempotent flow e is unstable.

    The entry is unstable when some s0, t0 satisfy
    e(s, s0) >= ω, e(s0, t0) = 1 and e(t0, t) >= ω.

    Raises:
        ValueError: If e is not idempotent or e(s, t) is not 1.
    """
    if not flow_is_idempotent(e):
        raise ValueError("flow is not idempotent")
    if e.entry(s, t) != Sval.ONE:
        raise ValueError(f"entry ({s}, {t}) is not 1")
    ones, into = _stable_mask(e)
    return any(ones[s0] & into[t] for s0 in _bits(e.layers[1][s]))


def flow_iterate(e: FlowMatrix) -> FlowMatrix:
    """
    Iteration e♯ of an idempotent flow: unstable 1-entries become ω.

    Raises:
        ValueError: If e is not idempotent.
    """
    if not flow_is_idempotent(e):
        raise ValueError("flow is not idempotent")
    ones, into = _stable_mask(e)
    promoted = list(e.layers[1])
    for s in range(e.dim):
        reach = 0
        for s0 in _bits(e.layers[1][s]):
            reach |= ones[s0]
        for t in _bits(ones[s]):
            if reach & into[t]:
                promoted[s] |= 1 << t
    return FlowMatrix(e.dim, (e.layers[0], tuple(promoted), e.layers[2]))


TROPICAL_OMEGA = 1 << 61
TROPICAL_INFINITY = 1 << 62


def tropical_add(x: int, y: int) -> int:
    """Saturating sum in the extended tropical semiring (ω absorbs n, ∞ absorbs all)."""
    if x >= TROPICAL_INFINITY or y >= TROPICAL_INFINITY:
        return TROPICAL_INFINITY
    if x >= TROPICAL_OMEGA or y >= TROPICAL_OMEGA:
        return TROPICAL_OMEGA
    return x + y


def tropical_value(value: Sval) -> int:
    """Read a chain value tropically."""
    return {Sval.ZERO: 0, Sval.ONE: 1, Sval.OMEGA: TROPICAL_OMEGA,
            Sval.INFTY: TROPICAL_INFINITY}[value]


def format_tropical(value: int) -> str:
    """Decimal, `w` or `i`."""
    if value >= TROPICAL_INFINITY:
        return "i"
    if value >= TROPICAL_OMEGA:
        return "w"
    return str(value)


@dataclass(frozen=True)
class _SubsetMatrix:
    """Matrix indexed by pairs of state subsets, encoded as bitmasks."""
    states: int
    entries: Tuple[Tuple, ...]

    def __post_init__(self):
        size = 1 << self.states
        if len(self.entries) != size or any(len(row) != size for row in self.entries):
            raise ValueError("subset matrix does not match the number of states")

    @property
    def full(self) -> int:
        """Bitmask of all states."""
        return (1 << self.states) - 1

    def __call__(self, source: int, target: int):
        return self.entries[source][target]

    def __mul__(self, other):
        return cut_product(self, other)

    @staticmethod
    def combine(x, y):
        """Semiring multiplication of two entries."""
        raise NotImplementedError


class CutMatrix(_SubsetMatrix):
    """Cut over the minmax semiring, entries are `Sval`."""

    @staticmethod
    def combine(x, y):
        return max(x, y)

    def dump(self) -> str:
        """One row per source subset, characters `0 1 w i`."""
        return "\n".join("".join(str(v) for v in row) for row in self.entries)


class TropicalCut(_SubsetMatrix):
    """Cut over the extended tropical semiring, entries are saturating ints."""

    @staticmethod
    def combine(x, y):
        return tropical_add(x, y)

    @classmethod
    def from_cut(cls, cut: CutMatrix) -> "TropicalCut":
        """Read a symbolic cut tropically."""
        return cls(cut.states, tuple(tuple(tropical_value(v) for v in row)
                                     for row in cut.entries))

    def dump(self) -> str:
        """One row per source subset, space separated values."""
        return "\n".join(" ".join(format_tropical(v) for v in row) for row in self.entries)


def _check_cap(states: int, cap: Optional[int]):
    cap = resolve_limit(cap, "cut_states")
    if states > cap:
        raise ValueError(f"cuts are limited to {cap} states, got {states}")


def _row_maxima(f: FlowMatrix):
    """best[s][mask] = max of f(s, t) over t in mask."""
    size = 1 << f.dim
    best = []
    for s in range(f.dim):
        row = []
        for mask in range(size):
            value = Sval.ZERO
            for level in (2, 1, 0):
                if f.layers[level][s] & mask:
                    value = Sval(level + 1)
                    break
            row.append(value)
        best.append(row)
    return best


def cut_from_flow(f: FlowMatrix, *, cap: Optional[int] = None) -> CutMatrix:
    """
    Cut M(f) with M(f)(S0, T) = max{f(s, t) : s ∈ S0, t ∉ T}, empty max = 0.

    Raises:
        ValueError: If f has more states than the cut cap.
    """
    _check_cap(f.dim, cap)
    size = 1 << f.dim
    full = size - 1
    best = _row_maxima(f)
    table = [[Sval.ZERO] * size for _ in range(size)]
    for source in range(1, size):
        low = (source & -source).bit_length() - 1
        rest = table[source & (source - 1)]
        table[source] = [max(rest[target], best[low][full ^ target]) for target in range(size)]
    return CutMatrix(f.dim, tuple(tuple(row) for row in table))


def flow_from_cut(cut: CutMatrix) -> FlowMatrix:
    """Flow f_M with f_M(s, t) = M({s}, S ∖ {t})."""
    return FlowMatrix.from_entries([[cut(1 << s, cut.full ^ (1 << t)) for t in range(cut.states)]
                                    for s in range(cut.states)])


def cut_product(left: _SubsetMatrix, right: _SubsetMatrix) -> _SubsetMatrix:
    """
    Product (L·R)(S0, T) = min over R ⊆ S of combine(L(S0, R), R(R, T)).

    `combine` is max for `CutMatrix` and the saturating sum for `TropicalCut`.

    Raises:
        ValueError: If kinds or dimensions differ.
    """
    if type(left) is not type(right):
        raise ValueError("cannot multiply cuts of different kinds")
    if left.states != right.states:
        raise ValueError("cut dimensions differ")
    size = 1 << left.states
    combine = left.combine
    columns = [[right.entries[middle][target] for middle in range(size)]
               for target in range(size)]
    rows = []
    for source in range(size):
        row = left.entries[source]
        rows.append(tuple(min(combine(x, y) for x, y in zip(row, column))
                          for column in columns))
    return type(left)(left.states, tuple(rows))


def cut_is_idempotent(cut: _SubsetMatrix) -> bool:
    """True if E·E = E."""
    return cut_product(cut, cut) == cut


def cut_stable(cut: CutMatrix, source: int, target: int) -> bool:
    """True if some R has E(R, R) = 0 and max(E(S0, R), E(R, T)) = 1."""
    return any(cut(middle, middle) == Sval.ZERO
               and max(cut(source, middle), cut(middle, target)) == Sval.ONE
               for middle in range(1 << cut.states))


def cut_iterate(cut: CutMatrix) -> CutMatrix:
    """
    Iteration E♯ of an idempotent cut: unstable 1-entries become ω.

    Raises:
        ValueError: If E is not idempotent.
    """
    if not cut_is_idempotent(cut):
        raise ValueError("cut is not idempotent")
    size = 1 << cut.states
    rows = []
    for source in range(size):
        rows.append(tuple(
            Sval.OMEGA if value == Sval.ONE and not cut_stable(cut, source, target) else value
            for target, value in enumerate(cut.entries[source])))
    return CutMatrix(cut.states, tuple(rows))


def tropical_power(cut: TropicalCut, exponent: int) -> TropicalCut:
    """F^n by repeated squaring, n >= 1."""
    if exponent < 1:
        raise ValueError("exponent must be >= 1")
    result = None
    base = cut
    while exponent:
        if exponent & 1:
            result = base if result is None else cut_product(result, base)
        exponent >>= 1
        if exponent:
            base = cut_product(base, base)
    return result


def cut_unstable_by_growth(cut: CutMatrix, source: int, target: int, bound: int = 10) -> bool:
    """
    Growth test for a 1-entry of an idempotent cut.

    Reads E tropically and checks whether F^n(S0, T) exceeds `bound` for
    n = bound·2^|S| + 1.
    """
    power = tropical_power(TropicalCut.from_cut(cut), bound * (1 << cut.states) + 1)
    return power(source, target) > bound


@dataclass(frozen=True)
class Pipeline:
    """Nonempty sequence of action flows over the same states.

    Attributes:
        flows (Tuple[FlowMatrix]): The flows, applied left to right.
    """
    flows: Tuple[FlowMatrix, ...]

    def __post_init__(self):
        if not self.flows:
            raise ValueError("a pipeline needs at least one flow")
        if len({f.dim for f in self.flows}) != 1:
            raise ValueError("pipeline flows must share their dimension")
        if any(f.has_entry(Sval.OMEGA) for f in self.flows):
            raise ValueError("pipeline flows have entries in {0, 1, ∞}")

    @property
    def dim(self) -> int:
        """Number of states."""
        return self.flows[0].dim

    def __len__(self):
        return len(self.flows)


def pipeline_cut(pipeline: Pipeline, *, cap: Optional[int] = None) -> TropicalCut:
    """
    Tropical product of the cuts of the pipeline's flows.

    B_P(S0, F) is read off as `pipeline_cut(P)(S0, S ∖ F)`.
    """
    result = None
    for flow in pipeline.flows:
        cut = TropicalCut.from_cut(cut_from_flow(flow, cap=cap))
        result = cut if result is None else cut_product(result, cut)
    assert all(v < TROPICAL_OMEGA or v == TROPICAL_INFINITY
               for row in result.entries for v in row), "ω in a pipeline cut"
    return result


@dataclass(frozen=True)
class Capacity:
    """Token capacity of a pipeline.

    Attributes:
        value (int): Largest feasible token count found.
        saturated (bool): True when `value` is the search cap, i.e. "≥ value".
    """
    value: int
    saturated: bool = False

    def __str__(self):
        return f">={self.value}" if self.saturated else str(self.value)


def layered_graph(pipeline: Pipeline, unbounded: int) -> nx.DiGraph:
    """
    Layered capacity graph of a pipeline.

    Node (k, s) is state s after k flows; 1-entries get capacity 1 and
    ∞-entries get capacity `unbounded`.
    """
    graph = nx.DiGraph()
    for layer, flow in enumerate(pipeline.flows):
        for s in range(flow.dim):
            graph.add_node((layer, s))
            for t in range(flow.dim):
                value = flow.entry(s, t)
                if value == Sval.ONE:
                    graph.add_edge((layer, s), (layer + 1, t), capacity=1)
                elif value == Sval.INFTY:
                    graph.add_edge((layer, s), (layer + 1, t), capacity=unbounded)
    return graph


def _feasible(pipeline, sources, finals, tokens):
    if tokens == 0 or not sources:
        return True
    graph = layered_graph(pipeline, tokens * len(sources) + 1)
    value, _ = max_flow(graph, {(0, s): tokens for s in sources},
                        [(len(pipeline), t) for t in finals])
    return value == tokens * len(sources)


def pipeline_capacity(pipeline: Pipeline, sources: Iterable[int], finals: Iterable[int],
                      cap: Optional[int] = None) -> Capacity:
    """
    Largest n <= cap such that n tokens on every source can be routed through
    the pipeline into `finals`.

    Feasibility is monotone in n, so the value is found by binary search with
    one integer max-flow per step.
    """
    cap = resolve_limit(cap, "pipeline_capacity")
    if cap < 1:
        raise ValueError("capacity cap must be >= 1")
    sources = sorted(set(sources))
    finals = sorted(set(finals))
    if _feasible(pipeline, sources, finals, cap):
        return Capacity(cap, saturated=True)
    low, high = 0, cap
    while high - low > 1:
        middle = (low + high) // 2
        if _feasible(pipeline, sources, finals, middle):
            low = middle
        else:
            high = middle
    return Capacity(low)
