# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Integer maximum flow helpers.

Thin wrappers around networkx's shortest augmenting path algorithm, with
single- and multi-source variants. Graphs are `networkx.DiGraph` objects
whose edges carry an integer `capacity` attribute; edges without one have
unbounded capacity.
"""
from typing import Dict, Hashable, Iterable, Optional

import networkx as nx
from networkx.algorithms.flow import shortest_augmenting_path


SOURCE = ("__source",)
SINK = ("__sink",)

FlowDict = Dict[Hashable, Dict[Hashable, int]]


def _with_terminals(graph: nx.DiGraph, sources: Dict[Hashable, Optional[int]],
                    targets: Iterable[Hashable]) -> nx.DiGraph:
    network = graph.copy()
    network.add_node(SOURCE)
    network.add_node(SINK)
    for node, capacity in sources.items():
        if capacity is None:
            network.add_edge(SOURCE, node)
        else:
            network.add_edge(SOURCE, node, capacity=capacity)
    for node in targets:
        network.add_edge(node, SINK)
    return network


def _strip(flow: FlowDict) -> FlowDict:
    return {u: {v: int(x) for v, x in edges.items() if v != SINK and x}
            for u, edges in flow.items() if u not in (SOURCE, SINK)}


def max_flow(graph: nx.DiGraph, sources: Dict[Hashable, Optional[int]],
             targets: Iterable[Hashable]):
    """
    Maximum flow from capacitated sources into a set of targets.

    Args:
        graph (nx.DiGraph): Capacitated graph.
        sources (dict): Source node to supply limit (None for unbounded).
        targets (Iterable): Sink nodes.

    Returns:
        Tuple[int, FlowDict]: Flow value and the per-edge integer flow on the
        edges of `graph`.
    """
    network = _with_terminals(graph, sources, targets)
    value, flow = nx.maximum_flow(network, SOURCE, SINK, flow_func=shortest_augmenting_path)
    return int(value), _strip(flow)


def max_flow_value(graph: nx.DiGraph, source: Hashable, targets: Iterable[Hashable]) -> int:
    """Value of a maximum flow from `source` into `targets`."""
    value, _ = max_flow(graph, {source: None}, targets)
    return value


def multisource_maxflow(graph: nx.DiGraph, sources: Iterable[Hashable],
                        targets: Iterable[Hashable], tokens: int) -> Optional[FlowDict]:
    """
    Joint integer flow in which every source emits the same quota.

    Each source gets quota `tokens // len(sources)`. This is the value that
    is guaranteed when every single source admits a flow of `tokens` on its
    own.

    Args:
        graph (nx.DiGraph): Capacitated graph.
        sources (Iterable): Source nodes.
        targets (Iterable): Target nodes.
        tokens (int): Single-source flow value N.

    Returns:
        FlowDict | None: An integer flow in which each source emits its quota,
        or None if no such flow exists.
    """
    sources = list(dict.fromkeys(sources))
    if not sources:
        return {}
    quota = tokens // len(sources)
    value, flow = max_flow(graph, {node: quota for node in sources}, targets)
    if value < quota * len(sources):
        return None
    return flow
