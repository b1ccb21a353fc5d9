"""Translational hubs and the SPC main path.

Hubs are operationalized as nodes passing four filters — high degree, low
clustering, high participation across fronts, and a wide span of mean
translational score over the fronts they bridge — ranked by the
multiplicative score P * t_spread * (k / k_max). Hub regions are the
connected components of the subgraph induced by accepted candidates.

The main path is the greedy search-path-count (SPC) walk: each edge of the
acyclic reduction is weighted by the number of source-to-sink paths through
it (exact big-integer counts), and the path follows maximal-SPC edges from
the strongest source edge.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .axis import front_score_summary
from .corpus import CitationNetwork
from .errors import InsufficientDataError
from .metrics import local_clustering, participation_coefficient

log = logging.getLogger("ktmap.hubs")


@dataclass(frozen=True)
class HubConfig:
    """Filter thresholds for hub detection.

    c_max=None means "the median defined clustering coefficient of the
    graph"; a node with undefined c (degree < 2) is treated as c = 0.
    """

    degree_pct: float = 0.90
    c_max: float | None = None
    p_min: float = 0.3
    t_spread_min: float = 0.2

    def __post_init__(self):
        if not 0.0 <= self.degree_pct <= 1.0:
            raise ValueError("degree_pct must lie in [0, 1]")
        if not 0.0 <= self.p_min <= 1.0:
            raise ValueError("p_min must lie in [0, 1]")
        if self.t_spread_min < 0.0:
            raise ValueError("t_spread_min must be >= 0")


@dataclass(frozen=True)
class HubCandidate:
    """A node passing all hub filters, with its rank."""

    id: str
    k: int
    c: float | None
    p: float
    bridged_fronts: tuple[int, ...]
    t_spread: float
    hub_score: float
    rank: int


def detect_translational_hubs(net: CitationNetwork,
                              partition: Mapping[str, int],
                              scores: Mapping[str, float | None],
                              config: HubConfig = HubConfig()) -> list[HubCandidate]:
    """Rank the nodes bridging fronts across the basic-clinical axis.

    Candidates must have degree at or above the degree_pct quantile,
    clustering coefficient <= c_max, participation >= p_min, and a spread
    of bridged-front mean scores >= t_spread_min. Returns an empty list
    when nothing qualifies.
    """
    graph = net.projection
    missing = [v for v in graph.ids if v not in partition]
    if missing:
        raise ValueError(f"partition does not cover node {missing[0]!r}")
    missing = [v for v in graph.ids if v not in scores]
    if missing:
        raise ValueError(f"scores do not cover node {missing[0]!r}")

    degrees = [graph.degree(v) for v in graph.ids]
    k_max = max(degrees)
    if k_max == 0:
        return []
    k_threshold = float(np.quantile(degrees, config.degree_pct))

    cs = local_clustering(graph)
    defined_c = [c for c in cs.values() if c is not None]
    c_max = config.c_max
    if c_max is None:
        c_max = float(np.median(defined_c)) if defined_c else 0.0

    front_means = {fid: s.mean_t
                   for fid, s in front_score_summary(partition, scores).items()}

    accepted = []
    for node in graph.ids:
        k = graph.degree(node)
        if k < k_threshold or k == 0:
            continue
        c = cs[node]
        if (c if c is not None else 0.0) > c_max:
            continue
        p = participation_coefficient(graph, node, partition)
        if p < config.p_min:
            continue
        bridged = sorted({partition[u] for u in graph.neighbors(node)})
        bridged_means = [front_means[fid] for fid in bridged
                         if front_means[fid] is not None]
        if len(bridged_means) < 2:
            continue  # t_spread undefined
        t_spread = max(bridged_means) - min(bridged_means)
        if t_spread < config.t_spread_min:
            continue
        score = p * t_spread * (k / k_max)
        accepted.append(HubCandidate(id=node, k=k, c=c, p=p,
                                     bridged_fronts=tuple(bridged),
                                     t_spread=t_spread, hub_score=score,
                                     rank=0))

    accepted.sort(key=lambda h: (-h.hub_score, h.id))
    return [HubCandidate(id=h.id, k=h.k, c=h.c, p=h.p,
                         bridged_fronts=h.bridged_fronts, t_spread=h.t_spread,
                         hub_score=h.hub_score, rank=i + 1)
            for i, h in enumerate(accepted)]


def hub_regions(net: CitationNetwork,
                hubs: list[HubCandidate]) -> list[tuple[str, ...]]:
    """Connected components of the hub-induced subgraph, as sorted tuples."""
    hub_ids = {h.id for h in hubs}
    graph = net.projection
    seen: set[str] = set()
    regions = []
    for start in sorted(hub_ids):
        if start in seen:
            continue
        component = []
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            component.append(v)
            for u in graph.neighbors(v):
                if u in hub_ids and u not in seen:
                    seen.add(u)
                    stack.append(u)
        regions.append(tuple(sorted(component)))
    return regions


# -- main path ---------------------------------------------------------------


@dataclass(frozen=True)
class MainPath:
    """Greedy maximal-SPC walk through the acyclic citation graph."""

    nodes: tuple[str, ...]
    spc: tuple[int, ...]
    removed_edges: tuple[tuple[str, str], ...] = ()


def acyclic_reduction(net: CitationNetwork) -> tuple[list[tuple[str, str]],
                                                     list[tuple[str, str]]]:
    """Citation edges with cycles removed, plus the removed edges.

    Edges pointing from an older to a strictly newer year (anti-chronological
    citations) are dropped first; any remaining cycle is broken by deleting
    the lexicographically largest (tail, head) edge inside its strongly
    connected component, repeating until acyclic. Deterministic.
    """
    removed = []
    edges = []
    for citing, cited in net.edges:
        y_citing = net.docs[citing].year
        y_cited = net.docs[cited].year
        if y_citing is not None and y_cited is not None and y_citing < y_cited:
            removed.append((citing, cited))
        else:
            edges.append((citing, cited))
    if removed:
        log.warning("dropped %d anti-chronological citation edge(s)", len(removed))

    while True:
        sccs = _strongly_connected(sorted({v for e in edges for v in e}), edges)
        cyclic = [scc for scc in sccs if len(scc) > 1]
        if not cyclic:
            break
        for scc in cyclic:
            members = set(scc)
            inside = [e for e in edges if e[0] in members and e[1] in members]
            victim = max(inside)
            edges.remove(victim)
            removed.append(victim)
            log.warning("broke citation cycle by removing edge %s", victim)
    return edges, removed


def _strongly_connected(nodes: list[str],
                        edges: list[tuple[str, str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative, deterministic order."""
    succ: dict[str, list[str]] = {v: [] for v in nodes}
    for u, v in edges:
        succ[u].append(v)
    for v in succ:
        succ[v].sort()

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            advanced = False
            for next_i in range(pi, len(succ[v])):
                w = succ[v][next_i]
                if w not in index:
                    work[-1] = (v, next_i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return sccs


def search_path_counts(net: CitationNetwork) -> dict[tuple[str, str], int]:
    """Exact SPC weight per edge of the acyclic reduction.

    SPC(u, v) = (paths from any source to u) * (paths from v to any sink),
    equivalently the number of source-to-sink paths through the edge when a
    virtual super-source and super-sink are attached. Big-int exact.
    """
    edges, _ = acyclic_reduction(net)
    return _spc_on_edges(net.ids, edges)


def _spc_on_edges(ids, edges) -> dict[tuple[str, str], int]:
    succ: dict[str, list[str]] = {v: [] for v in ids}
    pred: dict[str, list[str]] = {v: [] for v in ids}
    for u, v in edges:
        succ[u].append(v)
        pred[v].append(u)

    order = _topo_order(ids, succ, pred)
    n_from: dict[str, int] = {}
    for v in order:
        n_from[v] = 1 if not pred[v] else sum(n_from[u] for u in pred[v])
    n_to: dict[str, int] = {}
    for v in reversed(order):
        n_to[v] = 1 if not succ[v] else sum(n_to[w] for w in succ[v])
    return {(u, v): n_from[u] * n_to[v] for u, v in edges}


def _topo_order(ids, succ, pred) -> list[str]:
    indeg = {v: len(pred[v]) for v in ids}
    ready = sorted(v for v in ids if indeg[v] == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in sorted(succ[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
        ready.sort()
    if len(order) != len(ids):
        raise AssertionError("graph not acyclic after reduction")
    return order


def main_path(net: CitationNetwork) -> MainPath:
    """Greedy forward walk along maximal-SPC edges.

    Starts from the source edge of maximal SPC (a source has no incoming
    edge in the reduction); at each step follows the maximal-SPC outgoing
    edge, ties broken by the smallest head id. Ends at a node with no
    outgoing edges.
    """
    if net.n_edges == 0:
        raise InsufficientDataError("main path undefined: graph has no edges")
    edges, removed = acyclic_reduction(net)
    if not edges:
        raise InsufficientDataError(
            "main path undefined: no edges left after cycle removal")
    spc = _spc_on_edges(net.ids, edges)

    pred_count: dict[str, int] = {v: 0 for v in net.ids}
    succ: dict[str, list[str]] = {v: [] for v in net.ids}
    for u, v in edges:
        succ[u].append(v)
        pred_count[v] += 1

    start_candidates = [(u, v) for u, v in edges if pred_count[u] == 0]
    # maximal SPC first, ties by smallest (tail, head)
    start = sorted(start_candidates, key=lambda e: (-spc[e], e))[0]

    path = [start[0], start[1]]
    weights = [spc[start]]
    current = start[1]
    while succ[current]:
        nxt = sorted(succ[current], key=lambda w: (-spc[(current, w)], w))[0]
        weights.append(spc[(current, nxt)])
        path.append(nxt)
        current = nxt
    return MainPath(nodes=tuple(path), spc=tuple(weights),
                    removed_edges=tuple(removed))
