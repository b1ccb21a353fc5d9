"""Shared test helpers: graph factories and independent brute-force oracles.

The oracles here deliberately avoid the library's own computation paths:
modularity is evaluated from the adjacency-matrix definition, search path
counts by explicit enumeration of every source-to-sink path.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

from ktmap.corpus import CitationNetwork, Document, UGraph


def ugraph(edges, extra_nodes=()) -> UGraph:
    """Build an unweighted UGraph from (u, v) pairs."""
    ids = sorted({v for e in edges for v in e} | set(extra_nodes))
    return UGraph(ids, ((u, v, 1.0) for u, v in edges))


def make_net(edges, nodes=None, years=None, terms=None) -> CitationNetwork:
    """CitationNetwork from directed (citing, cited) pairs.

    terms maps id -> (basic, clinical); years maps id -> int.
    """
    ids = set(nodes or ())
    ids.update(v for e in edges for v in e)
    years = years or {}
    terms = terms or {}
    docs = []
    for i in sorted(ids):
        basic, clinical = terms.get(i, (0, 0))
        docs.append(Document(id=i, year=years.get(i), basic_terms=basic,
                             clinical_terms=clinical))
    return CitationNetwork(docs, edges)


def set_partitions(items):
    """All partitions of a sequence (restricted-growth enumeration)."""
    items = list(items)
    n = len(items)
    if n == 0:
        yield []
        return
    codes = [0] * n
    maxes = [0] * n
    while True:
        groups: dict[int, list] = {}
        for item, code in zip(items, codes):
            groups.setdefault(code, []).append(item)
        yield list(groups.values())
        i = n - 1
        while i > 0 and codes[i] == maxes[i - 1] + 1:
            codes[i] = 0
            i -= 1
        if i == 0:
            return
        codes[i] += 1
        for j in range(i, n - 1):
            maxes[j] = max(maxes[j - 1], codes[j])
        maxes[n - 1] = max(maxes[n - 2], codes[n - 1])


def brute_modularity(graph: UGraph, assignment) -> float:
    """Q from the adjacency-matrix definition, independent of the library."""
    n = graph.n_nodes
    a = np.zeros((n, n))
    for u, v, w in graph.edges():
        iu, iv = graph.index[u], graph.index[v]
        a[iu, iv] = w
        a[iv, iu] = w
    two_m = a.sum()
    k = a.sum(axis=1)
    labels = [assignment[v] for v in graph.ids]
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                q += a[i, j] / two_m - k[i] * k[j] / (two_m * two_m)
    return q


def best_partition_bruteforce(graph: UGraph) -> tuple[float, list[list[str]]]:
    """Exhaustive-search maximum-modularity partition (tiny graphs only)."""
    best_q = -np.inf
    best = None
    for groups in set_partitions(graph.ids):
        assignment = {v: i for i, grp in enumerate(groups) for v in grp}
        q = brute_modularity(graph, assignment)
        if q > best_q:
            best_q = q
            best = groups
    return best_q, best


def enumerate_spc(nodes, edges) -> dict[tuple[str, str], int]:
    """Per-edge source-to-sink path counts by explicit path enumeration."""
    succ = {v: [] for v in nodes}
    indeg = {v: 0 for v in nodes}
    for u, v in edges:
        succ[u].append(v)
        indeg[v] += 1
    sources = [v for v in nodes if indeg[v] == 0 and succ[v]]
    counts = {e: 0 for e in edges}

    def walk(v, path_edges):
        if not succ[v]:
            for e in path_edges:
                counts[e] += 1
            return
        for w in succ[v]:
            walk(w, path_edges + [(v, w)])

    for s in sources:
        walk(s, [])
    return counts


def random_dag(n, p, seed):
    """Random DAG: ER edges oriented from lower to higher label."""
    rng = np.random.default_rng(seed)
    ids = [f"d{i:02d}" for i in range(n)]
    edges = []
    for i, j in combinations(range(n), 2):
        if rng.random() < p:
            edges.append((ids[i], ids[j]))
    return ids, edges


@pytest.fixture
def two_triangles() -> UGraph:
    return ugraph([("a", "b"), ("b", "c"), ("a", "c"),
                   ("d", "e"), ("e", "f"), ("d", "f")])
