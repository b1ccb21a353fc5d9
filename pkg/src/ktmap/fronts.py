"""Research-front detection: modularity, greedy modularity clustering, and
the nested front hierarchy.

Clustering operates on an undirected graph — normally the simple projection
of the citation network (direction encodes time, not community membership),
or the weighted co-citation graph in co-citation mode, where weights replace
edge counts in the modularity sums.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Mapping

from . import _kernels
from .corpus import UGraph
from .errors import InsufficientDataError

log = logging.getLogger("ktmap.fronts")


@dataclass(frozen=True)
class Partition:
    """A flat assignment of nodes to fronts, with its modularity."""

    assignment: Mapping[str, int]
    q: float

    @property
    def n_fronts(self) -> int:
        return len(set(self.assignment.values()))

    def fronts(self) -> dict[int, tuple[str, ...]]:
        """Front id -> sorted member tuple."""
        groups: dict[int, list[str]] = {}
        for node, fid in self.assignment.items():
            groups.setdefault(fid, []).append(node)
        return {fid: tuple(sorted(members)) for fid, members in sorted(groups.items())}


def modularity(graph: UGraph, assignment: Mapping[str, int]) -> float:
    """Newman modularity Q = sum_s (e_ss - a_s^2) of a partition.

    e_ss is the fraction of edge weight inside front s and a_s the fraction
    of edge ends attached to s. Requires at least one edge and an assignment
    covering every node.
    """
    m = graph.total_weight
    if m <= 0.0:
        raise InsufficientDataError("modularity undefined on a graph with no edges")
    missing = [v for v in graph.ids if v not in assignment]
    if missing:
        raise ValueError(f"partition does not cover node {missing[0]!r}")

    internal: dict[int, float] = {}
    ends: dict[int, float] = {}
    for u, v, w in graph.edges():
        cu, cv = assignment[u], assignment[v]
        ends[cu] = ends.get(cu, 0.0) + w
        ends[cv] = ends.get(cv, 0.0) + w
        if cu == cv:
            internal[cu] = internal.get(cu, 0.0) + w
    q = 0.0
    for fid in sorted(ends):
        e_ss = internal.get(fid, 0.0) / m
        a_s = ends[fid] / (2.0 * m)
        q += e_ss - a_s * a_s
    return q


def fast_greedy(graph: UGraph) -> Partition:
    """Greedy agglomerative modularity maximization.

    Starts from singleton fronts, repeatedly merges the pair of fronts with
    the largest modularity gain (ties broken by the lexicographically
    smallest front-id pair), takes the cut of the merge sequence with
    maximal Q, and then locally refines it: nodes are moved one at a time
    (in sorted id order) to a neighboring front whenever that strictly
    increases Q, until no move helps. The merge stage alone tends to strand
    a few peripheral nodes in the wrong front; refinement repairs exactly
    those without changing the coarse structure.

    Deterministic; isolated nodes end up as singleton fronts. Front ids are
    renumbered 1..K in order of each front's smallest member.
    """
    if graph.n_nodes == 0:
        raise InsufficientDataError("cannot cluster an empty graph")
    edge_u, edge_v, edge_w = graph.edge_arrays()
    if not edge_u:
        raise InsufficientDataError("cannot cluster a graph with no edges")

    q0, merges, qs = _kernels.greedy_merge_seq(graph.n_nodes, edge_u, edge_v, edge_w)

    best_q = q0
    best_step = 0
    for step, q in enumerate(qs, start=1):
        if q > best_q:
            best_q = q
            best_step = step

    members: list[list[int]] = [[i] for i in range(graph.n_nodes)]
    for r, s in merges[:best_step]:
        members[r].extend(members[s])
        members[s] = []

    comm = [0] * graph.n_nodes
    for root in range(graph.n_nodes):
        for idx in members[root]:
            comm[idx] = root
    comm = _refine_moves(graph, comm)

    assignment: dict[str, int] = {}
    relabel: dict[int, int] = {}
    for idx in range(graph.n_nodes):
        label = comm[idx]
        if label not in relabel:
            relabel[label] = len(relabel) + 1
        assignment[graph.ids[idx]] = relabel[label]
    # report the exactly recomputed Q rather than the incrementally
    # accumulated one
    return Partition(assignment=assignment, q=modularity(graph, assignment))


_REFINE_MAX_PASSES = 100
_REFINE_TOL = 1e-12


def _refine_moves(graph: UGraph, comm: list[int]) -> list[int]:
    """Q-improving refinement: single-node moves alternated with front merges.

    Nodes are visited in index (= sorted id) order; a node moves to the
    neighboring front with the largest strictly positive gain, ties broken
    by the smallest front label. When no move helps, adjacent front pairs
    with a strictly positive merge gain are merged (largest gain first,
    ties by smallest pair) and moving resumes. Q strictly increases
    throughout, so the loop terminates; the pass cap is a safety net.
    """
    m = graph.total_weight
    two_m = 2.0 * m
    wdeg = [sum(nbrs.values()) for nbrs in graph.adj]
    deg_sum: dict[int, float] = {}
    for idx in range(graph.n_nodes):
        deg_sum[comm[idx]] = deg_sum.get(comm[idx], 0.0) + wdeg[idx]

    for _ in range(_REFINE_MAX_PASSES):
        moved = False
        for idx in range(graph.n_nodes):
            gain, target = _best_move(graph, comm, deg_sum, m, two_m, wdeg, idx)
            if target is not None:
                deg_sum[comm[idx]] -= wdeg[idx]
                deg_sum[target] += wdeg[idx]
                comm[idx] = target
                moved = True
        if moved:
            continue
        if _merge_pass(graph, comm, deg_sum, m):
            continue
        if not _kl_escape(graph, comm, deg_sum, m, two_m, wdeg):
            break
    return comm


_NEG_INF = float("-inf")


def _best_move(graph, comm, deg_sum, m, two_m, wdeg, idx,
               locked=frozenset(), floor=_REFINE_TOL):
    """Best Q-improving relocation of one node to a neighboring front.

    Returns (gain, target) with target None when nothing beats `floor`.
    """
    if idx in locked:
        return 0.0, None
    own = comm[idx]
    w_to: dict[int, float] = {}
    for nbr, w in graph.adj[idx].items():
        w_to[comm[nbr]] = w_to.get(comm[nbr], 0.0) + w
    w_own = w_to.get(own, 0.0)
    k = wdeg[idx]
    best_gain = floor
    best_target = None
    for target in sorted(w_to):
        if target == own:
            continue
        # Q change of moving idx from `own` to `target`
        gain = ((w_to[target] - w_own) / m
                - k * (deg_sum[target] - (deg_sum[own] - k)) / (two_m * m))
        if gain > best_gain:
            best_gain = gain
            best_target = target
    return best_gain, best_target


_KL_CHAIN = 8


def _kl_escape(graph, comm, deg_sum, m, two_m, wdeg) -> bool:
    """Kernighan-Lin style escape from single-move local maxima.

    Builds a short chain of tentative moves (each the best available even if
    it loses modularity, the moved node then locked) and keeps the chain
    prefix with the largest cumulative gain if strictly positive; otherwise
    everything is rolled back. Deterministic and Q-increasing, so the caller
    may loop on it safely.
    """
    trial = list(comm)
    trial_deg = dict(deg_sum)
    locked: set[int] = set()
    moves: list[tuple[int, int, int]] = []  # idx, old front, new front
    gains: list[float] = []
    total = 0.0
    for _ in range(min(_KL_CHAIN, graph.n_nodes)):
        step_best = None  # (-gain, idx, target)
        for idx in range(graph.n_nodes):
            gain, target = _best_move(graph, trial, trial_deg, m, two_m, wdeg,
                                      idx, locked=locked, floor=_NEG_INF)
            if target is None:
                continue
            key = (-gain, idx, target)
            if step_best is None or key < step_best:
                step_best = key
        if step_best is None:
            break
        gain, idx, target = -step_best[0], step_best[1], step_best[2]
        moves.append((idx, trial[idx], target))
        trial_deg[trial[idx]] -= wdeg[idx]
        trial_deg[target] += wdeg[idx]
        trial[idx] = target
        locked.add(idx)
        total += gain
        gains.append(total)

    best_prefix = 0
    best_total = _REFINE_TOL
    for i, cum in enumerate(gains, start=1):
        if cum > best_total:
            best_total = cum
            best_prefix = i
    if best_prefix == 0:
        return False
    for idx, _, target in moves[:best_prefix]:
        deg_sum[comm[idx]] -= wdeg[idx]
        deg_sum[target] += wdeg[idx]
        comm[idx] = target
    return True


def _merge_pass(graph: UGraph, comm: list[int], deg_sum: dict[int, float],
                m: float) -> bool:
    """Merge the adjacent front pair with the largest positive Q gain.

    Merge gain of fronts (r, s): w_rs / m - 2 a_r a_s. Returns whether a
    merge happened; deg_sum is updated in place.
    """
    w_between: dict[tuple[int, int], float] = {}
    for i in range(graph.n_nodes):
        ci = comm[i]
        for j, w in graph.adj[i].items():
            if j > i and comm[j] != ci:
                key = (min(ci, comm[j]), max(ci, comm[j]))
                w_between[key] = w_between.get(key, 0.0) + w

    best_gain = _REFINE_TOL
    best_pair = None
    for (r, s), w in sorted(w_between.items()):
        gain = w / m - 2.0 * (deg_sum[r] / (2.0 * m)) * (deg_sum[s] / (2.0 * m))
        if gain > best_gain or (gain == best_gain and best_pair is not None
                                and (r, s) < best_pair):
            best_gain = gain
            best_pair = (r, s)
    if best_pair is None:
        return False
    r, s = best_pair
    for idx in range(graph.n_nodes):
        if comm[idx] == s:
            comm[idx] = r
    deg_sum[r] += deg_sum.pop(s)
    return True


@dataclass(frozen=True)
class FrontNode:
    """One front in the hierarchy; the root is the whole corpus (level 1)."""

    path: tuple[int, ...]
    members: tuple[str, ...]
    q_split: float | None = None
    children: tuple["FrontNode", ...] = ()

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def level(self) -> int:
        return len(self.path) + 1

    def walk(self) -> Iterator["FrontNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class FrontTree:
    """Nested partition of the corpus into research fronts, level 1..depth."""

    root: FrontNode
    max_depth: int
    min_front_size: int
    min_q_gain: float

    def depth(self) -> int:
        return max(node.level for node in self.root.walk())

    def fronts_at(self, level: int) -> list[FrontNode]:
        """Fronts exactly at a level; nodes in shallower leaves stay in those
        leaves, so levels > 2 need not cover the corpus."""
        return [node for node in self.root.walk() if node.level == level]

    def node_paths(self) -> dict[str, tuple[int, ...]]:
        """Deepest front path per node (components are level 2..d front ids)."""
        paths: dict[str, tuple[int, ...]] = {}
        for node in self.root.walk():
            if node.is_leaf:
                for member in node.members:
                    paths[member] = node.path
        return paths

    def level_assignment(self, level: int) -> dict[str, int]:
        """Flat node -> front-id map obtained by truncating paths at a level.

        Nodes whose deepest front is shallower than `level` keep that front.
        Front ids are dense integers, deterministic across runs.
        """
        prefixes: dict[str, tuple[int, ...]] = {}
        for node, path in self.node_paths().items():
            prefixes[node] = path[: level - 1]
        ids = {prefix: i + 1 for i, prefix in enumerate(sorted(set(prefixes.values())))}
        return {node: ids[prefix] for node, prefix in prefixes.items()}

    def path_strings(self) -> dict[str, str]:
        return {node: ".".join(str(c) for c in path) if path else "1"
                for node, path in self.node_paths().items()}


def hierarchical_fronts(graph: UGraph, max_depth: int = 4,
                        min_front_size: int = 10,
                        min_q_gain: float = 0.05) -> FrontTree:
    """Detect nested research fronts by recursive greedy clustering.

    Level 2 is the flat clustering of the whole graph; every front of size
    >= min_front_size is then re-clustered on its induced subgraph, and the
    child partition is kept only if it is non-trivial and its Q is at least
    min_q_gain. Recursion stops at max_depth levels (the root counts as
    level 1). Isolated nodes become singleton leaf fronts.
    """
    if max_depth < 2:
        raise ValueError("max_depth must be >= 2")
    if graph.n_nodes == 0 or graph.n_edges == 0:
        raise InsufficientDataError("cannot cluster a graph with no edges")

    def split(members: tuple[str, ...], path: tuple[int, ...],
              level: int) -> tuple[float | None, tuple[FrontNode, ...]]:
        sub = graph.subgraph(members) if path else graph
        if sub.n_edges == 0:
            return None, ()
        part = fast_greedy(sub)
        if path and (part.n_fronts < 2 or part.q < min_q_gain):
            return None, ()
        children = []
        for child_no, (fid, front_members) in enumerate(part.fronts().items(), start=1):
            child_path = path + (child_no,)
            if len(front_members) >= min_front_size and level + 1 < max_depth:
                q_split, grandchildren = split(front_members, child_path, level + 1)
            else:
                q_split, grandchildren = None, ()
            children.append(FrontNode(path=child_path, members=front_members,
                                      q_split=q_split, children=grandchildren))
        return part.q, tuple(children)

    all_ids = tuple(sorted(graph.ids))
    q_top, children = split(all_ids, (), 1)
    root = FrontNode(path=(), members=all_ids, q_split=q_top, children=children)
    return FrontTree(root=root, max_depth=max_depth,
                     min_front_size=min_front_size, min_q_gain=min_q_gain)
