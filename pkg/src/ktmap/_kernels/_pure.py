"""Pure-Python fallback kernels.

These mirror the compiled kernels in ``_speedups.pyx`` operation for
operation: both must produce bit-identical floats (the merge sequence is
part of the deterministic contract), so keep arithmetic expressions in
sync when editing either one.
"""

from __future__ import annotations


def greedy_merge_seq(n_nodes, edge_u, edge_v, edge_w):
    """Agglomerative modularity merge sequence on an undirected graph.

    Starts from singleton communities and repeatedly merges the connected
    pair with the largest modularity gain; ties broken by the smallest
    (low id, high id) pair. Community labels are the smallest original
    node index in the community.

    Parameters
    ----------
    n_nodes : int
    edge_u, edge_v : sequences of int
        Endpoint indices, edge_u[i] < edge_v[i], no duplicates.
    edge_w : sequence of float
        Edge weights (1.0 for unweighted graphs).

    Returns
    -------
    (q0, merges, qs) : float, list of (int, int), list of float
        q0 is the modularity of the singleton partition, merges[t] the
        pair merged at step t and qs[t] the modularity after that merge.
    """
    m = 0.0
    for w in edge_w:
        m += w
    if m <= 0.0:
        raise ValueError("graph has no edges")
    two_m = 2.0 * m

    a = [0.0] * n_nodes
    wq: dict[tuple[int, int], float] = {}
    touch: list[set[int]] = [set() for _ in range(n_nodes)]
    for k in range(len(edge_u)):
        u = edge_u[k]
        v = edge_v[k]
        w = edge_w[k]
        a[u] += w / two_m
        a[v] += w / two_m
        wq[(u, v)] = w / m
        touch[u].add(v)
        touch[v].add(u)

    q = 0.0
    for i in range(n_nodes):
        q -= a[i] * a[i]
    q0 = q

    merges: list[tuple[int, int]] = []
    qs: list[float] = []
    while wq:
        best_dq = 0.0
        best_pair = None
        for (r, s), w in wq.items():
            dq = w - 2.0 * a[r] * a[s]
            if best_pair is None or dq > best_dq or (dq == best_dq and (r, s) < best_pair):
                best_dq = dq
                best_pair = (r, s)
        r, s = best_pair
        del wq[(r, s)]
        touch[r].discard(s)
        touch[s].discard(r)
        for t in sorted(touch[s]):
            key_st = (s, t) if s < t else (t, s)
            w_st = wq.pop(key_st)
            key_rt = (r, t) if r < t else (t, r)
            if key_rt in wq:
                wq[key_rt] += w_st
            else:
                wq[key_rt] = w_st
                touch[r].add(t)
            touch[t].discard(s)
            touch[t].add(r)
        touch[s].clear()
        a[r] += a[s]
        a[s] = 0.0
        q += best_dq
        merges.append((r, s))
        qs.append(q)
    return q0, merges, qs


def triangle_counts(adj):
    """Number of edges among each node's neighbors.

    Parameters
    ----------
    adj : list of sorted lists of int
        Adjacency of a simple undirected graph.

    Returns
    -------
    list of int
    """
    sets = [set(nbrs) for nbrs in adj]
    counts = [0] * len(adj)
    for v in range(len(adj)):
        nbrs_v = sets[v]
        total = 0
        for u in adj[v]:
            total += len(nbrs_v & sets[u])
        counts[v] = total // 2
    return counts
