# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels. Mirrors ``_pure.py`` operation for operation; both
backends must produce bit-identical merge sequences and modularity values
(the build disables FP contraction for that reason), so keep arithmetic
expressions in sync when editing either one.
"""

from cython.operator cimport dereference as deref, preincrement as inc
from libcpp.set cimport set as cpp_set
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

ctypedef long long i64


def greedy_merge_seq(int n_nodes, edge_u, edge_v, edge_w):
    """See ``_pure.greedy_merge_seq``; same contract, same results."""
    cdef Py_ssize_t n_edges = len(edge_u)
    cdef vector[int] eu = edge_u
    cdef vector[int] ev = edge_v
    cdef vector[double] ew = edge_w

    cdef double m = 0.0
    cdef Py_ssize_t k
    for k in range(n_edges):
        m += ew[k]
    if m <= 0.0:
        raise ValueError("graph has no edges")
    cdef double two_m = 2.0 * m

    cdef vector[double] a = vector[double](n_nodes, 0.0)
    cdef unordered_map[i64, double] wq
    cdef vector[cpp_set[int]] touch = vector[cpp_set[int]](n_nodes)
    cdef int u, v
    cdef double w
    cdef i64 key
    for k in range(n_edges):
        u = eu[k]
        v = ev[k]
        w = ew[k]
        a[u] += w / two_m
        a[v] += w / two_m
        key = <i64>u * n_nodes + v
        wq[key] = w / m
        touch[u].insert(v)
        touch[v].insert(u)

    cdef double q = 0.0
    cdef int i
    for i in range(n_nodes):
        q -= a[i] * a[i]
    cdef double q0 = q

    merges = []
    qs = []
    cdef unordered_map[i64, double].iterator mit
    cdef cpp_set[int].iterator sit
    cdef vector[int] moved
    cdef double best_dq, dq, w_st
    cdef i64 best_key, key_st, key_rt
    cdef int r, s, t
    cdef bint found
    cdef Py_ssize_t j
    while not wq.empty():
        # Keys encode (r, s) with r < s, so the smallest key is also the
        # lexicographically smallest pair: ties resolve identically to the
        # pure backend.
        best_dq = 0.0
        best_key = -1
        found = False
        mit = wq.begin()
        while mit != wq.end():
            key = deref(mit).first
            r = <int>(key // n_nodes)
            s = <int>(key % n_nodes)
            dq = deref(mit).second - 2.0 * a[r] * a[s]
            if (not found) or dq > best_dq or (dq == best_dq and key < best_key):
                best_dq = dq
                best_key = key
                found = True
            inc(mit)
        r = <int>(best_key // n_nodes)
        s = <int>(best_key % n_nodes)
        wq.erase(best_key)
        touch[r].erase(s)
        touch[s].erase(r)
        moved.clear()
        sit = touch[s].begin()
        while sit != touch[s].end():
            moved.push_back(deref(sit))
            inc(sit)
        for j in range(<Py_ssize_t>moved.size()):
            t = moved[j]
            if s < t:
                key_st = <i64>s * n_nodes + t
            else:
                key_st = <i64>t * n_nodes + s
            w_st = wq[key_st]
            wq.erase(key_st)
            if r < t:
                key_rt = <i64>r * n_nodes + t
            else:
                key_rt = <i64>t * n_nodes + r
            if wq.count(key_rt):
                wq[key_rt] += w_st
            else:
                wq[key_rt] = w_st
                touch[r].insert(t)
            touch[t].erase(s)
            touch[t].insert(r)
        touch[s].clear()
        a[r] += a[s]
        a[s] = 0.0
        q += best_dq
        merges.append((r, s))
        qs.append(q)
    return q0, merges, qs


def triangle_counts(adj):
    """See ``_pure.triangle_counts``; same contract, same results."""
    cdef Py_ssize_t n = len(adj)
    cdef vector[i64] indptr = vector[i64](n + 1, 0)
    cdef vector[int] indices
    cdef Py_ssize_t v
    for v in range(n):
        indptr[v + 1] = indptr[v] + len(adj[v])
        for u in adj[v]:
            indices.push_back(u)

    counts = [0] * n
    cdef i64 total, pv, pu
    cdef int nu, av, bv
    cdef Py_ssize_t j
    for v in range(n):
        total = 0
        for j in range(indptr[v], indptr[v + 1]):
            nu = indices[j]
            # sorted-merge intersection of N(v) and N(nu)
            pv = indptr[v]
            pu = indptr[nu]
            while pv < indptr[v + 1] and pu < indptr[nu + 1]:
                av = indices[pv]
                bv = indices[pu]
                if av == bv:
                    total += 1
                    pv += 1
                    pu += 1
                elif av < bv:
                    pv += 1
                else:
                    pu += 1
        counts[v] = total // 2
    return counts
