# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: weighted independent-set sums over bitmask adjacency and
the signed spanning-connected edge-subset sum behind the Ursell function.

Must stay operation-for-operation identical to pykernels so the two backends
agree bit for bit.
"""

BACKEND_NAME = "compiled"

cdef extern from *:
    """
    static inline int bc_ctz64(unsigned long long x) { return __builtin_ctzll(x); }
    static inline int bc_popcount64(unsigned long long x) { return __builtin_popcountll(x); }
    """
    int bc_ctz64(unsigned long long x) nogil
    int bc_popcount64(unsigned long long x) nogil

DEF MAXV = 64
DEF MAXE = 32


cdef double _rec_real(unsigned long long free, unsigned long long* adj, double* w) noexcept nogil:
    if free == 0:
        return 1.0
    cdef int v = bc_ctz64(free)
    cdef unsigned long long rest = free & (free - 1)
    if adj[v] & rest == 0:
        return (1.0 + w[v]) * _rec_real(rest, adj, w)
    return _rec_real(rest, adj, w) + w[v] * _rec_real(rest & ~adj[v], adj, w)


cdef double complex _rec_cplx(unsigned long long free, unsigned long long* adj, double complex* w) noexcept nogil:
    if free == 0:
        return 1.0
    cdef int v = bc_ctz64(free)
    cdef unsigned long long rest = free & (free - 1)
    if adj[v] & rest == 0:
        return (1.0 + w[v]) * _rec_cplx(rest, adj, w)
    return _rec_cplx(rest, adj, w) + w[v] * _rec_cplx(rest & ~adj[v], adj, w)


def is_sum_real(adj, weights, free):
    """See pykernels.is_sum_real."""
    cdef Py_ssize_t n = len(adj)
    if n > MAXV:
        raise ValueError("kernel supports at most 64 vertices")
    cdef unsigned long long cadj[MAXV]
    cdef double cw[MAXV]
    cdef Py_ssize_t i
    for i in range(n):
        cadj[i] = adj[i]
        cw[i] = weights[i]
    cdef unsigned long long f = free
    cdef double out
    with nogil:
        out = _rec_real(f, cadj, cw)
    return out


def is_sum_complex(adj, weights, free):
    """See pykernels.is_sum_complex."""
    cdef Py_ssize_t n = len(adj)
    if n > MAXV:
        raise ValueError("kernel supports at most 64 vertices")
    cdef unsigned long long cadj[MAXV]
    cdef double complex cw[MAXV]
    cdef Py_ssize_t i
    for i in range(n):
        cadj[i] = adj[i]
        cw[i] = weights[i]
    cdef unsigned long long f = free
    cdef double complex out
    with nogil:
        out = _rec_cplx(f, cadj, cw)
    return out


def ursell_edge_sum(n, edges):
    """See pykernels.ursell_edge_sum."""
    cdef int cn = n
    cdef Py_ssize_t m = len(edges)
    if cn > MAXV / 2 or m > MAXE:
        raise ValueError("ursell kernel caps: 32 vertices, 32 edges")
    if cn == 1:
        return 1
    if m < cn - 1:
        return 0
    cdef int eu[MAXE]
    cdef int ev[MAXE]
    cdef Py_ssize_t i
    for i in range(m):
        eu[i] = edges[i][0]
        ev[i] = edges[i][1]
    cdef long long total = 0
    cdef unsigned long long amask, rem, low
    cdef int parent[MAXV]
    cdef int comps, u, v, need = cn - 1
    with nogil:
        for amask in range(1, (<unsigned long long>1) << m):
            if bc_popcount64(amask) < need:
                continue
            for u in range(cn):
                parent[u] = u
            comps = cn
            rem = amask
            while rem:
                low = rem & (~rem + 1)
                rem ^= low
                u = eu[bc_ctz64(low)]
                v = ev[bc_ctz64(low)]
                while parent[u] != u:
                    parent[u] = parent[parent[u]]
                    u = parent[u]
                while parent[v] != v:
                    parent[v] = parent[parent[v]]
                    v = parent[v]
                if u != v:
                    parent[u] = v
                    comps -= 1
            if comps == 1:
                if bc_popcount64(amask) & 1:
                    total -= 1
                else:
                    total += 1
    return total
