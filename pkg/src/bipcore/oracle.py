"""Exact brute-force reference computations.

Everything here is evaluated without series truncation: partition functions
by recursion over independent sets, the polymer partition function by
summing over subsets of R, distributions by full enumeration, and joint
cumulants from exact moments via the partition lattice.  Size caps keep the
runtimes sane; these routines exist to validate the approximate pipeline,
not to scale.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations

from . import kernels
from .errors import SizeCapError
from .graph import BipartiteGraph, Vertex, _bits
from .polymers import Fugacities, PolymerSystem, Scalar, _link_masks

EXACT_REAL_CAP = 30  # largest connected component, real activities
EXACT_COMPLEX_CAP = 24  # largest connected component, complex activities
DISTRIBUTION_CAP = 14  # total vertices for full-distribution enumeration
XI_SUBSET_CAP = 20  # R-side size for the subset-sum polymer oracle
CUMULANT_SET_CAP = 8
LOG_WEIGHT_LIMIT = 700.0  # keeps every independent-set sum below overflow


def _component_masks(g: BipartiteGraph) -> list[int]:
    adj = g.global_adjacency()
    todo = (1 << g.n_vertices) - 1
    out = []
    while todo:
        comp = todo & -todo
        frontier = comp
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= adj[v]
            frontier = nxt & todo & ~comp
            comp |= frontier
        todo &= ~comp
        out.append(comp)
    return out


def _weights(g: BipartiteGraph, lam: Fugacities) -> list[Scalar]:
    return [lam.lambda_L] * g.n_L + [lam.lambda_R] * g.n_R


def _check_magnitude(g: BipartiteGraph, lam: Fugacities) -> None:
    total = g.n_L * math.log1p(abs(lam.lambda_L)) + g.n_R * math.log1p(abs(lam.lambda_R))
    if total > LOG_WEIGHT_LIMIT:
        raise SizeCapError(
            "activities too large for exact float evaluation "
            f"(sum of log(1+|activity|) = {total:.1f} > {LOG_WEIGHT_LIMIT})"
        )


def _localize(adj: tuple[int, ...], comp: int) -> tuple[list[int], list[int]]:
    """Relabel a component's vertices to 0..k-1; returns (gids, local adj)."""
    gids = list(_bits(comp))
    pos = {gid: i for i, gid in enumerate(gids)}
    local = []
    for gid in gids:
        m = 0
        nb = adj[gid] & comp
        for other in _bits(nb):
            m |= 1 << pos[other]
        local.append(m)
    return gids, local


def exact_log_Z(g: BipartiteGraph, lam: Fugacities) -> float:
    """log of the exact partition function, real activities.

    Factorizes over connected components; each component is capped at 30
    vertices.  Every summand is positive, so the log is always defined.
    """
    if not lam.is_real:
        raise ValueError("exact_log_Z takes real activities; see exact_Z_complex")
    _check_magnitude(g, lam)
    adj = g.global_adjacency()
    weights = _weights(g, lam)
    total = 0.0
    for comp in _component_masks(g):
        k = comp.bit_count()
        if k > EXACT_REAL_CAP:
            raise SizeCapError(
                f"component with {k} vertices exceeds the exact cap ({EXACT_REAL_CAP})"
            )
        gids, local = _localize(adj, comp)
        w = [weights[gid] for gid in gids]
        total += math.log(kernels.is_sum_real(local, w, (1 << k) - 1))
    return total


def exact_Z(g: BipartiteGraph, lam: Fugacities) -> float:
    """Exact partition function, real activities."""
    return math.exp(exact_log_Z(g, lam))


def exact_Z_complex(g: BipartiteGraph, lam: Fugacities) -> complex:
    """Exact partition function for complex (or real) activities.

    Factorizes over connected components, each capped at 24 vertices.
    """
    _check_magnitude(g, lam)
    adj = g.global_adjacency()
    weights = [complex(w) for w in _weights(g, lam)]
    out = 1.0 + 0.0j
    for comp in _component_masks(g):
        k = comp.bit_count()
        if k > EXACT_COMPLEX_CAP:
            raise SizeCapError(
                f"component with {k} vertices exceeds the complex exact cap "
                f"({EXACT_COMPLEX_CAP})"
            )
        gids, local = _localize(adj, comp)
        w = [weights[gid] for gid in gids]
        out *= kernels.is_sum_complex(local, w, (1 << k) - 1)
    return out


# ---------------------------------------------------------------------------
# polymer-side partition function

def exact_Xi(g: BipartiteGraph, lam: Fugacities) -> Scalar:
    """Polymer partition function by direct summation over subsets of R.

    Each subset S contributes the product of the weights of its 2-linked
    components; the empty set contributes 1.  This does not go through the
    cluster expansion or the restricted-universe recursion, so it serves as
    an independent check of both.  Capped at 20 R-vertices.
    """
    if g.n_R > XI_SUBSET_CAP:
        raise SizeCapError(
            f"exact_Xi enumerates 2**n_R subsets; n_R capped at {XI_SUBSET_CAP}"
        )
    links = _link_masks(g)
    lam_R = lam.lambda_R
    one_plus_L = 1 + lam.lambda_L

    @lru_cache(maxsize=None)
    def component_weight(mask: int) -> Scalar:
        nb = 0
        for v in _bits(mask):
            nb |= g.adj_R[v]
        return lam_R ** mask.bit_count() / one_plus_L ** nb.bit_count()

    def subset_weight(s: int) -> Scalar:
        out: Scalar = 1.0
        rest = s
        while rest:
            comp = rest & -rest
            frontier = comp
            while frontier:
                nxt = 0
                for v in _bits(frontier):
                    nxt |= links[v]
                frontier = nxt & rest & ~comp
                comp |= frontier
            out *= component_weight(comp)
            rest &= ~comp
        return out

    vals = [subset_weight(s) for s in range(1 << g.n_R)]
    if isinstance(lam_R, complex) or isinstance(one_plus_L, complex):
        return complex(
            math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals)
        )
    return math.fsum(vals)


# ---------------------------------------------------------------------------
# occupation probabilities and distributions

def _closed_mask(g: BipartiteGraph, gids: list[int], adj: tuple[int, ...]) -> int:
    m = 0
    for gid in gids:
        m |= 1 << gid
        m |= adj[gid]
    return m


def exact_occupancy(g: BipartiteGraph, lam: Fugacities, vertices) -> float:
    """Probability that every vertex in ``vertices`` is occupied.

    Real activities.  Returns 0 when the set is not independent.  Computed
    as a ratio of constrained to unconstrained independent-set sums, so the
    usual component cap applies.
    """
    if not lam.is_real:
        raise ValueError("occupation probabilities need real activities")
    _check_magnitude(g, lam)
    vset = set(vertices)
    gids = sorted(g.global_id(v) for v in vset)
    adj = g.global_adjacency()
    target = 0
    for gid in gids:
        target |= 1 << gid
    for gid in gids:
        if adj[gid] & target:
            return 0.0
    weights = _weights(g, lam)
    factor = 1.0
    for gid in gids:
        factor *= weights[gid]
    if factor == 0.0:
        return 0.0
    blocked = _closed_mask(g, gids, adj)
    log_num = math.log(factor)
    log_den = 0.0
    for comp in _component_masks(g):
        k = comp.bit_count()
        if k > EXACT_REAL_CAP:
            raise SizeCapError(
                f"component with {k} vertices exceeds the exact cap ({EXACT_REAL_CAP})"
            )
        cg, local = _localize(adj, comp)
        w = [weights[gid] for gid in cg]
        full = (1 << k) - 1
        free = 0
        for i, gid in enumerate(cg):
            if not (blocked >> gid) & 1:
                free |= 1 << i
        log_den += math.log(kernels.is_sum_real(local, w, full))
        log_num += math.log(kernels.is_sum_real(local, w, free))
    return math.exp(log_num - log_den)


def exact_marginal(g: BipartiteGraph, lam: Fugacities, A) -> float:
    """Probability that every vertex of A lies in the random independent set.

    ``A`` may be a single (side, index) vertex or any collection of them;
    the empty collection has probability 1.
    """
    if isinstance(A, tuple) and len(A) == 2 and isinstance(A[0], str):
        A = [A]
    vs = set(A)
    if not vs:
        return 1.0
    return exact_occupancy(g, lam, vs)


def exact_distribution(g: BipartiteGraph, lam: Fugacities) -> dict[frozenset[Vertex], float]:
    """Full Gibbs distribution over independent sets (graphs up to 14
    vertices).  Keys are frozensets of (side, index) vertices."""
    if not lam.is_real:
        raise ValueError("distributions need real activities")
    if g.n_vertices > DISTRIBUTION_CAP:
        raise SizeCapError(
            f"distribution enumeration capped at {DISTRIBUTION_CAP} vertices"
        )
    lam_L, lam_R = lam.lambda_L, lam.lambda_R
    blocked_by = [0] * (1 << g.n_L)
    for lmask in range(1 << g.n_L):
        if lmask == 0:
            continue
        low = lmask & -lmask
        blocked_by[lmask] = blocked_by[lmask ^ low] | g.adj_L[low.bit_length() - 1]
    out: dict[frozenset[Vertex], float] = {}
    total = 0.0
    for lmask in range(1 << g.n_L):
        blocked = blocked_by[lmask]
        wl = lam_L ** lmask.bit_count()
        for rmask in range(1 << g.n_R):
            if rmask & blocked:
                continue
            w = wl * lam_R ** rmask.bit_count()
            if w == 0.0:
                continue
            key = frozenset(
                [("L", i) for i in _bits(lmask)] + [("R", j) for j in _bits(rmask)]
            )
            out[key] = w
            total += w
    return {k: v / total for k, v in out.items()}


def exact_nu(
    g: BipartiteGraph, lam: Fugacities, max_polymers: int = 200_000
) -> dict[frozenset[tuple[int, ...]], float]:
    """Exact polymer-configuration measure: each pairwise compatible
    collection of polymers, keyed by the frozenset of vertex tuples, with
    probability proportional to the product of polymer weights."""
    if not lam.is_real:
        raise ValueError("the configuration measure needs real activities")
    if g.n_R > XI_SUBSET_CAP:
        raise SizeCapError(f"exact_nu capped at {XI_SUBSET_CAP} R-vertices")
    system = PolymerSystem(g, lam, max_polymers=max_polymers)
    out: dict[frozenset[tuple[int, ...]], float] = {}
    total = 0.0
    for idxs, w in system.collections():
        key = frozenset(system.polymers[i].vertices for i in idxs)
        out[key] = out.get(key, 0.0) + w
        total += w
    return {k: v / total for k, v in out.items()}


# ---------------------------------------------------------------------------
# exact joint cumulants of occupation indicators

def _set_partitions(items: tuple):
    """All set partitions, via restricted growth strings."""
    n = len(items)
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def rec(i: int, maxval: int):
        if i == n:
            blocks: dict[int, list] = {}
            for item, b in zip(items, rgs):
                blocks.setdefault(b, []).append(item)
            yield tuple(tuple(blocks[b]) for b in sorted(blocks))
            return
        for b in range(maxval + 2):
            rgs[i] = b
            yield from rec(i + 1, max(maxval, b))

    yield from rec(1, 0)


def exact_cumulant(g: BipartiteGraph, lam: Fugacities, vertices) -> float:
    """Joint cumulant of the occupation indicators of ``vertices`` (a
    sequence of (side, index) pairs, repeats allowed), from exact joint
    moments via the partition-lattice inversion."""
    verts = tuple(vertices)
    if not verts:
        raise ValueError("cumulant of an empty family is undefined")
    if len(verts) > CUMULANT_SET_CAP:
        raise SizeCapError(f"exact_cumulant capped at {CUMULANT_SET_CAP} variables")

    def moment(block: tuple[Vertex, ...]) -> float:
        return exact_occupancy(g, lam, set(block))

    total = 0.0
    for part in _set_partitions(tuple(range(len(verts)))):
        term = (-1.0) ** (len(part) - 1) * math.factorial(len(part) - 1)
        for block in part:
            term *= moment(tuple(verts[i] for i in block))
        total += term
    return total


def exact_covariance(g: BipartiteGraph, lam: Fugacities, u: Vertex, v: Vertex) -> float:
    """Cov(X_u, X_v) of occupation indicators; equals the order-2 joint
    cumulant but computed directly for clarity."""
    joint = exact_occupancy(g, lam, [u, v]) if u != v else exact_marginal(g, lam, u)
    return joint - exact_marginal(g, lam, u) * exact_marginal(g, lam, v)


def brute_force_steiner(g: BipartiteGraph, terminals) -> float:
    """Minimum edges of a connected subgraph containing the terminals, by
    scanning vertex supersets (oracle for the dynamic program; tiny graphs
    only)."""
    gids = sorted({g.global_id(t) for t in terminals})
    if not gids:
        raise ValueError("need at least one terminal")
    if len(gids) == 1:
        return 0
    n = g.n_vertices
    if n > 16:
        raise SizeCapError("brute_force_steiner capped at 16 vertices")
    adj = g.global_adjacency()
    tmask = 0
    for gid in gids:
        tmask |= 1 << gid
    best = math.inf
    for vmask in range(1 << n):
        if vmask & tmask != tmask:
            continue
        k = vmask.bit_count()
        if k - 1 >= best:
            continue
        # connected induced check
        start = vmask & -vmask
        comp = start
        frontier = start
        while frontier:
            nxt = 0
            for x in _bits(frontier):
                nxt |= adj[x]
            frontier = nxt & vmask & ~comp
            comp |= frontier
        if comp == vmask:
            best = min(best, k - 1)
    return best
