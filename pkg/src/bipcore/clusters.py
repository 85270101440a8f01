"""Clusters and the truncated log-partition-function expansion.

A cluster is a multiset of polymers whose incompatibility graph H (one slot
per polymer copy; same-polymer slots always adjacent) is connected.  Its
Ursell factor is

    phi(H) = (1/|V(H)|!) * sum over spanning connected edge subsets A
             of (-1)**|A|

and the ordered-multiset count k!/prod(multiplicities!) enters as a separate
integer factor, so a cluster contributes

    (k!/prod m_i!) * phi(H) * prod w(gamma_i)**m_i

to log Xi.  Truncation keeps clusters of total size (sum of polymer sizes,
with multiplicity) strictly below m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterator, Sequence

from . import kernels
from .errors import ClusterBudgetError, SizeCapError
from .graph import BipartiteGraph
from .polymers import Fugacities, Polymer, PolymerSystem, Scalar

if TYPE_CHECKING:  # pragma: no cover
    from .conditions import KPCertificate

URSELL_VERTEX_CAP = 12
URSELL_EDGE_SUBSET_CAP = 6
SLOT_CAP = 14
DEFAULT_MAX_CLUSTERS = 500_000


def _validate_simple(n: int, edges) -> frozenset[tuple[int, int]]:
    out = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError("loops are not allowed")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range")
        out.add((min(u, v), max(u, v)))
    return frozenset(out)


def _connected(n: int, edges: frozenset[tuple[int, int]]) -> bool:
    if n == 1:
        return True
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    comp = 1
    frontier = 1
    full = (1 << n) - 1
    while frontier:
        nxt = 0
        m = frontier
        while m:
            low = m & -m
            m ^= low
            nxt |= adj[low.bit_length() - 1]
        frontier = nxt & ~comp
        comp |= frontier
    return comp == full


def ursell_edge_subsets(n: int, edges) -> Fraction:
    """Ursell factor by direct enumeration of edge subsets."""
    es = sorted(_validate_simple(n, edges))
    return Fraction(kernels.ursell_edge_sum(n, es), math.factorial(n))


_dc_cache: dict[tuple[int, frozenset[tuple[int, int]]], int] = {}


def _dc_int(n: int, edges: frozenset[tuple[int, int]]) -> int:
    """Signed spanning-connected-subgraph count by deletion-contraction.

    Recursion on the first edge e: subsets without e live in G - e, subsets
    with e contribute -1 times the count of G / e (contraction keeps the
    graph simple: parallel edges collapse, which leaves the sum unchanged).
    """
    if not edges:
        return 1 if n == 1 else 0
    key = (n, edges)
    hit = _dc_cache.get(key)
    if hit is not None:
        return hit
    e = min(edges)
    without = _dc_int(n, edges - {e})
    u, v = e
    mapped = set()
    for a, b in edges:
        if (a, b) == e:
            continue
        a2 = u if a == v else a
        b2 = u if b == v else b
        if a2 > v:
            a2 -= 1
        if b2 > v:
            b2 -= 1
        if a2 != b2:
            mapped.add((min(a2, b2), max(a2, b2)))
    out = without - _dc_int(n - 1, frozenset(mapped))
    _dc_cache[key] = out
    return out


def ursell_deletion_contraction(n: int, edges) -> Fraction:
    """Ursell factor by deletion-contraction; agrees with the edge-subset
    enumeration on every connected graph (tested exhaustively to 6 vertices)."""
    es = _validate_simple(n, edges)
    return Fraction(_dc_int(n, es), math.factorial(n))


def ursell(n: int, edges) -> Fraction:
    """Ursell factor of a connected graph on n <= 12 vertices.

    Dispatches to edge-subset enumeration up to 6 vertices and to
    deletion-contraction beyond.
    """
    if n < 1:
        raise ValueError("need at least one vertex")
    if n > URSELL_VERTEX_CAP:
        raise SizeCapError(f"ursell capped at {URSELL_VERTEX_CAP} vertices")
    es = _validate_simple(n, edges)
    if not _connected(n, es):
        raise ValueError("ursell is defined here for connected graphs only")
    if n <= URSELL_EDGE_SUBSET_CAP:
        return Fraction(kernels.ursell_edge_sum(n, sorted(es)), math.factorial(n))
    return Fraction(_dc_int(n, es), math.factorial(n))


# ---------------------------------------------------------------------------
# slot graphs

_slot_cache: dict[tuple[tuple[int, ...], int], int] = {}


def _slot_U(mults: tuple[int, ...], adjbits: int) -> int:
    """Signed connected-subgraph count of the slot graph: support polymer i
    blown up to a clique of mults[i] slots, cliques joined completely along
    incompatible support pairs (bit a*(a-1)/2 + b of adjbits for b < a)."""
    key = (mults, adjbits)
    hit = _slot_cache.get(key)
    if hit is not None:
        return hit
    j = len(mults)
    k = sum(mults)
    complete = adjbits == (1 << (j * (j - 1) // 2)) - 1
    if complete or j == 1:
        u = (-1) ** (k - 1) * math.factorial(k - 1)
    else:
        offsets = [0] * j
        acc = 0
        for i, m in enumerate(mults):
            offsets[i] = acc
            acc += m
        edges = []
        for i, m in enumerate(mults):
            base = offsets[i]
            for a in range(m):
                for b in range(a + 1, m):
                    edges.append((base + a, base + b))
        bit = 0
        for a in range(j):
            for b in range(a):
                if adjbits >> bit & 1:
                    for s in range(mults[a]):
                        for t in range(mults[b]):
                            edges.append((offsets[b] + t, offsets[a] + s))
                bit += 1
        if k <= URSELL_EDGE_SUBSET_CAP:
            u = kernels.ursell_edge_sum(k, sorted((min(e), max(e)) for e in edges))
        elif k <= SLOT_CAP:
            u = _dc_int(k, frozenset((min(e), max(e)) for e in edges))
        else:
            raise ClusterBudgetError(
                f"cluster with {k} slots and a non-complete incompatibility "
                f"graph exceeds the Ursell slot cap ({SLOT_CAP})"
            )
    _slot_cache[key] = u
    return u


# ---------------------------------------------------------------------------
# clusters

@dataclass(frozen=True)
class Cluster:
    """Unordered representation of a cluster: distinct polymers with their
    multiplicities, in canonical polymer order."""

    polymers: tuple[tuple[Polymer, int], ...]
    total_size: int
    ursell: Fraction
    ordering_multiplier: int

    @property
    def slots(self) -> int:
        return sum(m for _, m in self.polymers)

    @property
    def coefficient(self) -> Fraction:
        """ordering_multiplier * ursell, an exact rational."""
        return self.ordering_multiplier * self.ursell

    @property
    def weight_product(self) -> Scalar:
        out: Scalar = 1.0
        for p, m in self.polymers:
            out *= p.weight**m
        return out

    @property
    def contribution(self) -> Scalar:
        return float(self.coefficient) * self.weight_product

    def y_count(self, v: int) -> int:
        """Number of slots whose polymer contains R-vertex v."""
        bit = 1 << v
        return sum(m for p, m in self.polymers if p.mask & bit)


def _mult_vectors(sizes: Sequence[int], cap: int) -> Iterator[tuple[int, ...]]:
    """Multiplicity vectors (each >= 1) with sum(m_i * s_i) <= cap."""
    j = len(sizes)

    def rec(idx: int, left: int, acc: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if idx == j:
            yield acc
            return
        s = sizes[idx]
        tail_min = sum(sizes[idx + 1 :])
        m = 1
        while m * s + tail_min <= left:
            yield from rec(idx + 1, left - m * s, acc + (m,))
            m += 1

    yield from rec(0, cap, ())


class ClusterEngine:
    """Cluster enumeration over an explicit polymer universe.

    Supports restriction to a subset of the universe (bitmask over polymer
    indices), which the approximate sampler uses for its conditional
    partition functions.
    """

    def __init__(
        self,
        g: BipartiteGraph,
        lam: Fugacities,
        max_size: int,
        max_polymers: int | None = None,
    ):
        kw = {} if max_polymers is None else {"max_polymers": max_polymers}
        self.system = PolymerSystem(g, lam, max_size=max_size, **kw)
        self.graph = g
        self.lam = lam
        self._sizes = tuple(p.size for p in self.system.polymers)
        # support adjacency excludes the self-incompatibility bit
        self._adj = tuple(
            m & ~(1 << i) for i, m in enumerate(self.system.incompat_masks)
        )

    def clusters(
        self,
        m: int,
        allowed: int | None = None,
        max_clusters: int = DEFAULT_MAX_CLUSTERS,
    ) -> Iterator[Cluster]:
        """All clusters of total size < m over the allowed polymers, each
        exactly once, deterministic order.  Raises ClusterBudgetError when
        more than max_clusters would be produced."""
        if allowed is None:
            allowed = self.system.full_mask
        budget = m - 1
        if budget < 1:
            return
        polymers = self.system.polymers
        sizes = self._sizes
        count = 0
        for anchor in range(len(polymers)):
            if not (allowed >> anchor) & 1 or sizes[anchor] > budget:
                continue
            high = allowed & ~((1 << anchor) - 1)
            for support_mask, base in self._supports(anchor, budget, high):
                idxs = []
                mm = support_mask
                while mm:
                    low = mm & -mm
                    mm ^= low
                    idxs.append(low.bit_length() - 1)
                sup_sizes = [sizes[i] for i in idxs]
                adjbits = 0
                bit = 0
                for a in range(len(idxs)):
                    for b in range(a):
                        if (self._adj[idxs[a]] >> idxs[b]) & 1:
                            adjbits |= 1 << bit
                        bit += 1
                for mults in _mult_vectors(sup_sizes, budget):
                    u = _slot_U(mults, adjbits)
                    k = sum(mults)
                    ordering = math.factorial(k)
                    for mi in mults:
                        ordering //= math.factorial(mi)
                    count += 1
                    if count > max_clusters:
                        raise ClusterBudgetError(
                            f"more than {max_clusters} clusters below size {m}",
                            clusters_seen=count,
                        )
                    yield Cluster(
                        polymers=tuple((polymers[i], mi) for i, mi in zip(idxs, mults)),
                        total_size=sum(mi * s for mi, s in zip(mults, sup_sizes)),
                        ursell=Fraction(u, math.factorial(k)),
                        ordering_multiplier=ordering,
                    )

    def _supports(self, anchor: int, budget: int, allowed: int) -> Iterator[tuple[int, int]]:
        """Connected subsets of the incompatibility graph containing anchor
        (anchor minimal), weighted size <= budget.  Yields (mask, size)."""
        sizes = self._sizes
        adj = self._adj

        def rec(smask: int, total: int, ext: int, forb: int) -> Iterator[tuple[int, int]]:
            yield smask, total
            while ext:
                bit = ext & -ext
                ext ^= bit
                i = bit.bit_length() - 1
                if total + sizes[i] <= budget:
                    grown = smask | bit
                    new_ext = (ext | (adj[i] & allowed)) & ~grown & ~forb
                    yield from rec(grown, total + sizes[i], new_ext, forb)
                forb |= bit

        rootbit = 1 << anchor
        yield from rec(
            rootbit, sizes[anchor], adj[anchor] & allowed & ~rootbit, rootbit
        )

    def truncated_log_xi(
        self,
        m: int,
        allowed: int | None = None,
        max_clusters: int = DEFAULT_MAX_CLUSTERS,
    ) -> Scalar:
        """Sum of cluster contributions of total size < m (compensated)."""
        if isinstance(self.lam.lambda_L, complex):
            re: list[float] = []
            im: list[float] = []
            for c in self.clusters(m, allowed, max_clusters):
                val = c.contribution
                re.append(val.real)
                im.append(val.imag)
            return complex(math.fsum(re), math.fsum(im))
        return math.fsum(c.contribution for c in self.clusters(m, allowed, max_clusters))


@dataclass(frozen=True)
class ExpansionEstimate:
    """Truncated expansion value with its certificate-backed tail bound.

    error_bound is n_R * exp(-m * eta) when a valid certificate was supplied
    and None (unbounded) otherwise.
    """

    value: Scalar
    m: int
    eta: float | None
    error_bound: float | None
    cluster_count: int

    @property
    def bounded(self) -> bool:
        return self.error_bound is not None


def enumerate_clusters(
    g: BipartiteGraph,
    lam: Fugacities,
    m: int,
    max_clusters: int = DEFAULT_MAX_CLUSTERS,
) -> Iterator[Cluster]:
    """All clusters of the full polymer model with total size < m."""
    engine = ClusterEngine(g, lam, max_size=max(m - 1, 0))
    yield from engine.clusters(m, max_clusters=max_clusters)


def truncated_expansion(
    g: BipartiteGraph,
    lam: Fugacities,
    m: int,
    certificate: "KPCertificate | None" = None,
    max_clusters: int = DEFAULT_MAX_CLUSTERS,
) -> ExpansionEstimate:
    """Truncated cluster expansion of log Xi at depth m.

    The tail bound is populated only when a valid convergence certificate is
    supplied; without one the estimate is returned unbounded.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    vals: list[Scalar] = []
    count = 0
    for c in enumerate_clusters(g, lam, m, max_clusters=max_clusters):
        vals.append(c.contribution)
        count += 1
    if vals and isinstance(vals[0], complex):
        value: Scalar = complex(
            math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals)
        )
    else:
        value = math.fsum(vals)  # type: ignore[arg-type]
    eta = None
    bound = None
    if certificate is not None and certificate.valid:
        eta = certificate.eta
        bound = g.n_R * math.exp(-m * certificate.eta)
    return ExpansionEstimate(value, m, eta, bound, count)
