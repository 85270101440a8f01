"""Polymers: 2-linked subsets of the R side and their weights.

Two R-vertices are 2-linked when they share an L-neighbor.  A polymer is a
nonempty subset of R that is connected under that relation; its weight is

    w(gamma) = lambda_R**|gamma| / (1 + lambda_L)**|N(gamma)|

with N(gamma) the L-neighborhood.  Two polymers are compatible when their
union is not 2-linked; every polymer is incompatible with itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import NotTwoLinkedError, SizeCapError
from .graph import BipartiteGraph, _bits, degree_profile

DEFAULT_MAX_POLYMERS = 200_000

Scalar = float | complex


@dataclass(frozen=True)
class Fugacities:
    """Vertex activities per side.

    Real mode requires lambda_L > 0 and lambda_R >= 0 (the zero R-activity
    edge case is allowed and makes every polymer weight vanish).  Passing a
    ``complex`` for either activity selects complex mode, which only
    requires 1 + lambda_L != 0.
    """

    lambda_L: Scalar
    lambda_R: Scalar

    def __post_init__(self):
        lL, lR = self.lambda_L, self.lambda_R
        if isinstance(lL, complex) or isinstance(lR, complex):
            if abs(1 + complex(lL)) == 0.0:
                raise ValueError("complex mode needs 1 + lambda_L != 0")
            object.__setattr__(self, "lambda_L", complex(lL))
            object.__setattr__(self, "lambda_R", complex(lR))
        else:
            lL, lR = float(lL), float(lR)
            if not (lL > 0.0) or math.isinf(lL) or math.isnan(lL):
                raise ValueError("real mode needs lambda_L > 0 and finite")
            if not (lR >= 0.0) or math.isinf(lR) or math.isnan(lR):
                raise ValueError("real mode needs lambda_R >= 0 and finite")
            object.__setattr__(self, "lambda_L", lL)
            object.__setattr__(self, "lambda_R", lR)

    @property
    def is_real(self) -> bool:
        return not isinstance(self.lambda_L, complex)


@dataclass(frozen=True)
class ComplexRegion:
    """Polydisc-style parameter region: |lambda_R| <= bound_R together with
    |1 + lambda_L| >= 1 + bound_L, for positive real bounds."""

    bound_L: float
    bound_R: float

    def __post_init__(self):
        if not (self.bound_L > 0 and self.bound_R > 0):
            raise ValueError("region bounds must be positive")

    def contains(self, lam: Fugacities) -> bool:
        return (
            abs(lam.lambda_R) <= self.bound_R
            and abs(1 + lam.lambda_L) >= 1 + self.bound_L
        )


@dataclass(frozen=True)
class Polymer:
    """A 2-linked subset of R with its precomputed weight data."""

    vertices: tuple[int, ...]
    mask: int
    neighborhood_size: int
    weight: Scalar

    @property
    def size(self) -> int:
        return len(self.vertices)

    def __repr__(self):
        return f"Polymer({list(self.vertices)}, |N|={self.neighborhood_size}, w={self.weight!r})"


@lru_cache(maxsize=256)
def _link_masks(g: BipartiteGraph) -> tuple[int, ...]:
    """For each R-vertex, the bitmask of other R-vertices sharing an
    L-neighbor with it (adjacency of the 2-linked relation)."""
    masks = [0] * g.n_R
    for u in range(g.n_L):
        ru = g.adj_L[u]
        for v in _bits(ru):
            masks[v] |= ru
    for v in range(g.n_R):
        masks[v] &= ~(1 << v)
    return tuple(masks)


def two_linked_adjacency(g: BipartiteGraph) -> dict[int, frozenset[int]]:
    """Public view of the 2-linked relation on R indices."""
    masks = _link_masks(g)
    return {v: frozenset(_bits(masks[v])) for v in range(g.n_R)}


def _is_two_linked(mask: int, links: Sequence[int]) -> bool:
    low = mask & -mask
    comp = low
    frontier = low
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= links[v]
        frontier = nxt & mask & ~comp
        comp |= frontier
    return comp == mask


def _neighborhood_mask(g: BipartiteGraph, rmask: int) -> int:
    out = 0
    for v in _bits(rmask):
        out |= g.adj_R[v]
    return out


def polymer_weight(g: BipartiteGraph, vertices, lam: Fugacities) -> Scalar:
    """Weight of the polymer on ``vertices`` (R indices); validates shape."""
    return make_polymer(g, vertices, lam).weight


def make_polymer(g: BipartiteGraph, vertices, lam: Fugacities) -> Polymer:
    verts = tuple(sorted(set(int(v) for v in vertices)))
    if not verts:
        raise NotTwoLinkedError("a polymer is a nonempty subset of R")
    if verts[0] < 0 or verts[-1] >= g.n_R:
        raise NotTwoLinkedError(f"R indices out of range: {verts}")
    mask = 0
    for v in verts:
        mask |= 1 << v
    links = _link_masks(g)
    if not _is_two_linked(mask, links):
        raise NotTwoLinkedError(f"{list(verts)} is not 2-linked")
    return _build_polymer(g, mask, verts, lam)


def _build_polymer(g: BipartiteGraph, mask: int, verts: tuple[int, ...], lam: Fugacities) -> Polymer:
    nb = _neighborhood_mask(g, mask).bit_count()
    w = lam.lambda_R ** len(verts) / (1 + lam.lambda_L) ** nb
    return Polymer(verts, mask, nb, w)


def _connected_sets(adj: Sequence[int], root: int, size_cap: int, allowed: int) -> Iterator[int]:
    """Masks of connected sets containing ``root`` inside ``allowed``, each
    exactly once, sizes up to ``size_cap``.  Canonical growth: candidates are
    consumed in ascending order and barred from later branches, so no
    deduplication table is needed.  Deterministic emission order."""
    rootbit = 1 << root
    if not (allowed & rootbit) or size_cap < 1:
        return

    def rec(smask: int, size: int, ext: int, forb: int) -> Iterator[int]:
        yield smask
        while ext:
            bit = ext & -ext
            ext ^= bit
            if size < size_cap:
                v = bit.bit_length() - 1
                grown = smask | bit
                new_ext = (ext | (adj[v] & allowed)) & ~grown & ~forb
                yield from rec(grown, size + 1, new_ext, forb)
            forb |= bit

    yield from rec(rootbit, 1, adj[root] & allowed & ~rootbit, rootbit)


def enumerate_polymers(
    g: BipartiteGraph, lam: Fugacities, root: int, k_max: int
) -> Iterator[Polymer]:
    """All polymers containing R-vertex ``root`` with size <= k_max, each
    exactly once, in a deterministic order."""
    if not 0 <= root < g.n_R:
        raise ValueError(f"no R-vertex {root}")
    if k_max < 1:
        return
    links = _link_masks(g)
    allowed = (1 << g.n_R) - 1
    for mask in _connected_sets(links, root, k_max, allowed):
        verts = tuple(_bits(mask))
        yield _build_polymer(g, mask, verts, lam)


def all_polymers(
    g: BipartiteGraph,
    lam: Fugacities,
    max_size: int,
    max_polymers: int = DEFAULT_MAX_POLYMERS,
) -> list[Polymer]:
    """Every polymer of size <= max_size, each exactly once, sorted by the
    canonical key (lexicographic vertex tuple)."""
    links = _link_masks(g)
    full = (1 << g.n_R) - 1
    out = []
    for root in range(g.n_R):
        allowed = full & ~((1 << root) - 1)  # canonical: root is the minimum vertex
        for mask in _connected_sets(links, root, max_size, allowed):
            verts = tuple(_bits(mask))
            out.append(_build_polymer(g, mask, verts, lam))
            if len(out) > max_polymers:
                raise SizeCapError(f"more than {max_polymers} polymers; graph too dense")
    out.sort(key=lambda p: p.vertices)
    return out


def incompatible(p1: Polymer, p2: Polymer, links: Sequence[int]) -> bool:
    """True when the union of the two polymers is 2-linked, i.e. they share a
    vertex or some cross pair is 2-linked.  Always true for p1 == p2."""
    if p1.mask & p2.mask:
        return True
    reach = 0
    for v in p1.vertices:
        reach |= links[v]
    return bool(reach & p2.mask)


# ---------------------------------------------------------------------------
# convergence-condition vertex sums

@dataclass(frozen=True)
class KPVertexSum:
    """One vertex's share of the convergence condition

        sum over polymers containing v of |w| * e**((1/2 + eta)|gamma|)
            <= 1 / (2 (max_deg_R (max_deg_L - 1) + 1)).

    ``partial`` is the exact sum over polymers of size <= k_max; ``tail`` is
    a geometric bound on the rest from the analytic weight and count bounds
    (infinite when the geometric ratio reaches 1).  ``satisfied`` is None
    when the tail cannot be bounded.
    """

    vertex: int
    partial: float
    tail: float
    bound: float
    k_max: int
    eta: float

    @property
    def total(self) -> float:
        return self.partial + self.tail

    @property
    def satisfied(self) -> bool | None:
        if math.isinf(self.tail):
            return None
        return self.total <= self.bound

    @property
    def ratio(self) -> float:
        return self.total / self.bound


def kp_vertex_sum(
    g: BipartiteGraph, v: int, lam: Fugacities, eta: float, k_max: int
) -> KPVertexSum:
    if eta <= 0:
        raise ValueError("eta must be positive")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    prof = degree_profile(g)
    partial = math.fsum(
        abs(p.weight) * math.exp((0.5 + eta) * p.size)
        for p in enumerate_polymers(g, lam, v, k_max)
    )
    d = max(prof.delta_R_max * (prof.delta_L_max - 1), 0)
    bound = 1.0 / (2.0 * (d + 1))
    if d == 0:
        tail = 0.0  # all polymers are singletons, already in the partial sum
    else:
        # per-size envelope: count <= (e d)**(k-1) / k**1.5, |w| <= wb**k
        wb = abs(lam.lambda_R) / abs(1 + lam.lambda_L) ** (
            prof.delta_R_min / prof.delta_L_max
        )
        q = d * wb * math.exp(1.5 + eta)
        if q >= 1.0:
            tail = math.inf
        else:
            tail = (
                q ** (k_max + 1)
                / (math.e * d * (k_max + 1) ** 1.5 * (1.0 - q))
            )
    return KPVertexSum(v, partial, tail, bound, k_max, eta)


# ---------------------------------------------------------------------------
# explicit polymer universes

class PolymerSystem:
    """Explicit list of polymers with incompatibility bitmasks.

    Supports exact evaluation of the polymer partition function restricted
    to any subset of the universe (memoized), enumeration of compatible
    collections, and per-vertex membership masks.  Used by the exact
    sampler backend, the exact collection oracle, and cluster enumeration.
    """

    def __init__(
        self,
        g: BipartiteGraph,
        lam: Fugacities,
        max_size: int | None = None,
        max_polymers: int = DEFAULT_MAX_POLYMERS,
    ):
        self.graph = g
        self.lam = lam
        self.max_size = g.n_R if max_size is None else min(max_size, g.n_R)
        self.polymers = all_polymers(g, lam, self.max_size, max_polymers)
        n = len(self.polymers)
        self.full_mask = (1 << n) - 1
        links = _link_masks(g)
        member = [0] * g.n_R
        for i, p in enumerate(self.polymers):
            for v in p.vertices:
                member[v] |= 1 << i
        self.member_masks = tuple(member)
        incomp = []
        for p in self.polymers:
            reach = p.mask
            for v in p.vertices:
                reach |= links[v]
            m = 0
            for v in _bits(reach):
                m |= member[v]
            incomp.append(m)
        self.incompat_masks = tuple(incomp)
        self._xi_cache: dict[int, Scalar] = {}

    def __len__(self) -> int:
        return len(self.polymers)

    def containing_mask(self, v: int) -> int:
        return self.member_masks[v]

    def xi(self, avail: int | None = None) -> Scalar:
        """Partition function of the polymer model restricted to the
        polymers indexed by ``avail`` (all of them by default)."""
        if avail is None:
            avail = self.full_mask
        return self._xi(avail)

    def _xi(self, avail: int) -> Scalar:
        if avail == 0:
            return 1.0
        hit = self._xi_cache.get(avail)
        if hit is not None:
            return hit
        low = avail & -avail
        i = low.bit_length() - 1
        out = self._xi(avail & ~low) + self.polymers[i].weight * self._xi(
            avail & ~self.incompat_masks[i]
        )
        self._xi_cache[avail] = out
        return out

    def collections(self, avail: int | None = None) -> Iterator[tuple[tuple[int, ...], Scalar]]:
        """Yield (polymer index tuple, weight product) for every pairwise
        compatible collection, the empty collection included."""
        if avail is None:
            avail = self.full_mask

        def rec(acc: tuple[int, ...], w: Scalar, rest: int) -> Iterator[tuple[tuple[int, ...], Scalar]]:
            yield acc, w
            r = rest
            while r:
                low = r & -r
                r ^= low
                i = low.bit_length() - 1
                higher = rest & ~((low << 1) - 1)
                yield from rec(acc + (i,), w * self.polymers[i].weight, higher & ~self.incompat_masks[i])

        yield from rec((), 1.0, avail)
