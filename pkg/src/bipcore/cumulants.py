"""Joint cumulants of occupation indicators and correlation-decay bounds.

For A a set of R-vertices, the cumulant has the convergent expansion

    kappa(A) = sum over clusters Gamma of w(Gamma) * prod_{v in A} Y_v(Gamma)

with Y_v the number of polymer slots containing v.  Truncating at total size
m leaves a tail below sup_{t >= m} t^|A| e^(-eta t) under a convergence
certificate at rate eta.  Cumulants decay like e^(-eta * MST(A) / 2) with an
explicit constant; through the partition-lattice identity

    mu_A = sum over set partitions pi of A of prod_{S in pi} kappa(S)

this yields decay of |mu_{A u B} - mu_A mu_B| in the distance between the
sets, including sets that touch L (via an inclusion-exclusion factor
2^(|N(A_L)| + |N(B_L)|)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Mapping, Sequence

from .clusters import DEFAULT_MAX_CLUSTERS, Cluster, ClusterEngine
from .conditions import KPCertificate, certify_kp
from .errors import CertificationError, SizeCapError
from .graph import BipartiteGraph, Vertex, graph_distance, steiner_tree_size
from .polymers import Fugacities
from . import oracle

SET_PARTITION_CAP = 8  # Bell(8) = 4140 partitions
SERIES_TERM_FLOOR = 1e-15


# ---------------------------------------------------------------------------
# set partitions and moment/cumulant conversions

def set_partitions(items: Sequence) -> Iterator[tuple[tuple, ...]]:
    """All set partitions of ``items``, each exactly once, via restricted
    growth strings.  Blocks and the partition itself keep input order."""
    items = tuple(items)
    n = len(items)
    if n > SET_PARTITION_CAP:
        raise SizeCapError(f"set partitions capped at {SET_PARTITION_CAP} elements")
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def rec(i: int, maxval: int) -> Iterator[tuple[tuple, ...]]:
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


def _block_value(table: Mapping, block: tuple) -> float:
    key = frozenset(block)
    if key not in table:
        raise ValueError(f"missing value for subset {sorted(block)!r}")
    return table[key]


def moments_from_cumulants(kappa: Mapping, A: Sequence) -> float:
    """mu_A = sum over set partitions pi of A of prod_{S in pi} kappa(S).
    ``kappa`` maps frozensets (all nonempty subsets of A) to values."""
    total = 0.0
    for part in set_partitions(tuple(A)):
        term = 1.0
        for block in part:
            term *= _block_value(kappa, block)
        total += term
    return total


def cumulants_from_moments(mu: Mapping, A: Sequence) -> float:
    """kappa(A) = sum over partitions pi of (-1)^(|pi|-1) (|pi|-1)! prod mu_S;
    the inverse of moments_from_cumulants on the partition lattice."""
    total = 0.0
    for part in set_partitions(tuple(A)):
        term = (-1.0) ** (len(part) - 1) * math.factorial(len(part) - 1)
        for block in part:
            term *= _block_value(mu, block)
        total += term
    return total


def straddling_partition_sum(kappa: Mapping, A: Sequence, B: Sequence) -> float:
    """Sum of prod kappa(S) over partitions of A+B having at least one block
    that meets both A and B; equals mu_{A u B} - mu_A mu_B when kappa holds
    the true cumulants (the within-side partitions cancel the product)."""
    a_set = frozenset(A)
    b_set = frozenset(B)
    if a_set & b_set:
        raise ValueError("the two sets must be disjoint")
    total = 0.0
    for part in set_partitions(tuple(A) + tuple(B)):
        if not any(set(block) & a_set and set(block) & b_set for block in part):
            continue
        term = 1.0
        for block in part:
            term *= _block_value(kappa, block)
        total += term
    return total


# ---------------------------------------------------------------------------
# combinatorial constants

@lru_cache(maxsize=64)
def _stirling2_row(k: int) -> tuple[int, ...]:
    if k == 0:
        return (1,)
    prev = _stirling2_row(k - 1)
    row = [0] * (k + 1)
    for j in range(1, k + 1):
        upper = prev[j] if j < len(prev) else 0
        row[j] = j * upper + prev[j - 1]
    return tuple(row)


def bell_number(k: int) -> int:
    return sum(_stirling2_row(k))


def indicator_cumulant_bound(k: int) -> float:
    """Bound on |kappa| of k indicator variables: each moment has magnitude
    at most 1, so the partition-lattice sum is at most
    sum over partitions of (|pi|-1)! = sum_j S(k,j) (j-1)!."""
    if k < 1:
        raise ValueError("need at least one variable")
    row = _stirling2_row(k)
    return float(sum(row[j] * math.factorial(j - 1) for j in range(1, k + 1)))


def cumulant_decay_constant(a: int, eta: float) -> float:
    """The explicit constant in the cumulant decay bound

        sum over clusters of |w| prod Y_v <= C e^(-eta MST(A)/2),

    C = (sum_{y>=1} y e^(-eta (y-1)))^a, summed numerically with terms below
    1e-15 dropped (geometric envelope justifies the cut)."""
    if a < 1:
        raise ValueError("need at least one vertex")
    if eta <= 0:
        raise ValueError("eta must be positive")
    s = 0.0
    y = 1
    while True:
        term = y * math.exp(-eta * (y - 1))
        s += term
        if term < SERIES_TERM_FLOOR:
            break
        y += 1
    return s**a


def straddling_constant(n: int) -> float:
    """Partition-count constant in the set-pair bound: the number of set
    partitions of the union, times the largest joint cumulant of at most n
    indicator variables, to the n-th power."""
    return float(bell_number(n)) * indicator_cumulant_bound(n) ** n


# ---------------------------------------------------------------------------
# truncated cumulants

@dataclass(frozen=True)
class CumulantQuery:
    """Truncated-cumulant result for a set of R-vertices."""

    vertices: tuple[int, ...]
    m: int
    value: float
    tail_bound: float
    eta: float
    cluster_count: int


def _normalize_R_set(g: BipartiteGraph, A) -> tuple[int, ...]:
    out = []
    for v in A:
        if isinstance(v, tuple):
            side, i = v
            if side != "R":
                raise ValueError(f"cluster-formula cumulants take R-vertices, got {v!r}")
            v = i
        v = int(v)
        if not 0 <= v < g.n_R:
            raise ValueError(f"no R-vertex {v}")
        out.append(v)
    if not out:
        raise ValueError("the vertex set must be nonempty")
    if len(set(out)) != len(out):
        raise ValueError("the vertex set must not repeat vertices")
    return tuple(sorted(out))


def _tail_sup(a: int, eta: float, m: int) -> float:
    """sup over t >= m of t^a e^(-eta t) (the maximizer is a/eta)."""
    t = max(float(m), a / eta)
    return t**a * math.exp(-eta * t)


@lru_cache(maxsize=4)
def _cluster_table(g: BipartiteGraph, lam: Fugacities, m: int, max_clusters: int) -> tuple[Cluster, ...]:
    engine = ClusterEngine(g, lam, max_size=max(m - 1, 1))
    return tuple(engine.clusters(m, max_clusters=max_clusters))


@lru_cache(maxsize=16)
def _shared_certificate(g: BipartiteGraph, lam: Fugacities, eta: float, k_max: int) -> KPCertificate:
    return certify_kp(g, lam, eta=eta, k_max=k_max)


def truncated_cumulant(
    g: BipartiteGraph,
    lam: Fugacities,
    A,
    m: int,
    eta: float = 0.1,
    k_max: int = 6,
    max_clusters: int = DEFAULT_MAX_CLUSTERS,
) -> CumulantQuery:
    """Partial sum of the cluster formula for kappa(A) over clusters of total
    size < m.  The tail bound is sup_{t>=m} t^|A| e^(-eta t) under a valid
    certificate at rate eta, infinity otherwise (the value is still exact as
    a partial sum either way)."""
    if not lam.is_real:
        raise ValueError("cumulants take real activities")
    if m < 1:
        raise ValueError("m must be at least 1")
    verts = _normalize_R_set(g, A)
    cert = _shared_certificate(g, lam, eta, k_max)
    vals = []
    count = 0
    for c in _cluster_table(g, lam, m, max_clusters):
        count += 1
        y = 1
        for v in verts:
            y *= c.y_count(v)
            if y == 0:
                break
        if y:
            vals.append(c.contribution * y)
    tail = _tail_sup(len(verts), cert.eta, m) if cert.valid else math.inf
    return CumulantQuery(
        vertices=verts,
        m=m,
        value=math.fsum(vals),
        tail_bound=tail,
        eta=cert.eta,
        cluster_count=count,
    )


# ---------------------------------------------------------------------------
# decay experiments

@dataclass(frozen=True)
class DecayRow:
    query_id: int
    kind: str  # pair | cumulant | set_pair
    distance_or_mst: float
    value: float
    bound: float
    satisfied: bool


def _as_vertex(g: BipartiteGraph, v) -> Vertex:
    side, i = v
    g.global_id((side, int(i)))
    return (side, int(i))


def _neighborhood(g: BipartiteGraph, vs: Sequence[Vertex]) -> set[Vertex]:
    out: set[Vertex] = set()
    for v in vs:
        out |= g.neighbors(v)
    return out


def _set_pair_bound(
    g: BipartiteGraph, A: Sequence[Vertex], B: Sequence[Vertex], dist: float, eta: float
) -> float:
    """Bound on |mu_{A u B} - mu_A mu_B|.

    Both sets inside R: straddling blocks all have Steiner size >= D(A,B),
    so every straddling cumulant is at most C(n) e^(-eta D/2) and the
    partition identity gives straddling_constant(n) times that.  Sets
    touching L reduce to the R-side case by inclusion-exclusion over
    neighborhoods, costing a 2^(|N(A_L)|+|N(B_L)|) factor, a distance loss
    of 2 (absorbed as e^1 for eta <= 1), and enlarged set sizes.
    """
    a_L = [v for v in A if v[0] == "L"]
    b_L = [v for v in B if v[0] == "L"]
    n_plain = len(A) + len(B)
    if not a_L and not b_L:
        return (
            straddling_constant(n_plain)
            * cumulant_decay_constant(n_plain, eta)
            * math.exp(-eta * dist / 2.0)
        )
    nA = _neighborhood(g, a_L)
    nB = _neighborhood(g, b_L)
    n_hat = len(nA) + len(nB) + (len(A) - len(a_L)) + (len(B) - len(b_L))
    n_hat = max(n_hat, 1)
    return (
        2.0 ** (len(nA) + len(nB))
        * straddling_constant(n_hat)
        * cumulant_decay_constant(n_hat, eta)
        * math.exp(1.0 - eta * dist / 2.0)
    )


def decay_experiment(
    g: BipartiteGraph,
    lam: Fugacities,
    queries: Sequence[tuple],
    m: int = 8,
    eta: float = 0.1,
    k_max: int = 6,
    max_clusters: int = DEFAULT_MAX_CLUSTERS,
) -> list[DecayRow]:
    """Measured correlations/cumulants against their proved decay bounds.

    Query forms:
      ("pair", u, v)        u, v vertices; |mu_uv - mu_u mu_v| vs distance.
      ("cumulant", A)       A a set of R-vertices; |truncated kappa| vs MST.
      ("set_pair", A, B)    disjoint vertex sets; |mu_{AuB} - mu_A mu_B|.

    Pairs with u = v are skipped (zero-distance degenerate).  Requires a
    valid convergence certificate: the bounds are only proved at rate eta.
    The mu side is exact (oracle), so the usual oracle size caps apply.
    """
    cert = _shared_certificate(g, lam, eta, k_max)
    if not cert.valid:
        raise CertificationError(
            f"convergence certification {cert.mode}; decay bounds need a "
            "certificate at the requested rate"
        )
    rows: list[DecayRow] = []
    for qid, query in enumerate(queries):
        kind = query[0]
        if kind == "pair":
            u = _as_vertex(g, query[1])
            v = _as_vertex(g, query[2])
            if u == v:
                continue
            dist = graph_distance(g, [u], [v])
            value = abs(oracle.exact_covariance(g, lam, u, v))
            if u[0] == "R" and v[0] == "R":
                bound = cumulant_decay_constant(2, cert.eta) * math.exp(
                    -cert.eta * dist / 2.0
                )
            else:
                bound = _set_pair_bound(g, [u], [v], dist, cert.eta)
        elif kind == "cumulant":
            verts = _normalize_R_set(g, query[1])
            mst = steiner_tree_size(g, [("R", i) for i in verts])
            q = truncated_cumulant(g, lam, verts, m, eta, k_max, max_clusters)
            value = abs(q.value)
            dist = mst
            bound = cumulant_decay_constant(len(verts), cert.eta) * math.exp(
                -cert.eta * mst / 2.0
            )
        elif kind == "set_pair":
            A = [_as_vertex(g, x) for x in query[1]]
            B = [_as_vertex(g, x) for x in query[2]]
            if set(A) & set(B):
                raise ValueError("set_pair queries need disjoint sets")
            dist = graph_distance(g, A, B)
            mu_ab = oracle.exact_marginal(g, lam, set(A) | set(B))
            mu_a = oracle.exact_marginal(g, lam, A)
            mu_b = oracle.exact_marginal(g, lam, B)
            value = abs(mu_ab - mu_a * mu_b)
            bound = _set_pair_bound(g, A, B, dist, cert.eta)
        else:
            raise ValueError(f"unknown query kind {kind!r}")
        rows.append(
            DecayRow(
                query_id=qid,
                kind=kind,
                distance_or_mst=dist,
                value=value,
                bound=bound,
                satisfied=value <= bound,
            )
        )
    return rows


def decay_rows_to_csv(rows: Sequence[DecayRow]) -> str:
    lines = ["query_id,kind,distance_or_mst,value,bound,satisfied"]
    for r in rows:
        d = "inf" if math.isinf(r.distance_or_mst) else f"{r.distance_or_mst:g}"
        lines.append(
            f"{r.query_id},{r.kind},{d},{r.value!r},{r.bound!r},"
            f"{'true' if r.satisfied else 'false'}"
        )
    return "\n".join(lines) + "\n"
