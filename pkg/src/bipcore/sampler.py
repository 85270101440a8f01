"""Approximate sampling from the polymer measure and the hard-core measure.

A polymer configuration is built one R-vertex at a time (ascending index).
At vertex v the candidates are the still-allowed polymers containing v; the
chance of picking gamma is proportional to w_gamma * Xi(P'_gamma) and of
picking none proportional to Xi(P'_empty), where P'_gamma drops polymers
incompatible with gamma and P'_empty drops polymers containing v.  This is
the exact conditional factorization of the measure nu; the restricted
partition functions come from either an exact backend (memoized recursion,
small R sides) or a truncated-expansion backend (certified instances).

A configuration extends to an independent set by occupying its polymers'
vertices and then each unblocked L-vertex independently with probability
lambda_L / (1 + lambda_L).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Literal

import numpy as np

from .clusters import DEFAULT_MAX_CLUSTERS, ClusterEngine
from .conditions import KPCertificate, certify_kp
from .counting import choose_m
from .errors import CertificationError, SizeCapError
from .graph import BipartiteGraph, Vertex, _bits
from .polymers import Fugacities, Polymer, PolymerSystem

EXACT_BACKEND_CAP = 20  # R-side size for the exact restricted-Xi backend
TRUNCATION_DEPTH_CAP = 24

Backend = Literal["auto", "exact", "truncated"]


@dataclass(frozen=True)
class PolymerConfig:
    """A pairwise-compatible polymer collection plus the processed vertices."""

    chosen: tuple[Polymer, ...]
    decided_vertices: frozenset[int]

    @property
    def occupied_R(self) -> frozenset[int]:
        out: set[int] = set()
        for p in self.chosen:
            out.update(p.vertices)
        return frozenset(out)


class IndependentSetSampler:
    """Reusable sampling engine for one (graph, activities, epsilon) triple.

    Conditional distributions are cached per (vertex, allowed-mask) state,
    so repeated draws are cheap.  backend="exact" computes restricted
    partition functions exactly and needs no certificate; "truncated" uses
    exp of the truncated expansion with a per-step error budget
    epsilon / (2 n_R) and requires a valid certificate; "auto" picks exact
    for n_R <= 20, truncated otherwise.
    """

    def __init__(
        self,
        g: BipartiteGraph,
        lam: Fugacities,
        epsilon: float = 0.05,
        backend: Backend = "auto",
        eta: float = 0.1,
        k_max: int = 6,
        max_clusters: int = DEFAULT_MAX_CLUSTERS,
    ):
        if not lam.is_real:
            raise ValueError("sampling needs real activities")
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if backend == "auto":
            backend = "exact" if g.n_R <= EXACT_BACKEND_CAP else "truncated"
        self.graph = g
        self.lam = lam
        self.epsilon = epsilon
        self.backend: Backend = backend
        self.certificate: KPCertificate | None = None
        self._max_clusters = max_clusters
        if backend == "exact":
            if g.n_R > EXACT_BACKEND_CAP:
                raise SizeCapError(
                    f"exact sampling backend capped at {EXACT_BACKEND_CAP} R-vertices"
                )
            self.system = PolymerSystem(g, lam)
            self._engine = None
            self.m_step = None
        elif backend == "truncated":
            cert = certify_kp(g, lam, eta=eta, k_max=k_max)
            if not cert.valid:
                raise CertificationError(
                    f"convergence certification {cert.mode}; the truncated "
                    "sampling backend needs a valid certificate"
                )
            self.certificate = cert
            step_budget = epsilon / (2.0 * g.n_R)
            self.m_step = min(
                choose_m(g.n_R, step_budget, cert.eta), TRUNCATION_DEPTH_CAP
            )
            self._engine = ClusterEngine(g, lam, max_size=max(self.m_step - 1, 1))
            self.system = self._engine.system
        else:
            raise ValueError(f"unknown backend {backend!r}")
        self._conditional_cache: dict[tuple[int, int], tuple[list[int], list[float]]] = {}

    # -- restricted partition functions ------------------------------------

    def _log_xi(self, allowed: int) -> float:
        if self.backend == "exact":
            return math.log(self.system.xi(allowed))
        return self._engine.truncated_log_xi(
            self.m_step, allowed=allowed, max_clusters=self._max_clusters
        )

    def _conditional(self, v: int, avail: int) -> tuple[list[int], list[float]]:
        """Candidate polymer indices at vertex v plus cumulative probabilities;
        the final slot is the no-polymer outcome."""
        key = (v, avail)
        hit = self._conditional_cache.get(key)
        if hit is not None:
            return hit
        member = self.system.member_masks[v] & avail
        incompat = self.system.incompat_masks
        log_none = self._log_xi(avail & ~member)
        idxs = list(_bits(member))
        raw = []
        for i in idxs:
            w = self.system.polymers[i].weight
            if w == 0.0:
                raw.append(0.0)
            else:
                raw.append(w * math.exp(self._log_xi(avail & ~incompat[i]) - log_none))
        total = 1.0 + math.fsum(raw)
        cum = []
        acc = 0.0
        for r in raw:
            acc += r / total
            cum.append(acc)
        cum.append(1.0)
        out = (idxs, cum)
        self._conditional_cache[key] = out
        return out

    # -- sampling -----------------------------------------------------------

    def sample_config(
        self, rng: np.random.Generator, trace: list[tuple[int, int]] | None = None
    ) -> PolymerConfig:
        g = self.graph
        avail = self.system.full_mask
        chosen: list[int] = []
        occupied = 0
        for v in range(g.n_R):
            if trace is not None:
                trace.append((v, avail))
            if (occupied >> v) & 1:
                continue  # already inside a chosen polymer
            if avail & self.system.member_masks[v] == 0:
                continue  # vacant with certainty, no randomness consumed
            idxs, cum = self._conditional(v, avail)
            u = rng.random()
            pick = len(idxs)  # default: none
            for j, c in enumerate(cum[:-1]):
                if u < c:
                    pick = j
                    break
            if pick == len(idxs):
                avail &= ~self.system.member_masks[v]
            else:
                i = idxs[pick]
                chosen.append(i)
                occupied |= self.system.polymers[i].mask
                avail &= ~self.system.incompat_masks[i]
        polys = tuple(self.system.polymers[i] for i in sorted(chosen))
        return PolymerConfig(chosen=polys, decided_vertices=frozenset(range(g.n_R)))

    def extend(self, config: PolymerConfig, rng: np.random.Generator) -> frozenset[Vertex]:
        g = self.graph
        occupied_R = 0
        for p in config.chosen:
            occupied_R |= p.mask
        out: set[Vertex] = {("R", v) for v in _bits(occupied_R)}
        p_in = self.lam.lambda_L / (1.0 + self.lam.lambda_L)
        for u in range(g.n_L):
            if g.adj_L[u] & occupied_R:
                continue  # blocked by an occupied neighbor
            if rng.random() < p_in:
                out.add(("L", u))
        return frozenset(out)

    def sample(self, rng: np.random.Generator) -> frozenset[Vertex]:
        return self.extend(self.sample_config(rng), rng)

    def draws(self, n: int, seed: int) -> Iterator[frozenset[Vertex]]:
        """n independent sets from one deterministic stream."""
        rng = np.random.Generator(np.random.Philox(seed))
        for _ in range(n):
            yield self.sample(rng)


@lru_cache(maxsize=8)
def _shared_sampler(
    g: BipartiteGraph, lam: Fugacities, epsilon: float, backend: Backend
) -> IndependentSetSampler:
    return IndependentSetSampler(g, lam, epsilon, backend)


def sample_polymer_config(
    g: BipartiteGraph,
    lam: Fugacities,
    epsilon: float,
    rng_seed: int,
    backend: Backend = "auto",
) -> PolymerConfig:
    """One polymer configuration, deterministic in the seed."""
    sampler = _shared_sampler(g, lam, epsilon, backend)
    rng = np.random.Generator(np.random.Philox(rng_seed))
    return sampler.sample_config(rng)


def extend_to_independent_set(
    g: BipartiteGraph, config: PolymerConfig, lam: Fugacities, rng_seed: int
) -> frozenset[Vertex]:
    """Occupy the configuration's polymers, then each unblocked L-vertex
    independently with probability lambda_L / (1 + lambda_L)."""
    if not lam.is_real:
        raise ValueError("sampling needs real activities")
    occupied_R = 0
    for p in config.chosen:
        occupied_R |= p.mask
    out: set[Vertex] = {("R", v) for v in _bits(occupied_R)}
    rng = np.random.Generator(np.random.Philox(rng_seed))
    p_in = lam.lambda_L / (1.0 + lam.lambda_L)
    for u in range(g.n_L):
        if g.adj_L[u] & occupied_R:
            continue
        if rng.random() < p_in:
            out.add(("L", u))
    return frozenset(out)


def sample_independent_set(
    g: BipartiteGraph,
    lam: Fugacities,
    epsilon: float,
    rng_seed: int,
    backend: Backend = "auto",
) -> frozenset[Vertex]:
    """One draw whose distribution is within total-variation epsilon of the
    hard-core measure (exactly the measure in the exact backend)."""
    sampler = _shared_sampler(g, lam, epsilon, backend)
    rng = np.random.Generator(np.random.Philox(rng_seed))
    return sampler.sample(rng)
