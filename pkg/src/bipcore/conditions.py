"""Sufficient conditions for convergence of the polymer expansion.

The main imbalance condition for the graph class with L-degrees at most
``max_deg_L`` and R-degrees in ``[min_deg_R, max_deg_R]`` reads

    6 * max_deg_L * max_deg_R * lambda_R
        <= (1 + lambda_L) ** (min_deg_R / max_deg_L).

When it holds, every vertex sum

    sum over polymers containing v of |w| * e**((1/2 + eta) |gamma|)

is bounded by 1 / (2 (max_deg_R (max_deg_L - 1) + 1)) at eta = 0.1, which
certifies a truncation error of n_R * e**(-m * eta) at depth m.  The same
arithmetic with moduli gives a zero-free region for complex activities.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

from .errors import StructuralMismatchError
from .graph import BipartiteGraph, DegreeProfile, degree_profile
from .polymers import ComplexRegion, Fugacities, KPVertexSum, kp_vertex_sum

BOUNDARY_REL_TOL = 1e-12
ANALYTIC_ETA = 0.1
SERIES_RATIO_LIMIT = 0.832  # sum_{k>=1} s^k / k^(3/2) < e/2 for s up to here


@dataclass(frozen=True)
class ConditionCheck:
    satisfied: bool
    lhs: float
    rhs: float
    ratio: float
    boundary: bool


def _profile_tuple(profile) -> tuple[int, int, int]:
    if isinstance(profile, DegreeProfile):
        return profile.delta_L_max, profile.delta_R_min, profile.delta_R_max
    if isinstance(profile, BipartiteGraph):
        return _profile_tuple(degree_profile(profile))
    d_L, d_R_min, d_R_max = profile
    return int(d_L), int(d_R_min), int(d_R_max)


def _compare(lhs: float, rhs: float) -> ConditionCheck:
    gap = abs(lhs - rhs)
    boundary = gap <= BOUNDARY_REL_TOL * max(abs(lhs), abs(rhs), 1.0)
    satisfied = lhs <= rhs or boundary
    ratio = lhs / rhs if rhs != 0 else math.inf
    return ConditionCheck(satisfied, lhs, rhs, ratio, boundary)


def check_main_condition(profile, lam: Fugacities) -> ConditionCheck:
    """The imbalance condition above for real activities.

    ``profile`` may be a graph, a DegreeProfile, or a (max_deg_L, min_deg_R,
    max_deg_R) tuple.  Near-boundary comparisons (relative gap below 1e-12)
    are flagged as boundary and counted as satisfied.
    """
    if not lam.is_real:
        raise ValueError("main condition takes real activities; see check_complex_region")
    d_L, d_R_min, d_R_max = _profile_tuple(profile)
    if d_L < 1 or d_R_max < 1:
        raise StructuralMismatchError("condition needs positive maximum degrees")
    lhs = 6.0 * d_L * d_R_max * lam.lambda_R
    rhs = math.exp((d_R_min / d_L) * math.log1p(lam.lambda_L))
    return _compare(lhs, rhs)


def check_corollary(profile, lam: Fugacities, part: Literal[1, 2, 3]) -> bool:
    """Special-case sufficient hypotheses implying the main condition.

    part 1: regular graphs (all degrees equal d); lambda_L >= 6 d^2 lambda_R.
    part 2: biregular with d_R > d_L, equal activities;
            lambda > (6 d_L d_R) ** (d_L / (d_R - d_L)).
    part 3: biregular, both activities 1, d_L >= 6; d_R >= 7 d_L ln(d_L).

    Raises StructuralMismatchError when the graph or activities do not match
    the part's shape.  For part 3 the d_L >= 6 floor is structural: below
    it this criterion does not imply the main condition.
    """
    if not lam.is_real:
        raise ValueError("corollary checks take real activities")
    if isinstance(profile, BipartiteGraph):
        profile = degree_profile(profile)
    if isinstance(profile, DegreeProfile):
        if not profile.is_biregular:
            raise StructuralMismatchError("corollary parts need biregular degrees")
        d_L, d_R = profile.delta_L_max, profile.delta_R_max
    else:
        d_L, d_R = (int(x) for x in profile)
    if d_L < 1 or d_R < 1:
        raise StructuralMismatchError("degrees must be positive")
    if part == 1:
        if d_L != d_R:
            raise StructuralMismatchError("part 1 needs a regular graph")
        return lam.lambda_L >= 6.0 * d_L * d_L * lam.lambda_R
    if part == 2:
        if d_R <= d_L:
            raise StructuralMismatchError("part 2 needs d_R > d_L")
        if lam.lambda_L != lam.lambda_R:
            raise StructuralMismatchError("part 2 needs equal activities")
        threshold = (6.0 * d_L * d_R) ** (d_L / (d_R - d_L))
        return lam.lambda_L > threshold
    if part == 3:
        if lam.lambda_L != 1.0 or lam.lambda_R != 1.0:
            raise StructuralMismatchError("part 3 needs both activities equal to 1")
        if d_L < 6:
            raise StructuralMismatchError("part 3 applies for d_L >= 6")
        return d_R >= 7.0 * d_L * math.log(d_L)
    raise ValueError("part must be 1, 2, or 3")


CertificateMode = Literal["analytic", "empirical", "failed", "inconclusive"]


@dataclass(frozen=True)
class KPCertificate:
    """Result of a convergence certification attempt.

    mode:
      analytic     - the main condition holds, certifying eta (at most 0.1).
      empirical    - every per-vertex sum plus its tail bound fits.
      failed       - some partial sum alone already exceeds its bound.
      inconclusive - partial sums fit but the tails cannot be bounded.

    margin is the worst-case ratio of a certified quantity to its bound
    (condition lhs/rhs for analytic mode, vertex-sum ratio otherwise).
    """

    eta: float
    mode: CertificateMode
    margin: float
    per_vertex: tuple[KPVertexSum, ...] | None
    provenance: str

    @property
    def per_vertex_margins(self) -> float:
        """Worst-case ratio of a certified sum to its bound (alias)."""
        return self.margin

    @property
    def valid(self) -> bool:
        return self.mode in ("analytic", "empirical")


def certify_kp(
    g: BipartiteGraph,
    lam: Fugacities,
    eta: float = ANALYTIC_ETA,
    k_max: int = 6,
    threads: int = 1,
) -> KPCertificate:
    """Try to certify expansion convergence at rate eta.

    The analytic route applies for real activities and eta <= 0.1: if the
    main condition holds, the certificate follows with no enumeration (the
    vertex sums are monotone in eta, so any smaller eta inherits it).
    Otherwise per-vertex sums up to k_max plus geometric tails are checked.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    prof = degree_profile(g)
    if (
        lam.is_real
        and eta <= ANALYTIC_ETA + BOUNDARY_REL_TOL
        and prof.delta_L_max >= 1
        and prof.delta_R_max >= 1
    ):
        # graphs with an edgeless side fall through to the per-vertex route,
        # whose sums are still well defined
        cond = check_main_condition(prof, lam)
        if cond.satisfied:
            return KPCertificate(
                eta=eta,
                mode="analytic",
                margin=cond.ratio,
                per_vertex=None,
                provenance=(
                    "main imbalance condition holds "
                    f"(lhs={cond.lhs:.6g} <= rhs={cond.rhs:.6g}); "
                    "vertex sums bounded at eta <= 0.1"
                ),
            )
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sums = list(
                pool.map(lambda v: kp_vertex_sum(g, v, lam, eta, k_max), range(g.n_R))
            )
    else:
        sums = [kp_vertex_sum(g, v, lam, eta, k_max) for v in range(g.n_R)]
    per_vertex = tuple(sums)
    if any(s.partial > s.bound for s in sums):
        mode: CertificateMode = "failed"
        margin = max(s.partial / s.bound for s in sums)
    elif any(s.satisfied is None for s in sums):
        mode = "inconclusive"
        margin = math.inf
    elif all(s.satisfied for s in sums):
        mode = "empirical"
        margin = max(s.ratio for s in sums)
    else:
        mode = "inconclusive"
        margin = max(s.ratio for s in sums)
    return KPCertificate(
        eta=eta,
        mode=mode,
        margin=margin,
        per_vertex=per_vertex,
        provenance=f"per-vertex sums up to size {k_max} plus geometric tails",
    )


def check_complex_region(profile, region: ComplexRegion) -> ConditionCheck:
    """Zero-freeness condition for a complex region: the main condition
    arithmetic applied to the region bounds."""
    d_L, d_R_min, d_R_max = _profile_tuple(profile)
    if d_L < 1 or d_R_max < 1:
        raise StructuralMismatchError("condition needs positive maximum degrees")
    lhs = 6.0 * d_L * d_R_max * region.bound_R
    rhs = math.exp((d_R_min / d_L) * math.log1p(region.bound_L))
    return _compare(lhs, rhs)


def in_region(lam: Fugacities, region: ComplexRegion) -> bool:
    """Membership of an activity pair in the region."""
    return region.contains(lam)
