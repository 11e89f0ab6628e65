"""Closed-form strength indicators for TSP, STHGP and STGP facets.

Everything here is exact: Extreme Point Ratios and squared centroid
distances come out as Fractions, centroid distances themselves as
RootExpr pairs (rational times the square root of a rational), and the
interior-angle cosines as integer numerator / squared-denominator
pairs.  Log-domain row evaluators at the bottom mirror the STHGP
formulas for sweeps past the exact-arithmetic comfort zone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from .combinatorics import (
    binomial,
    edge_attach,
    log_binomial_table,
    log_edge_attach_table,
    log_poisson_moments,
    log_stirling2_table,
    moment_shifted,
    poisson_moment,
    stirling2,
    stirling2_row,
)
from .exactnum import RootExpr, _log_abs
from .geometry import ResourceGuardError

# ---------------------------------------------------------------------------
# Facet descriptions.
#
# Vertex labeling is canonical: a k-subtour lives on S = {1..k}, and the
# 3-toothed comb classes occupy consecutive vertices in the fixed order
# B1, T1, B2, T2, B3, T3, H, O.  The indicators only depend on the class
# sizes, so nothing is lost.


class FacetSpec:
    """Base marker for facet descriptions accepted by build_facet."""

    family = None


@dataclass(frozen=True)
class TspNonNeg(FacetSpec):
    """x_e >= 0 on the canonical edge {1,2} of TSP(n)."""

    n: int
    family = "TSP"

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("TSP needs n >= 3")


@dataclass(frozen=True)
class TspSubtour(FacetSpec):
    """x(delta(S)) >= 2 for S = {1..k} in TSP(n)."""

    n: int
    k: int
    family = "TSP"

    def __post_init__(self):
        if not 2 <= self.k <= self.n - 2:
            raise ValueError("TSP subtour needs 2 <= k <= n-2")


@dataclass(frozen=True)
class TspComb3(FacetSpec):
    """A 3-toothed comb on TSP(n), parameterized by class sizes.

    Tooth i is B_i union T_i; the handle is H union B1 union B2 union
    B3; O is everything else.  The inequality is
    x(E(handle)) + sum_i x(E(tooth_i)) <= |handle| + sum_i |tooth_i| - 5.
    """

    n: int
    b1: int
    t1: int
    b2: int
    t2: int
    b3: int
    t3: int
    h: int = 0
    o: int = 0
    family = "TSP"

    def __post_init__(self):
        sizes = (self.b1, self.t1, self.b2, self.t2, self.b3, self.t3)
        if min(sizes) < 1:
            raise ValueError("comb classes B_i, T_i need at least one vertex each")
        if self.h < 0 or self.o < 0:
            raise ValueError("comb classes H, O cannot be negative")
        if sum(sizes) + self.h + self.o != self.n:
            raise ValueError("comb class sizes must partition the n vertices")

    def values(self):
        return {"b1": self.b1, "t1": self.t1, "b2": self.b2, "t2": self.t2,
                "b3": self.b3, "t3": self.t3, "h": self.h, "o": self.o}


@dataclass(frozen=True)
class SthgpNonNeg(FacetSpec):
    """x_e >= 0 on the canonical hyperedge {1..k} of STHGP(n)."""

    n: int
    k: int
    family = "STHGP"

    def __post_init__(self):
        if not 2 <= self.k <= self.n:
            raise ValueError("STHGP non-negativity needs 2 <= k <= n")


@dataclass(frozen=True)
class SthgpSubtour(FacetSpec):
    """sum_e max(|e/\\S|-1, 0) x_e <= k-1 for S = {1..k} in STHGP(n)."""

    n: int
    k: int
    family = "STHGP"

    def __post_init__(self):
        if not 2 <= self.k <= self.n - 1:
            raise ValueError("STHGP subtour needs 2 <= k <= n-1")


@dataclass(frozen=True)
class StgpSubtour(FacetSpec):
    """x(E(S)) <= k-1 for S = {1..k} in STGP(n)."""

    n: int
    k: int
    family = "STGP"

    def __post_init__(self):
        if not 2 <= self.k <= self.n - 1:
            raise ValueError("STGP subtour needs 2 <= k <= n-1")


@dataclass(frozen=True)
class AffineHull(FacetSpec):
    """The single affine-hull equation of STGP(n) or STHGP(n).

    TSP's affine hull is n degree equations, not one; build_facet
    rejects this spec for TSP and affine_hull_equations covers it.
    """

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("needs n >= 2")


# ---------------------------------------------------------------------------
# TSP indicators.


def tsp_nonneg_epr(n):
    """Fraction of tours avoiding a fixed edge: (n-3)/(n-1)."""
    if n < 3:
        raise ValueError("needs n >= 3")
    return Fraction(n - 3, n - 1)


def tsp_subtour_epr(n, k):
    """Fraction of tours tight at a k-subtour: n / C(n,k)."""
    if not 2 <= k <= n - 2:
        raise ValueError("needs 2 <= k <= n-2")
    return Fraction(n, binomial(n, k))


def tsp_nonneg_cd2(n):
    """Squared centroid distance of x_e >= 0: 4/((n-1)(n-3))."""
    if n < 4:
        raise ValueError("degenerate below n = 4")
    return Fraction(4, (n - 1) * (n - 3))


def tsp_subtour_cd2(n, k):
    """Squared centroid distance of a k-subtour cut facet."""
    if not 2 <= k <= n - 2:
        raise ValueError("needs 2 <= k <= n-2")
    return Fraction(2 * (k - 1) * (n - 2) * (n - k - 1), k * (n - 1) * (n - k))


def tsp_subtour_cd_witness(n, k):
    """Edge values of the minimizing point behind tsp_subtour_cd2.

    Returns (inside, crossing, outside): the common coordinate of the
    closest facet point on edges within S, across the cut, and within
    V-S respectively.
    """
    if not 2 <= k <= n - 2:
        raise ValueError("needs 2 <= k <= n-2")
    return (Fraction(2, k), Fraction(2, k * (n - k)), Fraction(2, n - k))


# --- 3-toothed combs -------------------------------------------------------
#
# The quadratics A and B below are stored as patterns over subscripted
# class sizes; i, j, k range over the three teeth and must be distinct.
# Each pattern expands to every injective assignment of (i,j,k) to
# (1,2,3), with duplicate concrete monomials generated only once.
# The expanded term counts (28 for A, 348 for B) are asserted.

_COMB_A_PATTERNS = (
    (1, (("bi", 1), ("ti", 1))),
    (2, (("bi", 1), ("bj", 1))),
    (3, (("bi", 1), ("tj", 1))),
    (2, (("ti", 1), ("tj", 1))),
    (1, (("bi", 1), ("h", 1))),
    (2, (("ti", 1), ("h", 1))),
    (2, (("bi", 1), ("o", 1))),
    (1, (("ti", 1), ("o", 1))),
    (1, (("h", 1), ("o", 1))),
)

_COMB_B_PATTERNS = (
    # quartic block
    (1, (("bi", 2), ("ti", 2))),
    (2, (("bi", 2), ("ti", 1), ("tj", 1))),
    (4, (("bi", 2), ("bj", 2))),
    (2, (("bi", 2), ("bj", 1), ("bk", 1))),
    (2, (("bi", 2), ("bj", 1), ("tk", 1))),
    (9, (("bi", 2), ("tj", 2))),
    (8, (("bi", 2), ("tj", 1), ("tk", 1))),
    (2, (("bi", 1), ("ti", 2), ("bj", 1))),
    (4, (("ti", 2), ("tj", 2))),
    (8, (("ti", 2), ("bj", 1), ("bk", 1))),
    (2, (("ti", 2), ("bj", 1), ("tk", 1))),
    (2, (("ti", 2), ("tj", 1), ("tk", 1))),
    (12, (("bi", 1), ("ti", 1), ("bj", 1), ("tj", 1))),
    (8, (("bi", 1), ("ti", 1), ("bj", 2))),
    (4, (("bi", 1), ("ti", 1), ("bj", 1), ("bk", 1))),
    (4, (("bi", 1), ("ti", 1), ("bj", 1), ("tk", 1))),
    (4, (("bi", 1), ("ti", 1), ("tj", 1), ("tk", 1))),
    (8, (("bi", 1), ("ti", 1), ("tj", 2))),
    (1, (("bi", 2), ("h", 2))),
    (4, (("ti", 2), ("h", 2))),
    (2, (("bi", 1), ("ti", 1), ("h", 2))),
    (2, (("ti", 1), ("tj", 1), ("h", 2))),
    (2, (("bi", 2), ("bj", 1), ("h", 1))),
    (2, (("bi", 2), ("tj", 1), ("h", 1))),
    (4, (("bi", 1), ("tj", 1), ("tk", 1), ("h", 1))),
    (2, (("bi", 1), ("ti", 2), ("h", 1))),
    (4, (("bi", 1), ("ti", 1), ("bj", 1), ("h", 1))),
    (4, (("bi", 1), ("ti", 1), ("tj", 1), ("h", 1))),
    (8, (("ti", 2), ("bj", 1), ("h", 1))),
    (2, (("ti", 2), ("tj", 1), ("h", 1))),
    (2, (("bi", 1), ("ti", 1), ("o", 2))),
    (4, (("bi", 2), ("o", 2))),
    (2, (("bi", 1), ("bj", 1), ("o", 2))),
    (1, (("ti", 2), ("o", 2))),
    (2, (("bi", 1), ("h", 1), ("o", 2))),
    (1, (("h", 2), ("o", 2))),
    (2, (("bi", 2), ("ti", 1), ("o", 1))),
    (2, (("bi", 2), ("bj", 1), ("o", 1))),
    (8, (("bi", 2), ("tj", 1), ("o", 1))),
    (2, (("ti", 2), ("bj", 1), ("o", 1))),
    (2, (("ti", 2), ("tj", 1), ("o", 1))),
    (4, (("bi", 1), ("bj", 1), ("tk", 1), ("o", 1))),
    (4, (("bi", 1), ("ti", 1), ("bj", 1), ("o", 1))),
    (4, (("bi", 1), ("ti", 1), ("tj", 1), ("o", 1))),
    (4, (("bi", 1), ("ti", 1), ("h", 1), ("o", 1))),
    (2, (("bi", 2), ("h", 1), ("o", 1))),
    (4, (("bi", 1), ("tj", 1), ("h", 1), ("o", 1))),
    (2, (("ti", 2), ("h", 1), ("o", 1))),
    (2, (("ti", 1), ("h", 2), ("o", 1))),
    # cubic block
    (-1, (("bi", 2), ("ti", 1))),
    (-1, (("bi", 1), ("ti", 2))),
    (-4, (("bi", 2), ("bj", 1))),
    (-9, (("bi", 2), ("tj", 1))),
    (-9, (("ti", 2), ("bj", 1))),
    (-4, (("ti", 2), ("tj", 1))),
    (-6, (("bi", 1), ("bj", 1), ("bk", 1))),
    (-10, (("bi", 1), ("ti", 1), ("bj", 1))),
    (-10, (("bi", 1), ("ti", 1), ("tj", 1))),
    (-12, (("bi", 1), ("bj", 1), ("tk", 1))),
    (-12, (("bi", 1), ("tj", 1), ("tk", 1))),
    (-6, (("ti", 1), ("tj", 1), ("tk", 1))),
    (-1, (("bi", 1), ("h", 2))),
    (-4, (("ti", 1), ("h", 2))),
    (-1, (("h", 2), ("o", 1))),
    (-1, (("bi", 2), ("h", 1))),
    (-4, (("bi", 1), ("bj", 1), ("h", 1))),
    (-4, (("ti", 2), ("h", 1))),
    (-10, (("bi", 1), ("tj", 1), ("h", 1))),
    (-4, (("bi", 1), ("ti", 1), ("h", 1))),
    (-6, (("ti", 1), ("tj", 1), ("h", 1))),
    (-4, (("bi", 1), ("o", 2))),
    (-1, (("ti", 1), ("o", 2))),
    (-1, (("h", 1), ("o", 2))),
    (-4, (("bi", 2), ("o", 1))),
    (-1, (("ti", 2), ("o", 1))),
    (-4, (("bi", 1), ("ti", 1), ("o", 1))),
    (-6, (("bi", 1), ("bj", 1), ("o", 1))),
    (-10, (("bi", 1), ("tj", 1), ("o", 1))),
    (-4, (("ti", 1), ("tj", 1), ("o", 1))),
    (-4, (("bi", 1), ("h", 1), ("o", 1))),
    (-4, (("ti", 1), ("h", 1), ("o", 1))),
    # quadratic block
    (4, (("bi", 1), ("bj", 1))),
    (1, (("bi", 1), ("ti", 1))),
    (9, (("bi", 1), ("tj", 1))),
    (4, (("ti", 1), ("tj", 1))),
    (1, (("bi", 1), ("h", 1))),
    (4, (("ti", 1), ("h", 1))),
    (4, (("bi", 1), ("o", 1))),
    (1, (("ti", 1), ("o", 1))),
    (1, (("h", 1), ("o", 1))),
)


def _expand_comb_patterns(patterns):
    """Instantiate subscript patterns into concrete weighted monomials.

    A monomial is a sorted tuple of (variable, power) with variables
    drawn from b1..b3, t1..t3, h, o.  Within one pattern, assignments
    producing an identical monomial count once.
    """
    terms = []
    for coeff, factors in patterns:
        seen = set()
        for perm in itertools.permutations((1, 2, 3)):
            sub = dict(zip("ijk", perm))
            powers = {}
            for sym, pw in factors:
                if sym in ("h", "o"):
                    var = sym
                else:
                    var = sym[0] + str(sub[sym[1]])
                powers[var] = powers.get(var, 0) + pw
            mono = tuple(sorted(powers.items()))
            if mono not in seen:
                seen.add(mono)
                terms.append((coeff, mono))
    return terms


_COMB_A_TERMS = _expand_comb_patterns(_COMB_A_PATTERNS)
_COMB_B_TERMS = _expand_comb_patterns(_COMB_B_PATTERNS)
assert len(_COMB_A_TERMS) == 28, len(_COMB_A_TERMS)
assert len(_COMB_B_TERMS) == 348, len(_COMB_B_TERMS)


def _eval_comb_terms(terms, values):
    total = 0
    for coeff, mono in terms:
        prod = coeff
        for var, pw in mono:
            prod *= values[var] ** pw
        total += prod
    return total


def tsp_comb3_cd2(spec):
    """Weak squared centroid distance of a 3-toothed comb facet.

    Evaluates 2(n-2)A^2/((n-1)B) with A and B expanded from their
    subscript patterns at the comb's class sizes.  h = 0 and o = 0 are
    fine.  The normal distance has no closed form here and comes from
    the projection oracle instead.
    """
    if not isinstance(spec, TspComb3):
        raise ValueError("expected a TspComb3 spec")
    n = spec.n
    values = spec.values()
    a_val = _eval_comb_terms(_COMB_A_TERMS, values) - 5 * (n - 1)
    b_val = _eval_comb_terms(_COMB_B_TERMS, values)
    if b_val <= 0:
        raise ValueError("degenerate comb: quadratic form B is not positive")
    return Fraction(2 * (n - 2) * a_val * a_val, (n - 1) * b_val)


def tsp_comb3_small_cd2(n, h):
    """Reduced comb distance for single-vertex teeth (b_i = t_i = 1).

    With o = n - h - 6 vertices outside, the general formula collapses
    to a rational function of n and h.
    """
    if h < 0 or n < h + 6:
        raise ValueError("needs h >= 0 and n >= h + 6")
    f2 = h * h + 5 * h + 12
    f1 = 2 * h ** 3 + 17 * h * h + 59 * h + 96
    f0 = h ** 4 + 12 * h ** 3 + 65 * h * h + 174 * h + 228
    num = 2 * (n - 2) * ((h + 4) * n - (h * h + 6 * h + 16)) ** 2
    den = (n - 1) * (f2 * n * n - f1 * n + f0)
    return Fraction(num, den)


def tsp_comb3_small_limit(h):
    """n -> infinity limit of tsp_comb3_small_cd2 at fixed handle size."""
    if h < 0:
        raise ValueError("needs h >= 0")
    return Fraction(2 * h * h + 16 * h + 32, h * h + 5 * h + 12)


def _weak_compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def tsp_comb3_configs(n):
    """Every valid 3-toothed comb size profile at n, lexicographic.

    The six body/tip classes need one vertex each and the n - 6 spares
    spread over all eight classes, so there are C(n+1, n-6) profiles.
    """
    if n < 6:
        raise ValueError("combs need n >= 6")
    out = []
    for extra in _weak_compositions(n - 6, 8):
        out.append(TspComb3(
            n=n, b1=1 + extra[0], t1=1 + extra[1], b2=1 + extra[2],
            t2=1 + extra[3], b3=1 + extra[4], t3=1 + extra[5],
            h=extra[6], o=extra[7]))
    return out


# ---------------------------------------------------------------------------
# STHGP counting.


def sthgp_rooted_count(n):
    """Rooted spanning hypertrees of the complete hypergraph on n
    vertices: the Poisson moment E[X_n^(n-1)]."""
    if n < 1:
        raise ValueError("needs n >= 1")
    return poisson_moment(n, n - 1)


def sthgp_tree_count(n):
    """Spanning hypertrees t_n = E[X_n^(n-1)] / n."""
    if n < 1:
        raise ValueError("needs n >= 1")
    q, r = divmod(poisson_moment(n, n - 1), n)
    assert r == 0, "rooted hypertree count is not divisible by n"
    return q


def sthgp_trees_by_edge_count(n):
    """Hypertrees of each edge count: list of (i, S2(n-1,i) * n^(i-1))
    for i = 1..n-1.  The counts sum to sthgp_tree_count(n)."""
    if n < 2:
        raise ValueError("needs n >= 2")
    row = stirling2_row(n - 1)
    out = [(i, row[i] * n ** (i - 1)) for i in range(1, n)]
    assert sum(c for _, c in out) == sthgp_tree_count(n)
    return out


def sthgp_trees_with_edge(n, k):
    """Hypertrees containing a fixed k-vertex edge: g(n,k) = (k/n) E[X_n^(n-k)]."""
    if not 1 <= k <= n:
        raise ValueError("needs 1 <= k <= n")
    q, r = divmod(k * poisson_moment(n, n - k), n)
    assert r == 0, "g(n,k) came out non-integer"
    return q


# ---------------------------------------------------------------------------
# STHGP extreme point ratios.


def sthgp_nonneg_epr(n, k):
    """EPR of x_e >= 0 for a k-edge: 1 - k E[X_n^(n-k)] / E[X_n^(n-1)]."""
    if not 2 <= k <= n:
        raise ValueError("needs 2 <= k <= n")
    return 1 - Fraction(k * poisson_moment(n, n - k), poisson_moment(n, n - 1))


_DIRECT_GUARD = 60


def sthgp_subtour_epr(n, k, method="fast"):
    """EPR of the k-subtour of STHGP(n).

    method="direct" evaluates the first-derivation triple sum (trees
    restricted to S form a tree, remaining vertices hang off in
    clusters); it is guarded to n <= 60 because its cost explodes.
    method="fast" routes the hanging clusters through the memoized
    edge-attachment numbers and stays usable far beyond that.  The two
    agree exactly everywhere both run.
    """
    if not 2 <= k <= n - 1:
        raise ValueError("needs 2 <= k <= n-1")
    if method == "direct":
        if n > _DIRECT_GUARD:
            raise ResourceGuardError(
                "direct method is impractical past n = %d; use method='fast'"
                % _DIRECT_GUARD)
        incident = _sthgp_subtour_incident_direct(n, k)
    elif method == "fast":
        incident = _sthgp_subtour_incident_fast(n, k)
    else:
        raise ValueError("method must be 'direct' or 'fast'")
    epr = Fraction(n * incident, poisson_moment(n, n - 1))
    return epr


def sthgp_subtour_incident(n, k, method="fast"):
    """Hypertrees tight at the k-subtour (the EPR numerator times t_n)."""
    if not 2 <= k <= n - 1:
        raise ValueError("needs 2 <= k <= n-1")
    if method == "direct":
        if n > _DIRECT_GUARD:
            raise ResourceGuardError(
                "direct method is impractical past n = %d; use method='fast'"
                % _DIRECT_GUARD)
        return _sthgp_subtour_incident_direct(n, k)
    return _sthgp_subtour_incident_fast(n, k)


def _sthgp_subtour_incident_direct(n, k):
    """Tight-tree count: sum over trees on S (grouped by edge count i)
    of the ways to hang the n-k outside vertices in j-vertex clusters,
    distributing each cluster's attachment points over tree edges and
    vertices of S."""
    total = Fraction(0)
    s_row = stirling2_row(k - 1)
    for i in range(0, k):
        if s_row[i] == 0:
            continue
        inner = 0
        for j in range(1, n - k + 1):
            hang = j * poisson_moment(n - k, n - k - j)
            choose = binomial(n - k, j)
            spread = 0
            for p in range(0, j + 1):
                att = i ** (j - p) if j - p > 0 else 1
                spread += binomial(j, p) * poisson_moment(k, p) * att
            inner += choose * hang * spread
        total += Fraction(s_row[i] * k ** i * inner, 1)
    num = total
    denom = k * (n - k)
    incident = Fraction(num, denom)
    assert incident.denominator == 1, "direct incident count is not an integer"
    return incident.numerator


def _sthgp_subtour_incident_fast(n, k):
    """Tight-tree count via edge-attachment numbers: trees on S with i
    edges, m outside vertices attached through S-incident hyperedges
    (the E(i,m) table), the rest forming their own clusters."""
    total = Fraction(0)
    s_row = stirling2_row(k - 1)
    for i in range(0, k):
        if s_row[i] == 0:
            continue
        inner = Fraction(0)
        for m in range(0, n - k + 1):
            rest = poisson_moment(n - m, n - m - k)
            inner += Fraction(binomial(n - k, m) * rest * edge_attach(i, m), n - m)
        total += s_row[i] * k ** i * inner
    assert total.denominator == 1, "fast incident count is not an integer"
    return total.numerator


# ---------------------------------------------------------------------------
# STHGP scalar helpers.


def sthgp_b(n):
    """b(n) = n 2^(n-1): total size of all subsets of an n-set."""
    if n < 0:
        raise ValueError("needs n >= 0")
    return 0 if n == 0 else n * 2 ** (n - 1)


def sthgp_c(n):
    """c(n) = 2^n - 1: nonempty subsets of an n-set."""
    if n < 0:
        raise ValueError("needs n >= 0")
    return 2 ** n - 1


def sthgp_d(n):
    """d(n) = b(n) - c(n) = sum over nonempty subsets of (size - 1)."""
    return sthgp_b(n) - sthgp_c(n)


def sthgp_alpha(n):
    """alpha(n) = (n^2-3n+4) 2^(n-2) - 1: the squared norm of the
    affine-hull coefficient vector (sum of (s-1)^2 over subset sizes)."""
    if n < 0:
        raise ValueError("needs n >= 0")
    if n < 2:
        return 0
    return (n * n - 3 * n + 4) * 2 ** (n - 2) - 1


def sthgp_gamma(n, k):
    """gamma(n,k) = 2^(n-k) alpha(k): squared norm of the k-subtour
    coefficient vector in STHGP(n)."""
    _check_scalar_range(n, k)
    return 2 ** (n - k) * sthgp_alpha(k)


def sthgp_beta(n, k):
    """beta(n,k): dot product of the k-subtour and affine-hull
    coefficient vectors."""
    _check_scalar_range(n, k)
    return sthgp_gamma(n, k) + sthgp_b(n - k) * sthgp_d(k)


def sthgp_mu(n, k):
    """mu(n,k) = alpha(n) gamma(n,k) - beta(n,k)^2 (Gram determinant)."""
    _check_scalar_range(n, k)
    return sthgp_alpha(n) * sthgp_gamma(n, k) - sthgp_beta(n, k) ** 2


def sthgp_t(n, k):
    """t(n,k) = E[X(X+1)^(n-2)] - E[X^k (X+1)^(n-k-1)] at lambda = n.

    Zero at k = 1 and strictly increasing in k up to k = n-1.
    """
    if n < 2 or not 0 <= k <= n - 1:
        raise ValueError("needs n >= 2 and 0 <= k <= n-1")
    return moment_shifted(n, 1, n - 2) - moment_shifted(n, k, n - k - 1)


def _check_scalar_range(n, k):
    if n < 0 or not 0 <= k <= n:
        raise ValueError("needs 0 <= k <= n")


@dataclass(frozen=True)
class SthgpScalars:
    """The scalar bundle behind the STHGP distance and angle formulas.

    t is None when k = n (the subtour-specific term has no meaning
    there).
    """

    n: int
    k: int
    b: int
    c: int
    d: int
    alpha: int
    gamma: int
    beta: int
    mu: int
    t: object


def sthgp_scalars(n, k):
    if n < 1:
        raise ValueError("needs n >= 1")
    _check_scalar_range(n, k)
    t = sthgp_t(n, k) if (n >= 2 and k <= n - 1) else None
    return SthgpScalars(n=n, k=k, b=sthgp_b(n), c=sthgp_c(n), d=sthgp_d(n),
                        alpha=sthgp_alpha(n), gamma=sthgp_gamma(n, k),
                        beta=sthgp_beta(n, k), mu=sthgp_mu(n, k), t=t)


# ---------------------------------------------------------------------------
# STHGP centroid distances.


def sthgp_nonneg_cd(n, k):
    """Weak centroid distance of x_e >= 0 for a k-edge, as an exact
    ratio * sqrt(radicand) pair."""
    if not 2 <= k <= n:
        raise ValueError("needs 2 <= k <= n")
    alpha = sthgp_alpha(n)
    denom = alpha - (k - 1) ** 2
    if denom <= 0:
        raise ValueError("degenerate radicand: alpha(n) <= (k-1)^2")
    ratio = Fraction(k * poisson_moment(n, n - k), poisson_moment(n, n - 1))
    return RootExpr(ratio, Fraction(alpha, denom))


def sthgp_subtour_cd(n, k):
    """Weak centroid distance of the k-subtour, as an exact
    ratio * sqrt(radicand) pair."""
    if not 2 <= k <= n - 1:
        raise ValueError("needs 2 <= k <= n-1")
    mu = sthgp_mu(n, k)
    if mu <= 0:
        raise ValueError("degenerate: mu(n,k) <= 0")
    ratio = Fraction((n - k) * sthgp_t(n, k), poisson_moment(n, n - 1))
    return RootExpr(ratio, Fraction(sthgp_alpha(n), mu))


def sthgp_cd2_partial_sums(n, k):
    """Split of the squared weak subtour distance into the part carried
    by hyperedges with at least two vertices in S and the remainder.

    Both sums are exact; their total equals sthgp_subtour_cd(n,k)
    squared, which is the identity the tests pin down.
    """
    if not 2 <= k <= n - 1:
        raise ValueError("needs 2 <= k <= n-1")
    alpha = Fraction(sthgp_alpha(n))
    beta = Fraction(sthgp_beta(n, k))
    mu = sthgp_mu(n, k)
    if mu <= 0:
        raise ValueError("degenerate: mu(n,k) <= 0")
    tau = Fraction((n - k) * sthgp_t(n, k), mu * poisson_moment(n, n - 1))
    two = Fraction(2)
    # Coefficients of alpha^2, alpha*beta, beta^2 in the E(S) sum.
    ca2 = (k * k - 3 * k + 4) * two ** (n - 2) - two ** (n - k)
    cab = ((-k + 2) * n + k - 4) * two ** (n - 1) - (n - k - 2) * two ** (n - k)
    cb2 = ((n * n - 3 * n + 4) * two ** (n - 2)
           - (k ** 3 - 2 * n * k * k + (n * n - n + 3) * k + n * n - 3 * n + 4)
           * two ** (n - k - 2))
    sum_es = tau * tau * (ca2 * alpha ** 2 + cab * alpha * beta + cb2 * beta ** 2)
    sum_rest = (tau * tau * beta ** 2
                * (sthgp_alpha(n - k) + k * (n - k) * (n - k + 1) * two ** (n - k - 2)))
    return sum_es, sum_rest


def sthgp_delta_x(n, k, in_s, out_s):
    """Coordinate change of the closest facet point relative to the
    centroid, for a hyperedge with in_s vertices inside S and out_s
    outside: tau (alpha(n) max(p-1,0) - beta(n,k) max(p+q-1,0))."""
    if not 2 <= k <= n - 1:
        raise ValueError("needs 2 <= k <= n-1")
    if not (0 <= in_s <= k and 0 <= out_s <= n - k):
        raise ValueError("edge split out of range")
    mu = sthgp_mu(n, k)
    tau = Fraction((n - k) * sthgp_t(n, k), mu * poisson_moment(n, n - 1))
    p, q = in_s, out_s
    return tau * (sthgp_alpha(n) * max(p - 1, 0)
                  - sthgp_beta(n, k) * max(p + q - 1, 0))


# ---------------------------------------------------------------------------
# STHGP interior angles.


def sthgp_w(n, p, q, r):
    """Dot product of the coefficient vectors of two subtours S1, S2
    with |S1\\S2| = p, |S2\\S1| = q, |S1/\\S2| = r inside STHGP(n)."""
    if p < 0 or q < 0 or r < 0 or p + q + r > n:
        raise ValueError("needs p, q, r >= 0 with p+q+r <= n")
    return 2 ** (n - p - q - r) * (2 ** (p + q) * sthgp_alpha(r)
                                   + sthgp_d(p) * sthgp_d(q)
                                   + sthgp_b(p) * sthgp_b(q) * sthgp_c(r)
                                   + sthgp_b(p + q) * sthgp_d(r))


def sthgp_subtour_angle(n, p, q, r):
    """Interior angle between the subtours on S1 = {1..p+r} and
    S2 = {p+1..p+q+r}.

    Returns ((num, den_sq), theta): the exact cosine of the normal
    angle phi as num/sqrt(den_sq), and theta = pi - phi in radians.
    """
    k1, k2 = p + r, q + r
    if p < 0 or q < 0 or r < 0:
        raise ValueError("needs p, q, r >= 0")
    if p == 0 and q == 0:
        raise ValueError("identical subtours have no defined angle")
    if k1 < 2 or k2 < 2:
        raise ValueError("both subtours need at least 2 vertices")
    if p + q + r > n or k1 > n - 1 or k2 > n - 1:
        raise ValueError("both subtours must be proper subsets of the n vertices")
    w = sthgp_w(n, p, q, r)
    num = sthgp_alpha(n) * w - sthgp_beta(n, k1) * sthgp_beta(n, k2)
    den_sq = sthgp_mu(n, k1) * sthgp_mu(n, k2)
    f = _big_ratio_sqrt(num, den_sq)
    f = max(-1.0, min(1.0, f))
    theta = math.pi - math.acos(f)
    return (num, den_sq), theta


def sthgp_complementary_cosine(n, k):
    """Exact cosine pair for the angle between the k-subtour and its
    complement (n-k)-subtour."""
    (num, den_sq), _ = sthgp_subtour_angle(n, k, n - k, 0)
    return num, den_sq


def sthgp_angle_tuples(n):
    """All (p, q, r) accepted by sthgp_subtour_angle at this n."""
    out = []
    for p in range(0, n):
        for q in range(0, n):
            for r in range(0, n + 1):
                if p == 0 and q == 0:
                    continue
                if p + r < 2 or q + r < 2:
                    continue
                if p + q + r > n or p + r > n - 1 or q + r > n - 1:
                    continue
                out.append((p, q, r))
    return out


def _big_ratio_sqrt(num, den_sq):
    """num / sqrt(den_sq) as a double, safe for huge integers."""
    if den_sq <= 0:
        raise ValueError("denominator squared must be positive")
    if num == 0:
        return 0.0
    mag = math.exp(_log_abs(Fraction(num * num, den_sq)) / 2)
    return math.copysign(mag, num)


def _log_fraction(x):
    """Natural log of a positive int or Fraction of any size."""
    if x <= 0:
        raise ValueError("log of a non-positive value")
    return _log_abs(x)


# ---------------------------------------------------------------------------
# STGP indicators.


def stgp_tree_counts(n, k):
    """(all spanning trees of K_n, trees tight at the k-subtour):
    (n^(n-2), k^(k-1) n^(n-k-1))."""
    if not 2 <= k <= n - 1:
        raise ValueError("needs 2 <= k <= n-1")
    return n ** (n - 2), k ** (k - 1) * n ** (n - k - 1)


def stgp_subtour_epr(n, k):
    """EPR of the k-subtour of STGP(n): (k/n)^(k-1)."""
    if not 2 <= k <= n - 1:
        raise ValueError("needs 2 <= k <= n-1")
    return Fraction(k, n) ** (k - 1)


def stgp_subtour_cd2(n, k):
    """Squared (weak = normal) centroid distance of the k-subtour:
    2(k-1)(n-1)(n-k)/(k n (n+k-1))."""
    if not 2 <= k <= n - 1:
        raise ValueError("needs 2 <= k <= n-1")
    return Fraction(2 * (k - 1) * (n - 1) * (n - k), k * n * (n + k - 1))


def stgp_delta_components(n, k):
    """Coordinate changes and partial squared sums behind
    stgp_subtour_cd2.

    Returns (dx_inside, dx_outside, sum_inside, sum_outside): the
    closest point moves by dx_inside on each edge within S and by
    dx_outside on every other edge; the squared sums over the two edge
    classes add up to the squared distance exactly.
    """
    if not 2 <= k <= n - 1:
        raise ValueError("needs 2 <= k <= n-1")
    dx_inside = Fraction(2 * (n - k), k * n)
    dx_outside = Fraction(-2 * (k - 1), n * (n + k - 1))
    sum_inside = Fraction(2 * (k - 1) * (n - k) ** 2, k * n ** 2)
    sum_outside = Fraction(2 * (k - 1) ** 2 * (n - k), n ** 2 * (n + k - 1))
    assert sum_inside + sum_outside == stgp_subtour_cd2(n, k)
    return dx_inside, dx_outside, sum_inside, sum_outside


# ---------------------------------------------------------------------------
# Exact centroid components.


def tsp_centroid_value(n):
    """Every TSP(n) centroid coordinate: 2/(n-1)."""
    if n < 3:
        raise ValueError("needs n >= 3")
    return Fraction(2, n - 1)


def stgp_centroid_value(n):
    """Every STGP(n) centroid coordinate: 2/n."""
    if n < 2:
        raise ValueError("needs n >= 2")
    return Fraction(2, n)


def sthgp_centroid_value(n, size):
    """STHGP(n) centroid coordinate for a hyperedge of the given size:
    g(n,size)/g(n,1)."""
    if not 2 <= size <= n:
        raise ValueError("needs 2 <= size <= n")
    return Fraction(sthgp_trees_with_edge(n, size), sthgp_tree_count(n))


# ---------------------------------------------------------------------------
# Log-domain rows for large-n sweeps.
#
# These mirror the exact STHGP formulas in floating-point log space.
# Every sum that appears is a sum of positives, so logsumexp applies
# cleanly; the one subtraction in t(n,k) is rewritten as a telescoping
# sum of positive terms first.


def sthgp_log_t_row(n):
    """log t(n,k) for k = 0..n-1 as a vector (index = k; -inf at k <= 1).

    Uses t(n,k) = sum_{j=1}^{k-1} E[X^j (X+1)^(n-2-j)], a telescoping
    rewrite that avoids subtracting nearly equal huge numbers.
    """
    if n < 2:
        raise ValueError("needs n >= 2")
    logm = log_poisson_moments(n, n - 2)
    logb = log_binomial_table(n - 2)
    # v[j] = log E[X^j (X+1)^(n-2-j)] for j = 1..n-2
    v = np.full(n - 1, -np.inf)
    for j in range(1, n - 1):
        terms = logb[n - 2 - j, : n - 1 - j] + logm[j : n - 1]
        v[j] = logsumexp(terms)
    row = np.full(n, -np.inf)
    for k in range(2, n):
        row[k] = logsumexp(v[1:k])
    return row


def sthgp_log_alpha(n):
    return _log_fraction(sthgp_alpha(n)) if sthgp_alpha(n) > 0 else -math.inf


def sthgp_log_mu_row(n):
    """log mu(n,k) for k = 0..n as a vector (integers are exact; only
    the final log is floating)."""
    out = np.full(n + 1, -np.inf)
    for k in range(0, n + 1):
        mu = sthgp_mu(n, k)
        if mu > 0:
            out[k] = _log_fraction(mu)
    return out


def sthgp_subtour_cd2_log_row(n):
    """log d_w^2 of the k-subtour for k = 0..n-1 (-inf where undefined)."""
    if n < 3:
        raise ValueError("needs n >= 3")
    log_t = sthgp_log_t_row(n)
    log_mu = sthgp_log_mu_row(n)
    log_alpha = sthgp_log_alpha(n)
    log_count = _log_fraction(poisson_moment(n, n - 1))
    out = np.full(n, -np.inf)
    for k in range(2, n):
        if not np.isfinite(log_mu[k]):
            continue
        out[k] = (2 * (math.log(n - k) + log_t[k] - log_count)
                  + log_alpha - log_mu[k])
    return out


def sthgp_subtour_epr_log_row(n, max_attach=None):
    """log EPR of the k-subtour for k = 2..n-1, as a vector indexed by
    k (entries 0, 1 are -inf).

    Mirrors the fast incident-count formula on log tables.  The
    edge-attachment table dominates the cost at O(n^3); max_attach can
    cap its width when only small k are needed.
    """
    if n < 3:
        raise ValueError("needs n >= 3")
    imax = n - 2
    jmax = n - 2 if max_attach is None else max_attach
    log_e = log_edge_attach_table(imax, jmax)
    log_s2 = log_stirling2_table(n - 2)
    logb = log_binomial_table(n)
    # log E[X_{n-m}^{n-m-k}] for every lambda = n-m: row lam holds
    # moments 0..lam-2 of lambda = lam.
    moments = {}
    for lam in range(2, n + 1):
        moments[lam] = log_poisson_moments(lam, lam - 2)
    log_count = _log_fraction(poisson_moment(n, n - 1))
    logn = math.log(n)
    out = np.full(n, -np.inf)
    for k in range(2, n):
        mmax = min(n - k, jmax)
        i_idx = np.arange(0, k)
        m_idx = np.arange(0, mmax + 1)
        # grid over (i, m): logS2(k-1,i) + i log k + logC(n-k,m)
        #   - log(n-m) + log E[X_{n-m}^{n-m-k}] + log E(i,m)
        col_m = np.empty(mmax + 1)
        for m in m_idx:
            lam = n - m
            col_m[m] = (logb[n - k, m] - math.log(lam)
                        + (moments[lam][lam - k] if lam - k >= 0 else -np.inf))
        grid = (log_s2[k - 1, i_idx][:, None] + i_idx[:, None] * math.log(k)
                + col_m[None, :] + log_e[np.ix_(i_idx, m_idx)])
        out[k] = logn + logsumexp(grid) - log_count
    return out
