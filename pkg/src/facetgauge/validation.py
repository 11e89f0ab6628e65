"""Cross-check registry pitting every closed form against an
independent route.

Each check covers one slice of the validation protocol: enumerated
counts against counting formulas, closed-form EPR and centroids
against streaming tight-point surveys, CD formulas against both the
exact single-equation projection and the convex-hull QP, angles
against first-principles dot products, and the partial-sum identity.

The checks are plain functions returning a CheckResult; the CHECKS
registry tags them so the CLI can select by family or category.  The
default ranges keep a full run in the minutes; callers widen them
through max_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import closedforms as cf
from . import enumeration as en
from .geometry import hull_distance, interior_angle_cosine, weak_cd

QP_TOL = 1e-7
# STHGP non-negativity with k = n sits at distances around 1e-8 where
# the convex solver keeps fewer digits
QP_TOL_RELAXED = 1e-5


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    max_deviation: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = "%-22s %s  cases=%-5d max_dev=%.3g" % (
            self.name, status, self.cases, self.max_deviation)
        if self.detail:
            text += "  " + self.detail
        return text


def _result(name, failures, cases, max_dev, detail=""):
    if failures:
        detail = ("%d failing: %s" % (len(failures), failures[:4])
                  + ("; " + detail if detail else ""))
    return CheckResult(name=name, passed=not failures, cases=cases,
                       max_deviation=max_dev, detail=detail)


# ---------------------------------------------------------------------------
# Counts.


def _check_counts(name, family, formula, lo, max_n):
    failures = []
    cases = 0
    for n in range(lo, max_n + 1):
        cases += 1
        got = en.count_extreme_points(family, n)
        if got != formula(n):
            failures.append((n, got, formula(n)))
    return _result(name, failures, cases, 0.0,
                   "%s n=%d..%d" % (family, lo, max_n))


def check_tsp_counts(max_n=8):
    return _check_counts("tsp-counts", "TSP",
                         lambda n: math.factorial(n - 1) // 2, 3, max_n)


def check_stgp_counts(max_n=7):
    return _check_counts("stgp-counts", "STGP",
                         lambda n: n ** (n - 2), 2, max_n)


def check_sthgp_counts(max_n=6):
    return _check_counts("sthgp-counts", "STHGP", cf.sthgp_tree_count,
                         2, max_n)


# ---------------------------------------------------------------------------
# EPR and centroids, via one streaming survey per (family, n).


def _epr_survey(family, n, specs):
    indexer = en.EdgeIndexer(family, n)
    hyps = [en.build_facet(indexer, s) for s in specs]
    return en.survey(family, n, hyps), indexer


def check_tsp_epr(max_n=8):
    failures = []
    cases = 0
    for n in range(3, max_n + 1):
        specs = [cf.TspNonNeg(n=n)]
        specs += [cf.TspSubtour(n=n, k=k) for k in range(2, n - 1)]
        closed = [cf.tsp_nonneg_epr(n)]
        closed += [cf.tsp_subtour_epr(n, k) for k in range(2, n - 1)]
        sv, _ = _epr_survey("TSP", n, specs)
        for spec, want, tight in zip(specs, closed, sv.tight_counts):
            cases += 1
            if Fraction(tight, sv.count) != want:
                failures.append((spec, tight, sv.count))
    return _result("tsp-epr", failures, cases, 0.0,
                   "exact, n<=%d" % max_n)


def check_sthgp_epr(max_n=6):
    failures = []
    cases = 0
    for n in range(2, max_n + 1):
        specs = [cf.SthgpNonNeg(n=n, k=k) for k in range(2, n + 1)]
        specs += [cf.SthgpSubtour(n=n, k=k) for k in range(2, n)]
        closed = [cf.sthgp_nonneg_epr(n, k) for k in range(2, n + 1)]
        closed += [cf.sthgp_subtour_epr(n, k, method="fast")
                   for k in range(2, n)]
        sv, _ = _epr_survey("STHGP", n, specs)
        for spec, want, tight in zip(specs, closed, sv.tight_counts):
            cases += 1
            if Fraction(tight, sv.count) != want:
                failures.append((spec, tight, sv.count))
        # the direct triple-sum form must agree with the fast form too
        for k in range(2, n):
            cases += 1
            if cf.sthgp_subtour_epr(n, k, method="direct") != \
                    cf.sthgp_subtour_epr(n, k, method="fast"):
                failures.append(("direct-vs-fast", n, k))
    return _result("sthgp-epr", failures, cases, 0.0,
                   "exact, both forms, n<=%d" % max_n)


def check_stgp_epr(max_n=7):
    failures = []
    cases = 0
    for n in range(3, max_n + 1):
        specs = [cf.StgpSubtour(n=n, k=k) for k in range(2, n)]
        closed = [cf.stgp_subtour_epr(n, k) for k in range(2, n)]
        sv, _ = _epr_survey("STGP", n, specs)
        for spec, want, tight in zip(specs, closed, sv.tight_counts):
            cases += 1
            if Fraction(tight, sv.count) != want:
                failures.append((spec, tight, sv.count))
    return _result("stgp-epr", failures, cases, 0.0,
                   "exact, n<=%d" % max_n)


def _check_centroid(name, family, lo, max_n, value_for_edge):
    failures = []
    cases = 0
    for n in range(lo, max_n + 1):
        sv = en.survey(family, n)
        indexer = en.EdgeIndexer(family, n)
        for i, e in enumerate(indexer.edges):
            cases += 1
            if Fraction(int(sv.coordinate_sums[i]), sv.count) != \
                    value_for_edge(n, e):
                failures.append((n, e))
    return _result(name, failures, cases, 0.0,
                   "%s n=%d..%d" % (family, lo, max_n))


def check_tsp_centroid(max_n=8):
    return _check_centroid("tsp-centroid", "TSP", 3, max_n,
                           lambda n, e: cf.tsp_centroid_value(n))


def check_stgp_centroid(max_n=7):
    return _check_centroid("stgp-centroid", "STGP", 2, max_n,
                           lambda n, e: cf.stgp_centroid_value(n))


def check_sthgp_centroid(max_n=6):
    return _check_centroid("sthgp-centroid", "STHGP", 2, max_n,
                           lambda n, e: cf.sthgp_centroid_value(n, len(e)))


# ---------------------------------------------------------------------------
# Weak CD: closed forms against the exact one-equation projection.


def _sthgp_centroid_vector(indexer):
    return tuple(cf.sthgp_centroid_value(indexer.n, len(e))
                 for e in indexer.edges)


def check_sthgp_weak_cd(max_n=9):
    failures = []
    cases = 0
    for n in range(3, max_n + 1):
        indexer = en.EdgeIndexer("STHGP", n)
        hull = en.build_facet(indexer, cf.AffineHull(n=n))
        centroid = _sthgp_centroid_vector(indexer)
        for k in range(2, n + 1):
            cases += 1
            h = en.build_facet(indexer, cf.SthgpNonNeg(n=n, k=k))
            proj = weak_cd(h.a, h.b, hull.a, hull.b, centroid)
            if proj.distance_squared != cf.sthgp_nonneg_cd(n, k).squared():
                failures.append(("nonneg", n, k))
        for k in range(2, n):
            cases += 1
            h = en.build_facet(indexer, cf.SthgpSubtour(n=n, k=k))
            proj = weak_cd(h.a, h.b, hull.a, hull.b, centroid)
            if proj.distance_squared != cf.sthgp_subtour_cd(n, k).squared():
                failures.append(("subtour", n, k))
    return _result("sthgp-weak-cd", failures, cases, 0.0,
                   "exact projection, n<=%d" % max_n)


def check_stgp_weak_cd(max_n=12):
    failures = []
    cases = 0
    for n in range(3, max_n + 1):
        indexer = en.EdgeIndexer("STGP", n)
        hull = en.build_facet(indexer, cf.AffineHull(n=n))
        centroid = (Fraction(2, n),) * indexer.m
        for k in range(2, n):
            cases += 1
            h = en.build_facet(indexer, cf.StgpSubtour(n=n, k=k))
            proj = weak_cd(h.a, h.b, hull.a, hull.b, centroid)
            if proj.distance_squared != cf.stgp_subtour_cd2(n, k):
                failures.append((n, k))
    return _result("stgp-weak-cd", failures, cases, 0.0,
                   "exact projection, n<=%d" % max_n)


# ---------------------------------------------------------------------------
# CD against the convex-projection oracle.


def _qp_distance(points, spec, bounds):
    h = en.build_facet(points.indexer, spec)
    inc = en.incident_points(points, h)
    centroid = [float(x) for x in points.centroid()]
    return hull_distance(inc.float_chunks(), centroid, bounds=bounds)


def check_tsp_cd_qp(max_n=7):
    failures = []
    cases = 0
    worst = 0.0
    for n in range(5, max_n + 1):
        pts = en.enumerate_extreme_points("TSP", n)
        targets = [(cf.TspNonNeg(n=n), cf.tsp_nonneg_cd2(n))]
        targets += [(cf.TspSubtour(n=n, k=k), cf.tsp_subtour_cd2(n, k))
                    for k in range(2, n - 1)]
        for spec, closed in targets:
            cases += 1
            got = _qp_distance(pts, spec, bounds=False).distance_squared
            dev = abs(got - float(closed))
            worst = max(worst, dev)
            if dev > QP_TOL:
                failures.append((spec, dev))
    return _result("tsp-cd-qp", failures, cases, worst,
                   "affine projection, n<=%d" % max_n)


def check_stgp_cd_qp(max_n=7):
    failures = []
    cases = 0
    worst = 0.0
    for n in range(4, max_n + 1):
        pts = en.enumerate_extreme_points("STGP", n)
        for k in range(2, n):
            cases += 1
            got = _qp_distance(pts, cf.StgpSubtour(n=n, k=k),
                               bounds=False).distance_squared
            dev = abs(got - float(cf.stgp_subtour_cd2(n, k)))
            worst = max(worst, dev)
            if dev > QP_TOL:
                failures.append((n, k, dev))
    return _result("stgp-cd-qp", failures, cases, worst,
                   "affine projection, n<=%d" % max_n)


def check_sthgp_cd_qp(max_n=6):
    failures = []
    cases = 0
    worst = 0.0
    relaxed = 0
    for n in range(3, max_n + 1):
        pts = en.enumerate_extreme_points("STHGP", n)
        for k in range(2, n):
            cases += 1
            got = _qp_distance(pts, cf.SthgpSubtour(n=n, k=k),
                               bounds=False).distance_squared
            dev = abs(got - float(cf.sthgp_subtour_cd(n, k).squared()))
            worst = max(worst, dev)
            if dev > QP_TOL:
                failures.append(("subtour", n, k, dev))
        for k in range(2, n + 1):
            if n == 2:
                continue
            cases += 1
            got = _qp_distance(pts, cf.SthgpNonNeg(n=n, k=k),
                               bounds=False).distance_squared
            dev = abs(got - float(cf.sthgp_nonneg_cd(n, k).squared()))
            tol = QP_TOL_RELAXED if k == n else QP_TOL
            if k == n:
                relaxed += 1
            worst = max(worst, dev)
            if dev > tol:
                failures.append(("nonneg", n, k, dev))
    return _result("sthgp-cd-qp", failures, cases, worst,
                   "affine projection, n<=%d, %d relaxed n=k cases"
                   % (max_n, relaxed))


def check_tsp_comb_qp(max_n=7):
    failures = []
    cases = 0
    worst = 0.0
    for n in range(6, max_n + 1):
        pts = en.enumerate_extreme_points("TSP", n)
        for spec in cf.tsp_comb3_configs(n):
            cases += 1
            got = _qp_distance(pts, spec, bounds=False).distance_squared
            dev = abs(got - float(cf.tsp_comb3_cd2(spec)))
            worst = max(worst, dev)
            if dev > QP_TOL:
                failures.append((spec, dev))
    return _result("tsp-comb-qp", failures, cases, worst,
                   "all comb configs, n<=%d" % max_n)


def check_normal_vs_weak(max_n=6):
    """Normal CD equals weak CD for non-negativity facets everywhere
    and for TSP and STGP subtours; TSP combs and STHGP subtours pull
    apart.  The equal classes are held to QP_TOL case by case; each
    differing class must show a gap above 1e-6 somewhere."""
    failures = []
    cases = 0
    worst_equal = 0.0

    def gap(points, spec):
        d_n = _qp_distance(points, spec, bounds=True).distance_squared
        d_w = _qp_distance(points, spec, bounds=False).distance_squared
        return d_n - d_w

    for n in range(5, max_n + 1):
        pts = en.enumerate_extreme_points("TSP", n)
        for spec in [cf.TspNonNeg(n=n)] + \
                [cf.TspSubtour(n=n, k=k) for k in range(2, n - 1)]:
            cases += 1
            g = abs(gap(pts, spec))
            worst_equal = max(worst_equal, g)
            if g > QP_TOL:
                failures.append((spec, g))
    for n in range(4, max_n + 1):
        pts = en.enumerate_extreme_points("STGP", n)
        for k in range(2, n):
            cases += 1
            g = abs(gap(pts, cf.StgpSubtour(n=n, k=k)))
            worst_equal = max(worst_equal, g)
            if g > QP_TOL:
                failures.append(("STGP", n, k, g))
    for n in range(4, min(max_n, 7) + 1):
        pts = en.enumerate_extreme_points("STHGP", n)
        for k in range(2, n + 1):
            cases += 1
            g = abs(gap(pts, cf.SthgpNonNeg(n=n, k=k)))
            worst_equal = max(worst_equal, g)
            if g > QP_TOL:
                failures.append(("STHGP nonneg", n, k, g))

    # differing classes, each witnessed at its smallest clear size
    n_sthgp = min(max(max_n, 6), 7)
    pts = en.enumerate_extreme_points("STHGP", n_sthgp)
    sub_gaps = [gap(pts, cf.SthgpSubtour(n=n_sthgp, k=k))
                for k in range(2, n_sthgp)]
    cases += len(sub_gaps)
    if max(sub_gaps) <= 1e-6:
        failures.append(("STHGP subtours stay weak-equal", n_sthgp))

    pts = en.enumerate_extreme_points("TSP", 8)
    comb_gaps = [gap(pts, spec) for spec in cf.tsp_comb3_configs(8)]
    cases += len(comb_gaps)
    if max(comb_gaps) <= 1e-6:
        failures.append(("TSP combs stay weak-equal", 8))

    detail = ("equal classes <= %.1e; diff witnesses: sthgp subtour %.2e, "
              "comb %.2e" % (worst_equal, max(sub_gaps), max(comb_gaps)))
    return _result("normal-vs-weak", failures, cases, worst_equal, detail)


# ---------------------------------------------------------------------------
# Angles from first principles.


def _sthgp_subset_matrix(n):
    indexer = en.EdgeIndexer("STHGP", n)
    mat = np.zeros((indexer.m, n), dtype=np.int64)
    for i, e in enumerate(indexer.edges):
        for v in e:
            mat[i, v - 1] = 1
    return mat


def _angle_dot_products(mat, p, q, r):
    """cos of the interior angle as exact integers (num, den_sq), from
    literal subtour coefficient vectors and their dot products."""
    i1 = mat[:, 0:p + r].sum(axis=1)
    i2 = mat[:, p:p + q + r].sum(axis=1)
    a1 = np.maximum(i1 - 1, 0)
    a2 = np.maximum(i2 - 1, 0)
    c = mat.sum(axis=1) - 1
    cc = int(c @ c)
    a1c = int(a1 @ c)
    a2c = int(a2 @ c)
    num = cc * int(a1 @ a2) - a1c * a2c
    den_sq = (cc * int(a1 @ a1) - a1c * a1c) * \
             (cc * int(a2 @ a2) - a2c * a2c)
    return num, den_sq, (a1, a2, c)


def check_sthgp_angles(max_n=10):
    failures = []
    cases = 0
    worst = 0.0
    for n in range(3, max_n + 1):
        mat = _sthgp_subset_matrix(n)
        for (p, q, r) in cf.sthgp_angle_tuples(n):
            cases += 1
            (num_cl, den_cl), theta = cf.sthgp_subtour_angle(n, p, q, r)
            num_fp, den_fp, vecs = _angle_dot_products(mat, p, q, r)
            if (num_fp, den_fp) != (num_cl, den_cl):
                failures.append((n, p, q, r, "dot products"))
                continue
            theta_fp = math.pi - math.acos(
                max(-1.0, min(1.0, num_fp / math.sqrt(den_fp))))
            worst = max(worst, abs(theta - theta_fp))
            if n <= 7:
                # route the same vectors through the exact projection
                a1, a2, c = (tuple(int(x) for x in v) for v in vecs)
                g_num, g_den = interior_angle_cosine(a1, a2, c)
                if Fraction(g_num * abs(g_num), g_den) != \
                        Fraction(num_cl * abs(num_cl), den_cl):
                    failures.append((n, p, q, r, "projection route"))
    return _result("sthgp-angles", failures, cases, worst,
                   "first principles, n<=%d" % max_n)


# ---------------------------------------------------------------------------
# Partial-sum identity.


def check_sthgp_partial_sums(max_n=60):
    failures = []
    cases = 0
    for n in range(3, max_n + 1):
        for k in range(2, n):
            cases += 1
            es, rest = cf.sthgp_cd2_partial_sums(n, k)
            if es + rest != cf.sthgp_subtour_cd(n, k).squared():
                failures.append((n, k))
    return _result("sthgp-partial-sums", failures, cases, 0.0,
                   "exact identity, n<=%d" % max_n)


# ---------------------------------------------------------------------------
# Registry.


@dataclass(frozen=True)
class Check:
    name: str
    tags: frozenset
    run: object


CHECKS = [
    Check("tsp-counts", frozenset({"tsp", "counts"}), check_tsp_counts),
    Check("stgp-counts", frozenset({"stgp", "counts"}), check_stgp_counts),
    Check("sthgp-counts", frozenset({"sthgp", "counts"}), check_sthgp_counts),
    Check("tsp-epr", frozenset({"tsp", "epr"}), check_tsp_epr),
    Check("stgp-epr", frozenset({"stgp", "epr"}), check_stgp_epr),
    Check("sthgp-epr", frozenset({"sthgp", "epr"}), check_sthgp_epr),
    Check("tsp-centroid", frozenset({"tsp", "centroid"}), check_tsp_centroid),
    Check("stgp-centroid", frozenset({"stgp", "centroid"}),
          check_stgp_centroid),
    Check("sthgp-centroid", frozenset({"sthgp", "centroid"}),
          check_sthgp_centroid),
    Check("sthgp-weak-cd", frozenset({"sthgp", "cd"}), check_sthgp_weak_cd),
    Check("stgp-weak-cd", frozenset({"stgp", "cd"}), check_stgp_weak_cd),
    Check("tsp-cd-qp", frozenset({"tsp", "cd", "qp"}), check_tsp_cd_qp),
    Check("stgp-cd-qp", frozenset({"stgp", "cd", "qp"}), check_stgp_cd_qp),
    Check("sthgp-cd-qp", frozenset({"sthgp", "cd", "qp"}),
          check_sthgp_cd_qp),
    Check("tsp-comb-qp", frozenset({"tsp", "cd", "qp"}), check_tsp_comb_qp),
    Check("normal-vs-weak", frozenset({"tsp", "stgp", "sthgp", "cd", "qp"}),
          check_normal_vs_weak),
    Check("sthgp-angles", frozenset({"sthgp", "angles"}),
          check_sthgp_angles),
    Check("sthgp-partial-sums", frozenset({"sthgp", "partial-sums"}),
          check_sthgp_partial_sums),
]


def select_checks(family=None, categories=None):
    """Checks matching a family tag and any of the category tags."""
    out = []
    for check in CHECKS:
        if family is not None and family.lower() not in check.tags:
            continue
        if categories is not None and \
                not (set(categories) & check.tags):
            continue
        out.append(check)
    return out


def run_checks(checks, max_n=None):
    """Run a list of registry entries, widest range max_n if given."""
    results = []
    for check in checks:
        if max_n is None:
            results.append(check.run())
        else:
            results.append(check.run(max_n=max_n))
    return results
