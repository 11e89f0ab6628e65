"""Indicator sweeps over subtour size and EPR-vs-CD comparisons.

Everything here walks the closed forms across all valid subtour sizes
k of one family: sweep() produces the per-k indicator rows behind the
strength curves, weakest_subtour() finds the argmin-strength k,
disagreement_matrix() marks the (k1, k2) pairs where EPR and CD rank
relative strength oppositely, and reflect_compare() pairs each k with
its mirror n-k.

Values are exact rationals (RootExpr for CD) up to a size threshold
and LogScalar beyond it; a sweep never mixes the two representations.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import closedforms as cf
from .exactnum import LogScalar, RootExpr, exact_to_float

# Sweeps at n above this size switch from exact rationals to
# LogScalar.  Exact stays feasible well past it, just slow.
LOG_THRESHOLD_DEFAULT = 200

# Two log-domain values this close (relative) are declared equal.
LOG_TIE_RTOL = 1e-9

MEASURES = ("EPR", "CD2", "CD")


def _normalize_measure(measure):
    m = str(measure).upper()
    if m not in MEASURES:
        raise ValueError("measure must be one of %s, got %r"
                         % ("/".join(MEASURES), measure))
    return m


def _resolve_threads(threads):
    if threads is not None:
        n = int(threads)
    else:
        env = os.environ.get("FACETGAUGE_THREADS", "")
        n = int(env) if env else 1
    if n < 1:
        raise ValueError("thread count must be >= 1")
    return n


def subtour_range(family, n):
    """Valid subtour sizes k of one family, ascending."""
    if family == "TSP":
        lo, hi = 2, n - 2
    elif family in ("STGP", "STHGP"):
        lo, hi = 2, n - 1
    else:
        raise ValueError("unknown family %r" % (family,))
    if hi < lo:
        raise ValueError("%s(%d) has no subtour facets" % (family, n))
    return range(lo, hi + 1)


def subtour_value(family, n, k, measure):
    """Exact subtour indicator: Fraction for EPR and CD2, RootExpr
    for CD."""
    measure = _normalize_measure(measure)
    if family == "TSP":
        if measure == "EPR":
            return cf.tsp_subtour_epr(n, k)
        cd2 = cf.tsp_subtour_cd2(n, k)
    elif family == "STGP":
        if measure == "EPR":
            return cf.stgp_subtour_epr(n, k)
        cd2 = cf.stgp_subtour_cd2(n, k)
    elif family == "STHGP":
        if measure == "EPR":
            return cf.sthgp_subtour_epr(n, k)
        root = cf.sthgp_subtour_cd(n, k)
        return root if measure == "CD" else root.squared()
    else:
        raise ValueError("unknown family %r" % (family,))
    return cd2 if measure == "CD2" else RootExpr.sqrt(cd2)


@dataclass
class SweepResult:
    """One indicator evaluated at every valid subtour size.

    rows: list of (k, value, float view), k strictly ascending and
    complete.  value is exact (Fraction / RootExpr) in exact mode and
    a LogScalar in log mode; mode records which.
    """

    family: str
    n: int
    measure: str
    rows: list
    mode: str = "exact"

    def ks(self):
        return [r[0] for r in self.rows]

    def floats(self):
        return [r[2] for r in self.rows]

    def row_for(self, k):
        for row in self.rows:
            if row[0] == k:
                return row
        raise KeyError("no row for k=%d" % k)


def sweep(family, n, measure, threshold=None, threads=None):
    """Evaluate one indicator at every valid subtour size of the
    family, exact for n <= threshold and log-domain above."""
    measure = _normalize_measure(measure)
    ks = subtour_range(family, n)
    threshold = LOG_THRESHOLD_DEFAULT if threshold is None else threshold
    if n <= threshold:
        rows = _exact_rows(family, n, list(ks), measure,
                           _resolve_threads(threads))
        return SweepResult(family, n, measure, rows, mode="exact")
    rows = _log_rows(family, n, list(ks), measure)
    return SweepResult(family, n, measure, rows, mode="log")


def _exact_rows(family, n, ks, measure, threads):
    def one(k):
        v = subtour_value(family, n, k, measure)
        f = float(v) if isinstance(v, RootExpr) else exact_to_float(v)
        return (k, v, f)

    if threads == 1 or len(ks) < 4:
        return [one(k) for k in ks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map() preserves the k order, so assembly is deterministic
        return list(pool.map(one, ks))


def _log_rows(family, n, ks, measure):
    if family == "STHGP":
        if measure == "EPR":
            vec = cf.sthgp_subtour_epr_log_row(n)
        else:
            vec = cf.sthgp_subtour_cd2_log_row(n)
            if measure == "CD":
                vec = vec / 2.0
        values = [LogScalar(1, float(vec[k])) for k in ks]
    else:
        # the pair-graph closed forms are small rationals at any n
        values = []
        for k in ks:
            if measure == "EPR":
                exact = (cf.tsp_subtour_epr(n, k) if family == "TSP"
                         else cf.stgp_subtour_epr(n, k))
            else:
                exact = (cf.tsp_subtour_cd2(n, k) if family == "TSP"
                         else cf.stgp_subtour_cd2(n, k))
            ls = LogScalar.from_exact(exact)
            if measure == "CD":
                ls = LogScalar(ls.sign, ls.logmag / 2.0)
            values.append(ls)
    return [(k, v, v.to_float()) for k, v in zip(ks, values)]


def weakest_subtour(family, n, measure, threshold=None, exact_window=0,
                    threads=None):
    """Subtour size the indicator ranks weakest: min EPR, max CD.

    Ties go to the smaller k with a warning.  In log mode, values
    within LOG_TIE_RTOL of the extremum count as tied; exact_window > 0
    additionally recomputes an exact window of that half-width around
    the log-domain argmin and settles the answer there.
    """
    if family != "STHGP":
        raise ValueError("weakest_subtour is defined for STHGP, got %r"
                         % (family,))
    if n < 4:
        raise ValueError("needs n >= 4")
    measure = _normalize_measure(measure)
    want_min = measure == "EPR"
    result = sweep(family, n, measure, threshold=threshold, threads=threads)
    if result.mode == "exact":
        best = None
        for k, v, _ in result.rows:
            if best is None or (v < best[1] if want_min else v > best[1]):
                best = (k, v)
            elif v == best[1]:
                warnings.warn("weakest_subtour tie at k=%d and k=%d; "
                              "reporting the smaller" % (best[0], k))
        return best[0]
    logmags = np.array([v.logmag for _, v, _ in result.rows])
    idx = int(np.argmin(logmags) if want_min else np.argmax(logmags))
    ks = result.ks()
    tied = [ks[i] for i in range(len(ks))
            if abs(logmags[i] - logmags[idx]) <= LOG_TIE_RTOL]
    if len(tied) > 1:
        warnings.warn("log-domain tie among k=%s at rtol %.0e; "
                      "reporting the smallest" % (tied, LOG_TIE_RTOL))
    k_star = min(tied)
    if exact_window > 0:
        lo = max(ks[0], k_star - exact_window)
        hi = min(ks[-1], k_star + exact_window)
        best = None
        for k in range(lo, hi + 1):
            v = subtour_value(family, n, k, measure)
            v = v.squared() if isinstance(v, RootExpr) else v
            if best is None or (v < best[1] if want_min else v > best[1]):
                best = (k, v)
        return best[0]
    return k_star


def _sign(x):
    if x > 0:
        return 1
    return -1 if x < 0 else 0


@dataclass
class DisagreementMatrix:
    """Grid over subtour-size pairs marking where EPR and CD disagree
    about relative strength.  Symmetric with an agreeing diagonal."""

    n: int
    ks: tuple
    disagree: np.ndarray

    def cell(self, k1, k2):
        i = self.ks.index(k1)
        j = self.ks.index(k2)
        return "disagree" if self.disagree[i, j] else "agree"

    def disagreeing_pairs(self):
        out = []
        for i in range(len(self.ks)):
            for j in range(i + 1, len(self.ks)):
                if self.disagree[i, j]:
                    out.append((self.ks[i], self.ks[j]))
        return out

    def fraction_disagreeing(self):
        return float(self.disagree.sum()) / self.disagree.size


def disagreement_matrix(n, threshold=None, threads=None):
    """Compare EPR and CD verdicts on every STHGP subtour-size pair.

    The verdict of EPR on (k1, k2) is sign(EPR(k1) - EPR(k2)): larger
    EPR is stronger.  CD reads the other way: smaller is stronger, so
    its verdict is -sign(CD(k1) - CD(k2)).  A cell disagrees when the
    verdicts differ, equal-strength verdicts included.
    """
    if n < 4:
        raise ValueError("needs n >= 4")
    epr = sweep("STHGP", n, "EPR", threshold=threshold, threads=threads)
    cd2 = sweep("STHGP", n, "CD2", threshold=threshold, threads=threads)
    ks = tuple(epr.ks())
    count = len(ks)
    grid = np.zeros((count, count), dtype=bool)
    if epr.mode == "exact":
        evals = [r[1] for r in epr.rows]
        cvals = [r[1] for r in cd2.rows]

        def verdicts(i, j):
            return _sign(evals[i] - evals[j]), -_sign(cvals[i] - cvals[j])
    else:
        elog = np.array([r[1].logmag for r in epr.rows])
        clog = np.array([r[1].logmag for r in cd2.rows])

        def log_sign(a, b):
            return 0 if abs(a - b) <= LOG_TIE_RTOL else _sign(a - b)

        def verdicts(i, j):
            return log_sign(elog[i], elog[j]), -log_sign(clog[i], clog[j])

    for i in range(count):
        for j in range(i + 1, count):
            v1, v2 = verdicts(i, j)
            if v1 != v2:
                grid[i, j] = grid[j, i] = True
    return DisagreementMatrix(n=n, ks=ks, disagree=grid)


def reflect_compare(n, measure):
    """Pair each STHGP subtour size k <= n/2 with its mirror n-k.

    Returns rows (k, value(k), value(n-k)), always exact; the two
    entries coincide on the midpoint row when n is even.
    """
    if n < 5:
        raise ValueError("needs n >= 5")
    measure = _normalize_measure(measure)
    rows = []
    for k in range(2, n // 2 + 1):
        rows.append((k,
                     subtour_value("STHGP", n, k, measure),
                     subtour_value("STHGP", n, n - k, measure)))
    return rows
