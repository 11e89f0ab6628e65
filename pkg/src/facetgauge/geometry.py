"""Hyperplanes, exact weak centroid distances and convex projection.

Two independent routes to the distance between a centroid and a facet
live here.  ``weak_cd`` intersects the facet hyperplane with the single
affine-hull equation and solves the resulting 2x2 system exactly.
``hull_distance`` knows nothing about closed forms: it projects the
centroid onto the convex hull (or affine hull) of an explicit point set
in floating point, which is what the closed forms are validated
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class ResourceGuardError(RuntimeError):
    """Raised instead of starting a computation that would blow the
    configured size budget.  Callers opt in to the cost explicitly."""


@dataclass(frozen=True)
class Hyperplane:
    """A linear condition a.x <sense> b over edge coordinates.

    Coefficients are exact (ints or Fractions).  ``sense`` is one of
    "<=", ">=" or "==";  facet inequalities use the first two and
    affine-hull equations the last.
    """

    a: tuple
    b: object
    sense: str = "<="

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        if self.sense not in ("<=", ">=", "=="):
            raise ValueError("sense must be <=, >= or ==")
        if not any(self.a):
            raise ValueError("hyperplane needs a nonzero normal")

    @property
    def m(self):
        return len(self.a)

    def evaluate(self, x):
        if len(x) != len(self.a):
            raise ValueError("dimension mismatch")
        return sum(c * v for c, v in zip(self.a, x) if c)

    def evaluate_bits(self, xbits):
        """a.x for a 0/1 point packed into an int, bit i = coordinate i."""
        total = 0
        while xbits:
            low = xbits & -xbits
            total += self.a[low.bit_length() - 1]
            xbits ^= low
        return total

    def tight_bits(self, xbits):
        return self.evaluate_bits(xbits) == self.b

    def satisfied_bits(self, xbits):
        v = self.evaluate_bits(xbits)
        if self.sense == "<=":
            return v <= self.b
        if self.sense == ">=":
            return v >= self.b
        return v == self.b

    def float_arrays(self):
        return np.array([float(c) for c in self.a]), float(self.b)


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v) if a)


@dataclass(frozen=True)
class ProjectionResult:
    """Exact projection of the centroid onto facet /\\ affine hull."""

    distance_squared: Fraction
    closest_point: tuple
    tau: Fraction
    a_hat: tuple


def weak_cd(a, b, c, d, centroid):
    """Exact squared distance from the centroid to {a.x=b} /\\ {c.x=d}.

    ``c.x = d`` must be the single equation cutting out the polytope's
    affine hull, and the centroid must satisfy it.  Writing q = a.a,
    r = a.c, s = c.c, the minimizer is C + tau*a_hat with
    a_hat = s*a - r*c and tau = (b - a.C)/(qs - r^2), at squared
    distance s(b - a.C)^2/(qs - r^2).  Every optimality condition is
    re-checked exactly before returning.
    """
    a = tuple(a)
    c = tuple(c)
    b = Fraction(b)
    d = Fraction(d)
    if len(a) != len(c) or len(a) != len(centroid):
        raise ValueError("dimension mismatch")
    if not any(c):
        raise ValueError("affine hull equation needs a nonzero normal")
    if _dot(c, centroid) != d:
        raise ValueError("centroid is not on the affine hull")
    q = _dot(a, a)
    r = _dot(a, c)
    s = _dot(c, c)
    denom = q * s - r * r
    if denom == 0:
        # Cauchy-Schwarz is tight exactly when the normals are parallel,
        # in which case the two conditions describe the same hyperplane
        # or an empty intersection and no distance is defined.
        raise ValueError("facet normal is parallel to the affine hull normal")
    gap = b - _dot(a, centroid)
    tau = Fraction(gap, denom)
    a_hat = tuple(s * ai - r * ci for ai, ci in zip(a, c))
    point = tuple(Fraction(x) + tau * h for x, h in zip(centroid, a_hat))
    dsq = s * gap * gap / denom
    # The minimizer must lie on both hyperplanes and the step direction
    # must be parallel to the hull; these are identities, not tolerances.
    assert _dot(a, point) == b
    assert _dot(c, point) == d
    assert _dot(a_hat, c) == 0
    assert sum((p - Fraction(x)) ** 2 for p, x in zip(point, centroid)) == dsq
    return ProjectionResult(distance_squared=dsq, closest_point=point,
                            tau=tau, a_hat=a_hat)


def interior_angle_cosine(a1, a2, c):
    """Exact cosine of the angle between two facet normals after
    projecting both into the affine hull {c.x = d}, as a pair
    (num, den_sq) with cosine = num / sqrt(den_sq).

    The projection replaces a by (c.c) a - (a.c) c, which drops the
    component along c without introducing denominators.
    """
    c = tuple(c)
    s = _dot(c, c)
    if s == 0:
        raise ValueError("affine hull equation needs a nonzero normal")
    parts = []
    for a in (tuple(a1), tuple(a2)):
        r = _dot(a, c)
        a_hat = tuple(s * ai - r * ci for ai, ci in zip(a, c))
        norm_sq = _dot(a_hat, a_hat)
        if norm_sq == 0:
            raise ValueError("facet normal is parallel to the affine hull normal")
        assert _dot(a_hat, c) == 0
        parts.append((a_hat, norm_sq))
    (h1, n1), (h2, n2) = parts
    return _dot(h1, h2), n1 * n2


def interior_angle_first_principles(a1, a2, c):
    """Interior angle theta = pi - phi in radians, where phi is the
    angle between the two facet normals projected into the affine hull.

    The cosine is computed exactly and only converted to float for the
    final acos, so identical normals give exactly theta = pi.
    """
    num, den_sq = interior_angle_cosine(a1, a2, c)
    f = float(num) / math.sqrt(float(den_sq))
    f = max(-1.0, min(1.0, f))
    return math.pi - math.acos(f)


# ---------------------------------------------------------------------------
# Floating-point projection onto hulls of explicit point sets.


@dataclass
class HullDistanceResult:
    """Squared distance from the query point to the hull of a point
    set, with the optimality certificate that terminated the solve.

    ``witness_coefficients`` maps stream positions of the support
    points to their convex weights (None for the affine variant, which
    has no convex multipliers).  An empty input yields infinite
    distance with the ``empty`` flag set.
    """

    distance_squared: float
    certificate_gap: float
    iterations: int
    witness_coefficients: dict | None
    point_count: int
    empty: bool = False

    @property
    def distance(self):
        return math.sqrt(self.distance_squared)

    def __float__(self):
        return self.distance_squared


_CHUNK = 32768


def _chunk_stream(points, point_budget):
    """Return a restartable pass() generator of 2D float chunks.

    Accepts an ndarray, a sequence of rows, or a zero-argument callable
    returning a fresh iterable of rows or chunks.  The budget is
    enforced while streaming the first pass.
    """
    if callable(points) and not isinstance(points, np.ndarray):
        counted = [False]

        def passes():
            seen = 0
            buf = []
            for item in points():
                arr = np.asarray(item, dtype=float)
                if arr.ndim == 2:
                    if buf:
                        block = np.array(buf, dtype=float)
                        buf = []
                        seen += len(block)
                        _check_budget(counted, seen, point_budget)
                        yield block
                    seen += len(arr)
                    _check_budget(counted, seen, point_budget)
                    yield arr
                else:
                    buf.append(arr)
                    if len(buf) >= _CHUNK:
                        block = np.array(buf, dtype=float)
                        buf = []
                        seen += len(block)
                        _check_budget(counted, seen, point_budget)
                        yield block
            if buf:
                block = np.array(buf, dtype=float)
                seen += len(block)
                _check_budget(counted, seen, point_budget)
                yield block
            counted[0] = True

        return passes
    arr = np.asarray(points, dtype=float)
    if arr.size and arr.ndim != 2:
        raise ValueError("expected a 2D point array")
    if point_budget is not None and len(arr) > point_budget:
        raise ResourceGuardError(
            "point set has %d rows, over the budget of %d" % (len(arr), point_budget))

    def passes():
        for start in range(0, len(arr), _CHUNK):
            yield arr[start:start + _CHUNK]

    return passes


def _check_budget(counted, seen, point_budget):
    if not counted[0] and point_budget is not None and seen > point_budget:
        raise ResourceGuardError(
            "point stream exceeded the budget of %d rows" % point_budget)


def hull_distance(points, centroid, bounds=True, tol=1e-10, max_iter=10000,
                  point_budget=None):
    """Project ``centroid`` onto the hull of ``points``; returns the
    squared distance plus certificate in a HullDistanceResult.

    With bounds=True the feasible set is the convex hull and the solve
    is Wolfe's minimum-norm-point algorithm over the shifted points.
    With bounds=False the convex multipliers lose their nonnegativity,
    the feasible set becomes the affine hull, and the projection goes
    through the accumulated Gram matrix with an exact-rank cutoff.

    ``points`` may be an ndarray, a sequence of rows, or a zero-argument
    callable producing a fresh iterable of rows or row chunks on every
    call (so huge vertex sets never need materializing).  If
    ``point_budget`` is given, longer streams raise ResourceGuardError
    rather than being truncated or sampled.  An empty input returns an
    infinite distance with the ``empty`` flag instead of raising.

    ``tol`` is the absolute duality-gap target of the convex solve and
    doubles as the relative rank cutoff of the affine variant.
    """
    passes = _chunk_stream(points, point_budget)
    centroid = np.array([float(v) for v in centroid])
    if bounds:
        return _wolfe_min_norm(passes, centroid, tol, max_iter)
    return _affine_hull_distance(passes, centroid, tol)


def _empty_result():
    return HullDistanceResult(distance_squared=math.inf, certificate_gap=0.0,
                              iterations=0, witness_coefficients=None,
                              point_count=0, empty=True)


def _affine_hull_distance(passes, centroid, tol):
    base = None
    gram = None
    count = 0
    for chunk in passes():
        if not len(chunk):
            continue
        if base is None:
            base = chunk[0].copy()
            gram = np.zeros((chunk.shape[1], chunk.shape[1]))
        v = chunk - base
        gram += v.T @ v
        count += len(chunk)
    if base is None:
        return _empty_result()
    c = centroid - base
    # Project c onto the row space of the shifted points, reading the
    # rank off the Gram spectrum.  Forming the residual vector (rather
    # than subtracting squared norms) avoids cancellation when the
    # distance is at or near zero.
    w, u = np.linalg.eigh(gram)
    keep = w > max(w[-1], 1.0) * tol
    basis = u[:, keep]
    resid = c - basis @ (basis.T @ c)
    dsq = max(float(resid @ resid), 0.0)
    return HullDistanceResult(distance_squared=dsq, certificate_gap=0.0,
                              iterations=1, witness_coefficients=None,
                              point_count=count)


def _lmo(passes, x):
    """One full pass: index and value of the point minimizing x.p."""
    best_idx = -1
    best = None
    best_val = math.inf
    offset = 0
    for chunk in passes():
        if not len(chunk):
            continue
        vals = chunk @ x
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best = chunk[i].copy()
            best_idx = offset + i
        offset += len(chunk)
    return best_idx, best, best_val


def _corral_solve(S):
    """Minimum-norm affine combination over the corral rows of S.

    Solves the bordered system [[0, 1^T], [1, S S^T]] [mu; alpha] = e0,
    which encodes stationarity of |S^T alpha|^2 subject to sum(alpha)=1.
    """
    k = len(S)
    M = np.zeros((k + 1, k + 1))
    M[0, 1:] = 1.0
    M[1:, 0] = 1.0
    M[1:, 1:] = S @ S.T
    rhs = np.zeros(k + 1)
    rhs[0] = 1.0
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return sol[1:]


def _wolfe_min_norm(passes, centroid, tol, max_iter):
    """Wolfe's minimum-norm-point algorithm with a streaming oracle.

    The corral holds affinely independent shifted points; each major
    cycle pulls in the stream point most opposed to the current iterate
    and minor cycles restore the corral property.  Stalls fall back to
    a Frank-Wolfe step so progress never depends on exact arithmetic.
    """
    start_idx = -1
    start = None
    count = 0
    for chunk in passes():
        if len(chunk) and start is None:
            start = chunk[0].copy()
            start_idx = 0
        count += len(chunk)
    if start is None:
        return _empty_result()
    S = [start - centroid]
    idx = [start_idx]
    w = np.array([1.0])
    x = S[0].copy()
    gap = math.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p_idx, p, _ = _lmo(passes, x)
        y = p - centroid
        gap = float(x @ x - x @ y)
        if gap <= tol:
            break
        if p_idx in idx:
            # The oracle returned a corral member: numerically stalled.
            # Take a guarded Frank-Wolfe step instead of looping.
            x, changed = _frank_wolfe_step(x, y)
            w = _refresh_weights(S, w, idx, p_idx, changed)
            continue
        S.append(y)
        idx.append(p_idx)
        w = np.append(w, 0.0)
        # Minor cycles: move to the affine minimizer, clipping at the
        # simplex boundary and dropping dead points.
        while True:
            alpha = _corral_solve(np.array(S))
            if alpha.min() > -1e-12:
                w = np.maximum(alpha, 0.0)
                w = w / w.sum()
                break
            neg = alpha < -1e-12
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg, w / (w - alpha), np.inf)
            theta = float(min(1.0, np.min(ratios)))
            w = theta * alpha + (1.0 - theta) * w
            keep = w > 1e-13
            if keep.all():
                # Degenerate step; force the smallest weight out.
                keep[int(np.argmin(w))] = False
            S = [s for s, k in zip(S, keep) if k]
            idx = [i for i, k in zip(idx, keep) if k]
            w = w[keep]
            w = w / w.sum()
        x = np.array(S).T @ w
    else:
        raise RuntimeError(
            "minimum-norm solve failed to certify gap <= %g in %d iterations"
            % (tol, max_iter))
    return HullDistanceResult(distance_squared=max(float(x @ x), 0.0),
                              certificate_gap=max(gap, 0.0),
                              iterations=iterations,
                              witness_coefficients=dict(zip(idx, map(float, w))),
                              point_count=count)


def _frank_wolfe_step(x, y):
    d = x - y
    denom = float(d @ d)
    if denom <= 0:
        return x, 0.0
    gamma = min(1.0, max(0.0, float(x @ d) / denom))
    return x - gamma * d, gamma


def _refresh_weights(S, w, idx, p_idx, gamma):
    w = (1.0 - gamma) * w
    for i, stream_pos in enumerate(idx):
        if stream_pos == p_idx:
            w[i] += gamma
            break
    total = w.sum()
    return w / total if total > 0 else w
