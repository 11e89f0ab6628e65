"""Set-partition counting, Poisson moments and edge-attachment counts.

Exact results are computed with gmpy2 integers behind plain-int APIs.
For sweeps past the exact-arithmetic comfort zone there are numpy
mirrors of each table holding natural logs, built with vectorized
recurrences.  All caches grow monotonically and are guarded by a single
module lock so that sweep workers can share them.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpz
from scipy.special import gammaln, logsumexp

_lock = threading.Lock()

# Row r holds S2(r, 0..r).  Row 0 is the seed: S2(0,0)=1.
_stirling_rows = [[mpz(1)]]

_moment_memo = {}

# Edge-attachment counts E(i,j), keyed (i,j) for i>=1, j>=1.
_attach = {}


def binomial(n, k):
    """C(n, k); zero outside 0 <= k <= n."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _stirling_row(n):
    # Caller holds the lock.
    while len(_stirling_rows) <= n:
        r = len(_stirling_rows)
        prev = _stirling_rows[-1]
        row = [mpz(0)] * (r + 1)
        for k in range(1, r):
            row[k] = k * prev[k] + prev[k - 1]
        row[r] = mpz(1)
        _stirling_rows.append(row)
    return _stirling_rows[n]


def stirling2(n, k):
    """Number of partitions of an n-set into k nonempty blocks."""
    if n < 0 or k < 0:
        raise ValueError("stirling2 needs nonnegative arguments")
    if k > n:
        return 0
    with _lock:
        return int(_stirling_row(n)[k])


def stirling2_row(n):
    """The full row [S2(n,0), ..., S2(n,n)] as plain ints."""
    with _lock:
        return [int(v) for v in _stirling_row(n)]


def bell(n):
    """Number of partitions of an n-set."""
    with _lock:
        return int(sum(_stirling_row(n)))


def _moment_mpz(lam, k):
    # E[X^k] for X ~ Poisson(lam) with integer lam, as an mpz.
    # Caller holds the lock.
    key = (lam, k)
    v = _moment_memo.get(key)
    if v is None:
        row = _stirling_row(k)
        acc = mpz(0)
        for i in range(k, -1, -1):
            acc = acc * lam + row[i]
        v = _moment_memo[key] = acc
    return v


def poisson_moment(lam, k):
    """E[X^k] for X ~ Poisson(lam): sum_i S2(k,i) lam^i.

    Integer lam gives an int; Fraction lam gives a Fraction.
    """
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if isinstance(lam, Fraction) and lam.denominator != 1:
        if lam < 0:
            raise ValueError("Poisson rate must be nonnegative")
        row = stirling2_row(k)
        acc = Fraction(0)
        for i in range(k, -1, -1):
            acc = acc * lam + row[i]
        return acc
    lam = int(lam)
    if lam < 0:
        raise ValueError("Poisson rate must be nonnegative")
    with _lock:
        return int(_moment_mpz(lam, k))


def moment_shifted(lam, m, n):
    """E[X^m (X+1)^n] for X ~ Poisson(lam), via the binomial expansion."""
    if m < 0 or n < 0:
        raise ValueError("moment orders must be nonnegative")
    total = 0
    for j in range(n + 1):
        total += binomial(n, j) * poisson_moment(lam, m + j)
    return total


def _grow_attach(imax, jmax):
    # Caller holds the lock.  Fill the rectangle [1..imax] x [1..jmax],
    # skipping entries already present.
    for j in range(1, jmax + 1):
        if (1, j) not in _attach:
            q, r = divmod(_moment_mpz(j, j), j)
            assert r == 0, "E[X_j^j] is not divisible by j at j=%d" % j
            _attach[(1, j)] = q
    for i in range(2, imax + 1):
        for j in range(1, jmax + 1):
            if (i, j) in _attach:
                continue
            acc = mpz(0)
            for m in range(j + 1):
                left = _attach[(i - 1, j - m)] if j - m > 0 else 1
                right = _attach[(1, m)] if m > 0 else 1
                acc += math.comb(j, m) * left * right
            _attach[(i, j)] = acc


def edge_attach(i, j):
    """Edge-attachment count E(i, j).

    E(i, 0) = 1, E(0, j) = 0 for j > 0, E(1, j) = E[X_j^j] / j (the
    division is exact and asserted), and for i > 1 the counts satisfy the
    binomial convolution E(i, j) = sum_m C(j,m) E(i-1, j-m) E(1, m).
    """
    if i < 0 or j < 0:
        raise ValueError("edge_attach needs nonnegative arguments")
    if j == 0:
        return 1
    if i == 0:
        return 0
    with _lock:
        if (i, j) not in _attach:
            _grow_attach(i, j)
        return int(_attach[(i, j)])


# ---------------------------------------------------------------------------
# Log-domain mirrors.  Arrays store natural logs, with -inf for zero.
# Each cache keeps only the largest table built so far and hands out
# read-only views.

_log_s2 = None
_log_binom = None
_log_attach = None


def _readonly(view):
    view = view[...]
    view.setflags(write=False)
    return view


def log_stirling2_table(nmax):
    """Array L with L[n, k] = ln S2(n, k), shape (nmax+1, nmax+1)."""
    global _log_s2
    with _lock:
        if _log_s2 is None or _log_s2.shape[0] <= nmax:
            width = nmax + 1
            L = np.full((width, width), -np.inf)
            L[0, 0] = 0.0
            logk = np.log(np.arange(1, width))
            for n in range(1, width):
                L[n, n] = 0.0
                if n >= 2:
                    prev = L[n - 1]
                    L[n, 1:n] = np.logaddexp(logk[:n - 1] + prev[1:n],
                                             prev[0:n - 1])
            _log_s2 = L
        return _readonly(_log_s2[:nmax + 1, :nmax + 1])


def log_binomial_table(nmax):
    """Array B with B[n, k] = ln C(n, k), -inf outside the triangle."""
    global _log_binom
    with _lock:
        if _log_binom is None or _log_binom.shape[0] <= nmax:
            width = nmax + 1
            lg = gammaln(np.arange(width) + 1.0)
            n_idx = np.arange(width)[:, None]
            k_idx = np.arange(width)[None, :]
            B = lg[n_idx] - lg[k_idx] - gammaln(np.maximum(n_idx - k_idx, 0) + 1.0)
            B[k_idx > n_idx] = -np.inf
            _log_binom = B
        return _readonly(_log_binom[:nmax + 1, :nmax + 1])


def log_poisson_moments(lam, kmax):
    """Vector M with M[k] = ln E[X_lam^k], k = 0..kmax."""
    if lam < 0:
        raise ValueError("Poisson rate must be nonnegative")
    L = log_stirling2_table(kmax)
    if lam == 0:
        M = np.full(kmax + 1, -np.inf)
        M[0] = 0.0
        return M
    powers = np.arange(kmax + 1) * math.log(lam)
    return logsumexp(L + powers[None, :], axis=1)


def log_poisson_moment(lam, k):
    """ln E[X_lam^k] as a double."""
    return float(log_poisson_moments(lam, k)[k])


def log_moment_shifted(lam, m, n):
    """ln E[X^m (X+1)^n] for X ~ Poisson(lam)."""
    M = log_poisson_moments(lam, m + n)
    B = log_binomial_table(n)
    return float(logsumexp(B[n, :n + 1] + M[m:m + n + 1]))


def log_edge_attach_table(imax, jmax):
    """Array A with A[i, j] = ln E(i, j), shape (imax+1, jmax+1).

    Row 1 comes from the moment formula; higher rows apply the binomial
    convolution with fancy indexing, one vectorized pass per row.
    """
    global _log_attach
    with _lock:
        cached = _log_attach
        if (cached is not None and cached.shape[0] > imax
                and cached.shape[1] > jmax):
            return _readonly(cached[:imax + 1, :jmax + 1])
    # Build outside the lock: the table can take a while and only the
    # final swap needs protection.
    width = jmax + 1
    LS2 = np.asarray(log_stirling2_table(jmax))
    logB = np.asarray(log_binomial_table(jmax))
    A = np.full((imax + 1, width), -np.inf)
    A[:, 0] = 0.0
    if imax >= 1 and jmax >= 1:
        js = np.arange(1, width)
        # ln E(1,j) = ln E[X_j^j] - ln j, vectorized over j.
        T = LS2[1:, :] + np.arange(width)[None, :] * np.log(js)[:, None]
        A[1, 1:] = logsumexp(T, axis=1) - np.log(js)
        if imax >= 2:
            m_idx = np.arange(width)[None, :]
            j_idx = np.arange(width)[:, None]
            gather = np.maximum(j_idx - m_idx, 0)
            base = logB + A[1][None, :]
            for i in range(2, imax + 1):
                prev = A[i - 1]
                A[i, 1:] = logsumexp(base[1:, :] + prev[gather[1:, :]], axis=1)
    with _lock:
        cached = _log_attach
        if (cached is None or cached.shape[0] <= imax
                or cached.shape[1] <= jmax):
            _log_attach = A
        else:
            A = cached
        return _readonly(A[:imax + 1, :jmax + 1])


def clear_caches():
    """Drop every cached table.  Intended for tests."""
    global _log_s2, _log_binom, _log_attach
    with _lock:
        del _stirling_rows[1:]
        _moment_memo.clear()
        _attach.clear()
        _log_s2 = None
        _log_binom = None
        _log_attach = None
