"""Compiled inner loops for moduli below 2^51.

Same float-quotient reduction as :mod:`fdfb.modmath`, written as scalar
loops so numba can fuse the butterflies instead of materializing temporaries.
"""

from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(inline="always")
def _mulmod(a, b, bf_over_m, m):
    quo = np.uint64(np.float64(a) * bf_over_m)
    r = np.int64(a * b - quo * m)
    mi = np.int64(m)
    if r < 0:
        r += mi
    elif r >= mi:
        r -= mi
    return np.uint64(r)


@nb.njit(cache=True, nogil=True)
def ntt_forward(a, roots, roots_scaled, m):
    """In-place negacyclic forward transform of each row of ``a`` (2-d)."""
    rows, n = a.shape
    for r in range(rows):
        x = a[r]
        half = 1
        t = n
        while half < n:
            t //= 2
            for i in range(half):
                w = roots[half + i]
                ws = roots_scaled[half + i]
                base = 2 * i * t
                for j in range(base, base + t):
                    u = x[j]
                    v = _mulmod(x[j + t], w, ws, m)
                    s = u + v
                    x[j] = s - m if s >= m else s
                    x[j + t] = u - v if u >= v else u + m - v
            half *= 2


@nb.njit(cache=True, nogil=True)
def ntt_inverse(a, roots, roots_scaled, m, n_inv, n_inv_scaled):
    rows, n = a.shape
    for r in range(rows):
        x = a[r]
        t = 1
        h = n // 2
        while h >= 1:
            for i in range(h):
                w = roots[h + i]
                ws = roots_scaled[h + i]
                base = 2 * i * t
                for j in range(base, base + t):
                    u = x[j]
                    v = x[j + t]
                    s = u + v
                    x[j] = s - m if s >= m else s
                    d = u - v if u >= v else u + m - v
                    x[j + t] = _mulmod(d, w, ws, m)
            t *= 2
            h //= 2
        for j in range(n):
            x[j] = _mulmod(x[j], n_inv, n_inv_scaled, m)


@nb.njit(cache=True, nogil=True)
def mac_rows(digits, rows, m):
    """``out[b, c] = sum_k digits[b, k] * rows[k, c] mod m`` for NTT-domain arrays.

    ``digits`` is ``(batch, K, N)`` and ``rows`` is ``(K, C, N)``.
    """
    batch, k_count, n = digits.shape
    cols = rows.shape[1]
    out = np.zeros((batch, cols, n), dtype=np.uint64)
    mf = np.float64(m)
    for b in range(batch):
        for c in range(cols):
            for j in range(n):
                acc = np.uint64(0)
                for k in range(k_count):
                    y = rows[k, c, j]
                    acc += _mulmod(digits[b, k, j], y, np.float64(y) / mf, m)
                    if acc >= m:
                        acc -= m
                out[b, c, j] = acc
    return out
