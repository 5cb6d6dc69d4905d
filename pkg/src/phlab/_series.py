"""Small truncated Laurent-series arithmetic.

A series is a pair ``(c, lo)``: ``c[k]`` is the coefficient of ``x**(lo + k)``.
All products are truncated at a requested top power.
"""
from __future__ import annotations

import cmath

import numpy as np


def lmul(a, alo, b, blo, top):
    c = np.convolve(a, b)
    lo = alo + blo
    n = top - lo + 1
    if n <= 0:
        return np.zeros(0, dtype=complex), lo
    if len(c) < n:
        c = np.concatenate([c, np.zeros(n - len(c), dtype=complex)])
    return c[:n], lo


def ladd(*terms):
    """Sum of ``(coeff, series, lo)`` triples; the result spans the union of ranges."""
    lo = min(t[2] for t in terms)
    hi = max(t[2] + len(t[1]) - 1 for t in terms)
    out = np.zeros(hi - lo + 1, dtype=complex)
    for coef, c, clo in terms:
        out[clo - lo: clo - lo + len(c)] += coef * np.asarray(c, dtype=complex)
    return out, lo


def coeff(c, lo, power):
    k = power - lo
    if 0 <= k < len(c):
        return c[k]
    return 0j


def leval(c, lo, x):
    """Evaluate at ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=complex)
    acc = np.zeros_like(x)
    for ck in c[::-1]:
        acc = acc * x + ck
    return acc * x ** lo


def lintegrate(c, lo, t1, t2):
    """Integral from ``t1`` to ``t2`` along a path that does not wind round 0.

    The ``1/t`` term uses the principal logarithm of ``t2/t1``; that is the
    straight-segment value whenever the segment misses the origin.
    """
    total = 0j
    for k, ck in enumerate(c):
        n = lo + k
        if ck == 0:
            continue
        if n == -1:
            total += ck * cmath.log(t2 / t1)
        else:
            total += ck * (t2 ** (n + 1) - t1 ** (n + 1)) / (n + 1)
    return total
