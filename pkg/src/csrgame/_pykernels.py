"""Pure numpy implementation of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function; used when the compiled
extension is unavailable or ``CSRGAME_BACKEND=python`` is set.
"""
from __future__ import annotations

import numpy as np

_CHUNK_CELLS = 1 << 21


def _off_diagonal(dist: np.ndarray, big: int) -> np.ndarray:
    d = np.array(dist, dtype=np.int64, copy=True)
    np.fill_diagonal(d, big)
    return d


def exclusive_nearest(dist, D, k, P):
    """``out[i, o]``: distance from ``i`` to the nearest *other* holder of ``o``.

    Resources with no other holder get ``D + 1``.
    """
    P = np.asarray(P, dtype=np.int64)
    return _batch_exclusive(_off_diagonal(dist, D + 1), D + 1, k, P[None, :])[0]


def _batch_exclusive(d_off, big, k, profiles):
    m, n = profiles.shape
    out = np.empty((m, n, k), dtype=np.int64)
    for o in range(k):
        mask = (profiles == o)[:, None, :]
        out[:, :, o] = np.where(mask, d_off[None, :, :], big).min(axis=2)
    return out


def _costs_and_nash(excl, profiles, check_nash):
    held = np.take_along_axis(excl, profiles[:, :, None], axis=2)[:, :, 0]
    costs = (excl.sum(axis=2) - held).sum(axis=1)
    if not check_nash:
        return costs, None
    nash = (held == excl.max(axis=2)).all(axis=1)
    return costs, nash


def batch_social_cost(dist, D, k, profiles):
    profiles = np.ascontiguousarray(profiles, dtype=np.int64)
    m, n = profiles.shape
    d_off = _off_diagonal(dist, D + 1)
    step = max(1, _CHUNK_CELLS // (n * n))
    out = np.empty(m, dtype=np.int64)
    for lo in range(0, m, step):
        chunk = profiles[lo:lo + step]
        out[lo:lo + step] = _costs_and_nash(_batch_exclusive(d_off, D + 1, k, chunk), chunk, False)[0]
    return out


def decode_profiles(start, stop, n, k):
    idx = np.arange(start, stop, dtype=np.int64)
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % k


def scan_profiles(dist, D, k, start, stop, check_nash):
    """Social cost (and Nash flag) of profiles ``start..stop-1`` in lexicographic order.

    Profile index ``t`` holds resource ``(t // k**(n-1-i)) % k`` at node ``i``.
    """
    n = dist.shape[0]
    d_off = _off_diagonal(dist, D + 1)
    m = stop - start
    costs = np.empty(m, dtype=np.int64)
    nash = np.zeros(m, dtype=np.uint8)
    step = max(1, _CHUNK_CELLS // (n * n * max(k, 1)))
    for lo in range(start, stop, step):
        hi = min(stop, lo + step)
        chunk = decode_profiles(lo, hi, n, k)
        c, ne = _costs_and_nash(_batch_exclusive(d_off, D + 1, k, chunk), chunk, check_nash)
        costs[lo - start:hi - start] = c
        if check_nash:
            nash[lo - start:hi - start] = ne
    return costs, nash
