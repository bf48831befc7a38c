"""Dense modular elimination kernels.

Both a numba-compiled and a plain numpy implementation are kept.  The
numpy path is used when numba is missing or ``MATCHTOR_DISABLE_NUMBA`` is
set to a non-empty value other than ``0``; tests force either path with
:func:`use_numba`.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_env = os.environ.get("MATCHTOR_DISABLE_NUMBA", "")
_enabled = HAVE_NUMBA and _env in ("", "0")


def numba_enabled() -> bool:
    return _enabled


def use_numba(flag: bool) -> None:
    global _enabled
    _enabled = bool(flag) and HAVE_NUMBA


def rank_mod_p_numpy(a: np.ndarray, p: int) -> int:
    """Rank of ``a`` over GF(p); ``a`` is overwritten."""
    m, n = a.shape
    a %= p
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = (a[r, c:] * inv) % p
        below = a[r + 1:, c].copy()
        rows = np.flatnonzero(below)
        if rows.size:
            rows += r + 1
            a[rows, c:] = (a[rows, c:] - np.outer(a[rows, c], a[r, c:])) % p
        r += 1
    return r


def _rank_mod_p_loops(a, p):
    m, n = a.shape
    for i in range(m):
        for j in range(n):
            a[i, j] %= p
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, n):
                t = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = t
        # inverse by Fermat: v^(p-2)
        v = a[r, c]
        inv = 1
        e = p - 2
        base = v
        while e > 0:
            if e & 1:
                inv = (inv * base) % p
            base = (base * base) % p
            e >>= 1
        for j in range(c, n):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(r + 1, m):
            f = a[i, c]
            if f != 0:
                for j in range(c, n):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
        r += 1
    return r


if HAVE_NUMBA:
    _rank_mod_p_jit = numba.njit(cache=True)(_rank_mod_p_loops)
else:  # pragma: no cover
    _rank_mod_p_jit = None


def rank_mod_p_dense(a: np.ndarray, p: int) -> int:
    """Rank over GF(p) of an int64 array, which is overwritten.  ``p`` must
    be below 2**31 so that products fit in int64."""
    if p >= 1 << 31:
        raise ValueError("prime too large for the int64 kernels")
    a = np.ascontiguousarray(a, dtype=np.int64)
    if a.size == 0:
        return 0
    if _enabled:
        return int(_rank_mod_p_jit(a, np.int64(p)))
    return rank_mod_p_numpy(a, p)
