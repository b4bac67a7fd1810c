"""Integer enumeration kernels.

All kernels work on an integer matrix M and evaluate V(x) = (q*x + p)^T M (q*x + p)
over integer x.  Callers scale a rational form and shift into this shape, so every
comparison inside a kernel is exact integer arithmetic.

Two backends share one interface: numba-compiled loops and vectorized numpy.  The
backend is picked by the GAMMA14_BACKEND environment variable ("numba" or "numpy");
numba is the default when it imports cleanly.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

INT_LIMIT = 2 ** 62

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def backend() -> str:
    choice = os.environ.get("GAMMA14_BACKEND", "numba" if HAVE_NUMBA else "numpy").lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(f"GAMMA14_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba" and not HAVE_NUMBA:
        return "numpy"
    return choice


class KernelOverflow(ArithmeticError):
    pass


def check_range(M: np.ndarray, p: np.ndarray, q: int, radius: int) -> None:
    """Raise KernelOverflow if V could leave the int64 range on the box."""
    span = q * radius + int(np.max(np.abs(p))) if len(p) else q * radius
    total = int(np.sum(np.abs(M.astype(object)))) * span * span
    if total >= INT_LIMIT:
        raise KernelOverflow("scaled form too large for 64-bit enumeration")


# ---------------------------------------------------------------- numba loops

if HAVE_NUMBA:

    @njit(cache=True)
    def _value(M, p, q, x, y):
        n = x.shape[0]
        for i in range(n):
            y[i] = q * x[i] + p[i]
        v = 0
        for i in range(n):
            s = 0
            for j in range(n):
                s += M[i, j] * y[j]
            v += y[i] * s
        return v

    @njit(cache=True)
    def _advance(x, lo, hi):
        # odometer step; returns False after the last vector
        n = x.shape[0]
        for i in range(n - 1, -1, -1):
            if x[i] < hi:
                x[i] += 1
                return True
            x[i] = lo
        return False

    @njit(cache=True)
    def _on_shell(x, r):
        m = 0
        for i in range(x.shape[0]):
            a = abs(x[i])
            if a > m:
                m = a
        return m == r

    @njit(cache=True)
    def _nb_zero_shell(M, r, cap):
        n = M.shape[0]
        out = np.zeros((cap, n), dtype=np.int64)
        k = 0
        x = np.full(n, -r, dtype=np.int64)
        y = np.zeros(n, dtype=np.int64)
        p = np.zeros(n, dtype=np.int64)
        more = True
        while more:
            if _on_shell(x, r):
                lead = 0
                for i in range(n):
                    if x[i] != 0:
                        lead = x[i]
                        break
                if lead > 0 and _value(M, p, 1, x, y) == 0:
                    if k < cap:
                        out[k, :] = x
                    k += 1
            more = _advance(x, -r, r)
        return out[: min(k, cap)], k

    @njit(cache=True)
    def _nb_shell_hits(M, p, q, r, vmax, cap):
        n = M.shape[0]
        out = np.zeros((cap, n), dtype=np.int64)
        vals = np.zeros(cap, dtype=np.int64)
        k = 0
        x = np.full(n, -r, dtype=np.int64)
        y = np.zeros(n, dtype=np.int64)
        more = True
        while more:
            if _on_shell(x, r):
                v = _value(M, p, q, x, y)
                if v > 0 and v <= vmax:
                    if k < cap:
                        out[k, :] = x
                        vals[k] = v
                    k += 1
            more = _advance(x, -r, r)
        m = min(k, cap)
        return out[:m], vals[:m], k

    @njit(cache=True)
    def _advance_box(x, lo, hi):
        n = x.shape[0]
        for i in range(n - 1, -1, -1):
            if x[i] < hi[i]:
                x[i] += 1
                return True
            x[i] = lo[i]
        return False

    @njit(cache=True)
    def _nb_box_min(M, p, q, lo, hi, cap):
        n = M.shape[0]
        x = lo.copy()
        y = np.zeros(n, dtype=np.int64)
        best = -1
        more = True
        while more:
            v = _value(M, p, q, x, y)
            if v > 0 and (best < 0 or v < best):
                best = v
            more = _advance_box(x, lo, hi)
        out = np.zeros((cap, n), dtype=np.int64)
        k = 0
        if best > 0:
            x[:] = lo
            more = True
            while more:
                if _value(M, p, q, x, y) == best:
                    if k < cap:
                        out[k, :] = x
                    k += 1
                more = _advance_box(x, lo, hi)
        return best, out[: min(k, cap)], k


# ---------------------------------------------------------------- numpy paths


def _chunks(n: int, lo, hi):
    """Yield integer point blocks covering the box, vectorized over the last coordinates.

    lo and hi are scalars or per-coordinate sequences.
    """
    lo = [lo] * n if np.isscalar(lo) else [int(v) for v in lo]
    hi = [hi] * n if np.isscalar(hi) else [int(v) for v in hi]
    inner = min(n, 3)
    axes = [np.arange(lo[i], hi[i] + 1, dtype=np.int64) for i in range(n - inner, n)]
    grids = np.meshgrid(*axes, indexing="ij")
    tail = np.stack([g.ravel() for g in grids], axis=1)
    heads = [range(lo[i], hi[i] + 1) for i in range(n - inner)]
    for head in itertools.product(*heads):
        block = np.empty((tail.shape[0], n), dtype=np.int64)
        if n > inner:
            block[:, : n - inner] = np.asarray(head, dtype=np.int64)
        block[:, n - inner:] = tail
        yield block


def _np_values(M, p, q, block):
    y = q * block + p
    return np.einsum("ki,ij,kj->k", y, M, y)


def _np_zero_shell(M, r, cap):
    n = M.shape[0]
    found = []
    zero = np.zeros(n, dtype=np.int64)
    for block in _chunks(n, -r, r):
        block = block[np.max(np.abs(block), axis=1) == r]
        if not len(block):
            continue
        nz = block != 0
        first = np.argmax(nz, axis=1)
        block = block[block[np.arange(len(block)), first] > 0]
        if len(block):
            found.append(block[_np_values(M, zero, 1, block) == 0])
    allz = np.concatenate(found) if found else np.zeros((0, n), dtype=np.int64)
    return allz[:cap], len(allz)


def _np_shell_hits(M, p, q, r, vmax, cap):
    n = M.shape[0]
    xs, vs = [], []
    for block in _chunks(n, -r, r):
        block = block[np.max(np.abs(block), axis=1) == r]
        if not len(block):
            continue
        v = _np_values(M, p, q, block)
        keep = (v > 0) & (v <= vmax)
        if keep.any():
            xs.append(block[keep])
            vs.append(v[keep])
    if not xs:
        return np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64), 0
    x = np.concatenate(xs)
    v = np.concatenate(vs)
    return x[:cap], v[:cap], len(x)


def _np_box_min(M, p, q, lo, hi, cap):
    n = M.shape[0]
    best = -1
    for block in _chunks(n, lo, hi):
        v = _np_values(M, p, q, block)
        pos = v[v > 0]
        if len(pos):
            m = int(pos.min())
            if best < 0 or m < best:
                best = m
    hits = []
    if best > 0:
        for block in _chunks(n, lo, hi):
            v = _np_values(M, p, q, block)
            hits.append(block[v == best])
    allh = np.concatenate(hits) if hits else np.zeros((0, n), dtype=np.int64)
    return best, allh[:cap], len(allh)


# ---------------------------------------------------------------- dispatch


def zero_shell(M: np.ndarray, r: int, cap: int = 4096):
    """Nonzero x with sup-norm r, first nonzero entry positive, and x^T M x = 0."""
    M = np.ascontiguousarray(M, dtype=np.int64)
    check_range(M, np.zeros(M.shape[0], dtype=np.int64), 1, r)
    if backend() == "numba":
        return _nb_zero_shell(M, r, cap)
    return _np_zero_shell(M, r, cap)


def shell_hits(M: np.ndarray, p: np.ndarray, q: int, r: int, vmax: int, cap: int = 4096):
    """Points of sup-norm r with 0 < V(x) <= vmax, plus their values and the total count."""
    M = np.ascontiguousarray(M, dtype=np.int64)
    p = np.ascontiguousarray(p, dtype=np.int64)
    check_range(M, p, q, r)
    if backend() == "numba":
        return _nb_shell_hits(M, p, q, r, vmax, cap)
    return _np_shell_hits(M, p, q, r, vmax, cap)


def box_min(M: np.ndarray, p: np.ndarray, q: int, radius, cap: int = 4096):
    """Least positive V over a box, with its minimizers in odometer order.

    radius is an int (the cube |x_i| <= radius) or a pair of per-coordinate
    bound sequences (lo, hi).
    """
    M = np.ascontiguousarray(M, dtype=np.int64)
    p = np.ascontiguousarray(p, dtype=np.int64)
    n = M.shape[0]
    if np.isscalar(radius):
        lo = np.full(n, -int(radius), dtype=np.int64)
        hi = np.full(n, int(radius), dtype=np.int64)
    else:
        lo = np.asarray(radius[0], dtype=np.int64)
        hi = np.asarray(radius[1], dtype=np.int64)
    if lo.shape != (n,) or hi.shape != (n,) or np.any(lo > hi):
        raise ValueError("box bounds must be per-coordinate with lo <= hi")
    check_range(M, p, q, int(max(np.max(np.abs(lo)), np.max(np.abs(hi)))))
    if backend() == "numba":
        return _nb_box_min(M, p, q, lo, hi, cap)
    return _np_box_min(M, p, q, lo, hi, cap)
