"""Hot numeric loops with a numba fast path and a pure-numpy fallback.

The two kernels that dominate runtime are the bilinear quadrature sum
(cells x pairs-of-cells) and the per-cube mean-oscillation table used by
the sharp maximal operator. Both exist twice: an @njit loop version and
a vectorized numpy version. The backend is chosen at import time from
the BMO_LAB_NUMBA environment variable ("0"/"false" disables numba) and
can be switched at runtime with set_backend(), which the benchmark and
the backend-agreement tests use.

Index convention for difference tables: ktab[i, j] holds the kernel at
cell difference (i - (N-1), j - (N-1)); the caller zeroes the entry for
the excluded doubly-singular difference (0, 0).
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("BMO_LAB_NUMBA", "auto").strip().lower()

try:
    if _env in ("0", "false", "no", "off"):
        raise ImportError("numba disabled via BMO_LAB_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # no-op decorator so the loop source stays importable
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


_BACKEND = "numba" if HAVE_NUMBA else "numpy"


def set_backend(name: str) -> None:
    global _BACKEND
    if name not in ("numpy", "numba"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is unavailable or disabled")
    _BACKEND = name


def get_backend() -> str:
    return _BACKEND


# ---------------------------------------------------------------------------
# bilinear quadrature: out[x] = sum_{y1,y2} ktab[x-y1, x-y2] f1[y1] f2[y2]
# ---------------------------------------------------------------------------


@njit(cache=True)
def _bilinear_1d_nb(ktab, f1, f2, out):
    n = f1.shape[0]
    c = n - 1
    for x in range(n):
        acc = out[x]
        for y1 in range(n):
            v1 = f1[y1]
            if v1 == 0:
                continue
            i = x - y1 + c
            for y2 in range(n):
                acc += ktab[i, x - y2 + c] * v1 * f2[y2]
        out[x] = acc


def _bilinear_1d_np(ktab, f1, f2, out):
    n = f1.shape[0]
    kf = ktab[::-1, ::-1]
    for x in range(n):
        blk = kf[n - 1 - x : 2 * n - 1 - x, n - 1 - x : 2 * n - 1 - x]
        out[x] = f1 @ blk @ f2


@njit(cache=True)
def _bilinear_2d_nb(ktab, f1, f2, out):
    n = f1.shape[0]
    c = n - 1
    for xi in range(n):
        for xj in range(n):
            acc = out[xi, xj]
            for ai in range(n):
                for aj in range(n):
                    v1 = f1[ai, aj]
                    if v1 == 0:
                        continue
                    d1i = xi - ai + c
                    d1j = xj - aj + c
                    for bi in range(n):
                        d2i = xi - bi + c
                        for bj in range(n):
                            acc += ktab[d1i, d1j, d2i, d2j] * v1 * f2[bi, bj]
            out[xi, xj] = acc


def _bilinear_2d_np(ktab, f1, f2, out):
    n = f1.shape[0]
    kf = ktab[::-1, ::-1, ::-1, ::-1]
    for xi in range(n):
        si = slice(n - 1 - xi, 2 * n - 1 - xi)
        for xj in range(n):
            sj = slice(n - 1 - xj, 2 * n - 1 - xj)
            blk = kf[si, sj, si, sj]
            out[xi, xj] = np.einsum("abcd,ab,cd->", blk, f1, f2)


@njit(cache=True)
def _bilinear_1d_periodic_nb(ktab, f1, f2, out):
    n = f1.shape[0]
    for x in range(n):
        acc = out[x]
        for y1 in range(n):
            v1 = f1[y1]
            if v1 == 0:
                continue
            i = (x - y1) % n
            for y2 in range(n):
                acc += ktab[i, (x - y2) % n] * v1 * f2[y2]
        out[x] = acc


def _bilinear_1d_periodic_np(ktab, f1, f2, out):
    n = f1.shape[0]
    idx = np.arange(n)
    for x in range(n):
        blk = ktab[np.ix_((x - idx) % n, (x - idx) % n)]
        out[x] = f1 @ blk @ f2


def _bilinear_2d_periodic_np(ktab, f1, f2, out):
    n = f1.shape[0]
    idx = np.arange(n)
    for xi in range(n):
        mi = (xi - idx) % n
        for xj in range(n):
            mj = (xj - idx) % n
            blk = ktab[np.ix_(mi, mj, mi, mj)]
            out[xi, xj] = np.einsum("abcd,ab,cd->", blk, f1, f2)


def bilinear_apply(ktab, f1, f2, periodic: bool = False):
    """Quadrature sum over all cell pairs; h**(2*dim) scaling is the caller's."""
    dtype = np.result_type(ktab, f1, f2)
    out = np.zeros(f1.shape, dtype=dtype)
    f1 = np.ascontiguousarray(f1, dtype=dtype)
    f2 = np.ascontiguousarray(f2, dtype=dtype)
    ktab = np.ascontiguousarray(ktab, dtype=dtype)
    if f1.ndim == 1:
        if periodic:
            if _BACKEND == "numba":
                _bilinear_1d_periodic_nb(ktab, f1, f2, out)
            else:
                _bilinear_1d_periodic_np(ktab, f1, f2, out)
        else:
            if _BACKEND == "numba":
                _bilinear_1d_nb(ktab, f1, f2, out)
            else:
                _bilinear_1d_np(ktab, f1, f2, out)
    elif f1.ndim == 2:
        if periodic:
            # table gather dominates here; numpy fancy indexing is already fine
            _bilinear_2d_periodic_np(ktab, f1, f2, out)
        else:
            if _BACKEND == "numba":
                _bilinear_2d_nb(ktab, f1, f2, out)
            else:
                _bilinear_2d_np(ktab, f1, f2, out)
    else:
        raise ValueError("bilinear_apply supports dim 1 and 2 only")
    return out


# ---------------------------------------------------------------------------
# per-cube mean oscillation tables: mean(|g - mean(g on Q)|) for each cube
# ---------------------------------------------------------------------------


@njit(cache=True)
def _cube_osc_1d_nb(vals, anchors, sides, out):
    for c in range(anchors.shape[0]):
        a = anchors[c, 0]
        w = sides[c]
        m = 0.0
        for i in range(a, a + w):
            m += vals[i]
        m /= w
        acc = 0.0
        for i in range(a, a + w):
            acc += abs(vals[i] - m)
        out[c] = acc / w


def _cube_osc_1d_np(vals, anchors, sides, out):
    for c in range(anchors.shape[0]):
        seg = vals[anchors[c, 0] : anchors[c, 0] + sides[c]]
        out[c] = np.mean(np.abs(seg - seg.mean()))


@njit(cache=True)
def _cube_osc_2d_nb(vals, anchors, sides, out):
    for c in range(anchors.shape[0]):
        ai = anchors[c, 0]
        aj = anchors[c, 1]
        w = sides[c]
        m = 0.0
        for i in range(ai, ai + w):
            for j in range(aj, aj + w):
                m += vals[i, j]
        m /= w * w
        acc = 0.0
        for i in range(ai, ai + w):
            for j in range(aj, aj + w):
                acc += abs(vals[i, j] - m)
        out[c] = acc / (w * w)


def _cube_osc_2d_np(vals, anchors, sides, out):
    for c in range(anchors.shape[0]):
        ai, aj = anchors[c, 0], anchors[c, 1]
        w = sides[c]
        blk = vals[ai : ai + w, aj : aj + w]
        out[c] = np.mean(np.abs(blk - blk.mean()))


def cube_oscillation(vals, anchors, sides):
    """Mean absolute deviation from the cube mean, one entry per cube."""
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    anchors = np.ascontiguousarray(anchors, dtype=np.int64)
    sides = np.ascontiguousarray(sides, dtype=np.int64)
    out = np.empty(anchors.shape[0], dtype=np.float64)
    if vals.ndim == 1:
        if _BACKEND == "numba":
            _cube_osc_1d_nb(vals, anchors, sides, out)
        else:
            _cube_osc_1d_np(vals, anchors, sides, out)
    elif vals.ndim == 2:
        if _BACKEND == "numba":
            _cube_osc_2d_nb(vals, anchors, sides, out)
        else:
            _cube_osc_2d_np(vals, anchors, sides, out)
    else:
        raise ValueError("cube_oscillation supports dim 1 and 2 only")
    return out
