"""Lebesgue, weak-type, Morrey, and mean-oscillation norms on grid functions.

All integrals are midpoint sums. The weak quasi-norm takes its supremum
only over achieved levels of |f|, evaluated just below each level, which
is exact for step data: no lambda discretization is involved anywhere.

Four oscillation norms share one driver, bmo_norm:

    strong(p)        mu-power-mean of |f - f_Q| / w at exponent p
    weak(p)          weak-type version of the same quantity, p > 1
    inf_centered(r)  best-constant version at exponent r in (0, 1)
    stromberg(s)     unweighted rearrangement version, s in (0, 1/2]

The inner infimum over the centering constant is solved by scanning the
cell values of f on the cube plus midpoints between consecutive sorted
values, followed by one golden-section polish between the neighbors of
the best candidate. For r < 1 the objective is concave between data
values, so the data values already bracket the true minimum; the polish
is kept for uniformity. Ties break to the smaller center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grids import Cube, CubeFamily, GridFunction, check_cube
from .weights import Weight

_GOLDEN_TOL = 1e-10


@dataclass(frozen=True)
class BmoVariant:
    """Which oscillation norm to compute, and its exponent parameter."""

    kind: str
    param: float

    def __post_init__(self):
        k, p = self.kind, self.param
        if k == "strong":
            ok = 0 < p < np.inf
        elif k == "weak":
            ok = 1 < p < np.inf
        elif k == "inf_centered":
            ok = 0 < p < 1
        elif k == "stromberg":
            ok = 0 < p <= 0.5
        else:
            raise ValueError(f"unknown variant kind {self.kind!r}")
        if not ok:
            raise ValueError(f"parameter {p} is out of range for variant {k!r}")

    @classmethod
    def strong(cls, p: float) -> "BmoVariant":
        return cls("strong", float(p))

    @classmethod
    def weak(cls, p: float) -> "BmoVariant":
        return cls("weak", float(p))

    @classmethod
    def inf_centered(cls, r: float) -> "BmoVariant":
        return cls("inf_centered", float(r))

    @classmethod
    def stromberg(cls, s: float) -> "BmoVariant":
        return cls("stromberg", float(s))

    def describe(self) -> str:
        return f"{self.kind}({self.param:g})"


@dataclass(frozen=True)
class NormReport:
    """A norm value together with the cube attaining the outer supremum."""

    value: float
    witness: Cube
    variant: BmoVariant
    family_kind: str
    family_descriptor: str

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant.kind,
            "parameter": self.variant.param,
            "value": self.value,
            "witness_anchor": list(self.witness.anchor),
            "witness_side": self.witness.side_cells,
            "family_kind": self.family_kind,
        }


# ---------------------------------------------------------------------------
# global norms
# ---------------------------------------------------------------------------


def lp_norm(f: GridFunction, w: Weight, p: float) -> float:
    """(h**dim * sum(|f|**p * w))**(1/p)."""
    if not p > 0:
        raise ValueError(f"lp_norm needs p > 0, got {p}")
    hd = f.grid.spacing**f.grid.dim
    return float((hd * np.sum(np.abs(f.values) ** p * w.values)) ** (1.0 / p))


def _weak_quasinorm(g: np.ndarray, wv: np.ndarray, p: float) -> float:
    """sup over achieved positive levels v of v * mass({g >= v})**(1/p).

    Evaluating the distribution just below each achieved level turns the
    supremum over all lambda into this finite max. mass is the plain
    w-sum; callers scale by h**dim or normalize by the cube mass.
    """
    order = np.argsort(g, kind="stable")
    gs = g[order]
    ws = wv[order]
    suffix = np.cumsum(ws[::-1])[::-1]  # suffix[i] = sum of w over {g >= gs[i]} and ties to the right
    pos = gs > 0
    if not pos.any():
        return 0.0
    vals = gs[pos] * suffix[pos] ** (1.0 / p)
    return float(vals.max())


def weak_lp_norm(f: GridFunction, w: Weight, p: float) -> float:
    """Weak quasi-norm: sup of lambda * w({|f| > lambda})**(1/p), exact on step data."""
    if not p > 0:
        raise ValueError(f"weak_lp_norm needs p > 0, got {p}")
    hd = f.grid.spacing**f.grid.dim
    g = np.abs(f.values).ravel()
    wv = w.values.ravel() * hd
    return _weak_quasinorm(g, wv, p)


def morrey_norm(f: GridFunction, w: Weight, p: float, q: float, cubes: CubeFamily) -> float:
    """max over cubes of w(Q)**(1/p - 1/q) * (integral of |f|**q w over Q)**(1/q)."""
    if not (0 < q < p):
        raise ValueError(f"morrey_norm needs 0 < q < p, got q={q}, p={p}")
    if cubes.grid != f.grid:
        raise ConfigurationError("cube family and function live on different grids")
    hd = f.grid.spacing**f.grid.dim
    best = 0.0
    gq = np.abs(f.values) ** q
    for cube in cubes:
        sl = cube.slices
        wq = hd * w.values[sl].sum()
        integ = hd * (gq[sl] * w.values[sl]).sum()
        best = max(best, wq ** (1.0 / p - 1.0 / q) * integ ** (1.0 / q))
    return float(best)


def layer_cake_lp_power(g: GridFunction, w: Weight, p: float) -> float:
    """p * integral over lambda of lambda**(p-1) * w({g > lambda}), as an exact finite sum.

    Equals lp_norm(g, w, p)**p for non-negative g; both sides are exact
    on the discrete measure, which is the identity the weak/strong
    comparisons rely on.
    """
    if not p > 0:
        raise ValueError("needs p > 0")
    if np.any(g.values < 0):
        raise ValueError("layer-cake form assumes a non-negative function")
    hd = g.grid.spacing**g.grid.dim
    gv = g.values.ravel()
    wv = (w.values * hd).ravel()
    order = np.argsort(gv, kind="stable")
    gs = gv[order]
    ws = wv[order]
    suffix = np.cumsum(ws[::-1])[::-1]
    levels, first_idx = np.unique(gs, return_index=True)
    masses = suffix[first_idx]  # w({g >= level})
    if levels[0] == 0.0:
        levels = levels[1:]
        masses = masses[1:]
    prev = np.concatenate([[0.0], levels[:-1]])
    return float(np.sum((levels**p - prev**p) * masses))


# ---------------------------------------------------------------------------
# inner infimum over the centering constant
# ---------------------------------------------------------------------------


def _center_candidates(values: np.ndarray) -> np.ndarray:
    vals = np.unique(values)
    if vals.size == 1:
        return vals
    mids = 0.5 * (vals[:-1] + vals[1:])
    return np.sort(np.concatenate([vals, mids]))


def _golden_polish(objective, lo: float, hi: float):
    """Golden-section scan of a bracket; returns (c, objective(c))."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = objective(c), objective(d)
    while (b - a) > _GOLDEN_TOL * max(1.0, abs(lo), abs(hi)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = objective(d)
    return (c, fc) if fc <= fd else (d, fd)


def _scan_center(values: np.ndarray, objective_vec, polish: bool = True):
    """Minimize over candidate centers; ties break to the smaller center.

    objective_vec maps an array of centers to an array of objective values.
    """
    cands = _center_candidates(values)
    objs = objective_vec(cands)
    best = int(np.argmin(objs))  # first minimum = smallest center on the sorted grid
    c_best, f_best = float(cands[best]), float(objs[best])
    if polish and cands.size > 1:
        lo = cands[max(best - 1, 0)]
        hi = cands[min(best + 1, cands.size - 1)]
        if hi > lo:
            c_pol, f_pol = _golden_polish(lambda c: float(objective_vec(np.array([c]))[0]), lo, hi)
            if f_pol < f_best:
                c_best, f_best = c_pol, f_pol
    return c_best, f_best


def _chunked_abs_power_sum(values, cands, r, weights):
    """sum_i |values_i - c|**r * weights_i for every candidate c, chunked for memory."""
    out = np.empty(cands.size)
    step = max(1, int(4e6 // max(values.size, 1)))
    for s in range(0, cands.size, step):
        block = cands[s : s + step, None]
        out[s : s + step] = np.abs(values[None, :] - block) ** r @ weights
    return out


def minimizing_center(f: GridFunction, w: Weight, cube: Cube, r: float) -> float:
    """Center c minimizing the cube integral of (|f - c| / w)**r against w dx."""
    if not (0 < r < 1):
        raise ValueError(f"minimizing_center needs r in (0, 1), got {r}")
    check_cube(f.grid, cube)
    fv = f.values[cube.slices].ravel()
    wv = w.values[cube.slices].ravel()
    weights = wv ** (1.0 - r)  # (1/w)**r * w = w**(1-r)

    def objective_vec(cands):
        return _chunked_abs_power_sum(fv, cands, r, weights)

    c, _ = _scan_center(fv, objective_vec)
    return float(c)


def _stromberg_level(dev: np.ndarray, s: float) -> float:
    """Smallest t with #{|f - c| > t} < s * (cell count); dev = |f - c| over the cube."""
    m = dev.size
    thresh = s * m
    if np.count_nonzero(dev > 0) < thresh:
        return 0.0
    asc = np.sort(dev)
    counts = m - np.searchsorted(asc, asc, side="right")  # #{dev > asc[i]}
    ok = counts < thresh
    return float(asc[np.argmax(ok)])  # first True: asc is sorted, counts non-increasing


# ---------------------------------------------------------------------------
# per-cube oscillation quantities
# ---------------------------------------------------------------------------


def _cube_strong(fv, wv, p) -> float:
    m = fv.mean()
    return float((np.sum(np.abs(fv - m) ** p * wv ** (1.0 - p)) / wv.sum()) ** (1.0 / p))


def _cube_weak(fv, wv, p) -> float:
    m = fv.mean()
    g = np.abs(fv - m) / wv
    return _weak_quasinorm(g, wv, p) / wv.sum() ** (1.0 / p)


def _cube_inf_centered(fv, wv, r) -> float:
    weights = wv ** (1.0 - r)
    total = wv.sum()

    def objective_vec(cands):
        return _chunked_abs_power_sum(fv, cands, r, weights)

    _, obj = _scan_center(fv, objective_vec)
    return float((obj / total) ** (1.0 / r))


def _cube_stromberg(fv, s) -> float:
    def objective_vec(cands):
        return np.array([_stromberg_level(np.abs(fv - c), s) for c in cands])

    _, obj = _scan_center(fv, objective_vec, polish=False)
    return float(obj)


def cube_oscillation_value(f: GridFunction, w: Weight, cube: Cube, variant: BmoVariant) -> float:
    """The per-cube quantity whose max over the family is the norm."""
    check_cube(f.grid, cube)
    fv = f.values[cube.slices].ravel()
    wv = w.values[cube.slices].ravel()
    if variant.kind == "strong":
        return _cube_strong(fv, wv, variant.param)
    if variant.kind == "weak":
        return _cube_weak(fv, wv, variant.param)
    if variant.kind == "inf_centered":
        return _cube_inf_centered(fv, wv, variant.param)
    return _cube_stromberg(fv, variant.param)  # unweighted by definition


def bmo_norm(f: GridFunction, w: Weight, variant: BmoVariant, cubes: CubeFamily) -> NormReport:
    """Max over the family of the per-cube oscillation; the witness cube is recorded.

    Ties break to the earliest cube in family order, so reports are
    reproducible under any parallel evaluation schedule.
    """
    if np.iscomplexobj(f.values):
        raise ValueError("oscillation norms are defined for real-valued functions")
    if cubes.grid != f.grid:
        raise ConfigurationError("cube family and function live on different grids")
    values = np.array([cube_oscillation_value(f, w, c, variant) for c in cubes])
    best = int(np.argmax(values))
    return NormReport(
        value=float(values[best]),
        witness=cubes[best],
        variant=variant,
        family_kind=cubes.kind,
        family_descriptor=cubes.descriptor,
    )
