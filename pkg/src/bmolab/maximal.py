"""Maximal operators over a cube family, plus the Fefferman-Stein ratio.

Every kind consumes |f|. "Q contains x" means cube-contains-cell, and
the supremum runs over family cubes only, matching the norms module so
that pointwise comparisons downstream compare like with like.

Kinds:

    hl             max over Q containing x of avg(|f|, Q)
    weighted       same with the w-average: sum(|f| w) / sum(w)
    sharp          max over Q of avg(| |f| - avg(|f|, Q) |, Q)
    hl_delta(d)    hl applied to |f|**d, then the d-th root
    sharp_delta(d) sharp applied to |f|**d, then the d-th root
    weighted_s(s)  weighted applied to |f|**s, then the s-th root, s > 1

Two evaluation paths exist. The production path computes one value per
cube (prefix sums for averages, a compiled loop for oscillations) and
scatters cube values to cells: for the dyadic family each level is a
plain block-repeat, for sliding families each cube max-assigns its
slice. The naive path builds the full cell-by-cube membership matrix
and reduces per cell; it costs O(cells * cubes) and serves as the
oracle the fast path is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigurationError, DegenerateInputError
from .grids import CubeFamily, GridFunction, cube_sums
from .norms import lp_norm
from .weights import Weight

_WEIGHTED_KINDS = ("weighted", "weighted_s")


@dataclass(frozen=True)
class MaximalKind:
    kind: str
    param: float = 1.0

    def __post_init__(self):
        if self.kind not in ("hl", "weighted", "sharp", "hl_delta", "sharp_delta", "weighted_s"):
            raise ValueError(f"unknown maximal kind {self.kind!r}")
        if self.kind in ("hl_delta", "sharp_delta") and not self.param > 0:
            raise ValueError("delta must be positive")
        if self.kind == "weighted_s" and not self.param > 1:
            raise ValueError("weighted_s needs s > 1")

    @classmethod
    def hl(cls):
        return cls("hl")

    @classmethod
    def weighted(cls):
        return cls("weighted")

    @classmethod
    def sharp(cls):
        return cls("sharp")

    @classmethod
    def hl_delta(cls, delta: float):
        return cls("hl_delta", float(delta))

    @classmethod
    def sharp_delta(cls, delta: float):
        return cls("sharp_delta", float(delta))

    @classmethod
    def weighted_s(cls, s: float):
        return cls("weighted_s", float(s))

    @property
    def power(self) -> float:
        return self.param if self.kind in ("hl_delta", "sharp_delta", "weighted_s") else 1.0

    @property
    def needs_weight(self) -> bool:
        return self.kind in _WEIGHTED_KINDS


def _cube_values(g: np.ndarray, kind: MaximalKind, w, cubes: CubeFamily, inf_centered: bool):
    anchors = cubes.anchors_array()
    sides = cubes.sides_array()
    counts = sides.astype(float) ** cubes.grid.dim
    base = kind.kind
    if base in ("hl", "hl_delta"):
        return cube_sums(g, anchors, sides) / counts
    if base in ("weighted", "weighted_s"):
        return cube_sums(g * w.values, anchors, sides) / cube_sums(w.values, anchors, sides)
    if inf_centered:
        # the best L1 center is a median; exact on the discrete measure
        out = np.empty(len(cubes))
        for i, cube in enumerate(cubes):
            blk = g[cube.slices]
            out[i] = np.mean(np.abs(blk - np.median(blk)))
        return out
    return _kernels.cube_oscillation(g, anchors, sides)


def _scatter_max_dyadic(values: np.ndarray, cubes: CubeFamily) -> np.ndarray:
    """Fast path: per dyadic level, cube values block-repeat onto cells."""
    grid = cubes.grid
    n = grid.cells_per_axis
    out = np.full(grid.shape, -np.inf)
    sides = cubes.sides_array()
    pos = 0
    for side in sorted(set(sides.tolist())):
        per_axis = n // side
        count = per_axis**grid.dim
        level_vals = values[pos : pos + count]
        if grid.dim == 1:
            layer = np.repeat(level_vals, side)
        else:
            layer = np.repeat(
                np.repeat(level_vals.reshape(per_axis, per_axis), side, axis=0), side, axis=1
            )
        np.maximum(out, layer, out=out)
        pos += count
    return out


def _scatter_max_slices(values: np.ndarray, cubes: CubeFamily) -> np.ndarray:
    out = np.full(cubes.grid.shape, -np.inf)
    for val, cube in zip(values, cubes):
        sl = cube.slices
        np.maximum(out[sl], val, out=out[sl])
    return out


def _scatter_max_naive(values: np.ndarray, cubes: CubeFamily) -> np.ndarray:
    """Oracle path: explicit cell-by-cube membership reduction."""
    grid = cubes.grid
    anchors = cubes.anchors_array()
    sides = cubes.sides_array()
    idx = np.indices(grid.shape).reshape(grid.dim, -1).T  # (cells, dim)
    member = np.ones((idx.shape[0], len(cubes)), dtype=bool)
    for a in range(grid.dim):
        member &= (idx[:, a : a + 1] >= anchors[None, :, a]) & (
            idx[:, a : a + 1] < anchors[None, :, a] + sides[None, :]
        )
    cellmax = np.where(member, values[None, :], -np.inf).max(axis=1)
    return cellmax.reshape(grid.shape)


def maximal(
    f: GridFunction,
    kind: MaximalKind,
    w: Weight | None = None,
    cubes: CubeFamily | None = None,
    method: str = "auto",
    inf_centered_sharp: bool = False,
) -> GridFunction:
    """Pointwise max over family cubes containing each cell.

    method: "auto" picks the block-repeat path for dyadic families and
    slice assignment otherwise; "naive" forces the membership-matrix
    oracle. inf_centered_sharp switches the sharp kinds to the
    best-constant oscillation (cross-check form, within a factor 2 of
    the mean-centered default).
    """
    if cubes is None:
        raise ConfigurationError("a cube family is required")
    if cubes.grid != f.grid:
        raise ConfigurationError("cube family and function live on different grids")
    if kind.needs_weight:
        if w is None:
            raise ConfigurationError(f"maximal kind {kind.kind!r} needs a weight")
        if w.grid != f.grid:
            raise ConfigurationError("weight and function live on different grids")
    g = np.abs(f.values)
    if kind.power != 1.0:
        g = g**kind.power
    values = _cube_values(g, kind, w, cubes, inf_centered_sharp)
    if method == "naive":
        out = _scatter_max_naive(values, cubes)
    elif method in ("auto", "fast"):
        if cubes.kind == "dyadic":
            out = _scatter_max_dyadic(values, cubes)
        else:
            out = _scatter_max_slices(values, cubes)
    else:
        raise ConfigurationError(f"unknown maximal method {method!r}")
    out = np.where(np.isneginf(out), 0.0, out)  # cells covered by no family cube
    if kind.power != 1.0:
        out = out ** (1.0 / kind.power)
    return GridFunction(f.grid, out)


def fefferman_stein_ratio(
    f: GridFunction, w: Weight, p: float, delta: float, cubes: CubeFamily
) -> float:
    """|| M_delta f ||_Lp(w) divided by || M#_delta f ||_Lp(w)."""
    if not np.any(f.values != 0):
        raise DegenerateInputError("the ratio is undefined for the zero function")
    num = lp_norm(maximal(f, MaximalKind.hl_delta(delta), cubes=cubes), w, p)
    den_fn = maximal(f, MaximalKind.sharp_delta(delta), cubes=cubes)
    den = lp_norm(den_fn, w, p)
    if den == 0.0:
        raise DegenerateInputError(
            "sharp maximal vanishes (|f| is constant on the family); ratio undefined"
        )
    return num / den
