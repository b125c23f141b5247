"""Muckenhoupt weight constants and generators of admissible weights.

The two constants are finite-family surrogates for the usual suprema:

    ap_constant: max over cubes of avg(w, Q) * avg(w**(-1/(p-1)), Q)**(p-1)
    a1_constant: max over cubes of avg(w, Q) * max over Q of 1/w

The essential supremum of 1/w over a cube is exactly the max over its
cell values on the discrete measure. Both constants are cached per
(weight, family) pair, keyed by content digests, because the harness
recomputes them for every experiment report.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import ConfigurationError
from .grids import CubeFamily, Grid, GridFunction, cube_mins, cube_sums, weighted_measure


class Weight:
    """Strictly positive grid function with cached Muckenhoupt constants."""

    __slots__ = ("fn", "_cache")

    def __init__(self, fn: GridFunction):
        if np.iscomplexobj(fn.values):
            raise ValueError("weights must be real-valued")
        if not np.all(fn.values > 0):
            raise ValueError("weights must be strictly positive everywhere")
        self.fn = fn
        # concurrent fills are safe: values for a given key are identical
        self._cache = {}

    @property
    def grid(self) -> Grid:
        return self.fn.grid

    @property
    def values(self) -> np.ndarray:
        return self.fn.values

    def measure(self, cube) -> float:
        return weighted_measure(self.fn, cube)

    def digest(self) -> str:
        return hashlib.sha256(self.fn.values.tobytes()).hexdigest()[:16]

    def _cached(self, key, compute):
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]


def _family_averages(values: np.ndarray, cubes: CubeFamily):
    anchors = cubes.anchors_array()
    sides = cubes.sides_array()
    counts = sides.astype(float) ** cubes.grid.dim
    return cube_sums(values, anchors, sides) / counts, anchors, sides


def ap_constant(w: Weight, p: float, cubes: CubeFamily) -> float:
    """Largest averaged product avg(w) * avg(w**(-1/(p-1)))**(p-1) over the family."""
    if not p > 1:
        raise ValueError(f"ap_constant needs p > 1, got {p} (use a1_constant at the endpoint)")
    if cubes.grid != w.grid:
        raise ConfigurationError("cube family and weight live on different grids")

    def compute():
        avg_w, anchors, sides = _family_averages(w.values, cubes)
        counts = sides.astype(float) ** cubes.grid.dim
        dual = w.values ** (-1.0 / (p - 1.0))
        avg_dual = cube_sums(dual, anchors, sides) / counts
        return float(np.max(avg_w * avg_dual ** (p - 1.0)))

    return w._cached(("ap", float(p), cubes.digest()), compute)


def a1_constant(w: Weight, cubes: CubeFamily) -> float:
    """Largest avg(w, Q) * max over Q of 1/w over the family."""
    if cubes.grid != w.grid:
        raise ConfigurationError("cube family and weight live on different grids")

    def compute():
        avg_w, anchors, sides = _family_averages(w.values, cubes)
        inf_w = cube_mins(w.values, anchors, sides)
        return float(np.max(avg_w / inf_w))

    return w._cached(("a1", cubes.digest()), compute)


# ---------------------------------------------------------------------------
# weight generators
# ---------------------------------------------------------------------------


def make_const_weight(grid: Grid, value: float = 1.0) -> Weight:
    if not value > 0:
        raise ValueError("constant weight must be positive")
    return Weight(GridFunction.constant(grid, value))


def make_two_valued_weight(grid: Grid, left: float = 1.0, right: float = 2.0) -> Weight:
    """left value on the lower half of axis 0, right value on the upper half."""
    if not (left > 0 and right > 0):
        raise ValueError("two-valued weight needs positive values")
    vals = np.full(grid.shape, float(left))
    half = grid.cells_per_axis // 2
    vals[half:] = right
    return Weight(GridFunction(grid, vals))


def make_power_weight(grid: Grid, exponent: float, center=None) -> Weight:
    """w(x) = max(|x - center|, h)**exponent with -dim < exponent <= 0.

    The clamp at one grid spacing is part of the weight's definition,
    not an evaluation fix, so every downstream statement is checked
    against the clamped weight itself.
    """
    if exponent > 0:
        raise ValueError("positive exponents are rejected: the weight would not stay in the A1 regime")
    if exponent <= -grid.dim:
        raise ValueError(f"exponent must exceed -dim = {-grid.dim} to remain locally integrable")
    if center is None:
        center = tuple(o + grid.box_side / 2.0 for o in grid.origin)
    elif np.isscalar(center):
        center = (float(center),) * grid.dim
    dist = np.linalg.norm(grid.cell_centers() - np.asarray(center), axis=-1)
    vals = np.maximum(dist, grid.spacing) ** exponent
    return Weight(GridFunction(grid, vals))


def weight_from_preset(grid: Grid, preset: str) -> Weight:
    """Build a weight from a config string.

    Formats: "const", "const:value=2.0",
    "two-valued:left=1,right=3",
    "power:a=-0.5,center=0.25" (2D centers as "0.25x0.75").
    """
    name, _, rest = preset.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ConfigurationError(f"malformed weight preset parameter {item!r}")
            params[key.strip()] = val.strip()
    name = name.strip().lower()
    if name == "const":
        return make_const_weight(grid, float(params.pop("value", 1.0)))
    if name == "two-valued":
        return make_two_valued_weight(
            grid, float(params.pop("left", 1.0)), float(params.pop("right", 2.0))
        )
    if name == "power":
        exponent = float(params.pop("a"))
        center = params.pop("center", None)
        if center is not None:
            center = tuple(float(c) for c in center.split("x"))
            if len(center) == 1:
                center = center[0]
        return make_power_weight(grid, exponent, center)
    raise ConfigurationError(f"unknown weight preset {preset!r}")
