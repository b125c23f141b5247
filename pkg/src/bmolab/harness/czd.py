"""Stopping-time decomposition and exponential decay of oscillation levels.

cz_decompose runs the dyadic stopping time for the relative oscillation
g = (|f - c0| / w)**r averaged against the measure w dx: starting from
the children of the base cube, a child is selected the first time its
mu-average of g exceeds s**r, and recursion continues otherwise down to
single cells. Selected cubes are disjoint, contained in the base cube,
and satisfy the two-sided average bound (lower bound by selection, upper
bound through the parent's controlled average); cells never covered are
exactly the cells whose singleton average stayed at or below s**r, which
is the cell-wise complement bound.

The upper cap 2**dim * s**r is inherited from the parent with the
Lebesgue doubling ratio, so it is guaranteed when the averaging measure
is unweighted and the base-cube average is at most s**r (the normalized
setting of the decay statement); for strongly varying weights the
parent-to-child mass ratio can exceed 2**dim and verify() reports
whichever bound actually holds.

The decay pipeline measures mu({|f - c| / w > t}) / mu(Q) over geometric
levels and fits log-fraction against t by least squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InsufficientDataError
from ..grids import Cube, GridFunction, check_cube
from ..norms import minimizing_center
from ..weights import Weight


@dataclass(frozen=True)
class CZDecomposition:
    base_cube: Cube
    threshold: float  # s
    exponent: float  # r
    selected: tuple
    center: float  # minimizing constant on the base cube

    def covered_mask(self, grid_shape) -> np.ndarray:
        mask = np.zeros(grid_shape, dtype=bool)
        for cube in self.selected:
            mask[cube.slices] = True
        return mask

    def verify(self, f: GridFunction, w: Weight) -> dict:
        """Re-check the four structural properties on the actual data."""
        g = (np.abs(f.values - self.center) / w.values) ** self.exponent
        mu = w.values
        level = self.threshold**self.exponent
        dim = f.grid.dim
        contained = all(self.base_cube.contains_cube(q) for q in self.selected)
        cover = np.zeros(f.grid.shape, dtype=np.int64)
        for q in self.selected:
            cover[q.slices] += 1
        disjoint = cover.max(initial=0) <= 1
        lower_ok, upper_ok = True, True
        for q in self.selected:
            avg = float((g[q.slices] * mu[q.slices]).sum() / mu[q.slices].sum())
            lower_ok &= avg > level
            upper_ok &= avg <= 2**dim * level + 1e-12 * level
        base_mask = np.zeros(f.grid.shape, dtype=bool)
        base_mask[self.base_cube.slices] = True
        rest = base_mask & (cover == 0)
        osc = np.abs(f.values - self.center) / w.values
        complement_ok = bool(np.all(osc[rest] <= self.threshold + 1e-12))
        return {
            "disjoint": disjoint,
            "contained": contained,
            "average_lower": lower_ok,
            "average_upper": upper_ok,
            "complement": complement_ok,
        }


def cz_decompose(
    f: GridFunction, w: Weight, base: Cube, s: float, r: float
) -> CZDecomposition:
    """Dyadic stopping time at level s**r for the weighted relative oscillation."""
    if not s > 1:
        raise ValueError(f"threshold s must exceed 1, got {s}")
    if not (0 < r < 1):
        raise ValueError(f"exponent r must lie in (0, 1), got {r}")
    check_cube(f.grid, base)
    if not base.is_dyadic():
        raise ValueError(f"base cube {base} is not dyadic")

    center = minimizing_center(f, w, base, r)
    g = (np.abs(f.values - center) / w.values) ** r
    mu = w.values
    gm = g * mu
    level = s**r

    selected = []
    stack = [base] if base.side_cells > 1 else []
    # a single-cell base has no children; it can only satisfy the complement bound
    while stack:
        cube = stack.pop()
        for child in cube.children():
            sl = child.slices
            avg = gm[sl].sum() / mu[sl].sum()
            if avg > level:
                selected.append(child)
            elif child.side_cells > 1:
                stack.append(child)
    selected.sort(key=lambda c: (c.side_cells, c.anchor))
    return CZDecomposition(
        base_cube=base, threshold=float(s), exponent=float(r), selected=tuple(selected), center=center
    )


def oscillation_distribution(
    f: GridFunction, w: Weight, cube: Cube, center: float, levels
) -> list:
    """[(t, mu-fraction of {|f - center| / w > t} within the cube)] for each level."""
    levels = np.asarray(list(levels), dtype=float)
    if levels.size == 0:
        raise ValueError("levels must be non-empty")
    if np.any(levels <= 0) or np.any(np.diff(levels) <= 0):
        raise ValueError("levels must be strictly increasing and positive")
    check_cube(f.grid, cube)
    sl = cube.slices
    osc = np.abs(f.values[sl] - center) / w.values[sl]
    mu = w.values[sl]
    total = mu.sum()
    return [(float(t), float(mu[osc > t].sum() / total)) for t in levels]


def jn_levels(f: GridFunction, w: Weight, cube: Cube, center: float, ratio: float = 1.5) -> np.ndarray:
    """Geometric level ladder from the median oscillation up to the max."""
    sl = cube.slices
    osc = np.abs(f.values[sl] - center) / w.values[sl]
    t0 = float(np.median(osc))
    tmax = float(osc.max())
    if t0 <= 0:
        pos = osc[osc > 0]
        if pos.size == 0:
            raise InsufficientDataError("oscillation vanishes identically on the cube")
        t0 = float(pos.min())
    out = []
    t = t0
    while t <= tmax:
        out.append(t)
        t *= ratio
    return np.array(out)


@dataclass(frozen=True)
class JNDecayFit:
    c1: float
    c2: float
    residual: float  # max |log fraction - log fit| over the fitted points
    levels: tuple = field(repr=False)  # (t, fraction) pairs with fraction > 0

    @property
    def decaying(self) -> bool:
        return self.c2 > 0

    def envelope(self, t: np.ndarray) -> np.ndarray:
        return self.c1 * np.exp(-self.c2 * np.asarray(t))

    def to_json_dict(self) -> dict:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "residual": self.residual,
            "decaying": self.decaying,
            "levels": [list(p) for p in self.levels],
        }


def fit_exponential_decay(points) -> JNDecayFit:
    """Least squares of log(fraction) against t over points with positive mass."""
    pts = [(float(t), float(fr)) for t, fr in points if fr > 0]
    if len(pts) < 3:
        raise InsufficientDataError(f"need at least 3 points with positive mass, got {len(pts)}")
    t = np.array([p[0] for p in pts])
    logf = np.log(np.array([p[1] for p in pts]))
    slope, intercept = np.polyfit(t, logf, 1)
    resid = float(np.max(np.abs(logf - (intercept + slope * t))))
    return JNDecayFit(c1=float(np.exp(intercept)), c2=float(-slope), residual=resid, levels=tuple(pts))


def jn_decay_experiment(
    f: GridFunction, w: Weight, cube: Cube, r: float = 0.5, ratio: float = 1.5
) -> JNDecayFit:
    """Full pipeline: minimizing center, geometric levels, measured fractions, fit."""
    center = minimizing_center(f, w, cube, r)
    levels = jn_levels(f, w, cube, center, ratio=ratio)
    pts = oscillation_distribution(f, w, cube, center, levels)
    return fit_exponential_decay(pts)
