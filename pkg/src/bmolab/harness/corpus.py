"""Seeded corpora of test functions with resolution-independent definitions.

Every random parameter (breakpoints, spike geometry, centers) is drawn
in continuous box coordinates before any sampling happens, so the same
(kind, count, seed) triple denotes the same underlying functions at
every grid resolution. That is what makes refinement-stability checks
(N versus 2N) meaningful.

Kinds: "steps" (random piecewise constants), "spikes" (narrow
rectangles on a zero baseline), "logs" (log-distance profiles, the
canonical unbounded exemplar of bounded mean oscillation), and "mixed"
(round-robin of the three).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DegenerateInputError
from ..grids import Grid, GridFunction

_KINDS = ("steps", "spikes", "logs", "mixed")


@dataclass(frozen=True)
class CorpusSpec:
    kind: str = "mixed"
    count: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown corpus kind {self.kind!r}; choose from {_KINDS}")
        if self.count < 1:
            raise ConfigurationError("corpus count must be >= 1")

    def describe(self) -> str:
        return f"{self.kind}:count={self.count},seed={self.seed}"


def log_distance_function(grid: Grid, center_frac: float = 0.5, scale: float = 1.0) -> GridFunction:
    """scale * log(max(|x - c|, h)) with c at the given box fraction.

    The clamp at one grid spacing keeps the value finite on the cell
    containing the center; it is part of the function's definition.
    """
    c = np.array([o + center_frac * grid.box_side for o in grid.origin])
    dist = np.linalg.norm(grid.cell_centers() - c, axis=-1)
    return GridFunction(grid, scale * np.log(np.maximum(dist, grid.spacing)))


def _axis_fractions(grid: Grid) -> np.ndarray:
    """Axis-0 coordinate of each cell as a fraction of the box side."""
    centers = grid.cell_centers()[..., 0]
    return (centers - grid.origin[0]) / grid.box_side


def _make_step(grid: Grid, rng) -> GridFunction:
    k = int(rng.integers(3, 9))
    breaks = np.sort(rng.uniform(0.05, 0.95, size=k))
    vals = rng.uniform(-1.0, 1.0, size=k + 1)
    frac = _axis_fractions(grid)
    return GridFunction(grid, vals[np.searchsorted(breaks, frac)])


def _make_spikes(grid: Grid, rng) -> GridFunction:
    m = int(rng.integers(1, 4))
    centers = rng.uniform(0.1, 0.9, size=m)
    widths = rng.uniform(2.0 / 64.0, 1.0 / 8.0, size=m)
    heights = rng.uniform(1.0, 5.0, size=m) * rng.choice([-1.0, 1.0], size=m)
    frac = _axis_fractions(grid)
    out = np.zeros(grid.shape)
    for c, wdt, hgt in zip(centers, widths, heights):
        mask = np.abs(frac - c) < wdt / 2.0
        if not mask.any():  # make sure at least the nearest cell carries the spike
            flat = np.abs(frac - c).ravel()
            mask = np.zeros(frac.size, dtype=bool)
            mask[np.argmin(flat)] = True
            mask = mask.reshape(grid.shape)
        out[mask] += hgt
    return GridFunction(grid, out)


def _make_log(grid: Grid, rng) -> GridFunction:
    center = float(rng.uniform(0.2, 0.8))
    sign = float(rng.choice([-1.0, 1.0]))
    return log_distance_function(grid, center_frac=center, scale=sign)


def build_corpus(grid: Grid, spec: CorpusSpec) -> list:
    """Deterministic list of non-constant grid functions."""
    rng = np.random.default_rng(spec.seed)
    makers = {"steps": _make_step, "spikes": _make_spikes, "logs": _make_log}
    out = []
    for i in range(spec.count):
        kind = spec.kind
        if kind == "mixed":
            kind = ("steps", "spikes", "logs")[i % 3]
        fn = makers[kind]
        for _ in range(100):
            f = fn(grid, rng)
            if f.values.std() > 0:
                break
        else:
            raise DegenerateInputError("corpus generator kept producing constants")
        out.append(f)
    return out
