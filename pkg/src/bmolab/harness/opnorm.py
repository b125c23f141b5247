"""Lower bounds on commutator operator norms from a seeded test family.

The estimate is a running max over a deterministic enumeration of input
pairs: indicator pairs on nearby and far cubes at several dyadic scales,
sign-scrambled (Rademacher) indicator pairs, and single-scale bumps.
The numerator weights the output by w**(-m), m = 1 for slot commutators
and m = 2 for the iterated commutator; the denominator is the product
of the two input norms. Because the family is a fixed enumeration, the
estimate is monotone non-decreasing in the trial count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..czo import BilinearKernel, commutator, eval_bilinear
from ..errors import ConfigurationError
from ..grids import Grid, GridFunction
from ..norms import lp_norm, weak_lp_norm
from ..weights import Weight


@dataclass(frozen=True)
class BilinearOp:
    """Operator handle: how to apply it and how the output is reweighted."""

    apply: callable
    weight_power: int
    name: str


def plain_operator(kernel: BilinearKernel, boundary: str = "box") -> BilinearOp:
    return BilinearOp(
        apply=lambda f1, f2: eval_bilinear(kernel, f1, f2, boundary=boundary),
        weight_power=0,
        name=f"T[{kernel.name}]",
    )


def commutator_operator(
    kernel: BilinearKernel, b: GridFunction, slot: str = "first", boundary: str = "box"
) -> BilinearOp:
    power = 2 if slot == "iterated" else 1
    return BilinearOp(
        apply=lambda f1, f2: commutator(slot, b, kernel, f1, f2, boundary=boundary),
        weight_power=power,
        name=f"[b,T]_{slot}[{kernel.name}]",
    )


def zero_operator(grid: Grid) -> BilinearOp:
    return BilinearOp(
        apply=lambda f1, f2: GridFunction.constant(grid, 0.0), weight_power=0, name="zero"
    )


def _indicator(grid: Grid, anchor_frac: float, side_cells: int) -> GridFunction:
    n = grid.cells_per_axis
    a = min(max(int(round(anchor_frac * n)), 0), n - side_cells)
    vals = np.zeros(grid.shape)
    if grid.dim == 1:
        vals[a : a + side_cells] = 1.0
    else:
        vals[a : a + side_cells, a : a + side_cells] = 1.0
    return GridFunction(grid, vals)


def _bump(grid: Grid, center_frac: float, sigma_frac: float) -> GridFunction:
    c = np.array([o + center_frac * grid.box_side for o in grid.origin])
    d = np.linalg.norm(grid.cell_centers() - c, axis=-1)
    return GridFunction(grid, np.exp(-((d / (sigma_frac * grid.box_side)) ** 2)))


def build_test_pairs(grid: Grid, trials: int, seed: int) -> list:
    """First `trials` members of the deterministic (f1, f2) enumeration."""
    rng = np.random.default_rng(seed)
    pairs = []
    scale_fracs = (1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0)
    n = grid.cells_per_axis
    for frac in scale_fracs:
        side = max(int(round(frac * n)), 1)
        rel = side / n
        for gap in (0.0, rel, 3.0 * rel):
            a1 = 0.1
            a2 = a1 + rel + gap
            if (a2 + rel) > 0.95:
                continue
            pairs.append((_indicator(grid, a1, side), _indicator(grid, a2, side)))
        far1 = _indicator(grid, 0.05, side)
        far2 = _indicator(grid, 0.85, side)
        pairs.append((far1, far2))
    for frac in scale_fracs:
        side = max(int(round(frac * n)), 1)
        base1 = _indicator(grid, 0.1, side)
        base2 = _indicator(grid, 0.1 + 2.0 * side / n, side)
        for _ in range(3):
            s1 = rng.choice([-1.0, 1.0], size=grid.shape)
            s2 = rng.choice([-1.0, 1.0], size=grid.shape)
            pairs.append(
                (
                    GridFunction(grid, base1.values * s1),
                    GridFunction(grid, base2.values * s2),
                )
            )
    for sigma in (1.0 / 16.0, 1.0 / 32.0):
        pairs.append((_bump(grid, 0.3, sigma), _bump(grid, 0.5, sigma)))
        pairs.append((_bump(grid, 0.4, sigma), _bump(grid, 0.4, sigma)))
    return pairs[:trials]


def opnorm_lower_bound(
    op: BilinearOp,
    p1: float,
    p2: float,
    w: Weight,
    target: str = "strong",
    trials: int = 16,
    seed: int = 0,
    p: float | None = None,
) -> float:
    """Max ratio ||op(f1,f2) w**(-m)||_X / (||f1||_{p1,w} ||f2||_{p2,w}) over the family.

    X is the strong or weak Lebesgue norm at p = (1/p1 + 1/p2)**(-1);
    passing an inconsistent explicit p raises.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if target not in ("strong", "weak"):
        raise ConfigurationError(f"unknown target {target!r}")
    p_expected = 1.0 / (1.0 / p1 + 1.0 / p2)
    if p is None:
        p = p_expected
    elif abs(p - p_expected) > 1e-12 * p_expected:
        raise ConfigurationError(
            f"exponent relation violated: 1/{p1} + 1/{p2} != 1/{p}"
        )
    grid = w.grid
    norm_fn = lp_norm if target == "strong" else weak_lp_norm
    best = 0.0
    for f1, f2 in build_test_pairs(grid, trials, seed):
        out = op.apply(f1, f2)
        weighted = GridFunction(grid, np.abs(out.values) * w.values ** (-op.weight_power))
        num = norm_fn(weighted, w, p)
        den = lp_norm(f1, w, p1) * lp_norm(f2, w, p2)
        if den > 0:
            best = max(best, num / den)
    return best
