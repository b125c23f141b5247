"""Uniform grids, axis-aligned cubes, and cell-midpoint quadrature.

Everything downstream (weights, norms, maximal operators, singular
integrals) consumes the three carriers defined here: a Grid fixes box
geometry, a GridFunction samples one value per cell midpoint, and a
Cube is a half-open block of whole cells. Integrals are midpoint sums
with weight h**dim; there is deliberately no higher-order quadrature,
because midpoint sums keep averaging and layer-cake identities exact on
the discrete measure.

The supremum over "all cubes" is everywhere replaced by a maximum over
a finite CubeFamily. The dyadic family is the cheap default; a sliding
family with chosen window sides is the high-fidelity option. Reports
elsewhere always record which family produced a number, since a finite
family can only under-estimate the true supremum.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

#: default cap on total cell count (memory guard for N**dim)
MAX_CELLS_DEFAULT = 1 << 24


@dataclass(frozen=True)
class Grid:
    """Uniform grid on a box [origin, origin + box_side)**dim.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 or 2.
    cells_per_axis : int
        Number of cells per axis; must be a power of two so the dyadic
        family tiles the box exactly.
    box_side : float
        Physical side length of the box.
    origin : tuple of float, optional
        Lower corner of the box; defaults to the zero vector.
    """

    dim: int
    cells_per_axis: int
    box_side: float = 1.0
    origin: tuple = None
    max_cells: int = field(default=MAX_CELLS_DEFAULT, compare=False, repr=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        n = self.cells_per_axis
        if n < 1 or (n & (n - 1)) != 0:
            raise ValueError(f"cells_per_axis must be a power of two, got {n}")
        if not (self.box_side > 0):
            raise ValueError("box_side must be positive")
        if n**self.dim > self.max_cells:
            raise ValueError(
                f"grid with {n}**{self.dim} cells exceeds the configured budget of {self.max_cells}"
            )
        origin = self.origin
        if origin is None:
            origin = (0.0,) * self.dim
        elif np.isscalar(origin):
            origin = (float(origin),) * self.dim
        else:
            origin = tuple(float(v) for v in origin)
        if len(origin) != self.dim:
            raise ValueError("origin length must equal dim")
        object.__setattr__(self, "origin", origin)

    @property
    def spacing(self) -> float:
        return self.box_side / self.cells_per_axis

    @property
    def shape(self) -> tuple:
        return (self.cells_per_axis,) * self.dim

    @property
    def n_cells(self) -> int:
        return self.cells_per_axis**self.dim

    @property
    def levels(self) -> int:
        """log2(cells_per_axis)."""
        return int(self.cells_per_axis).bit_length() - 1

    def axis_midpoints(self, axis: int = 0) -> np.ndarray:
        h = self.spacing
        return self.origin[axis] + (np.arange(self.cells_per_axis) + 0.5) * h

    def cell_centers(self) -> np.ndarray:
        """Midpoint coordinates, shape (*shape, dim)."""
        axes = [self.axis_midpoints(a) for a in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def root_cube(self) -> "Cube":
        return Cube((0,) * self.dim, self.cells_per_axis)


class GridFunction:
    """One real (or complex) value per grid cell, sampled at midpoints.

    Values are immutable after construction; arithmetic between two
    GridFunctions requires the identical grid.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        arr = np.asarray(values)
        if arr.shape != grid.shape:
            raise ValueError(f"values shape {arr.shape} does not match grid shape {grid.shape}")
        dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
        arr = np.array(arr, dtype=dtype)
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid function values must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridFunction":
        """Sample fn at cell centers; fn takes an (..., dim) coordinate array."""
        return cls(grid, np.asarray(fn(grid.cell_centers())))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "GridFunction":
        return cls(grid, np.full(grid.shape, value))

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise ValueError("grid functions combine only on the identical grid")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    @property
    def real(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.real)

    def shift(self, cells: int, axis: int = 0) -> "GridFunction":
        """Cyclic shift by whole cells (used by periodic-boundary checks)."""
        return GridFunction(self.grid, np.roll(self.values, cells, axis=axis))

    def digest(self) -> str:
        return hashlib.sha256(self.values.tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class Cube:
    """Half-open block of whole cells: [anchor, anchor + side_cells) per axis."""

    anchor: tuple
    side_cells: int

    def __post_init__(self):
        anchor = self.anchor
        if np.isscalar(anchor):
            anchor = (int(anchor),)
        else:
            anchor = tuple(int(a) for a in anchor)
        object.__setattr__(self, "anchor", anchor)
        if self.side_cells < 1:
            raise ValueError("side_cells must be >= 1")
        if any(a < 0 for a in anchor):
            raise ValueError("anchor indices must be non-negative")

    @property
    def dim(self) -> int:
        return len(self.anchor)

    @property
    def slices(self) -> tuple:
        return tuple(slice(a, a + self.side_cells) for a in self.anchor)

    def n_cells(self) -> int:
        return self.side_cells**self.dim

    def contains_cell(self, idx) -> bool:
        idx = (idx,) if np.isscalar(idx) else tuple(idx)
        return all(a <= i < a + self.side_cells for a, i in zip(self.anchor, idx))

    def contains_cube(self, other: "Cube") -> bool:
        return all(
            a <= b and b + other.side_cells <= a + self.side_cells
            for a, b in zip(self.anchor, other.anchor)
        )

    def is_dyadic(self) -> bool:
        w = self.side_cells
        return (w & (w - 1)) == 0 and all(a % w == 0 for a in self.anchor)

    def children(self):
        """The 2**dim dyadic children (side halved); side_cells must be even."""
        if self.side_cells % 2 != 0:
            raise ValueError("cube of odd side has no dyadic children")
        half = self.side_cells // 2
        offs = [(0,), (half,)] if self.dim == 1 else [(i, j) for i in (0, half) for j in (0, half)]
        return [Cube(tuple(a + o for a, o in zip(self.anchor, off)), half) for off in offs]

    def center(self, grid: Grid) -> np.ndarray:
        h = grid.spacing
        return np.array(
            [grid.origin[a] + (self.anchor[a] + self.side_cells / 2.0) * h for a in range(self.dim)]
        )

    def side_length(self, grid: Grid) -> float:
        return self.side_cells * grid.spacing


def check_cube(grid: Grid, cube: Cube) -> None:
    """Raise ValueError when the cube does not lie inside the grid."""
    if cube.dim != grid.dim:
        raise ValueError(f"cube dim {cube.dim} does not match grid dim {grid.dim}")
    n = grid.cells_per_axis
    for a in cube.anchor:
        if a < 0 or a + cube.side_cells > n:
            raise ValueError(f"cube {cube} lies outside the {n}-cell grid")


@dataclass(frozen=True)
class FamilySpec:
    """Which cubes stand in for the supremum over all cubes."""

    kind: str = "dyadic"
    sides: tuple = ()
    stride: int = 1

    def __post_init__(self):
        if self.kind not in ("dyadic", "sliding"):
            raise ConfigurationError(f"unknown family kind {self.kind!r}")
        object.__setattr__(self, "sides", tuple(int(s) for s in self.sides))
        if self.kind == "sliding":
            if not self.sides:
                raise ConfigurationError("sliding family needs a non-empty window side list")
            if len(set(self.sides)) != len(self.sides):
                raise ConfigurationError("sliding window sides must be distinct")
            if any(s < 1 for s in self.sides):
                raise ConfigurationError("window sides must be >= 1")
            if self.stride < 1:
                raise ConfigurationError("stride must be >= 1")

    def describe(self) -> str:
        if self.kind == "dyadic":
            return "dyadic"
        return "sliding:sides=" + ",".join(map(str, self.sides)) + f";stride={self.stride}"


@dataclass(frozen=True)
class CubeFamily:
    """Finite ordered stand-in for the supremum over all cubes."""

    kind: str
    cubes: tuple
    grid: Grid
    descriptor: str

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    def __getitem__(self, i) -> Cube:
        return self.cubes[i]

    def anchors_array(self) -> np.ndarray:
        return np.array([c.anchor for c in self.cubes], dtype=np.int64)

    def sides_array(self) -> np.ndarray:
        return np.array([c.side_cells for c in self.cubes], dtype=np.int64)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.descriptor.encode())
        h.update(repr((self.grid.dim, self.grid.cells_per_axis, self.grid.box_side)).encode())
        h.update(self.anchors_array().tobytes())
        h.update(self.sides_array().tobytes())
        return h.hexdigest()[:16]


def enumerate_cubes(grid: Grid, spec: FamilySpec = FamilySpec()) -> CubeFamily:
    """Build the cube family for a grid, in deterministic order.

    Dyadic: every cube of side 2**k cells, 0 <= k <= log2(N), anchors in
    row-major order, small sides first. Sliding: for each window side in
    the given order, all anchors stepping by the stride.
    """
    n = grid.cells_per_axis
    cubes = []
    if spec.kind == "dyadic":
        k = 0
        while (1 << k) <= n:
            side = 1 << k
            starts = range(0, n, side)
            if grid.dim == 1:
                cubes.extend(Cube((i,), side) for i in starts)
            else:
                cubes.extend(Cube((i, j), side) for i in starts for j in starts)
            k += 1
    else:
        for side in spec.sides:
            if side > n:
                raise ConfigurationError(f"window side {side} exceeds grid size {n}")
            starts = range(0, n - side + 1, spec.stride)
            if grid.dim == 1:
                cubes.extend(Cube((i,), side) for i in starts)
            else:
                cubes.extend(Cube((i, j), side) for i in starts for j in starts)
    return CubeFamily(kind=spec.kind, cubes=tuple(cubes), grid=grid, descriptor=spec.describe())


def dyadic_family(grid: Grid) -> CubeFamily:
    return enumerate_cubes(grid, FamilySpec(kind="dyadic"))


def sliding_family(grid: Grid, sides=None, stride: int = 1) -> CubeFamily:
    """Sliding windows; defaults to every side from 1 to N (exhaustive)."""
    if sides is None:
        sides = tuple(range(1, grid.cells_per_axis + 1))
    return enumerate_cubes(grid, FamilySpec(kind="sliding", sides=tuple(sides), stride=stride))


# ---------------------------------------------------------------------------
# elementary averages
# ---------------------------------------------------------------------------


def average(f: GridFunction, cube: Cube) -> float:
    """Arithmetic mean of f over the cube (midpoint quadrature of the mean)."""
    check_cube(f.grid, cube)
    return f.values[cube.slices].mean()


def weighted_measure(w, cube: Cube) -> float:
    """h**dim times the sum of the weight over the cube's cells."""
    fn = getattr(w, "fn", w)  # accepts a Weight or a bare GridFunction
    check_cube(fn.grid, cube)
    return float(fn.values[cube.slices].sum()) * fn.grid.spacing**fn.grid.dim


# ---------------------------------------------------------------------------
# vectorized per-cube sums via prefix tables
# ---------------------------------------------------------------------------


def cube_sums(values: np.ndarray, anchors: np.ndarray, sides: np.ndarray) -> np.ndarray:
    """Sum of values over each cube, computed from a cumulative table."""
    if values.ndim == 1:
        cs = np.concatenate([[0.0], np.cumsum(values)])
        a = anchors[:, 0]
        return cs[a + sides] - cs[a]
    ii = np.zeros((values.shape[0] + 1, values.shape[1] + 1))
    ii[1:, 1:] = values.cumsum(axis=0).cumsum(axis=1)
    ai, aj = anchors[:, 0], anchors[:, 1]
    bi, bj = ai + sides, aj + sides
    return ii[bi, bj] - ii[ai, bj] - ii[bi, aj] + ii[ai, aj]


def cube_mins(values: np.ndarray, anchors: np.ndarray, sides: np.ndarray) -> np.ndarray:
    """Minimum of values over each cube (essential infimum on the discrete measure)."""
    out = np.empty(anchors.shape[0])
    if values.ndim == 1:
        for c in range(anchors.shape[0]):
            out[c] = values[anchors[c, 0] : anchors[c, 0] + sides[c]].min()
    else:
        for c in range(anchors.shape[0]):
            ai, aj = anchors[c]
            out[c] = values[ai : ai + sides[c], aj : aj + sides[c]].min()
    return out


# ---------------------------------------------------------------------------
# CSV import/export for corpus fixtures
# ---------------------------------------------------------------------------


def save_csv(f: GridFunction, path) -> None:
    """Write one value per line after a dim,N,L header."""
    if np.iscomplexobj(f.values):
        raise ValueError("CSV export supports real-valued functions only")
    g = f.grid
    with open(path, "w") as fh:
        fh.write("dim,N,L\n")
        fh.write(f"{g.dim},{g.cells_per_axis},{g.box_side!r}\n")
        for v in f.values.ravel():
            fh.write(f"{v!r}\n")


def load_csv(path, origin=None) -> GridFunction:
    with open(path) as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "dim,N,L":
            raise ValueError(f"unexpected CSV header {header!r}")
        dim_s, n_s, box_s = fh.readline().strip().split(",")
        grid = Grid(int(dim_s), int(n_s), float(box_s), origin=origin)
        vals = np.array([float(line) for line in fh if line.strip()])
    if vals.size != grid.n_cells:
        raise ValueError(f"expected {grid.n_cells} values, found {vals.size}")
    return GridFunction(grid, vals.reshape(grid.shape))
