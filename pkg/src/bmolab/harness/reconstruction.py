"""Oscillation reconstruction through a reciprocal-kernel Fourier expansion.

Away from its zero set, the reciprocal of a homogeneous kernel K is
expanded as an absolutely convergent trigonometric series on a ball in
difference space: sample a smooth periodic extension on a box around
the ball, take the FFT, and keep the largest coefficients. On the ball
the extension equals 1/K exactly; outside it blends radially into the
ball mean through a smoothstep cutoff supported on 1.5 times the ball
radius, so a constant reciprocal yields a single DC coefficient.

Ball geometry: the center is a point of difference space, either the
diagonal duplicate of one coordinate (the default, suitable for
positive kernels) or a per-slot pair (necessary for odd kernels, which
vanish on the diagonal). The ball radius is delta * sqrt(2 dim) times a
small safety margin.

reconstruct_oscillation turns the expansion into the identity it
exists for: with Q the target cube of physical side r and companion
cubes Q1', Q2' offset by r * center/delta, the modulated indicator
pairs

    g_j(y1) = exp(-i (delta/r) v_j^1 . y1) on Q1'
    h_j(y2) = exp(-i (delta/r) v_j^2 . y2) on Q2'
    m_j(x)  = exp( i (delta/r) v_j . (x,x)) s(x) on Q

satisfy, cell-exactly on the grid (the kernel cancels pointwise at
sampled differences, so quadrature introduces no error of its own),

    s(x) (b(x) - avg of b on Q1')
        = (r/delta)**(2 dim - alpha) / (|Q1'| |Q2'|)
          * sum_j a_j [b,T]_first(g_j, h_j)(x) m_j(x)

up to the series truncation and aliasing error, which the returned
bound controls. The squared variant reconstructs the product of the
two slot oscillations with the iterated commutator instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..czo import BilinearKernel
from ..errors import DegenerateInputError, GeometryError
from ..grids import Cube, Grid, GridFunction, check_cube
from ..norms import BmoVariant, cube_oscillation_value, morrey_norm
from ..weights import Weight


def _smoothstep(u: np.ndarray) -> np.ndarray:
    """Seventh-order smoothstep: 0 to 1 with three vanishing derivatives at both ends."""
    u = np.clip(u, 0.0, 1.0)
    return u**4 * (35.0 - 84.0 * u + 70.0 * u**2 - 20.0 * u**3)


def _cutoff(t: np.ndarray) -> np.ndarray:
    """1 on t <= 1, 0 on t >= 1.5, smooth in between (t = distance / ball radius)."""
    return 1.0 - _smoothstep((t - 1.0) / 0.5)


def _normalize_center(center, dim: int) -> np.ndarray:
    """Accept a scalar / dim-vector (diagonal) or a 2*dim point of difference space."""
    arr = np.atleast_1d(np.asarray(center, dtype=float)).ravel()
    if arr.size == 1:
        arr = np.full(dim, arr[0])
    if arr.size == dim:
        return np.concatenate([arr, arr])
    if arr.size == 2 * dim:
        return arr
    raise ValueError(f"center must have {dim} (diagonal) or {2 * dim} components, got {arr.size}")


@dataclass(frozen=True)
class FourierExpansion:
    """Truncated trigonometric expansion of a reciprocal kernel on a ball."""

    coefficients: np.ndarray  # (J,) complex, sorted by magnitude descending
    frequencies: np.ndarray  # (J, 2*dim)
    center: np.ndarray  # (2*dim,) ball center in difference space
    delta: float
    radius: float  # ball radius where the series represents 1/K
    support_radius: float
    box_side: float
    truncation: int
    tail_bound: float  # omitted-coefficient mass plus aliasing estimate
    alias_error: float
    kernel_name: str
    fft_size: int

    def series_eval(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the truncated series at points of shape (..., 2*dim)."""
        phase = np.tensordot(np.asarray(points), self.frequencies.T, axes=1)  # (..., J)
        return np.exp(1j * phase) @ self.coefficients

    def to_json_dict(self) -> dict:
        return {
            "kernel": self.kernel_name,
            "center": self.center.tolist(),
            "delta": self.delta,
            "radius": self.radius,
            "truncation": self.truncation,
            "tail_bound": self.tail_bound,
            "alias_error": self.alias_error,
            "fft_size": self.fft_size,
            "leading_magnitudes": np.abs(self.coefficients[: min(8, len(self.coefficients))]).tolist(),
        }


def expand_reciprocal_kernel(
    kernel: BilinearKernel,
    center,
    delta: float,
    terms: int,
    fft_size: int | None = None,
    radius_margin: float = 1.05,
    alias_samples: int = 256,
    seed: int = 0,
) -> FourierExpansion:
    """Fourier coefficients of the periodized smooth extension of 1/K.

    center must satisfy the separation |center| > 2 sqrt(dim); delta
    lies in (0, 1) and must be small enough that K has no zeros on the
    closed support ball (1.5 times the represented radius), otherwise a
    degenerate-input error is raised.
    """
    dim = kernel.dim
    d2 = 2 * dim
    c = _normalize_center(center, dim)
    if np.linalg.norm(c) <= 2.0 * np.sqrt(dim):
        raise GeometryError(
            f"ball center norm {np.linalg.norm(c):.3f} violates the separation > 2 sqrt(dim)"
        )
    if not (0 < delta < 1):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    radius = delta * np.sqrt(d2) * radius_margin
    support = 1.5 * radius
    box = 3.5 * radius
    if fft_size is None:
        fft_size = 128 if dim == 1 else 16
    m = fft_size

    origin = c - box / 2.0
    step = box / m
    ax = origin[:, None] + (np.arange(m)[None, :] + 0.5) * step  # midpoint samples per axis
    mesh = np.meshgrid(*[ax[a] for a in range(d2)], indexing="ij")
    pts = np.stack(mesh, axis=-1)  # (m,)*d2 + (d2,)
    dist = np.linalg.norm(pts - c, axis=-1)

    inside = dist <= support
    u = pts[..., :dim]
    v = pts[..., dim:]
    kvals = np.zeros(dist.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        kvals[inside] = kernel(u[inside], v[inside])
    if not np.all(np.isfinite(kvals[inside])) or np.min(np.abs(kvals[inside])) == 0.0:
        raise DegenerateInputError(
            f"kernel {kernel.name} vanishes on the expansion ball; pick another center or smaller delta"
        )
    recip = np.zeros(dist.shape)
    recip[inside] = 1.0 / kvals[inside]
    ball = dist <= radius
    if not ball.any():
        raise GeometryError("fft grid too coarse: no sample falls inside the ball")
    mean = float(recip[ball].mean())
    f = mean + _cutoff(dist / radius) * (recip - mean)

    coeffs = np.fft.fftn(f) / f.size
    freqs_1d = 2.0 * np.pi * np.fft.fftfreq(m, d=step)
    fmesh = np.meshgrid(*([freqs_1d] * d2), indexing="ij")
    freqs = np.stack([g.ravel() for g in fmesh], axis=-1)  # (modes, d2)
    coeffs = coeffs.ravel()
    # absorb the sample-origin phase so the series is in plain e^{i v . w} form
    phase0 = freqs @ (origin + 0.5 * step)
    coeffs = coeffs * np.exp(-1j * phase0)

    order = np.argsort(np.abs(coeffs))[::-1]
    take = min(terms, coeffs.size)
    kept = order[:take]
    tail_trunc = float(np.abs(coeffs[order[take:]]).sum())

    # aliasing: compare the full series against 1/K at random ball points
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(alias_samples, d2))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    radii = radius * rng.uniform(0.0, 1.0, size=(alias_samples, 1)) ** (1.0 / d2)
    wpts = c + dirs * radii
    exact = 1.0 / kernel(wpts[:, :dim], wpts[:, dim:])
    full = np.empty(alias_samples, dtype=np.complex128)
    chunk = max(1, int(4e6 // coeffs.size))
    for s in range(0, alias_samples, chunk):
        full[s : s + chunk] = np.exp(1j * (wpts[s : s + chunk] @ freqs.T)) @ coeffs
    alias = float(np.max(np.abs(full - exact))) * 2.0  # safety factor for unsampled points

    return FourierExpansion(
        coefficients=coeffs[kept],
        frequencies=freqs[kept],
        center=c,
        delta=float(delta),
        radius=float(radius),
        support_radius=float(support),
        box_side=float(box),
        truncation=int(take),
        tail_bound=tail_trunc + alias,
        alias_error=alias,
        kernel_name=kernel.name,
        fft_size=m,
    )


#: candidate (center, delta) pairs searched in order; off-diagonal pairs
#: keep odd kernels away from their zero set on the diagonal
EXPANSION_PRESETS = {
    1: (
        ((3.0, 3.0), 0.5),
        ((2.0, 4.0), 0.5),
        ((2.0, 4.0), 0.375),
        ((2.5, 4.5), 0.25),
        ((1.6, 3.4), 0.25),
    ),
    2: (
        ((2.0, 2.0, 2.0, 2.0), 0.5),
        ((1.5, 1.5, 2.5, 2.5), 0.375),
        ((1.2, 1.8, 2.2, 2.8), 0.25),
    ),
}


def find_admissible_expansion(kernel: BilinearKernel, terms: int, presets=None, **kwargs):
    """First preset (center, delta) whose expansion succeeds; reports the pair used."""
    if presets is None:
        presets = EXPANSION_PRESETS[kernel.dim]
    errors = []
    for center, delta in presets:
        try:
            exp = expand_reciprocal_kernel(kernel, center, delta, terms, **kwargs)
            return exp, (center, delta)
        except (DegenerateInputError, GeometryError) as exc:
            errors.append(f"{center}/{delta}: {exc}")
    raise DegenerateInputError(
        "no preset ball is admissible for kernel "
        f"{kernel.name}: " + "; ".join(errors)
    )


# ---------------------------------------------------------------------------
# reconstruction on a cube
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReconstructionResult:
    function: GridFunction  # real part of the reconstruction, zero off the cube
    reference: GridFunction  # the oscillation it should match, zero off the cube
    error_bound: float
    cube: Cube
    companion_first: Cube
    companion_second: Cube
    truncation: int
    squared: bool

    @property
    def max_error(self) -> float:
        return float(np.max(np.abs(self.function.values - self.reference.values)))

    @property
    def max_relative_error(self) -> float:
        scale = float(np.max(np.abs(self.reference.values)))
        return self.max_error / scale if scale > 0 else 0.0

    def to_json_dict(self) -> dict:
        return {
            "cube_anchor": list(self.cube.anchor),
            "cube_side": self.cube.side_cells,
            "companion_first_anchor": list(self.companion_first.anchor),
            "companion_second_anchor": list(self.companion_second.anchor),
            "truncation": self.truncation,
            "squared": self.squared,
            "error_bound": self.error_bound,
            "max_error": self.max_error,
            "max_relative_error": self.max_relative_error,
        }


def _companion_cube(grid: Grid, cube: Cube, offset: np.ndarray) -> Cube:
    """Cube of the same side whose center sits at cube center + offset."""
    h = grid.spacing
    anchor = []
    for a in range(grid.dim):
        shift_cells = offset[a] / h
        anchor.append(int(round(cube.anchor[a] + shift_cells)))
    companion = Cube(tuple(anchor), cube.side_cells)
    try:
        check_cube(grid, companion)
    except ValueError as exc:
        raise GeometryError(f"companion cube {companion} falls outside the grid") from exc
    return companion


def _cube_coords(grid: Grid, cube: Cube) -> np.ndarray:
    """(cells, dim) physical midpoints of the cube's cells, row-major."""
    return grid.cell_centers()[cube.slices].reshape(-1, grid.dim)


def reconstruct_oscillation(
    b: GridFunction,
    kernel: BilinearKernel,
    cube: Cube,
    expansion: FourierExpansion,
    squared: bool = False,
) -> ReconstructionResult:
    """Rebuild the symbol's oscillation on a cube from commutator outputs.

    Returns the reconstruction and the oscillation it targets (both as
    full-grid functions vanishing off the cube) together with a bound
    on their difference derived from the expansion's tail bound, the
    symbol's oscillation range, and the kernel magnitude over the
    involved differences.
    """
    grid = b.grid
    if kernel.dim != grid.dim:
        raise GeometryError("kernel and symbol dimensions differ")
    check_cube(grid, cube)
    if np.iscomplexobj(b.values):
        raise ValueError("the symbol must be real-valued")
    dim = grid.dim
    h = grid.spacing
    r = cube.side_length(grid)
    delta = expansion.delta
    z1 = expansion.center / delta  # companion offsets in units of r

    comp1 = _companion_cube(grid, cube, r * z1[:dim])
    comp2 = _companion_cube(grid, cube, r * z1[dim:])
    for comp in (comp1, comp2):
        lo = np.maximum(np.array(cube.anchor), np.array(comp.anchor))
        hi = np.minimum(
            np.array(cube.anchor) + cube.side_cells, np.array(comp.anchor) + comp.side_cells
        )
        if np.all(hi > lo):
            raise GeometryError("companion cube overlaps the target cube; enlarge the offset")

    xs = _cube_coords(grid, cube)
    y1 = _cube_coords(grid, comp1)
    y2 = _cube_coords(grid, comp2)
    scale = delta / r

    # containment of the scaled differences in the expansion ball
    d1 = np.linalg.norm(scale * (xs[:, None, :] - y1[None, :, :]) - expansion.center[None, None, :dim], axis=-1)
    d2 = np.linalg.norm(scale * (xs[:, None, :] - y2[None, :, :]) - expansion.center[None, None, dim:], axis=-1)
    reach = np.sqrt(d1.max() ** 2 + d2.max() ** 2)
    if reach > expansion.radius * (1.0 + 1e-12):
        raise GeometryError(
            f"scaled differences reach {reach:.4f}, outside the expansion ball radius {expansion.radius:.4f}"
        )

    u = xs[:, None, None, :] - y1[None, :, None, :]
    v = xs[:, None, None, :] - y2[None, None, :, :]
    shape = (xs.shape[0], y1.shape[0], y2.shape[0])
    kb = kernel(np.broadcast_to(u, shape + (dim,)), np.broadcast_to(v, shape + (dim,)))

    bq = b.values[cube.slices].reshape(-1)
    b1 = b.values[comp1.slices].reshape(-1)
    b2 = b.values[comp2.slices].reshape(-1)
    sgn = np.sign(bq - b1.mean())

    v1 = expansion.frequencies[:, :dim]
    v2 = expansion.frequencies[:, dim:]
    g = np.exp(-1j * scale * (y1 @ v1.T)).T  # (J, cells of comp1)
    hph = np.exp(-1j * scale * (y2 @ v2.T)).T
    mph = np.exp(1j * scale * (xs @ (v1 + v2).T)).T  # (J, cells of cube)

    hd = h ** (2 * dim)
    t_gh = hd * np.einsum("xab,ja,jb->jx", kb, g, hph)
    t_bg_h = hd * np.einsum("xab,a,ja,jb->jx", kb, b1, g, hph)
    if not squared:
        comm = bq[None, :] * t_gh - t_bg_h
        modulation = mph * sgn[None, :]
        reference_vals = np.abs(bq - b1.mean())
        osc_weight = np.abs(bq[:, None] - b1[None, :])[:, :, None]
    else:
        t_g_bh = hd * np.einsum("xab,ja,b,jb->jx", kb, g, b2, hph)
        t_bg_bh = hd * np.einsum("xab,a,ja,b,jb->jx", kb, b1, g, b2, hph)
        comm = (
            bq[None, :] ** 2 * t_gh
            - bq[None, :] * t_bg_h
            - bq[None, :] * t_g_bh
            + t_bg_bh
        )
        modulation = mph * (sgn**2)[None, :]
        reference_vals = (bq - b1.mean()) * (bq - b2.mean()) * (sgn**2)
        osc_weight = np.abs(
            (bq[:, None, None] - b1[None, :, None]) * (bq[:, None, None] - b2[None, None, :])
        )

    factor = (r / delta) ** (2 * dim - kernel.alpha) / (
        (comp1.side_cells * h) ** dim * (comp2.side_cells * h) ** dim
    )
    recon = factor * np.sum(expansion.coefficients[:, None] * comm * modulation, axis=0)

    if not squared:
        env = hd * np.einsum("xab,xab->x", np.abs(kb), np.broadcast_to(osc_weight, shape))
    else:
        env = hd * np.einsum("xab,xab->x", np.abs(kb), osc_weight)
    error_bound = float(expansion.tail_bound * factor * env.max())

    rec_full = np.zeros(grid.shape)
    ref_full = np.zeros(grid.shape)
    rec_full[cube.slices] = recon.real.reshape((cube.side_cells,) * dim)
    ref_full[cube.slices] = reference_vals.reshape((cube.side_cells,) * dim)
    return ReconstructionResult(
        function=GridFunction(grid, rec_full),
        reference=GridFunction(grid, ref_full),
        error_bound=error_bound,
        cube=cube,
        companion_first=comp1,
        companion_second=comp2,
        truncation=expansion.truncation,
        squared=squared,
    )


def morrey_route_estimate(
    b: GridFunction,
    w: Weight,
    kernel: BilinearKernel,
    cube: Cube,
    expansion: FourierExpansion,
    p: float,
    q: float,
    cubes,
) -> dict:
    """Alternative small-exponent estimate of the local oscillation.

    Bounds the best-constant local oscillation at exponent q in (0, p)
    by the coefficient-weighted sum of cube-localized norms of the
    reweighted commutator outputs, scaled by w(Q)**(-1/p). Returns both
    sides and their ratio; the check is that the ratio stays finite and
    modest, mirroring the weak-type route when p <= 1.
    """
    if not (0 < q < p):
        raise ValueError("need 0 < q < p")
    if not (0 < q < 1):
        raise ValueError("the local oscillation exponent q must lie in (0, 1)")
    grid = b.grid
    dim = grid.dim
    h = grid.spacing
    r = cube.side_length(grid)
    delta = expansion.delta
    z1 = expansion.center / delta
    comp1 = _companion_cube(grid, cube, r * z1[:dim])
    comp2 = _companion_cube(grid, cube, r * z1[dim:])

    xs_all = grid.cell_centers().reshape(-1, dim)
    y1 = _cube_coords(grid, comp1)
    y2 = _cube_coords(grid, comp2)
    scale = delta / r
    u = xs_all[:, None, None, :] - y1[None, :, None, :]
    v = xs_all[:, None, None, :] - y2[None, None, :, :]
    shape = (xs_all.shape[0], y1.shape[0], y2.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        kb = kernel(np.broadcast_to(u, shape + (dim,)), np.broadcast_to(v, shape + (dim,)))
    kb = np.nan_to_num(kb, nan=0.0, posinf=0.0, neginf=0.0)

    ball = b.values.reshape(-1)
    b1 = b.values[comp1.slices].reshape(-1)
    v1 = expansion.frequencies[:, :dim]
    v2 = expansion.frequencies[:, dim:]
    g = np.exp(-1j * scale * (y1 @ v1.T)).T
    hph = np.exp(-1j * scale * (y2 @ v2.T)).T
    hd = h ** (2 * dim)
    t_gh = hd * np.einsum("xab,ja,jb->jx", kb, g, hph)
    t_bg_h = hd * np.einsum("xab,a,ja,jb->jx", kb, b1, g, hph)
    comm = ball[None, :] * t_gh - t_bg_h  # (J, all cells)

    lhs = cube_oscillation_value(b, w, cube, BmoVariant.inf_centered(q))
    wq = w.measure(cube)
    total = 0.0
    for j in range(comm.shape[0]):
        out = GridFunction(grid, np.abs(comm[j]).reshape(grid.shape) / w.values)
        total += float(np.abs(expansion.coefficients[j])) * morrey_norm(out, w, p, q, cubes)
    rhs = wq ** (-1.0 / p) * total
    return {"lhs": lhs, "rhs": rhs, "ratio": lhs / rhs if rhs > 0 else float("inf")}
