"""Periodic spatial discretization with continuum-calibrated Fourier duals.

The box [0, L)^dim is sampled on N points per axis.  The forward transform
carries the quadrature weight (L/N)^dim so that coefficients approximate the
continuum Fourier integral of the field and discrete norms converge to their
continuum counterparts under refinement.  With that convention Parseval reads

    sum_j |f(x_j)|^2 (L/N)^dim = L^-dim sum_k |f_hat_k|^2 .

All operations are pure; reductions run in a fixed index order so repeated
evaluations are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ConfigError

SUPPORTED_DIMS = (1, 2, 3)


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid on [0, L)^dim with its frequency lattice.

    Frequencies are xi_k = 2*pi*k/L per axis with integer k in [-N/2, N/2),
    stored in FFT order.  The lattice is symmetric about zero except for the
    unpaired Nyquist row at k = -N/2.
    """

    dim: int
    box_length: float
    points_per_axis: int

    def __post_init__(self) -> None:
        if self.dim not in SUPPORTED_DIMS:
            raise ConfigError(f"grid.dim: expected one of {SUPPORTED_DIMS}, got {self.dim}")
        if not self.box_length > 0:
            raise ConfigError(f"grid.box_length: must be positive, got {self.box_length}")
        n = self.points_per_axis
        if n < 8 or n % 2 != 0:
            raise ConfigError(
                f"grid.points_per_axis: must be an even integer >= 8, got {n}"
            )

    @classmethod
    def from_config(cls, cfg: dict) -> "TorusGrid":
        try:
            return cls(
                dim=int(cfg["dim"]),
                box_length=float(cfg["box_length"]),
                points_per_axis=int(cfg["points_per_axis"]),
            )
        except KeyError as exc:
            raise ConfigError(f"grid.{exc.args[0]}: missing") from None

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def spacing(self) -> float:
        return self.box_length / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @property
    def xi_min(self) -> float:
        return 2.0 * math.pi / self.box_length

    @property
    def xi_max(self) -> float:
        """Per-axis Nyquist magnitude pi*N/L."""
        return math.pi * self.points_per_axis / self.box_length

    @cached_property
    def axis_frequencies(self) -> np.ndarray:
        """1-d array of xi values along one axis, FFT ordering."""
        n = self.points_per_axis
        return 2.0 * math.pi * np.fft.fftfreq(n, d=self.spacing / 1.0)

    @cached_property
    def frequency_vectors(self) -> tuple[np.ndarray, ...]:
        """dim arrays of shape grid.shape holding xi components."""
        axes = [self.axis_frequencies] * self.dim
        return tuple(np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def frequency_magnitude(self) -> np.ndarray:
        sq = np.zeros(self.shape)
        for comp in self.frequency_vectors:
            sq += comp**2
        return np.sqrt(sq)

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, ...]:
        x = np.arange(self.points_per_axis) * self.spacing
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))


def _as_component_array(values: np.ndarray, grid: TorusGrid, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    if arr.shape == grid.shape:
        arr = arr[np.newaxis, ...]
    if arr.ndim != grid.dim + 1 or arr.shape[1:] != grid.shape:
        raise ConfigError(
            f"field values of shape {arr.shape} do not match grid shape {grid.shape}"
        )
    return arr


@dataclass(frozen=True)
class PhysicalField:
    """Real samples on the spatial lattice, shape (components, N, ..., N)."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_component_array(self.values, self.grid, float)
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ConfigError(f"non-finite sample at (component, index) = {tuple(bad)}")
        object.__setattr__(self, "values", arr)

    @property
    def components(self) -> int:
        return self.values.shape[0]

    def magnitude(self) -> np.ndarray:
        """Pointwise Euclidean magnitude across components."""
        if self.components == 1:
            return np.abs(self.values[0])
        return np.sqrt(np.sum(self.values**2, axis=0))

    def component_means(self) -> np.ndarray:
        axes = tuple(range(1, self.values.ndim))
        return self.values.mean(axis=axes)


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients on the frequency lattice, FFT ordering."""

    grid: TorusGrid
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_component_array(self.coefficients, self.grid, complex)
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ConfigError(f"non-finite coefficient at (component, index) = {tuple(bad)}")
        object.__setattr__(self, "coefficients", arr)

    @property
    def components(self) -> int:
        return self.coefficients.shape[0]

    def power(self) -> np.ndarray:
        """Pointwise |coefficients|^2 summed over components."""
        return np.sum(np.abs(self.coefficients) ** 2, axis=0)


def forward_transform(field: PhysicalField) -> SpectralField:
    """Continuum-calibrated DFT: f_hat_k = (L/N)^dim sum_j f(x_j) exp(-i xi_k.x_j)."""
    grid = field.grid
    axes = tuple(range(1, grid.dim + 1))
    coeffs = np.fft.fftn(field.values, axes=axes) * grid.cell_volume
    return SpectralField(grid, coeffs)


def _reflected(coeffs: np.ndarray, dim: int) -> np.ndarray:
    """coeffs evaluated at -k (indexwise k -> (N-k) mod N on each grid axis)."""
    out = coeffs
    for axis in range(1, dim + 1):
        out = np.roll(np.flip(out, axis=axis), 1, axis=axis)
    return out


def hermitian_defect(field: SpectralField) -> tuple[float, tuple[int, ...]]:
    """Worst |g(-k) - conj(g(k))| over the lattice and the offending index."""
    diff = np.abs(_reflected(field.coefficients, field.grid.dim) - np.conj(field.coefficients))
    flat = int(np.argmax(diff))
    idx = np.unravel_index(flat, diff.shape)
    return float(diff[idx]), idx


def inverse_transform(field: SpectralField, *, require_real: bool = True) -> PhysicalField:
    """Exact inverse of :func:`forward_transform`.

    When a real field is requested the coefficients must be Hermitian
    symmetric; a violation above 1e-10 (relative to the largest coefficient)
    is rejected, naming the worst offending mode.
    """
    grid = field.grid
    axes = tuple(range(1, grid.dim + 1))
    if require_real:
        scale = float(np.max(np.abs(field.coefficients)))
        defect, idx = hermitian_defect(field)
        if scale > 0 and defect > 1e-10 * scale:
            k = tuple(
                int(i if i <= grid.points_per_axis // 2 else i - grid.points_per_axis)
                for i in idx[1:]
            )
            raise ConfigError(
                f"coefficients are not Hermitian symmetric: defect {defect:.3e} "
                f"(relative {defect / scale:.3e}) at component {idx[0]}, mode k={k}"
            )
    values = np.fft.ifftn(field.coefficients, axes=axes) / grid.cell_volume
    if require_real:
        values = values.real
        return PhysicalField(grid, values)
    return PhysicalField(grid, values.real)


def spectral_derivative(field: SpectralField, op: str, axis: int | None = None) -> SpectralField:
    """Differential operators as Fourier multipliers.

    op is one of "partial" (requires axis), "gradient" (scalar input),
    "divergence" (dim components) or "curl" (3 components, dim 3).  Exact for
    band-limited fields.
    """
    grid = field.grid
    xi = grid.frequency_vectors
    c = field.coefficients
    if op == "partial":
        if axis is None or not 0 <= axis < grid.dim:
            raise ConfigError(f"partial derivative axis must be in [0, {grid.dim}), got {axis}")
        return SpectralField(grid, 1j * xi[axis] * c)
    if op == "gradient":
        if field.components != 1:
            raise ConfigError(f"gradient expects a scalar field, got {field.components} components")
        out = np.stack([1j * xi[j] * c[0] for j in range(grid.dim)])
        return SpectralField(grid, out)
    if op == "divergence":
        if field.components != grid.dim:
            raise ConfigError(
                f"divergence expects {grid.dim} components, got {field.components}"
            )
        out = sum(1j * xi[j] * c[j] for j in range(grid.dim))
        return SpectralField(grid, out[np.newaxis, ...])
    if op == "curl":
        if grid.dim != 3 or field.components != 3:
            raise ConfigError("curl requires a 3-component field on a 3-d grid")
        out = np.stack(
            [
                1j * (xi[1] * c[2] - xi[2] * c[1]),
                1j * (xi[2] * c[0] - xi[0] * c[2]),
                1j * (xi[0] * c[1] - xi[1] * c[0]),
            ]
        )
        return SpectralField(grid, out)
    raise ConfigError(f"unknown derivative op {op!r}")


def solenoidal_projection(field: SpectralField) -> SpectralField:
    """Remove the longitudinal part: g -> g - xi (xi.g)/|xi|^2 (zero mode kept)."""
    grid = field.grid
    if field.components != grid.dim:
        raise ConfigError(
            f"solenoidal projection expects {grid.dim} components, got {field.components}"
        )
    xi = grid.frequency_vectors
    sq = grid.frequency_magnitude**2
    safe = np.where(sq > 0, sq, 1.0)
    dot = sum(xi[j] * field.coefficients[j] for j in range(grid.dim))
    out = np.stack(
        [field.coefficients[j] - xi[j] * dot / safe for j in range(grid.dim)]
    )
    return SpectralField(grid, out)


def lp_norm(field: PhysicalField, p: float) -> float:
    """Grid-quadrature L^p norm of the pointwise component magnitude."""
    if p < 1:
        raise ConfigError(f"lp_norm requires p >= 1, got {p}")
    mag = field.magnitude()
    if math.isinf(p):
        return float(np.max(mag))
    if p == 2.0:
        return float(np.sqrt(np.sum(mag**2) * field.grid.cell_volume))
    return float((np.sum(mag**p) * field.grid.cell_volume) ** (1.0 / p))


def spectral_l2_norm(field: SpectralField, weights: np.ndarray | None = None) -> float:
    """L^2 norm evaluated in coefficient space via Parseval.

    Optionally applies a real multiplier array (shape grid.shape) to every
    component before summing.
    """
    power = field.power()
    if weights is not None:
        power = power * np.asarray(weights) ** 2
    return float(np.sqrt(np.sum(power) / field.grid.volume))


def random_band_limited_field(
    grid: TorusGrid,
    components: int,
    rng: np.random.Generator,
    *,
    envelope: float | None = None,
    keep_fraction: float = 0.75,
    zero_mean: bool = True,
) -> PhysicalField:
    """Seeded smooth random field, band-limited strictly below Nyquist.

    White noise is shaped by a Gaussian spectral envelope (default width is
    half the Nyquist magnitude) and truncated at keep_fraction of Nyquist so
    every generated field stays clear of the unpaired Nyquist row.
    """
    white = rng.standard_normal((components,) + grid.shape)
    axes = tuple(range(1, grid.dim + 1))
    coeffs = np.fft.fftn(white, axes=axes)
    mag = grid.frequency_magnitude
    width = envelope if envelope is not None else 0.5 * grid.xi_max
    shape = np.exp(-0.5 * (mag / width) ** 2)
    shape[mag > keep_fraction * grid.xi_max] = 0.0
    coeffs *= shape
    if zero_mean:
        coeffs[(slice(None),) + (0,) * grid.dim] = 0.0
    values = np.fft.ifftn(coeffs, axes=axes).real
    scale = np.max(np.abs(values))
    if scale > 0:
        values = values / scale
    return PhysicalField(grid, values)


def gaussian_bump(grid: TorusGrid, width: float, *, normalized: bool = True) -> PhysicalField:
    """Centered Gaussian of the given width; unit integral when normalized."""
    if width <= 0:
        raise ConfigError(f"gaussian width must be positive, got {width}")
    centered = [c - 0.5 * grid.box_length for c in grid.coordinates]
    r_sq = sum(c**2 for c in centered)
    values = np.exp(-r_sq / (2.0 * width**2))
    if normalized:
        values = values / (2.0 * math.pi * width**2) ** (grid.dim / 2.0)
    return PhysicalField(grid, values)


def stack_fields(fields: Sequence[PhysicalField]) -> PhysicalField:
    """Concatenate the components of several fields on a common grid."""
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ConfigError("cannot stack fields living on different grids")
    return PhysicalField(grid, np.concatenate([f.values for f in fields], axis=0))


def mean_removed(field: PhysicalField) -> PhysicalField:
    means = field.component_means()
    return PhysicalField(field.grid, field.values - means.reshape((-1,) + (1,) * field.grid.dim))
