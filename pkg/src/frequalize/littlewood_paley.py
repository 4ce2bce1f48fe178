"""Dyadic partition of unity and frequency-block operators.

The radial profile chi equals 1 on |xi| <= 3/4 and vanishes for |xi| >= 4/3;
phi(xi) = chi(xi/2) - chi(xi) is supported on the shell 3/4 <= |xi| <= 8/3.
Rescaled copies phi(2^-q xi) tile the frequency lattice with at most two
shells overlapping any point, and they telescope:

    chi(xi) + sum_{q>=0} phi(2^-q xi) = 1            (everywhere)
    sum_{q in Z} phi(2^-q xi) = 1                    (xi != 0)

Block operators multiply spectral coefficients by these profiles.  On the
torus the homogeneous family never touches the zero mode, so homogeneous
sums reconstruct a field up to its mean; that mean is the only polynomial
the torus can represent, which realizes the usual quotient convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from .errors import ConfigError, ZeroBlockError
from .grid import SpectralField, TorusGrid, spectral_l2_norm

INNER_PLATEAU = 0.75  # chi == 1 inside this radius
OUTER_SUPPORT = 4.0 / 3.0  # chi == 0 outside this radius
SHELL_INNER = 0.75  # phi support lower edge
SHELL_OUTER = 8.0 / 3.0  # phi support upper edge


def exponential_ramp(t: np.ndarray) -> np.ndarray:
    """C-infinity monotone ramp from 0 at t<=0 to 1 at t>=1.

    Built from the standard bump g(t) = exp(-1/t): S = g(t)/(g(t)+g(1-t)).
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0.0) & (t < 1.0)
    ti = t[inside]
    with np.errstate(over="ignore"):
        a = np.exp(-1.0 / ti)
        b = np.exp(-1.0 / (1.0 - ti))
    out[inside] = a / (a + b)
    out[t >= 1.0] = 1.0
    return out


@dataclass(frozen=True, eq=False)
class RadialCutoffs:
    """The (chi, phi) profile pair; shared read-only once constructed."""

    ramp: Callable[[np.ndarray], np.ndarray] = field(default=exponential_ramp)

    def chi(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        t = (r - INNER_PLATEAU) / (OUTER_SUPPORT - INNER_PLATEAU)
        return 1.0 - self.ramp(t)

    def phi(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return self.chi(0.5 * r) - self.chi(r)


def build_cutoffs(ramp: Callable[[np.ndarray], np.ndarray] | None = None) -> RadialCutoffs:
    return RadialCutoffs(ramp) if ramp is not None else RadialCutoffs()


DEFAULT_CUTOFFS = build_cutoffs()


@dataclass(frozen=True)
class BlockIndexRange:
    """Dyadic indices whose shells can intersect the nonzero lattice.

    One guard index is kept on each side; the guards are identically zero on
    the lattice, so truncating the bi-infinite family to this range is exact.
    """

    q_min: int
    q_max: int

    @classmethod
    def for_grid(cls, grid: TorusGrid) -> "BlockIndexRange":
        q_min = math.ceil(math.log2(3.0 * grid.xi_min / 8.0)) - 1
        q_max = math.floor(math.log2(4.0 * grid.xi_max / 3.0)) + 1
        return cls(q_min=q_min, q_max=q_max)

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.q_min, self.q_max + 1))

    def __contains__(self, q: int) -> bool:
        return self.q_min <= q <= self.q_max


@lru_cache(maxsize=16)
def _block_multiplier(grid: TorusGrid, cutoffs: RadialCutoffs, q: int, homogeneous: bool) -> np.ndarray:
    mag = grid.frequency_magnitude
    if not homogeneous and q == -1:
        return cutoffs.chi(mag)
    return cutoffs.phi(mag * 2.0**-q)


def block_multiplier(
    grid: TorusGrid, q: int, *, homogeneous: bool = True, cutoffs: RadialCutoffs | None = None
) -> np.ndarray:
    """Lattice values of the block-q Fourier multiplier."""
    cutoffs = cutoffs or DEFAULT_CUTOFFS
    if not homogeneous and q <= -2:
        return np.zeros(grid.shape)
    return _block_multiplier(grid, cutoffs, q, homogeneous)


def block(
    field: SpectralField,
    q: int,
    *,
    homogeneous: bool = True,
    cutoffs: RadialCutoffs | None = None,
) -> SpectralField:
    """Extract the dyadic block: coefficientwise phi(2^-q xi) (chi for q=-1).

    Out-of-range q returns the zero field, matching the convention that the
    inhomogeneous family vanishes below q = -1.
    """
    mult = block_multiplier(field.grid, q, homogeneous=homogeneous, cutoffs=cutoffs)
    return SpectralField(field.grid, field.coefficients * mult)


def block_l2_norm(
    field: SpectralField,
    q: int,
    *,
    homogeneous: bool = True,
    cutoffs: RadialCutoffs | None = None,
    extra_weight: np.ndarray | None = None,
) -> float:
    """L^2 norm of one block without leaving coefficient space."""
    mult = block_multiplier(field.grid, q, homogeneous=homogeneous, cutoffs=cutoffs)
    if extra_weight is not None:
        mult = mult * extra_weight
    return spectral_l2_norm(field, weights=mult)


@dataclass(frozen=True)
class LPDecomposition:
    """Indexed dyadic blocks of one spectral field."""

    source: SpectralField
    homogeneous: bool
    blocks: dict[int, SpectralField]

    def reconstruct(self) -> SpectralField:
        total = np.zeros_like(self.source.coefficients)
        for piece in self.blocks.values():
            total = total + piece.coefficients
        return SpectralField(self.source.grid, total)


def decompose(
    field: SpectralField, *, homogeneous: bool = True, cutoffs: RadialCutoffs | None = None
) -> LPDecomposition:
    rng = BlockIndexRange.for_grid(field.grid)
    q_lo = rng.q_min if homogeneous else -1
    blocks = {
        q: block(field, q, homogeneous=homogeneous, cutoffs=cutoffs)
        for q in range(q_lo, rng.q_max + 1)
    }
    return LPDecomposition(source=field, homogeneous=homogeneous, blocks=blocks)


def bernstein_ratio(
    field: SpectralField,
    q: int,
    *,
    order: float = 1.0,
    homogeneous: bool = True,
    cutoffs: RadialCutoffs | None = None,
) -> float:
    """Measured ratio ||Lambda^order block|| / (2^(q order) ||block||) in L^2.

    Support of the shell forces the ratio into [ (3/4)^order, (8/3)^order ].
    Raises ZeroBlockError when the block vanishes on the lattice.
    """
    grid = field.grid
    mult = block_multiplier(grid, q, homogeneous=homogeneous, cutoffs=cutoffs)
    base = spectral_l2_norm(field, weights=mult)
    if base == 0.0:
        raise ZeroBlockError(f"block q={q} is zero; derivative ratio undefined")
    deriv = spectral_l2_norm(field, weights=mult * grid.frequency_magnitude**order)
    return deriv / (2.0 ** (q * order) * base)


def partition_defect(
    grid: TorusGrid, *, homogeneous: bool = False, cutoffs: RadialCutoffs | None = None
) -> float:
    """Max lattice deviation of the telescoped profile sum from 1.

    Inhomogeneous form: chi + sum_{q>=0} phi(2^-q .) over every lattice
    point.  Homogeneous form: sum over the active index range, checked on
    the nonzero lattice only.
    """
    rng = BlockIndexRange.for_grid(grid)
    total = np.zeros(grid.shape)
    if homogeneous:
        for q in rng:
            total += block_multiplier(grid, q, homogeneous=True, cutoffs=cutoffs)
        mask = grid.frequency_magnitude > 0
        return float(np.max(np.abs(total[mask] - 1.0)))
    for q in range(-1, rng.q_max + 1):
        total += block_multiplier(grid, q, homogeneous=False, cutoffs=cutoffs)
    return float(np.max(np.abs(total - 1.0)))


def active_blocks(field: SpectralField, *, homogeneous: bool = True,
                  cutoffs: RadialCutoffs | None = None, tol: float = 0.0) -> list[int]:
    """Indices whose block has L^2 norm above tol."""
    rng = BlockIndexRange.for_grid(field.grid)
    q_lo = rng.q_min if homogeneous else -1
    out = []
    for q in range(q_lo, rng.q_max + 1):
        if block_l2_norm(field, q, homogeneous=homogeneous, cutoffs=cutoffs) > tol:
            out.append(q)
    return out


def bernstein_extremes(
    grid: TorusGrid,
    fields: list[SpectralField],
    *,
    cutoffs: RadialCutoffs | None = None,
) -> tuple[float, float]:
    """(min, max) Bernstein ratio over all nonzero blocks of the given fields."""
    lo, hi = math.inf, -math.inf
    rng = BlockIndexRange.for_grid(grid)
    for f in fields:
        for q in rng:
            try:
                r = bernstein_ratio(f, q, cutoffs=cutoffs)
            except ZeroBlockError:
                continue
            lo, hi = min(lo, r), max(hi, r)
    if not math.isfinite(lo):
        raise ConfigError("no nonzero blocks found in the supplied fields")
    return lo, hi
