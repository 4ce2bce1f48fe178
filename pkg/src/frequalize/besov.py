"""Discrete Besov and Chemin-Lerner norms built on the dyadic blocks.

A Besov norm weights the block L^p norms by 2^(q s) and aggregates them in
l^r over the block index.  Homogeneous norms run over every active shell and
exclude the zero mode; its mean is reported separately (the torus analogue
of working modulo polynomials).  Inhomogeneous norms start at the low-pass
block q = -1 and therefore see the mean.

Chemin-Lerner (tilde) norms take the time integrability inside the block
sum: per block an L^theta quadrature over [0, T] of the block L^p norms,
then the l^r aggregation.  Time quadrature is trapezoidal.

Implied constants of the classical embedding and product inequalities
depend on the cutoff profile; they are measured by the probe helpers and
tracked for refinement stability, never asserted against fixed values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, HypothesisError
from .grid import (
    PhysicalField,
    SpectralField,
    forward_transform,
    inverse_transform,
    lp_norm,
    spectral_l2_norm,
)
from .littlewood_paley import (
    BlockIndexRange,
    RadialCutoffs,
    block,
    block_multiplier,
)


@dataclass(frozen=True)
class BesovSpec:
    """Regularity s, integrability p, summation r, and homogeneity flag."""

    s: float
    p: float = 2.0
    r: float = 2.0
    homogeneous: bool = True

    def __post_init__(self) -> None:
        if self.p < 1 or self.r < 1:
            raise ConfigError(f"Besov indices require p, r >= 1 (got p={self.p}, r={self.r})")

    def label(self) -> str:
        dot = "hom" if self.homogeneous else "inhom"
        return f"B[s={self.s:g},p={self.p:g},r={self.r:g},{dot}]"


@dataclass(frozen=True)
class CheminLernerSpec:
    """A Besov spec plus the time integrability theta on [0, T]."""

    space: BesovSpec
    theta: float

    def __post_init__(self) -> None:
        if self.theta < 1:
            raise ConfigError(f"time integrability theta must be >= 1, got {self.theta}")


@dataclass(frozen=True)
class NormReport:
    spec: BesovSpec
    value: float
    contributions: dict[int, float]
    mean_magnitude: float = 0.0


def _ell_r(values: np.ndarray, r: float) -> float:
    if values.size == 0:
        return 0.0
    if math.isinf(r):
        return float(np.max(values))
    return float(np.sum(values**r) ** (1.0 / r))


def _to_spectral(f: PhysicalField | SpectralField) -> SpectralField:
    return f if isinstance(f, SpectralField) else forward_transform(f)


def _block_lp(g: SpectralField, q: int, p: float, homogeneous: bool,
              cutoffs: RadialCutoffs | None) -> float:
    if p == 2.0:
        mult = block_multiplier(g.grid, q, homogeneous=homogeneous, cutoffs=cutoffs)
        return spectral_l2_norm(g, weights=mult)
    piece = block(g, q, homogeneous=homogeneous, cutoffs=cutoffs)
    # blocks of real fields are real by construction (real radial multiplier);
    # skip the symmetry gate, which is meaningless on roundoff-level blocks
    return lp_norm(inverse_transform(piece, require_real=False), p)


def besov_norm(
    f: PhysicalField | SpectralField,
    spec: BesovSpec,
    *,
    cutoffs: RadialCutoffs | None = None,
) -> NormReport:
    """Block-weighted norm: l^r over q of 2^(q s) ||block_q f||_Lp."""
    g = _to_spectral(f)
    rng = BlockIndexRange.for_grid(g.grid)
    q_lo = rng.q_min if spec.homogeneous else -1
    raw = {
        q: _block_lp(g, q, spec.p, spec.homogeneous, cutoffs)
        for q in range(q_lo, rng.q_max + 1)
    }
    # blocks at the transform's roundoff floor are artifacts, not content
    floor = 1e-13 * max(raw.values(), default=0.0)
    contributions = {q: 2.0 ** (q * spec.s) * b for q, b in raw.items() if b > floor}
    value = _ell_r(np.array(list(contributions.values())), spec.r)
    mean_mag = 0.0
    if spec.homogeneous:
        zero = (slice(None),) + (0,) * g.grid.dim
        mean_mag = float(np.linalg.norm(g.coefficients[zero])) / g.grid.volume
    return NormReport(spec=spec, value=value, contributions=contributions, mean_magnitude=mean_mag)


def negative_norm(
    f: PhysicalField | SpectralField, varrho: float, *, cutoffs: RadialCutoffs | None = None
) -> float:
    """sup_q 2^(-q varrho) ||block_q f||_L2 (homogeneous, varrho > 0)."""
    if varrho <= 0:
        raise ConfigError(f"negative-order norm requires varrho > 0, got {varrho}")
    return besov_norm(f, BesovSpec(-varrho, 2.0, math.inf, True), cutoffs=cutoffs).value


def _time_lp(values: np.ndarray, times: np.ndarray, theta: float) -> float:
    if math.isinf(theta):
        return float(np.max(values))
    return float(np.trapezoid(values**theta, times) ** (1.0 / theta))


def _block_norm_series(
    series: Sequence[PhysicalField | SpectralField],
    spec: BesovSpec,
    cutoffs: RadialCutoffs | None,
) -> tuple[np.ndarray, np.ndarray]:
    """(qs, matrix[t_index, q_index]) of block L^p norms for a field series."""
    g0 = _to_spectral(series[0])
    rng = BlockIndexRange.for_grid(g0.grid)
    q_lo = rng.q_min if spec.homogeneous else -1
    qs = np.arange(q_lo, rng.q_max + 1)
    rows = []
    for f in series:
        g = _to_spectral(f)
        rows.append([_block_lp(g, int(q), spec.p, spec.homogeneous, cutoffs) for q in qs])
    return qs, np.array(rows)


def chemin_lerner_norm(
    series: Sequence[PhysicalField | SpectralField],
    times: Sequence[float],
    spec: CheminLernerSpec,
    *,
    cutoffs: RadialCutoffs | None = None,
) -> float:
    """Tilde norm: per block the time L^theta of the L^p norms, then l^r."""
    times = np.asarray(times, dtype=float)
    if len(series) < 2 or times.size != len(series):
        raise ConfigError("time series needs at least 2 time-stamped samples")
    qs, mat = _block_norm_series(series, spec.space, cutoffs)
    per_block = np.array([_time_lp(mat[:, i], times, spec.theta) for i in range(qs.size)])
    weighted = 2.0 ** (qs * spec.space.s) * per_block
    return _ell_r(weighted[weighted > 0], spec.space.r)


def mixed_time_norm(
    series: Sequence[PhysicalField | SpectralField],
    times: Sequence[float],
    spec: CheminLernerSpec,
    *,
    cutoffs: RadialCutoffs | None = None,
) -> float:
    """Plain mixed norm: time L^theta of the full Besov values."""
    times = np.asarray(times, dtype=float)
    vals = np.array([besov_norm(f, spec.space, cutoffs=cutoffs).value for f in series])
    return _time_lp(vals, times, spec.theta)


def chemin_lerner_report(
    series: Sequence[PhysicalField | SpectralField],
    times: Sequence[float],
    spec: CheminLernerSpec,
    *,
    cutoffs: RadialCutoffs | None = None,
) -> tuple[float, bool]:
    """(value, under_resolved): flags when halving the sampling moves the value >= 1%."""
    value = chemin_lerner_norm(series, times, spec, cutoffs=cutoffs)
    if len(series) >= 5:
        idx = list(range(0, len(series), 2))
        if idx[-1] != len(series) - 1:
            idx.append(len(series) - 1)
        coarse = chemin_lerner_norm(
            [series[i] for i in idx], np.asarray(times)[idx], spec, cutoffs=cutoffs
        )
        under = abs(coarse - value) >= 0.01 * max(value, 1e-300)
    else:
        under = True
    return value, under


# ---------------------------------------------------------------------------
# measured-constant probes for the classical inequalities


@dataclass(frozen=True)
class ProbeReport:
    kind: str
    ratios: tuple[float, ...]
    max_ratio: float


def _safe_ratio(lhs: float, rhs: float) -> float:
    if lhs == 0.0:
        return 0.0
    if rhs == 0.0:
        return math.inf
    return lhs / rhs


def inequality_probe(
    kind: str,
    samples: Sequence,
    *,
    s: float = 1.0,
    p: float = 2.0,
    r: float = 1.0,
    p_dst: float = 2.0,
    holder: tuple[float, float, float, float] | None = None,
    cutoffs: RadialCutoffs | None = None,
) -> ProbeReport:
    """Max measured LHS/RHS over samples for one of the classical estimates.

    kind:
      "embedding_lp"     lower-p to higher-p embedding with regularity drop
                         n(1/p - 1/p_dst); samples are fields
      "embedding_sup"    sup-norm domination by the critical-regularity norm;
                         samples are fields
      "product_algebra"  sup-norm/Besov product bound (s > 0); samples are
                         (f, g) pairs
      "product_holder"   Hoelder-split product bound (s > 0) with exponents
                         holder=(p1, p2, p3, p4); samples are (f, g) pairs
      "norm_split"       two-sided comparability of the inhomogeneous norm
                         with L^p plus the homogeneous norm (s > 0); samples
                         are fields and the ratio is inhomogeneous / split
    """
    ratios: list[float] = []
    if kind == "embedding_lp":
        if p > p_dst:
            raise HypothesisError(
                f"embedding requires source integrability <= target (p={p} > p_dst={p_dst})"
            )
        for f in samples:
            n = f.grid.dim
            s_dst = s - n * (1.0 / p - 1.0 / p_dst)
            lhs = besov_norm(f, BesovSpec(s_dst, p_dst, r, True), cutoffs=cutoffs).value
            rhs = besov_norm(f, BesovSpec(s, p, r, True), cutoffs=cutoffs).value
            ratios.append(_safe_ratio(lhs, rhs))
    elif kind == "embedding_sup":
        for f in samples:
            n = f.grid.dim
            lhs = lp_norm(f, math.inf)
            rhs = besov_norm(f, BesovSpec(n / p, p, 1.0, True), cutoffs=cutoffs).value
            ratios.append(_safe_ratio(lhs, rhs))
    elif kind == "product_algebra":
        if s <= 0:
            raise HypothesisError(f"product estimate requires s > 0, got s={s}")
        for f, g in samples:
            prod = PhysicalField(f.grid, f.values * g.values)
            lhs = besov_norm(prod, BesovSpec(s, p, r, True), cutoffs=cutoffs).value
            rhs = lp_norm(f, math.inf) * besov_norm(g, BesovSpec(s, p, r, True), cutoffs=cutoffs).value
            rhs += lp_norm(g, math.inf) * besov_norm(f, BesovSpec(s, p, r, True), cutoffs=cutoffs).value
            ratios.append(_safe_ratio(lhs, rhs))
    elif kind == "product_holder":
        if s <= 0:
            raise HypothesisError(f"product estimate requires s > 0, got s={s}")
        if holder is None:
            raise ConfigError("product_holder needs holder=(p1, p2, p3, p4)")
        p1, p2, p3, p4 = holder
        for pair in ((p1, p2), (p3, p4)):
            if abs(1.0 / pair[0] + 1.0 / pair[1] - 1.0 / p) > 1e-12:
                raise HypothesisError(
                    f"integrability split 1/{pair[0]} + 1/{pair[1]} != 1/{p}"
                )
        for f, g in samples:
            prod = PhysicalField(f.grid, f.values * g.values)
            lhs = besov_norm(prod, BesovSpec(s, p, r, True), cutoffs=cutoffs).value
            rhs = lp_norm(f, p1) * besov_norm(g, BesovSpec(s, p2, r, True), cutoffs=cutoffs).value
            rhs += lp_norm(g, p3) * besov_norm(f, BesovSpec(s, p4, r, True), cutoffs=cutoffs).value
            ratios.append(_safe_ratio(lhs, rhs))
    elif kind == "norm_split":
        if s <= 0:
            raise HypothesisError(f"norm split requires s > 0, got s={s}")
        for f in samples:
            lhs = besov_norm(f, BesovSpec(s, p, r, False), cutoffs=cutoffs).value
            rhs = lp_norm(f, p) + besov_norm(f, BesovSpec(s, p, r, True), cutoffs=cutoffs).value
            ratios.append(_safe_ratio(lhs, rhs))
    else:
        raise ConfigError(f"unknown probe kind {kind!r}")
    finite = [x for x in ratios if math.isfinite(x)]
    return ProbeReport(kind=kind, ratios=tuple(ratios), max_ratio=max(finite) if finite else 0.0)


# ---------------------------------------------------------------------------
# runtime energy functionals for perturbation states


@dataclass(frozen=True)
class EnergyFunctionals:
    """Diagnostic functionals of a perturbation run, one value per prefix [0, t].

    l2      plain L^2 norm of the full state at each sample time
    n       running sup of (1+t)^(3/4) ||z||_L2
    d       dissipation budget: time-L^2 of the component Besov norms
            (density & velocity at s=5/2, electric at 3/2, magnetic gradient
            at 1/2; all inhomogeneous, p=2, r=1)
    n0      tilde sup (per-block max over time before the block sum) of the
            s=5/2 norm of the full state
    d0      tilde version of the dissipation budget
    """

    times: np.ndarray
    l2: np.ndarray
    n: np.ndarray
    d: np.ndarray
    n0: np.ndarray
    d0: np.ndarray


_DISSIPATION_NORMS = (("rho", 2.5), ("velocity", 2.5), ("electric", 1.5), ("magnetic_grad", 0.5))
STATE_REGULARITY = 2.5


def _group_spectra(sample) -> dict[str, SpectralField]:
    rho, vel, e_field, h_field = sample
    grid = rho.grid
    all_z = np.concatenate([rho.values, vel.values, e_field.values, h_field.values], axis=0)
    zhat = forward_transform(PhysicalField(grid, all_z))
    c = zhat.coefficients
    return {
        "z": zhat,
        "rho": SpectralField(grid, c[0:1]),
        "velocity": SpectralField(grid, c[1:4]),
        "electric": SpectralField(grid, c[4:7]),
        "magnetic_grad": SpectralField(grid, c[7:10] * grid.frequency_magnitude),
    }


def energy_functionals(
    samples: Sequence, times: Sequence[float], *, cutoffs: RadialCutoffs | None = None
) -> EnergyFunctionals:
    """Compute the runtime functionals for a series of (rho, vel, E, h) samples."""
    times = np.asarray(times, dtype=float)
    if times.size != len(samples):
        raise ConfigError("times and samples length mismatch")
    grid = samples[0][0].grid
    rng = BlockIndexRange.for_grid(grid)
    qs = np.arange(-1, rng.q_max + 1)
    nt, nq = times.size, qs.size

    block_z = np.zeros((nt, nq))
    block_group = {name: np.zeros((nt, nq)) for name, _ in _DISSIPATION_NORMS}
    l2 = np.zeros(nt)
    for i, sample in enumerate(samples):
        spectra = _group_spectra(sample)
        l2[i] = spectral_l2_norm(spectra["z"])
        for j, q in enumerate(qs):
            mult = block_multiplier(grid, int(q), homogeneous=False, cutoffs=cutoffs)
            block_z[i, j] = spectral_l2_norm(spectra["z"], weights=mult)
            for name, _ in _DISSIPATION_NORMS:
                block_group[name][i, j] = spectral_l2_norm(spectra[name], weights=mult)

    def cumtrapz(y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(y)
        if y.shape[0] > 1:
            seg = 0.5 * (y[1:] + y[:-1]) * np.diff(times).reshape(-1, *([1] * (y.ndim - 1)))
            out[1:] = np.cumsum(seg, axis=0)
        return out

    n_func = np.maximum.accumulate((1.0 + times) ** 0.75 * l2)

    w_state = 2.0 ** (qs * STATE_REGULARITY)
    n0 = np.maximum.accumulate(block_z, axis=0) @ w_state

    d = np.zeros(nt)
    d0 = np.zeros(nt)
    for name, s_val in _DISSIPATION_NORMS:
        w = 2.0 ** (qs * s_val)
        besov_series = block_group[name] @ w
        d += np.sqrt(cumtrapz(besov_series**2))
        d0 += np.sqrt(cumtrapz(block_group[name] ** 2)) @ w
    return EnergyFunctionals(times=times, l2=l2, n=n_func, d=d, n0=n0, d0=d0)
