"""Besov / Chemin-Lerner norms, inequality probes and energy functionals."""

import math

import numpy as np
import pytest

from frequalize.besov import (
    BesovSpec,
    CheminLernerSpec,
    EnergyFunctionals,
    besov_norm,
    chemin_lerner_norm,
    chemin_lerner_report,
    energy_functionals,
    inequality_probe,
    mixed_time_norm,
    negative_norm,
)
from frequalize.errors import ConfigError, HypothesisError
from frequalize.grid import (
    PhysicalField,
    SpectralField,
    TorusGrid,
    forward_transform,
    inverse_transform,
    lp_norm,
    mean_removed,
    random_band_limited_field,
)
from frequalize.littlewood_paley import DEFAULT_CUTOFFS


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(2024)


def single_shell_field(grid: TorusGrid, q0: int, kvec) -> PhysicalField:
    """Field whose spectrum sits where the level-q0 multiplier equals 1.

    kvec must satisfy |xi| 2^-q0 strictly inside (4/3, 3/2) so neighbouring
    shells vanish there.
    """
    coeffs = np.zeros(grid.shape, dtype=complex)
    idx = tuple(k % grid.points_per_axis for k in kvec)
    conj_idx = tuple((-k) % grid.points_per_axis for k in kvec)
    coeffs[idx] = 0.5 * grid.volume
    coeffs[conj_idx] = 0.5 * grid.volume
    ratio = grid.frequency_magnitude[idx] / 2.0**q0
    assert 4.0 / 3.0 < ratio < 1.5, "test construction: mode must sit on the plateau"
    return inverse_transform(SpectralField(grid, coeffs))


class TestBesovNorm:
    def test_single_shell_is_one_term(self):
        grid = TorusGrid(dim=3, box_length=2 * np.pi, points_per_axis=32)
        f = single_shell_field(grid, 2, (5, 2, 1))  # |xi| = sqrt(30) in (16/3, 6)
        for p in (1.0, 2.0, math.inf):
            for s in (-1.5, 0.0, 2.5):
                rep = besov_norm(f, BesovSpec(s, p, 1.0, True))
                assert list(rep.contributions) == [2]
                assert rep.value == pytest.approx(2.0 ** (2 * s) * lp_norm(f, p), rel=1e-12)

    def test_summation_monotonicity(self, rng):
        grid = TorusGrid(dim=2, box_length=5.0, points_per_axis=32)
        f = random_band_limited_field(grid, 1, rng)
        vals = [besov_norm(f, BesovSpec(0.5, 2.0, r, True)).value for r in (1.0, 2.0, math.inf)]
        assert vals[0] >= vals[1] >= vals[2] > 0

    def test_l2_equivalence_window(self, rng):
        grid = TorusGrid(dim=2, box_length=5.0, points_per_axis=32)
        for _ in range(5):
            f = random_band_limited_field(grid, 1, rng, zero_mean=False)
            v = besov_norm(f, BesovSpec(0.0, 2.0, 2.0, True)).value
            base = lp_norm(mean_removed(f), 2.0)
            assert base / math.sqrt(2) <= v <= base * math.sqrt(2)

    def test_triangle_and_homogeneity(self, rng):
        grid = TorusGrid(dim=1, box_length=3.0, points_per_axis=64)
        spec = BesovSpec(1.5, 2.0, 1.0, True)
        for _ in range(5):
            f = random_band_limited_field(grid, 1, rng)
            g = random_band_limited_field(grid, 1, rng)
            fg = PhysicalField(grid, f.values + g.values)
            vf, vg, vfg = (besov_norm(h, spec).value for h in (f, g, fg))
            assert vfg <= vf + vg + 1e-10 * (vf + vg)
            assert besov_norm(PhysicalField(grid, 2 * f.values), spec).value == pytest.approx(
                2 * vf, rel=1e-12
            )

    def test_mean_reported_separately(self, rng):
        grid = TorusGrid(dim=2, box_length=4.0, points_per_axis=16)
        f = random_band_limited_field(grid, 1, rng)
        shifted = PhysicalField(grid, f.values + 3.0)
        rep0 = besov_norm(f, BesovSpec(1.0, 2.0, 1.0, True))
        rep1 = besov_norm(shifted, BesovSpec(1.0, 2.0, 1.0, True))
        assert rep1.value == pytest.approx(rep0.value, rel=1e-12)
        assert rep1.mean_magnitude == pytest.approx(3.0, rel=1e-12)

    def test_grid_independence_for_band_limited(self, rng):
        length = 6.0
        coarse = TorusGrid(dim=2, box_length=length, points_per_axis=32)
        fine = TorusGrid(dim=2, box_length=length, points_per_axis=64)
        f = random_band_limited_field(coarse, 1, rng)
        fhat = forward_transform(f).coefficients[0]
        fine_hat = np.zeros(fine.shape, dtype=complex)
        half = coarse.points_per_axis // 2
        sl = np.r_[0:half, -half:0]
        fine_hat[np.ix_(sl, sl)] = fhat
        f_fine = inverse_transform(SpectralField(fine, fine_hat))
        spec = BesovSpec(1.5, 2.0, 1.0, True)
        v0 = besov_norm(f, spec).value
        v1 = besov_norm(f_fine, spec).value
        assert abs(v1 - v0) <= 1e-8 * v0

    def test_negative_norm_support_bound(self, rng):
        grid = TorusGrid(dim=2, box_length=5.0, points_per_axis=32)
        f = random_band_limited_field(grid, 1, rng)
        rho = 1.5
        rep = besov_norm(f, BesovSpec(0.0, 2.0, math.inf, True))
        bound = rep.value * max(2.0 ** (-q * rho) for q in rep.contributions)
        assert negative_norm(f, rho) <= bound * (1 + 1e-12)


class TestNegativeNorm:
    def test_single_shell(self):
        grid = TorusGrid(dim=3, box_length=2 * np.pi, points_per_axis=32)
        f = single_shell_field(grid, 2, (5, 2, 1))
        assert negative_norm(f, 1.5) == pytest.approx(2.0 ** (-3.0) * lp_norm(f, 2.0), rel=1e-12)

    def test_scaling(self, rng):
        grid = TorusGrid(dim=2, box_length=4.0, points_per_axis=16)
        f = random_band_limited_field(grid, 1, rng)
        doubled = PhysicalField(grid, 2 * f.values)
        assert negative_norm(doubled, 0.7) == pytest.approx(2 * negative_norm(f, 0.7), rel=1e-12)

    def test_requires_positive_order(self, rng):
        grid = TorusGrid(dim=1, box_length=4.0, points_per_axis=16)
        f = random_band_limited_field(grid, 1, rng)
        with pytest.raises(ConfigError):
            negative_norm(f, -1.0)


def continuum_gaussian_negative_norm(width: float, varrho: float = 1.5) -> float:
    """Radial-quadrature oracle for the negative-order norm of a normalized
    Gaussian (unit L^1 mass, spectrum exp(-w^2 rho^2 / 2)) in 3-d."""
    out = 0.0
    for q in range(-30, 20):
        lo, hi = 0.75 * 2.0**q, 8.0 / 3.0 * 2.0**q
        rho = np.linspace(lo, hi, 400)
        phi = DEFAULT_CUTOFFS.phi(rho / 2.0**q)
        integrand = phi**2 * np.exp(-(width**2) * rho**2) * rho**2
        b_sq = np.trapezoid(integrand, rho) * 4 * np.pi / (2 * np.pi) ** 3
        out = max(out, 2.0 ** (-q * varrho) * math.sqrt(b_sq))
    return out


class TestLowOrderEmbedding:
    def test_gaussian_ratio_matches_radial_oracle(self):
        width = 1.0
        length = 32.0
        grid = TorusGrid(dim=3, box_length=length, points_per_axis=32)
        centered = [c - length / 2 for c in grid.coordinates]
        r2 = sum(c**2 for c in centered)
        f = PhysicalField(grid, np.exp(-r2 / (2 * width**2)) / (2 * np.pi * width**2) ** 1.5)
        c_measured = negative_norm(f, 1.5) / lp_norm(f, 1.0)
        c_oracle = continuum_gaussian_negative_norm(width)
        assert c_measured == pytest.approx(c_oracle, rel=0.2)


class TestCheminLerner:
    def test_time_constant_factorizes(self, rng):
        grid = TorusGrid(dim=2, box_length=5.0, points_per_axis=16)
        f = random_band_limited_field(grid, 1, rng)
        times = np.linspace(0.0, 2.0, 9)
        series = [f] * times.size
        base = besov_norm(f, BesovSpec(1.0, 2.0, 1.0, True)).value
        for theta in (1.0, 2.0, math.inf):
            spec = CheminLernerSpec(BesovSpec(1.0, 2.0, 1.0, True), theta)
            expected = base * (2.0 ** (1.0 / theta) if not math.isinf(theta) else 1.0)
            assert chemin_lerner_norm(series, times, spec) == pytest.approx(expected, rel=1e-12)

    def test_minkowski_orderings(self, rng):
        grid = TorusGrid(dim=2, box_length=5.0, points_per_axis=16)
        times = np.linspace(0.0, 1.0, 7)
        series = [random_band_limited_field(grid, 1, rng) for _ in times]
        tilde_hi = chemin_lerner_norm(series, times, CheminLernerSpec(BesovSpec(1.0, 2.0, 2.0, True), 1.0))
        plain_hi = mixed_time_norm(series, times, CheminLernerSpec(BesovSpec(1.0, 2.0, 2.0, True), 1.0))
        assert tilde_hi <= plain_hi * (1 + 1e-12)  # r >= theta
        tilde_lo = chemin_lerner_norm(series, times, CheminLernerSpec(BesovSpec(1.0, 2.0, 1.0, True), 2.0))
        plain_lo = mixed_time_norm(series, times, CheminLernerSpec(BesovSpec(1.0, 2.0, 1.0, True), 2.0))
        assert tilde_lo >= plain_lo * (1 - 1e-12)  # r <= theta

    def test_single_shell_series_collapses(self):
        grid = TorusGrid(dim=3, box_length=2 * np.pi, points_per_axis=32)
        f = single_shell_field(grid, 2, (5, 2, 1))
        times = np.linspace(0.0, 1.0, 9)
        series = [PhysicalField(grid, math.exp(-t) * f.values) for t in times]
        spec_t = CheminLernerSpec(BesovSpec(0.5, 2.0, 1.0, True), 2.0)
        assert chemin_lerner_norm(series, times, spec_t) == pytest.approx(
            mixed_time_norm(series, times, spec_t), rel=1e-12
        )

    def test_needs_two_samples(self, rng):
        grid = TorusGrid(dim=1, box_length=4.0, points_per_axis=16)
        f = random_band_limited_field(grid, 1, rng)
        with pytest.raises(ConfigError):
            chemin_lerner_norm([f], [0.0], CheminLernerSpec(BesovSpec(1.0), 2.0))

    def test_resolution_flag(self, rng):
        grid = TorusGrid(dim=1, box_length=4.0, points_per_axis=32)
        f = random_band_limited_field(grid, 1, rng)
        times = np.linspace(0.0, 1.0, 33)
        smooth = [PhysicalField(grid, math.exp(-t) * f.values) for t in times]
        _, under = chemin_lerner_report(smooth, times, CheminLernerSpec(BesovSpec(1.0), 2.0))
        assert not under
        jumpy = [
            PhysicalField(grid, (1.0 + 0.9 * math.sin(40 * t)) * f.values) for t in times
        ]
        _, under = chemin_lerner_report(jumpy, times, CheminLernerSpec(BesovSpec(1.0), 2.0))
        assert under


class TestProbes:
    def test_algebra_probe_single_shell(self):
        grid = TorusGrid(dim=3, box_length=2 * np.pi, points_per_axis=32)
        f = single_shell_field(grid, 2, (5, 2, 1))
        rep = inequality_probe("product_algebra", [(f, f)], s=1.0, p=2.0, r=1.0)
        assert math.isfinite(rep.max_ratio)
        assert rep.max_ratio > 0

    def test_lp_embedding_on_gaussians(self):
        length = 24.0
        grid = TorusGrid(dim=3, box_length=length, points_per_axis=32)
        centered = [c - length / 2 for c in grid.coordinates]
        r2 = sum(c**2 for c in centered)
        fields = [
            PhysicalField(grid, np.exp(-r2 / (2 * w**2))) for w in (1.0, 1.5, 2.0)
        ]
        rep = inequality_probe("embedding_lp", fields, s=2.0, p=1.0, p_dst=2.0, r=1.0)
        assert math.isfinite(rep.max_ratio) and rep.max_ratio > 0

    def test_sup_embedding(self, rng):
        grid = TorusGrid(dim=2, box_length=5.0, points_per_axis=32)
        fields = [random_band_limited_field(grid, 1, rng) for _ in range(3)]
        rep = inequality_probe("embedding_sup", fields, p=2.0)
        assert math.isfinite(rep.max_ratio) and rep.max_ratio > 0

    def test_zero_sample_gives_zero_ratio(self):
        grid = TorusGrid(dim=2, box_length=5.0, points_per_axis=16)
        z = PhysicalField(grid, np.zeros(grid.shape))
        rep = inequality_probe("product_algebra", [(z, z)], s=1.0)
        assert rep.ratios == (0.0,)

    def test_hypothesis_violations_named(self, rng):
        grid = TorusGrid(dim=1, box_length=4.0, points_per_axis=16)
        f = random_band_limited_field(grid, 1, rng)
        with pytest.raises(HypothesisError, match="s > 0"):
            inequality_probe("product_algebra", [(f, f)], s=-1.0)
        with pytest.raises(HypothesisError, match="integrability"):
            inequality_probe("embedding_lp", [f], s=1.0, p=2.0, p_dst=1.0)
        with pytest.raises(HypothesisError, match="split"):
            inequality_probe("product_holder", [(f, f)], s=1.0, p=1.0, holder=(2.0, 3.0, 2.0, 2.0))

    def test_holder_split_probe(self, rng):
        grid = TorusGrid(dim=2, box_length=5.0, points_per_axis=32)
        pairs = [
            (random_band_limited_field(grid, 1, rng), random_band_limited_field(grid, 1, rng))
            for _ in range(3)
        ]
        rep = inequality_probe(
            "product_holder", pairs, s=1.0, p=1.0, r=2.0, holder=(2.0, 2.0, 2.0, 2.0)
        )
        assert math.isfinite(rep.max_ratio) and rep.max_ratio > 0

    def test_norm_split_two_sided(self, rng):
        # the inhomogeneous norm is comparable with L^p plus the homogeneous
        # norm: both direction constants stay in a moderate window
        grid = TorusGrid(dim=2, box_length=5.0, points_per_axis=32)
        fields = [random_band_limited_field(grid, 1, rng, zero_mean=False) for _ in range(5)]
        rep = inequality_probe("norm_split", fields, s=1.5, p=2.0, r=1.0)
        assert all(0.05 < x < 20.0 for x in rep.ratios)


def _state_sample(grid: TorusGrid, rng, scale: float = 1.0):
    rho = random_band_limited_field(grid, 1, rng)
    vel = random_band_limited_field(grid, 3, rng)
    e = random_band_limited_field(grid, 3, rng)
    h = random_band_limited_field(grid, 3, rng)
    return tuple(
        PhysicalField(grid, scale * f.values) for f in (rho, vel, e, h)
    )


class TestEnergyFunctionals:
    def test_zero_state(self):
        grid = TorusGrid(dim=3, box_length=5.0, points_per_axis=8)
        zeros = tuple(
            PhysicalField(grid, np.zeros((c,) + grid.shape)) for c in (1, 3, 3, 3)
        )
        times = np.linspace(0, 1, 4)
        out = energy_functionals([zeros] * 4, times)
        for arr in (out.l2, out.n, out.d, out.n0, out.d0):
            assert np.all(arr == 0.0)

    def test_exact_power_law_gives_flat_weighted_sup(self, rng):
        grid = TorusGrid(dim=3, box_length=5.0, points_per_axis=8)
        base = _state_sample(grid, rng)
        times = np.linspace(0.0, 3.0, 7)
        samples = [
            tuple(PhysicalField(grid, (1 + t) ** -0.75 * f.values) for f in base)
            for t in times
        ]
        out = energy_functionals(samples, times)
        assert np.allclose(out.n, out.n[0], rtol=1e-12)
        assert out.n[0] == pytest.approx(out.l2[0], rel=1e-12)

    def test_monotone_prefix_functionals(self, rng):
        grid = TorusGrid(dim=3, box_length=5.0, points_per_axis=8)
        times = np.linspace(0.0, 1.0, 5)
        samples = [_state_sample(grid, rng) for _ in times]
        out = energy_functionals(samples, times)
        for arr in (out.n, out.d, out.n0, out.d0):
            assert np.all(np.diff(arr) >= -1e-14)
        # tilde dissipation dominates the plain one blockwise (Minkowski)
        assert np.all(out.d0 >= out.d - 1e-12)
