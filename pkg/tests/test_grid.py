"""Transforms, spectral calculus and quadrature norms on the periodic grid."""

import math

import numpy as np
import pytest

from frequalize.errors import ConfigError
from frequalize.grid import (
    PhysicalField,
    SpectralField,
    TorusGrid,
    forward_transform,
    inverse_transform,
    lp_norm,
    mean_removed,
    random_band_limited_field,
    solenoidal_projection,
    spectral_derivative,
    spectral_l2_norm,
)
from frequalize.io import HEADER_SIZE, dump_field, load_field


def direct_transform(field: PhysicalField) -> np.ndarray:
    """Direct evaluation of (L/N)^dim sum_j f(x_j) exp(-i xi_k.x_j).

    Per-axis DFT matrices applied by explicit summation (einsum); no fast
    transform involved.
    """
    grid = field.grid
    n = grid.points_per_axis
    j = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(j, j) / n)
    v = field.values.astype(complex)
    if grid.dim == 1:
        out = np.einsum("ai,ci->ca", w, v)
    elif grid.dim == 2:
        out = np.einsum("ai,bj,cij->cab", w, w, v)
    else:
        out = np.einsum("ai,bj,dk,cijk->cabd", w, w, w, v, optimize=True)
    return out * grid.cell_volume


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(1234)


class TestTorusGrid:
    def test_frequency_lattice(self):
        g = TorusGrid(dim=1, box_length=10.0, points_per_axis=8)
        xi = g.axis_frequencies
        k = np.array([0, 1, 2, 3, -4, -3, -2, -1])
        assert np.allclose(xi, 2 * np.pi * k / 10.0)
        assert g.xi_min == pytest.approx(2 * np.pi / 10.0)
        assert g.xi_max == pytest.approx(np.pi * 8 / 10.0)

    def test_lattice_symmetric_except_nyquist(self):
        g = TorusGrid(dim=1, box_length=5.0, points_per_axis=16)
        xi = g.axis_frequencies
        # every positive frequency has its negative partner; only the Nyquist
        # row k = -N/2 is unpaired
        positives = xi[1 : 16 // 2]
        for v in positives:
            assert np.any(np.isclose(xi, -v))
        assert np.isclose(xi.min(), -g.xi_max)
        assert not np.any(np.isclose(xi, g.xi_max))

    @pytest.mark.parametrize("dim,n", [(1, 7), (2, 6), (3, 9)])
    def test_rejects_bad_resolution(self, dim, n):
        with pytest.raises(ConfigError):
            TorusGrid(dim=dim, box_length=1.0, points_per_axis=n)

    def test_rejects_bad_dim_and_length(self):
        with pytest.raises(ConfigError):
            TorusGrid(dim=4, box_length=1.0, points_per_axis=8)
        with pytest.raises(ConfigError):
            TorusGrid(dim=2, box_length=-1.0, points_per_axis=8)


class TestTransforms:
    def test_constant_field_zero_mode(self):
        g = TorusGrid(dim=2, box_length=3.0, points_per_axis=8)
        c = 2.5
        f = PhysicalField(g, np.full(g.shape, c))
        ghat = forward_transform(f)
        coeffs = ghat.coefficients[0]
        assert coeffs[0, 0] == pytest.approx(c * g.volume, rel=1e-13)
        off = coeffs.copy()
        off[0, 0] = 0.0
        assert np.max(np.abs(off)) < 1e-10 * abs(c) * g.volume

    @pytest.mark.parametrize("dim,n", [(1, 32), (2, 16), (3, 12)])
    def test_round_trip(self, rng, dim, n):
        g = TorusGrid(dim=dim, box_length=2.7, points_per_axis=max(n, 8))
        f = PhysicalField(g, rng.standard_normal((2,) + g.shape))
        back = inverse_transform(forward_transform(f))
        scale = np.max(np.abs(f.values))
        assert np.max(np.abs(back.values - f.values)) <= 1e-12 * scale

    def test_parseval_against_direct_summation(self, rng):
        g = TorusGrid(dim=3, box_length=4.0, points_per_axis=32)
        f = PhysicalField(g, rng.standard_normal(g.shape))
        direct = direct_transform(f)
        physical = float(np.sum(f.values**2) * g.cell_volume)
        spectral = float(np.sum(np.abs(direct) ** 2) / g.volume)
        assert abs(physical - spectral) <= 1e-10 * physical
        # and the fast transform agrees with the direct sum coefficientwise
        fast = forward_transform(f).coefficients
        assert np.max(np.abs(fast - direct)) <= 1e-10 * np.max(np.abs(direct))

    def test_single_hermitian_pair_synthesizes_cosine(self):
        g = TorusGrid(dim=1, box_length=2 * np.pi, points_per_axis=16)
        amp = 3.0
        coeffs = np.zeros(g.shape, dtype=complex)
        coeffs[2] = 0.5 * amp * g.volume
        coeffs[-2] = 0.5 * amp * g.volume
        f = inverse_transform(SpectralField(g, coeffs))
        x = g.coordinates[0]
        assert np.allclose(f.values[0], amp * np.cos(2 * x), atol=1e-12)

    def test_zero_spectrum(self):
        g = TorusGrid(dim=2, box_length=1.0, points_per_axis=8)
        f = inverse_transform(SpectralField(g, np.zeros(g.shape, dtype=complex)))
        assert np.all(f.values == 0.0)

    def test_hermitian_violation_names_worst_mode(self):
        g = TorusGrid(dim=1, box_length=1.0, points_per_axis=8)
        coeffs = np.zeros(g.shape, dtype=complex)
        coeffs[3] = 1.0  # no conjugate partner at -3
        with pytest.raises(ConfigError, match="k="):
            inverse_transform(SpectralField(g, coeffs))

    def test_non_finite_rejected(self):
        g = TorusGrid(dim=1, box_length=1.0, points_per_axis=8)
        vals = np.zeros(g.shape)
        vals[3] = np.nan
        with pytest.raises(ConfigError, match="non-finite"):
            PhysicalField(g, vals)


class TestDerivatives:
    def test_partial_of_sine_exact(self):
        g = TorusGrid(dim=1, box_length=5.0, points_per_axis=32)
        x = g.coordinates[0]
        k = 2 * np.pi / g.box_length
        f = PhysicalField(g, np.sin(k * x))
        df = inverse_transform(spectral_derivative(forward_transform(f), "partial", axis=0))
        assert np.allclose(df.values[0], k * np.cos(k * x), atol=1e-13)

    def test_curl_of_gradient_vanishes(self, rng):
        g = TorusGrid(dim=3, box_length=3.0, points_per_axis=16)
        phi = random_band_limited_field(g, 1, rng)
        grad = spectral_derivative(forward_transform(phi), "gradient")
        curl = spectral_derivative(grad, "curl")
        assert np.max(np.abs(curl.coefficients)) <= 1e-12 * max(
            np.max(np.abs(grad.coefficients)), 1.0
        )

    def test_divergence_of_solenoidal_projection_vanishes(self, rng):
        g = TorusGrid(dim=3, box_length=3.0, points_per_axis=16)
        v = random_band_limited_field(g, 3, rng)
        proj = solenoidal_projection(forward_transform(v))
        div = spectral_derivative(proj, "divergence")
        assert np.max(np.abs(div.coefficients)) <= 1e-12 * np.max(np.abs(proj.coefficients))

    def test_component_count_mismatch(self, rng):
        g = TorusGrid(dim=3, box_length=1.0, points_per_axis=8)
        f = forward_transform(random_band_limited_field(g, 2, rng))
        with pytest.raises(ConfigError):
            spectral_derivative(f, "curl")
        with pytest.raises(ConfigError):
            spectral_derivative(f, "divergence")


class TestNorms:
    def test_constant_norm(self):
        g = TorusGrid(dim=2, box_length=3.0, points_per_axis=8)
        f = PhysicalField(g, np.full(g.shape, -2.0))
        for p in (1.0, 2.0, 3.5, math.inf):
            expected = 2.0 * (g.volume ** (1.0 / p) if not math.isinf(p) else 1.0)
            assert lp_norm(f, p) == pytest.approx(expected, rel=1e-13)

    def test_l2_of_sine(self):
        g = TorusGrid(dim=1, box_length=7.0, points_per_axis=64)
        x = g.coordinates[0]
        f = PhysicalField(g, np.sin(2 * np.pi * x / g.box_length))
        assert lp_norm(f, 2.0) == pytest.approx(math.sqrt(g.box_length / 2.0), rel=1e-12)

    def test_l1_of_normalized_gaussian(self):
        # analytic integral is 1; trapezoidal quadrature of a periodized
        # Gaussian converges spectrally once resolved
        for n, tol in ((32, 1e-3), (64, 1e-6)):
            g = TorusGrid(dim=1, box_length=32.0, points_per_axis=n)
            x = g.coordinates[0] - g.box_length / 2
            w = 1.0
            f = PhysicalField(g, np.exp(-(x**2) / (2 * w**2)) / math.sqrt(2 * math.pi * w**2))
            assert abs(lp_norm(f, 1.0) - 1.0) < tol

    def test_homogeneity(self, rng):
        g = TorusGrid(dim=2, box_length=2.0, points_per_axis=16)
        f = random_band_limited_field(g, 2, rng)
        scaled = PhysicalField(g, 3.5 * f.values)
        for p in (1.0, 2.0, math.inf):
            assert lp_norm(scaled, p) == pytest.approx(3.5 * lp_norm(f, p), rel=1e-14)

    def test_p_below_one_rejected(self):
        g = TorusGrid(dim=1, box_length=1.0, points_per_axis=8)
        f = PhysicalField(g, np.zeros(g.shape))
        with pytest.raises(ConfigError):
            lp_norm(f, 0.5)

    def test_spectral_l2_matches_physical(self, rng):
        g = TorusGrid(dim=3, box_length=2.0, points_per_axis=16)
        f = random_band_limited_field(g, 3, rng)
        assert spectral_l2_norm(forward_transform(f)) == pytest.approx(
            lp_norm(f, 2.0), rel=1e-12
        )

    def test_mean_removed(self, rng):
        g = TorusGrid(dim=2, box_length=2.0, points_per_axis=16)
        f = PhysicalField(g, rng.standard_normal((2,) + g.shape) + 4.0)
        assert np.max(np.abs(mean_removed(f).component_means())) < 1e-13


class TestContainer:
    def test_round_trip(self, rng, tmp_path):
        g = TorusGrid(dim=3, box_length=6.0, points_per_axis=8)
        f = PhysicalField(g, rng.standard_normal((4,) + g.shape))
        path = tmp_path / "field.fqlz"
        dump_field(f, path)
        assert path.stat().st_size == HEADER_SIZE + 4 * 8**3 * 8
        back = load_field(path)
        assert back.grid == g
        assert np.array_equal(back.values, f.values)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.fqlz"
        path.write_bytes(b"\x00" * 64)
        with pytest.raises(ConfigError, match="magic"):
            load_field(path)

    def test_truncated_payload(self, rng, tmp_path):
        g = TorusGrid(dim=1, box_length=1.0, points_per_axis=8)
        f = PhysicalField(g, rng.standard_normal(g.shape))
        path = tmp_path / "field.fqlz"
        dump_field(f, path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ConfigError, match="payload"):
            load_field(path)
