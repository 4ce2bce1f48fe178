"""Mode matrices, constrained spectra, propagation and whole-space decay."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from frequalize.equilibrium import EquilibriumState, PressureLaw
from frequalize.errors import ConfigError, IncompatibleDataError
from frequalize.grid import SpectralField, TorusGrid, forward_transform, random_band_limited_field
from frequalize.linear_modes import (
    ContinuumData,
    ContinuumEvolver,
    GridModePropagator,
    ModePropagator,
    assemble_mode_matrix,
    constraint_basis,
    constraint_matrix,
    constraint_projector,
    constraint_residual,
    gap_sweep,
    linear_decay_experiment,
    linear_evolve_grid,
    omega_matrix,
    pointwise_decay_check,
    propagate_mode,
    spectral_gap,
    system_matrices,
)


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(5150)


@pytest.fixture(scope="module")
def eq():
    return EquilibriumState()


def random_compatible_mode(xi, rng) -> np.ndarray:
    """Random 10-vector obeying the per-mode Gauss constraints."""
    z = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    return constraint_projector(xi) @ z


class TestStructure:
    def test_omega_is_cross_product(self):
        assert np.allclose(omega_matrix([0, 0, 1]) @ [1, 0, 0], [0, 1, 0])
        v, w = np.array([1.3, -0.2, 0.7]), np.array([0.4, 2.0, -1.1])
        assert np.allclose(omega_matrix(v) @ w, np.cross(v, w))

    def test_symmetric_hyperbolic_structure(self, eq, rng):
        a0, symbol, damping = system_matrices(eq)
        assert np.all(a0 > 0)
        for _ in range(4):
            xi = rng.standard_normal(3)
            a = symbol(xi)
            assert np.allclose(a, a.T)
        sym = 0.5 * (damping + damping.T)
        eigs = np.linalg.eigvalsh(sym)
        assert eigs.min() > -1e-14

    def test_background_rotation_has_no_dissipation(self, rng):
        # velocity part of the damping contributed by the background field is
        # skew: Re(v* Omega_B v) = 0
        om = omega_matrix([0.3, -1.0, 2.0])
        for _ in range(5):
            v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            assert abs((v.conj() @ (om @ v)).real) < 1e-13

    def test_zero_mode_eigenvalues(self):
        # at xi = 0 with unit background density: four conserved directions
        # (density and magnetic) and the damped velocity-electric oscillator
        # with lambda^2 + lambda + 1 = 0, threefold each
        eq_unit = EquilibriumState(pressure=PressureLaw(1.0, 1.0))
        m = assemble_mode_matrix([0.0, 0.0, 0.0], eq_unit).matrix
        w = np.sort_complex(np.linalg.eigvals(m))
        expected = np.sort_complex(
            np.array([0.0] * 4 + [(-1 + 1j * math.sqrt(3)) / 2] * 3 + [(-1 - 1j * math.sqrt(3)) / 2] * 3)
        )
        assert np.allclose(w, expected, atol=1e-12)

    def test_all_eigenvalues_nonpositive_real(self, eq, rng):
        for _ in range(10):
            xi = 10.0 ** rng.uniform(-3, 3) * rng.standard_normal(3)
            w = np.linalg.eigvals(assemble_mode_matrix(xi, eq).matrix)
            assert w.real.max() < 1e-12

    def test_constraint_rows_annihilate_generator(self, eq, rng):
        for _ in range(5):
            xi = rng.standard_normal(3)
            m = assemble_mode_matrix(xi, eq).matrix
            c = constraint_matrix(xi)
            assert np.max(np.abs(c @ m)) < 1e-13

    def test_projector_idempotent_hermitian(self, rng):
        xi = np.array([0.7, -0.3, 1.1])
        p = constraint_projector(xi)
        assert np.allclose(p @ p, p, atol=1e-13)
        assert np.allclose(p, p.conj().T, atol=1e-13)
        basis = constraint_basis(xi)
        assert basis.shape == (10, 8)


class TestPropagation:
    def test_identity_at_t_zero(self, eq, rng):
        xi = [0.5, 0.1, -0.2]
        z0 = random_compatible_mode(xi, rng)
        assert np.allclose(propagate_mode(z0, xi, 0.0, eq), z0, atol=1e-13)

    def test_density_mean_is_stationary(self, eq):
        z0 = np.zeros(10, dtype=complex)
        z0[0] = 1.0
        for t in (1.0, 10.0):
            assert np.allclose(propagate_mode(z0, [0.0, 0.0, 0.0], t, eq), z0, atol=1e-13)

    def test_constraint_transport_against_ode_oracle(self, eq, rng):
        xi = [1.0, 0.0, 0.0]
        z0 = random_compatible_mode(xi, rng)
        m = assemble_mode_matrix(xi, eq).matrix
        t_end = 5.0

        def real_rhs(_, y):
            dz = m @ (y[:10] + 1j * y[10:])
            return np.concatenate([dz.real, dz.imag])

        sol = solve_ivp(
            real_rhs,
            (0.0, t_end),
            np.concatenate([z0.real, z0.imag]),
            rtol=1e-11,
            atol=1e-13,
        )
        z_oracle = sol.y[:10, -1] + 1j * sol.y[10:, -1]
        z_fast = propagate_mode(z0, xi, t_end, eq)
        assert np.linalg.norm(z_fast - z_oracle) <= 1e-8 * np.linalg.norm(z_oracle)
        assert constraint_residual(z_fast, xi) <= 1e-12

    def test_halved_step_self_check(self, eq):
        for xi in ([0.5, 0.2, -0.1], [30.0, 0.0, 0.0], [1e-3, 0.0, 0.0]):
            assert ModePropagator(xi, eq).self_check(5.0) <= 1e-10

    def test_a0_weighted_norm_nonincreasing(self, eq, rng):
        a0, _, _ = system_matrices(eq)
        xi = [0.8, -0.4, 0.3]
        z0 = random_compatible_mode(xi, rng)
        prop = ModePropagator(xi, eq)
        prev = float(np.sum(a0 * np.abs(z0) ** 2))
        for t in (0.5, 1.0, 3.0, 10.0):
            zt = prop.apply(z0, t)
            cur = float(np.sum(a0 * np.abs(zt) ** 2))
            assert cur <= prev * (1 + 1e-12)
            prev = cur

    def test_non_finite_rejected(self, eq):
        z0 = np.full(10, np.nan, dtype=complex)
        with pytest.raises(ConfigError):
            propagate_mode(z0, [1.0, 0.0, 0.0], 1.0, eq)


class TestSpectralGap:
    def test_positive_at_unit_frequency(self):
        eq_unit = EquilibriumState(pressure=PressureLaw(1.0, 1.0))
        assert spectral_gap([1.0, 0.0, 0.0], eq_unit) > 0

    def test_gap_slopes_match_dissipative_rate(self, eq):
        sweep = gap_sweep(np.geomspace(1e-3, 1e3, 49), eq)
        assert sweep.loglog_slope(1e-3, 1e-1) == pytest.approx(2.0, abs=0.3)
        assert sweep.loglog_slope(10.0, 1e3) == pytest.approx(-2.0, abs=0.3)
        assert sweep.rate_ratios.min() > 0
        assert np.all(sweep.gaps > 0)

    def test_isotropy_without_background_field(self, eq, rng):
        mag = 1.7
        base = spectral_gap([mag, 0.0, 0.0], eq)
        for _ in range(4):
            direction = rng.standard_normal(3)
            direction /= np.linalg.norm(direction)
            assert spectral_gap(mag * direction, eq) == pytest.approx(base, abs=1e-10)

    def test_gap_with_background_field_stays_positive(self):
        eq_b = EquilibriumState(b_inf=(0.0, 0.0, 2.0))
        for mag in (0.01, 1.0, 50.0):
            assert spectral_gap([mag, 0.0, 0.0], eq_b) > 0
            assert spectral_gap([0.0, 0.0, mag], eq_b) > 0


class TestPointwiseDecay:
    def test_origin_ratio_at_least_one(self, eq, rng):
        samples = [([0.5, 0.0, 0.0], random_compatible_mode([0.5, 0.0, 0.0], rng), 0.0)]
        rep = pointwise_decay_check(samples, eq)
        assert rep.c_bound >= 1.0 - 1e-12

    def test_single_mode_bound(self, eq, rng):
        xi = [1.0, 0.0, 0.0]
        z0 = random_compatible_mode(xi, rng)
        samples = [(xi, z0, t) for t in np.linspace(0.0, 100.0, 40)]
        rep = pointwise_decay_check(samples, eq)
        assert rep.c0 > 0
        assert math.isfinite(rep.c_bound)

    def test_gradient_magnetic_data_refused(self, eq):
        xi = np.array([1.0, 0.0, 0.0])
        z0 = np.zeros(10, dtype=complex)
        z0[7:10] = xi  # magnetic component parallel to xi: stationary, no decay
        with pytest.raises(IncompatibleDataError):
            pointwise_decay_check([(xi, z0, 1.0)], eq)


def compatible_lattice_state(grid: TorusGrid, rng) -> SpectralField:
    """Random smooth 10-component data obeying the lattice Gauss constraints."""
    from frequalize.grid import solenoidal_projection

    rho = forward_transform(random_band_limited_field(grid, 1, rng))
    vel = forward_transform(random_band_limited_field(grid, 3, rng))
    e_free = solenoidal_projection(forward_transform(random_band_limited_field(grid, 3, rng)))
    h_free = solenoidal_projection(forward_transform(random_band_limited_field(grid, 3, rng)))
    xi = grid.frequency_vectors
    sq = grid.frequency_magnitude**2
    safe = np.where(sq > 0, sq, 1.0)
    e_long = np.stack([1j * xi[j] * rho.coefficients[0] / safe for j in range(grid.dim)])
    coeffs = np.concatenate(
        [rho.coefficients, vel.coefficients, e_free.coefficients + e_long, h_free.coefficients]
    )
    return SpectralField(grid, coeffs)


class TestGridEvolution:
    def test_constraint_residual_stays_tiny(self, eq, rng):
        grid = TorusGrid(dim=3, box_length=20.0, points_per_axis=12)
        z0 = compatible_lattice_state(grid, rng)
        sol = linear_evolve_grid(z0, np.linspace(0.0, 5.0, 6), eq, keep_states=False)
        assert np.all(sol.constraint_residuals <= 1e-9)

    def test_norms_decay(self, eq, rng):
        grid = TorusGrid(dim=3, box_length=20.0, points_per_axis=12)
        z0 = compatible_lattice_state(grid, rng)
        sol = linear_evolve_grid(z0, np.linspace(0.0, 20.0, 5), eq, keep_states=False)
        assert sol.norms[0][-1] < sol.norms[0][0]

    def test_matches_single_mode_propagator(self, eq, rng):
        grid = TorusGrid(dim=3, box_length=20.0, points_per_axis=8)
        z0 = compatible_lattice_state(grid, rng)
        prop = GridModePropagator(grid, eq)
        t = 2.5
        out = prop.apply(z0.coefficients, t)
        idx = (2, 3, 1)
        xi = [grid.frequency_vectors[j][idx] for j in range(3)]
        expected = propagate_mode(z0.coefficients[(slice(None),) + idx], xi, t, eq)
        got = out[(slice(None),) + idx]
        assert np.linalg.norm(got - expected) <= 1e-10 * np.linalg.norm(expected)

    def test_incompatible_data_rejected(self, eq, rng):
        grid = TorusGrid(dim=3, box_length=20.0, points_per_axis=8)
        bad = forward_transform(random_band_limited_field(grid, 10, rng))
        with pytest.raises(IncompatibleDataError):
            linear_evolve_grid(bad, [0.0, 1.0], eq)


class TestContinuumDecay:
    def test_gaussian_optimal_exponents(self, eq):
        exp = linear_decay_experiment(eq, orders=(0, 1))
        assert exp.fits[0].exponent == pytest.approx(-0.75, abs=0.10)
        assert exp.fits[1].exponent == pytest.approx(-1.25, abs=0.10)
        assert exp.fits[0].power_law and exp.fits[1].power_law

    def test_highpass_regularity_loss_exponent(self, eq):
        data = ContinuumData(kind="highpass", cutoff=10.0, budget=1.5)
        exp = linear_decay_experiment(eq, data, orders=(0,))
        assert exp.fits[0].exponent == pytest.approx(-0.75, abs=0.15)
        data2 = ContinuumData(kind="highpass", cutoff=10.0, budget=2.0)
        exp2 = linear_decay_experiment(eq, data2, orders=(0,))
        assert exp2.fits[0].exponent == pytest.approx(-1.0, abs=0.15)

    def test_continuum_data_is_compatible(self, eq, rng):
        data = ContinuumData(kind="gaussian", width=1.0)
        from frequalize.linear_modes import _orthonormal_frame

        frame = _orthonormal_frame(np.array([0.3, -0.5, 0.8]))
        for rho in (0.01, 1.0, 8.0):
            z0 = data.mode_vector(rho, frame)
            assert constraint_residual(z0, rho * frame[0]) < 1e-12

    def test_anisotropic_background_uses_sphere_rule(self):
        eq_b = EquilibriumState(b_inf=(0.0, 0.0, 0.5))
        ev = ContinuumEvolver(
            eq_b, ContinuumData(kind="gaussian", width=2.0), n_radial=60, n_polar=4, n_azimuth=4
        )
        assert ev.ang_nodes.shape[0] == 16
        norms = ev.norms([1.0, 10.0], orders=(0,))[0]
        assert norms[1] < norms[0]
