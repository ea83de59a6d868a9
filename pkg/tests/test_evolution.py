"""Crank-Nicolson propagation, expectation values, momentum-relation checks."""

import numpy as np
import pytest

from pdmlab import (
    build_corrected_hamiltonian,
    ehrenfest_check,
    evolve_series,
    expectations,
    gaussian_packet,
    make_grid_1d,
    make_mass_profile,
    make_potential,
    propagate,
    solve_lowest,
)
from pdmlab.evolution import Wavefunction1D, normalize


def _free_hamiltonian(grid, mass):
    return build_corrected_hamiltonian(grid, mass, None, None)


def test_propagation_preserves_norm():
    grid = make_grid_1d(256, (-10, 10))
    mass = make_mass_profile("constant", m0=1.0)
    psi = gaussian_packet(grid, x0=0.0, k0=1.0, sigma=1.0)
    out = propagate(psi, _free_hamiltonian(grid, mass), dt=5e-3, steps=100)
    assert abs(out.norm - 1.0) <= 1e-10


def test_free_packet_moves_at_group_velocity():
    grid = make_grid_1d(512, (-12, 12))
    mass = make_mass_profile("constant", m0=1.0)
    H = _free_hamiltonian(grid, mass)
    psi = gaussian_packet(grid, x0=0.0, k0=1.0, sigma=1.0)
    series = evolve_series(psi, H, mass, dt=1e-3, steps=1000)
    assert series.mean_x[-1] == pytest.approx(1.0, abs=1e-3)


def test_eigenstate_is_stationary_up_to_phase():
    grid = make_grid_1d(200, (-10, 10))
    mass = make_mass_profile("constant", m0=1.0)
    H = build_corrected_hamiltonian(grid, mass, None, make_potential("harmonic", k=1.0))
    spec = solve_lowest(H, 1, method="dense")
    psi0 = normalize(grid, spec.eigenvectors[:, 0])
    out = propagate(psi0, H, dt=1e-2, steps=200)
    overlap = abs(np.vdot(psi0.values, out.values) * grid.h)
    assert overlap == pytest.approx(1.0, abs=1e-8)


def test_real_wavefunction_has_zero_momentum():
    grid = make_grid_1d(200, (-8, 8))
    mass = make_mass_profile("quadratic", m0=1.0, lam=0.5)
    psi = gaussian_packet(grid, x0=0.3, k0=0.0, sigma=1.2)
    out = expectations(psi, mass)
    assert abs(out["mean_p_canonical"]) <= 1e-12


def test_plane_wave_packet_momentum():
    # fine grid: the centered-stencil error on <p> is ~0.3 (k h)^2
    grid = make_grid_1d(12799, (-10, 10))
    mass = make_mass_profile("constant", m0=1.0)
    psi = gaussian_packet(grid, x0=0.0, k0=1.0, sigma=1.0)
    out = expectations(psi, mass)
    assert out["mean_p_canonical"] == pytest.approx(1.0, abs=1e-6)


def test_constant_mass_pi_is_scaled_momentum():
    grid = make_grid_1d(300, (-8, 8))
    mass = make_mass_profile("constant", m0=4.0)
    psi = gaussian_packet(grid, x0=0.2, k0=1.3, sigma=0.9)
    out = expectations(psi, mass)
    assert out["mean_pi"] == pytest.approx(out["mean_p_canonical"] / 2.0, abs=1e-10)


def test_expectations_reject_unnormalized_input():
    grid = make_grid_1d(100, (-5, 5))
    mass = make_mass_profile("constant", m0=1.0)
    bad = Wavefunction1D(grid=grid, values=np.ones(100, dtype=complex))
    with pytest.raises(ValueError):
        expectations(bad, mass)


def test_energy_constant_along_propagation():
    grid = make_grid_1d(300, (-10, 10))
    mass = make_mass_profile("quadratic", m0=1.0, lam=0.3)
    H = build_corrected_hamiltonian(grid, mass, None, make_potential("harmonic", k=1.0))
    psi = gaussian_packet(grid, x0=0.4, k0=1.0, sigma=0.8)
    series = evolve_series(psi, H, mass, dt=2e-3, steps=500)
    drift = np.abs(series.energies - series.energies[0]).max() / abs(series.energies[0])
    assert drift <= 1e-8


def test_ehrenfest_constant_mass_relation_holds():
    grid = make_grid_1d(512, (-12, 12))
    rep = ehrenfest_check(make_mass_profile("constant", m0=1.0), None, grid,
                          {"x0": 0.0, "k0": 1.0, "sigma": 1.0}, dt=1e-3, steps=800)
    assert rep.r_const <= 1e-3


def test_ehrenfest_naive_pdm_relation_fails():
    grid = make_grid_1d(512, (-12, 12))
    rep = ehrenfest_check(make_mass_profile("quadratic", m0=1.0, lam=1.0), None, grid,
                          {"x0": 0.5, "k0": 2.0, "sigma": 1.0}, dt=1e-3, steps=800)
    assert rep.r_naive > 1e-2


def test_ehrenfest_degenerate_pdm_recovers_constant_mass():
    grid = make_grid_1d(512, (-12, 12))
    rep = ehrenfest_check(make_mass_profile("quadratic", m0=1.0, lam=0.0), None, grid,
                          {"x0": 0.0, "k0": 1.0, "sigma": 1.0}, dt=1e-3, steps=800)
    assert rep.r_naive <= 1e-3


def test_gaussian_packet_is_normalized():
    grid = make_grid_1d(200, (-10, 10))
    psi = gaussian_packet(grid, x0=0.0, k0=2.0, sigma=0.7)
    assert abs(psi.norm - 1.0) <= 1e-12
    with pytest.raises(ValueError):
        gaussian_packet(grid, x0=0.0, k0=0.0, sigma=0.0)
