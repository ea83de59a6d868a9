"""1D Crank-Nicolson evolution and the momentum-relation checks.

For constant mass the canonical momentum expectation obeys
<p> = m0 * d<x>/dt; for a genuine position-dependent mass the naive
replacement m0 -> M(<x>) fails, and the failure is what the Ehrenfest
report quantifies. Propagation uses the Cayley form

    (1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi,

which is unitary up to the linear-solve tolerance, with the corrected
(factorized) 1D PDM Hamiltonian as the generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fields import MassProfile, PhysicalConstants, make_mass_profile
from .grid import Grid1D, LinearOperator
from .operators import build_corrected_hamiltonian, build_pdm_momentum

__all__ = [
    "Wavefunction1D",
    "EvolutionSeries",
    "EhrenfestReport",
    "gaussian_packet",
    "normalize",
    "propagate",
    "expectations",
    "evolve_series",
    "ehrenfest_check",
]


@dataclass(frozen=True)
class Wavefunction1D:
    grid: Grid1D
    values: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.h)


def normalize(grid: Grid1D, values: np.ndarray) -> Wavefunction1D:
    nrm = np.sqrt(np.sum(np.abs(values) ** 2) * grid.h)
    if nrm == 0:
        raise ValueError("cannot normalize the zero wavefunction")
    return Wavefunction1D(grid=grid, values=np.asarray(values, dtype=complex) / nrm)


def gaussian_packet(grid: Grid1D, x0: float, k0: float, sigma: float) -> Wavefunction1D:
    """Normalized Gaussian envelope times a plane wave."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = grid.x
    psi = np.exp(-((x - x0) ** 2) / (4.0 * sigma**2) + 1j * k0 * x)
    return normalize(grid, psi)


class _CayleyStepper:
    """Factorized Crank-Nicolson stepper for a fixed Hamiltonian and dt."""

    def __init__(self, H: LinearOperator, dt: float, hbar: float):
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        n = H.dim
        eye = sp.identity(n, format="csc", dtype=complex)
        z = 0.5j * dt / hbar
        self.lu = spla.splu((eye + z * H.matrix).tocsc())
        self.rhs = (eye - z * H.matrix).tocsr()

    def step(self, values: np.ndarray) -> np.ndarray:
        return self.lu.solve(self.rhs @ values)


def propagate(
    psi: Wavefunction1D,
    H: LinearOperator,
    dt: float,
    steps: int,
    constants: PhysicalConstants = PhysicalConstants(),
) -> Wavefunction1D:
    """Advance `steps` Crank-Nicolson steps; norm is preserved per step."""
    stepper = _CayleyStepper(H, dt, constants.hbar)
    values = psi.values.copy()
    for _ in range(steps):
        values = stepper.step(values)
    return Wavefunction1D(grid=psi.grid, values=values)


def expectations(
    psi: Wavefunction1D,
    mass: MassProfile,
    constants: PhysicalConstants = PhysicalConstants(),
) -> dict:
    """<x>, canonical <p> = Re<psi|-i hbar D|psi>, and <Pi> with the Hermitian Pi."""
    if abs(psi.norm - 1.0) > 1e-8:
        raise ValueError(f"wavefunction not normalized (norm {psi.norm:.12f})")
    grid = psi.grid
    h = grid.h
    v = psi.values
    mean_x = float(np.sum(grid.x * np.abs(v) ** 2) * h)
    p_op = build_pdm_momentum(grid, mass, "x", constants, mode="canonical")
    pi_op = build_pdm_momentum(grid, mass, "x", constants, mode="hermitian")
    mean_p = np.vdot(v, p_op.matrix @ v) * h
    mean_pi = np.vdot(v, pi_op.matrix @ v) * h
    return {
        "mean_x": mean_x,
        "mean_p_canonical": float(np.real(mean_p)),
        "mean_pi": float(np.real(mean_pi)),
    }


@dataclass(frozen=True)
class EvolutionSeries:
    times: np.ndarray
    mean_x: np.ndarray
    mean_p: np.ndarray
    mean_pi: np.ndarray
    norms: np.ndarray
    energies: np.ndarray
    final: Wavefunction1D


def evolve_series(
    psi0: Wavefunction1D,
    H: LinearOperator,
    mass: MassProfile,
    dt: float,
    steps: int,
    constants: PhysicalConstants = PhysicalConstants(),
    record_every: int = 1,
) -> EvolutionSeries:
    """Propagate and record expectation-value time series."""
    stepper = _CayleyStepper(H, dt, constants.hbar)
    grid = psi0.grid
    h = grid.h
    p_mat = build_pdm_momentum(grid, mass, "x", constants, mode="canonical").matrix
    pi_mat = build_pdm_momentum(grid, mass, "x", constants, mode="hermitian").matrix

    values = psi0.values.copy()
    times, xs, ps, pis, norms, ens = [], [], [], [], [], []

    def record(step):
        times.append(step * dt)
        dens = np.abs(values) ** 2
        xs.append(float(np.sum(grid.x * dens) * h))
        ps.append(float(np.real(np.vdot(values, p_mat @ values)) * h))
        pis.append(float(np.real(np.vdot(values, pi_mat @ values)) * h))
        norms.append(float(np.sum(dens) * h))
        ens.append(float(np.real(np.vdot(values, H.matrix @ values)) * h))

    record(0)
    for step in range(1, steps + 1):
        values = stepper.step(values)
        if step % record_every == 0 or step == steps:
            record(step)

    return EvolutionSeries(
        times=np.array(times),
        mean_x=np.array(xs),
        mean_p=np.array(ps),
        mean_pi=np.array(pis),
        norms=np.array(norms),
        energies=np.array(ens),
        final=Wavefunction1D(grid=grid, values=values),
    )


@dataclass(frozen=True)
class EhrenfestReport:
    """Residuals of the momentum relation for constant vs position-dependent mass.

    r_const: |d<x>/dt - <p>/m0| for the constant-mass reference run.
    r_naive: |d<x>/dt - <p>/M(<x>)| for the PDM run under the corrected
    Hamiltonian; large values demonstrate that the naive relation fails.
    """

    r_const: float
    r_naive: float
    const_series: EvolutionSeries
    pdm_series: EvolutionSeries


def _relation_residual(series: EvolutionSeries, mass_at_x) -> float:
    x = series.mean_x
    p = series.mean_p
    t = series.times
    if len(x) < 3:
        raise ValueError("need at least 3 recorded samples")
    dxdt = (x[2:] - x[:-2]) / (t[2:] - t[:-2])
    m_eff = mass_at_x(x[1:-1])
    return float(np.abs(dxdt - p[1:-1] / m_eff).max())


def ehrenfest_check(
    mass: MassProfile,
    potential,
    grid: Grid1D,
    packet: dict,
    dt: float,
    steps: int,
    constants: PhysicalConstants = PhysicalConstants(),
) -> EhrenfestReport:
    """Run the constant-mass reference and the PDM case, report both residuals."""
    psi0 = gaussian_packet(grid, packet["x0"], packet["k0"], packet.get("sigma", 1.0))

    const_mass = make_mass_profile("constant", m0=mass.m0)
    H_const = build_corrected_hamiltonian(grid, const_mass, None, potential, constants)
    series_const = evolve_series(psi0, H_const, const_mass, dt, steps, constants)
    r_const = _relation_residual(series_const, lambda xs: mass.m0 * np.ones_like(xs))

    H_pdm = build_corrected_hamiltonian(grid, mass, None, potential, constants)
    series_pdm = evolve_series(psi0, H_pdm, mass, dt, steps, constants)
    r_naive = _relation_residual(
        series_pdm, lambda xs: np.asarray(mass.evaluate(xs, np.zeros_like(xs)))
    )

    return EhrenfestReport(
        r_const=r_const,
        r_naive=r_naive,
        const_series=series_const,
        pdm_series=series_pdm,
    )
