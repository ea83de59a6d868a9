"""Classical dynamics of a charged position-dependent-mass particle.

The Hamiltonian in canonical coordinates (x, y, Px, Py) is

    H = [(P - e A)/sqrt(M)]^2 / 2 + V = Pi^2 / 2 + V,

with Pi the pseudo-mechanical momentum Pi_j = (P_j - e A_j)/sqrt(M)
= sqrt(M) * xdot_j. Trajectories are integrated with fixed-step RK4 on
Hamilton's equations; canonical coordinates avoid inverting the
velocity-momentum relation at every step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import MassProfile, PhysicalConstants, VectorPotential

__all__ = [
    "ClassicalState",
    "Trajectory",
    "TrajectoryAborted",
    "hamiltonian_flow",
    "hamiltonian_value",
    "pseudo_momentum",
    "integrate_trajectory",
]

MASS_FLOOR = 1e-12


class TrajectoryAborted(RuntimeError):
    """Mass positivity violated along the path; carries the partial trajectory."""

    def __init__(self, message: str, partial: "Trajectory"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class ClassicalState:
    x: float
    y: float
    px: float
    py: float
    t: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.x, self.y, self.px, self.py, self.t)):
            raise ValueError("non-finite phase-space component")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.px, self.py])


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n, 4): x, y, px, py
    energies: np.ndarray
    pseudo_momenta: np.ndarray  # shape (n, 2)

    def final_state(self) -> ClassicalState:
        x, y, px, py = self.states[-1]
        return ClassicalState(x=x, y=y, px=px, py=py, t=float(self.times[-1]))


def _fields_at(q, mass: MassProfile, A: VectorPotential | None, e: float):
    x, y = q[0], q[1]
    m = float(mass.evaluate(x, y))
    if not np.isfinite(m) or m < MASS_FLOOR:
        raise TrajectoryAborted(
            f"mass not positive at ({x:.6g}, {y:.6g}): M = {m:.3e}",
            partial=None,  # filled by the integrator
        )
    dm = mass.gradient(x, y)
    if A is None:
        a = (0.0, 0.0)
        da = ((0.0, 0.0), (0.0, 0.0))
    else:
        a = (float(A.ax.evaluate(x, y)), float(A.ay.evaluate(x, y)))
        gx = A.ax.gradient(x, y)
        gy = A.ay.gradient(x, y)
        # da[j][k] = d A_k / d x_j
        da = ((float(gx[0]), float(gy[0])), (float(gx[1]), float(gy[1])))
    return m, (float(dm[0]), float(dm[1])), a, da


def hamiltonian_value(state_vec, mass: MassProfile, A, potential,
                      constants: PhysicalConstants = PhysicalConstants()) -> float:
    e = constants.charge
    m, _, a, _ = _fields_at(state_vec, mass, A, e)
    ux = state_vec[2] - e * a[0]
    uy = state_vec[3] - e * a[1]
    v = 0.0
    if potential is not None:
        v = float(potential.evaluate(state_vec[0], state_vec[1]))
    return (ux**2 + uy**2) / (2.0 * m) + v


def hamiltonian_flow(state, mass: MassProfile, A=None, potential=None,
                     constants: PhysicalConstants = PhysicalConstants()):
    """Time derivatives (dx/dt, dy/dt, dPx/dt, dPy/dt) from Hamilton's equations.

    xdot_j = (P_j - e A_j)/M
    Pdot_j = (P - e A)^2/(2 M^2) dM/dx_j + (e/M) sum_k (P_k - e A_k) dA_k/dx_j
             - dV/dx_j
    """
    q = state.as_array() if isinstance(state, ClassicalState) else np.asarray(state, dtype=float)
    e = constants.charge
    m, dm, a, da = _fields_at(q, mass, A, e)
    ux = q[2] - e * a[0]
    uy = q[3] - e * a[1]
    u2 = ux**2 + uy**2
    if potential is None:
        dv = (0.0, 0.0)
    else:
        dv = potential.gradient(q[0], q[1])
        dv = (float(dv[0]), float(dv[1]))
    xdot = ux / m
    ydot = uy / m
    pdot = []
    for j in range(2):
        val = u2 / (2.0 * m**2) * dm[j]
        val += (e / m) * (ux * da[j][0] + uy * da[j][1])
        val -= dv[j]
        pdot.append(val)
    return (xdot, ydot, pdot[0], pdot[1])


def pseudo_momentum(state, mass: MassProfile, A=None,
                    constants: PhysicalConstants = PhysicalConstants()):
    """Pi_j = (P_j - e A_j)/sqrt(M), conserved in magnitude when V = 0 = A."""
    q = state.as_array() if isinstance(state, ClassicalState) else np.asarray(state, dtype=float)
    e = constants.charge
    m, _, a, _ = _fields_at(q, mass, A, e)
    root = np.sqrt(m)
    return ((q[2] - e * a[0]) / root, (q[3] - e * a[1]) / root)


def integrate_trajectory(
    state0: ClassicalState,
    mass: MassProfile,
    A=None,
    potential=None,
    constants: PhysicalConstants = PhysicalConstants(),
    t_end: float = 1.0,
    dt: float = 1e-3,
) -> Trajectory:
    """Fixed-step RK4; states recorded at t = 0, dt, 2dt, ..."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    nsteps = int(round(t_end / dt))

    def rhs(q):
        return np.array(hamiltonian_flow(q, mass, A, potential, constants))

    q = state0.as_array()
    t0 = state0.t
    times, states, energies, momenta = [], [], [], []

    def snapshot():
        return Trajectory(
            times=np.array(times),
            states=np.array(states).reshape(-1, 4),
            energies=np.array(energies),
            pseudo_momenta=np.array(momenta).reshape(-1, 2),
        )

    def record(t, q):
        # diagnostics computed up front so an abort carries a usable prefix
        en = hamiltonian_value(q, mass, A, potential, constants)
        pm = pseudo_momentum(q, mass, A, constants)
        times.append(t)
        states.append(q.copy())
        energies.append(en)
        momenta.append(pm)

    try:
        record(t0, q)
        for step in range(nsteps):
            k1 = rhs(q)
            k2 = rhs(q + 0.5 * dt * k1)
            k3 = rhs(q + 0.5 * dt * k2)
            k4 = rhs(q + dt * k3)
            q = q + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            record(t0 + (step + 1) * dt, q)
    except TrajectoryAborted as exc:
        raise TrajectoryAborted(str(exc), partial=snapshot()) from None

    return snapshot()
