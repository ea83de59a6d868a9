"""Hamiltonian and momentum operators for position-dependent-mass particles.

Builders and their roles:

* ``build_von_roos``: symmetrized ordered kinetic operator
  (1/4)[M^a p M^b p M^c + M^c p M^b p M^a] + V for any ordering triplet
  with a + b + c = -1.
* ``build_pdm_momentum``: the PDM momentum, either in its canonical
  non-Hermitian form -i*hbar*(d - dM/(4M)) or as the Hermitian combination
  M^(-1/2) * P discretized symmetrically.
* ``build_corrected_hamiltonian``: minimal coupling applied inside the
  mass-weighted square, H = (1/2) sum_j [(P_j - e A_j)/sqrt(M)]^2 + V.
* ``build_expanded_hamiltonian``: the same Hamiltonian assembled term by
  term from its printed four-term expansion, which is not Hermitian at
  finite grid spacing; the recorded defect is the diagnostic.
* ``build_dutra_oliveira_hamiltonian``: the criticized construction that
  scales the gauge field by the mass first and quantizes with -i*hbar*grad
  in the linear term.

Discretization policy: second-derivative-like products are assembled in
conservative flux form on the staggered (midpoint) lattice, which keeps
them exactly Hermitian, free of spurious checkerboard modes, and exactly
ordering-independent at constant mass. First-order operators exposed to
callers use the centered antisymmetric stencil. The expanded builder keeps
the centered canonical/Hermitian momenta in its cross terms on purpose:
that is where its finite-spacing asymmetry lives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fields import MassProfile, PhysicalConstants, VectorPotential
from .grid import (
    Grid1D,
    Grid2D,
    GridError,
    LinearOperator,
    build_derivative,
    hermiticity_defect_matrix,
    max_entry,
    staggered_average_1d,
    staggered_difference_1d,
)

__all__ = [
    "OrderingParams",
    "ZHU_KROEMER",
    "MUSTAFA_MAZHARIMOUSAVI",
    "BEN_DANIEL_DUKE",
    "ORDERING_PRESETS",
    "OrderingError",
    "MassPositivityError",
    "make_ordering",
    "build_von_roos",
    "build_pdm_momentum",
    "build_corrected_hamiltonian",
    "build_expanded_hamiltonian",
    "build_dutra_oliveira_hamiltonian",
    "ExpandedHamiltonian",
    "hermiticity_defect",
    "relative_entry_gap",
    "action_gap",
    "smooth_probe",
]

ORDERING_TOL = 1e-12
MASS_FLOOR = 1e-12


class OrderingError(ValueError):
    """Ordering triplet violates alpha + beta + gamma = -1."""


class MassPositivityError(ValueError):
    """Mass profile not bounded away from zero on the grid."""


@dataclass(frozen=True)
class OrderingParams:
    alpha: float
    beta: float
    gamma: float


def make_ordering(alpha: float, beta: float, gamma: float) -> OrderingParams:
    """Validate the ordering constraint alpha + beta + gamma = -1."""
    s = alpha + beta + gamma
    if abs(s + 1.0) > ORDERING_TOL:
        raise OrderingError(
            f"von Roos constraint violated: alpha+beta+gamma = {s!r}, expected -1"
        )
    return OrderingParams(alpha=float(alpha), beta=float(beta), gamma=float(gamma))


ZHU_KROEMER = make_ordering(-0.5, 0.0, -0.5)
MUSTAFA_MAZHARIMOUSAVI = make_ordering(-0.25, -0.5, -0.25)
BEN_DANIEL_DUKE = make_ordering(0.0, -1.0, 0.0)

ORDERING_PRESETS = {
    "zhu-kroemer": ZHU_KROEMER,
    "mustafa-mazharimousavi": MUSTAFA_MAZHARIMOUSAVI,
    "ben-daniel-duke": BEN_DANIEL_DUKE,
}


@dataclass(frozen=True)
class _Axis:
    """Per-axis sparse blocks plus the coordinates they sample."""

    index: int
    Ds: sp.csr_matrix  # node -> midpoint forward difference
    Av: sp.csr_matrix  # node -> midpoint average
    Dc: sp.csr_matrix  # node -> node centered derivative
    xm: np.ndarray  # midpoint sample coordinates
    ym: np.ndarray


def _axes(grid) -> list[_Axis]:
    if isinstance(grid, Grid1D):
        ds = staggered_difference_1d(grid.n, grid.h)
        av = staggered_average_1d(grid.n)
        dc = build_derivative(grid, "x", 1).matrix
        return [_Axis(0, ds, av, dc, grid.xmid, np.zeros(grid.n + 1), )]
    if isinstance(grid, Grid2D):
        ix = sp.identity(grid.nx, format="csr")
        iy = sp.identity(grid.ny, format="csr")
        dsx = sp.kron(iy, staggered_difference_1d(grid.nx, grid.hx), format="csr")
        avx = sp.kron(iy, staggered_average_1d(grid.nx), format="csr")
        dsy = sp.kron(staggered_difference_1d(grid.ny, grid.hy), ix, format="csr")
        avy = sp.kron(staggered_average_1d(grid.ny), ix, format="csr")
        xmid = grid.xmin + grid.hx * (0.5 + np.arange(grid.nx + 1))
        ymid = grid.ymin + grid.hy * (0.5 + np.arange(grid.ny + 1))
        return [
            _Axis(0, dsx, avx, build_derivative(grid, "x", 1).matrix,
                  np.tile(xmid, grid.ny), np.repeat(grid.y, grid.nx + 1)),
            _Axis(1, dsy, avy, build_derivative(grid, "y", 1).matrix,
                  np.tile(grid.x, grid.ny + 1), np.repeat(ymid, grid.nx)),
        ]
    raise GridError(f"unsupported grid type {type(grid).__name__}")


def _node_coords(grid) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(grid, Grid1D):
        return grid.x, np.zeros(grid.n)
    return grid.nodes()


def _mass_values(grid, mass: MassProfile, where: str, x, y) -> np.ndarray:
    vals = np.asarray(mass.evaluate(x, y), dtype=float)
    if not np.all(np.isfinite(vals)) or vals.min() < MASS_FLOOR:
        raise MassPositivityError(
            f"mass profile {mass.kind!r} falls below {MASS_FLOOR} at grid {where}s "
            f"(min {vals.min():.3e}); no regularization is applied"
        )
    return vals


def _diag(vals) -> sp.csr_matrix:
    return sp.diags(np.asarray(vals), 0, format="csr")


def _potential_diag(grid, potential) -> sp.csr_matrix:
    xx, yy = _node_coords(grid)
    if potential is None:
        vals = np.zeros(grid.dim)
    elif hasattr(potential, "evaluate"):
        vals = np.asarray(potential.evaluate(xx, yy), dtype=float) * np.ones(grid.dim)
    else:
        vals = np.asarray(potential, dtype=float) * np.ones(grid.dim)
    if not np.all(np.isfinite(vals)):
        raise GridError("non-finite potential sample")
    return _diag(vals)


def _vector_components(A: VectorPotential | None, x, y, n: int) -> list[np.ndarray]:
    if A is None:
        return [np.zeros(n), np.zeros(n)]
    ax, ay = A.evaluate(x, y)
    return [np.asarray(ax, dtype=float) * np.ones(n), np.asarray(ay, dtype=float) * np.ones(n)]


def _wrap(grid, mat: sp.spmatrix) -> LinearOperator:
    m = mat.astype(complex).tocsr()
    m.sort_indices()
    return LinearOperator(
        matrix=m,
        dim=grid.dim,
        hermiticity_defect=hermiticity_defect_matrix(m),
        measure=grid.measure,
    )


def _pi_staggered(axis: _Axis, mass: MassProfile, hbar: float) -> sp.csr_matrix:
    """Hermitian PDM momentum on the staggered lattice: -i*hbar*(f d + f'/2)."""
    m_mid = np.asarray(mass.evaluate(axis.xm, axis.ym), dtype=float)
    dm_mid = np.asarray(mass.gradient(axis.xm, axis.ym)[axis.index], dtype=float)
    f = m_mid**-0.5
    fprime = -0.5 * m_mid**-1.5 * dm_mid
    return (-1j * hbar) * (_diag(f) @ axis.Ds + _diag(0.5 * fprime) @ axis.Av)


def _p_canonical_staggered(axis: _Axis, mass: MassProfile, hbar: float) -> sp.csr_matrix:
    """Canonical PDM momentum on the staggered lattice: -i*hbar*(d - dM/(4M))."""
    m_mid = np.asarray(mass.evaluate(axis.xm, axis.ym), dtype=float)
    dm_mid = np.asarray(mass.gradient(axis.xm, axis.ym)[axis.index], dtype=float)
    g = dm_mid / (4.0 * m_mid)
    return (-1j * hbar) * (axis.Ds - _diag(g) @ axis.Av)


def build_von_roos(
    grid,
    mass: MassProfile,
    ordering: OrderingParams,
    potential=None,
    constants: PhysicalConstants = PhysicalConstants(),
) -> LinearOperator:
    """Ordered kinetic operator plus potential, exactly Hermitian.

    Per axis the inner second-order product d M^beta d is taken in flux form
    with M^beta at cell midpoints, then sandwiched by the node diagonals
    M^alpha, M^gamma and symmetrized. All orderings collapse to the same
    matrix at constant mass.
    """
    xx, yy = _node_coords(grid)
    m_node = _mass_values(grid, mass, "node", xx, yy)
    hbar = constants.hbar
    a, b, c = ordering.alpha, ordering.beta, ordering.gamma
    Ma = _diag(m_node**a)
    Mg = _diag(m_node**c)
    H = None
    for axis in _axes(grid):
        m_mid = _mass_values(grid, mass, "midpoint", axis.xm, axis.ym)
        T = (axis.Ds.T @ _diag(m_mid**b) @ axis.Ds).tocsr()
        Z = (Ma @ T @ Mg).tocsr()
        K = (hbar**2 / 4.0) * (Z + Z.T)
        H = K if H is None else H + K
    H = H + _potential_diag(grid, potential)
    return _wrap(grid, H)


def build_pdm_momentum(
    grid,
    mass: MassProfile,
    axis: str,
    constants: PhysicalConstants = PhysicalConstants(),
    mode: str = "hermitian",
) -> LinearOperator:
    """PDM momentum along one axis.

    mode="canonical": P = -i*hbar*[D - dM/(4M)], not Hermitian (its defect is
    recorded); collapses to -i*hbar*D at constant mass.
    mode="hermitian": Pi = M^(-1/2) P discretized as -i*hbar*(F D + D F)/2,
    exactly Hermitian because D is exactly antisymmetric.
    """
    if mode not in ("canonical", "hermitian"):
        raise ValueError(f"mode must be 'canonical' or 'hermitian', got {mode!r}")
    xx, yy = _node_coords(grid)
    m_node = _mass_values(grid, mass, "node", xx, yy)
    hbar = constants.hbar
    D = build_derivative(grid, axis, 1).matrix
    idx = 0 if axis == "x" else 1
    if mode == "canonical":
        dm = np.asarray(mass.gradient(xx, yy)[idx], dtype=float) * np.ones(grid.dim)
        mat = (-1j * hbar) * (D - _diag(dm / (4.0 * m_node)))
    else:
        F = _diag(m_node**-0.5)
        mat = (-0.5j * hbar) * (F @ D + D @ F)
    return _wrap(grid, mat)


def build_corrected_hamiltonian(
    grid,
    mass: MassProfile,
    A: VectorPotential | None = None,
    potential=None,
    constants: PhysicalConstants = PhysicalConstants(),
) -> LinearOperator:
    """Minimal coupling inside the mass-weighted square.

    H = (1/2) sum_j O_j^dag O_j + V with O_j the staggered Hermitian momentum
    minus e*A_j/sqrt(M). Exactly Hermitian, kinetic part a sum of squares.
    """
    xx, yy = _node_coords(grid)
    _mass_values(grid, mass, "node", xx, yy)
    hbar, e = constants.hbar, constants.charge
    H = None
    for axis in _axes(grid):
        Os = _pi_staggered(axis, mass, hbar)
        if A is not None:
            if isinstance(grid, Grid1D):
                raise GridError("vector potentials are 2D; use a 2D grid")
            m_mid = _mass_values(grid, mass, "midpoint", axis.xm, axis.ym)
            a_mid = np.asarray(A.evaluate(axis.xm, axis.ym)[axis.index], dtype=float)
            Os = Os - _diag(e * a_mid * m_mid**-0.5) @ axis.Av
        K = 0.5 * (Os.getH() @ Os)
        H = K if H is None else H + K
    H = H + _potential_diag(grid, potential)
    return _wrap(grid, H)


@dataclass(frozen=True)
class ExpandedHamiltonian:
    """Literal four-term assembly of the expanded Hamiltonian plus its Hermitian part."""

    literal: LinearOperator
    symmetrized: LinearOperator


def build_expanded_hamiltonian(
    grid,
    mass: MassProfile,
    A: VectorPotential,
    potential=None,
    constants: PhysicalConstants = PhysicalConstants(),
) -> ExpandedHamiltonian:
    """Term-by-term expansion of the corrected Hamiltonian, exactly as printed.

    H = (1/2) sum_j [Pi_j^2 + (e A_j/sqrt(M))^2 - (e A_j/M) P_j
                     - Pi_j (e A_j/sqrt(M))] + V

    with the canonical P_j in the third term and the Hermitian Pi_j in the
    fourth, both on the centered stencil. The mixed cross terms make the
    literal matrix non-Hermitian at finite spacing; the defect is recorded
    and the symmetrized matrix (H + H^dag)/2 is returned alongside.
    """
    if isinstance(grid, Grid1D):
        raise GridError("vector potentials are 2D; use a 2D grid")
    xx, yy = _node_coords(grid)
    m_node = _mass_values(grid, mass, "node", xx, yy)
    hbar, e = constants.hbar, constants.charge
    a_node = _vector_components(A, xx, yy, grid.dim)
    H = None
    for axis in _axes(grid):
        m_mid = _mass_values(grid, mass, "midpoint", axis.xm, axis.ym)
        a_mid = np.asarray(A.evaluate(axis.xm, axis.ym)[axis.index], dtype=float)
        Pis = _pi_staggered(axis, mass, hbar)
        t1 = (Pis.getH() @ Pis).tocsr()
        sq = _diag((e * a_mid * m_mid**-0.5) ** 2)
        t2 = (axis.Av.T @ sq @ axis.Av).tocsr()
        name = "x" if axis.index == 0 else "y"
        Pc = build_pdm_momentum(grid, mass, name, constants, mode="canonical").matrix
        Pic = build_pdm_momentum(grid, mass, name, constants, mode="hermitian").matrix
        t3 = (_diag(e * a_node[axis.index] / m_node) @ Pc).tocsr()
        t4 = (Pic @ _diag(e * a_node[axis.index] * m_node**-0.5)).tocsr()
        K = 0.5 * (t1 + t2 - t3 - t4)
        H = K if H is None else H + K
    H = (H + _potential_diag(grid, potential)).tocsr()
    literal = _wrap(grid, H)
    sym = 0.5 * (H + H.getH().tocsr())
    return ExpandedHamiltonian(literal=literal, symmetrized=_wrap(grid, sym))


def build_dutra_oliveira_hamiltonian(
    grid,
    mass: MassProfile,
    A: VectorPotential,
    potential=None,
    ordering: OrderingParams = ZHU_KROEMER,
    constants: PhysicalConstants = PhysicalConstants(),
) -> LinearOperator:
    """The criticized construction: scale the gauge field by the mass first.

    H = vonRoos(ordering) - (e/2) sum_j [At_j p_j + p_j At_j]
        + (e^2/2) M At^2 + V,   At = A/M,

    quantized with p = -i*hbar*grad in the linear term. Exactly Hermitian by
    symmetrization; coincides with the corrected builder at constant mass and
    differs from it for genuine position-dependent mass.
    """
    if isinstance(grid, Grid1D):
        raise GridError("vector potentials are 2D; use a 2D grid")
    xx, yy = _node_coords(grid)
    _mass_values(grid, mass, "node", xx, yy)
    hbar, e = constants.hbar, constants.charge
    H = build_von_roos(grid, mass, ordering, None, constants).matrix
    for axis in _axes(grid):
        m_mid = _mass_values(grid, mass, "midpoint", axis.xm, axis.ym)
        a_mid = np.asarray(A.evaluate(axis.xm, axis.ym)[axis.index], dtype=float)
        atilde = a_mid / m_mid
        Y = (axis.Av.T @ _diag(atilde) @ ((-1j * hbar) * axis.Ds)).tocsr()
        H = H - (e / 2.0) * (Y + Y.getH().tocsr())
        dia = _diag(e**2 * m_mid * atilde**2 / 2.0)
        H = H + (axis.Av.T @ dia @ axis.Av).tocsr()
    H = H + _potential_diag(grid, potential)
    return _wrap(grid, H)


def hermiticity_defect(op: LinearOperator | sp.spmatrix) -> float:
    """max |H_mn - conj(H_nm)|, absent entries counted as zero."""
    mat = op.matrix if isinstance(op, LinearOperator) else op
    return hermiticity_defect_matrix(mat)


def relative_entry_gap(a, b) -> float:
    """Entrywise gap between operators, relative to their own entry scale.

    Raw entry differences between two consistent discretizations of one
    continuum operator saturate at a spacing-independent constant while the
    operators' own entries grow like 1/h^2, so the meaningful closeness
    measure is normalized by the larger max-entry.
    """
    am = a.matrix if isinstance(a, LinearOperator) else sp.csr_matrix(a)
    bm = b.matrix if isinstance(b, LinearOperator) else sp.csr_matrix(b)
    scale = max(max_entry(am), max_entry(bm))
    return max_entry(am - bm) / scale if scale else 0.0


def smooth_probe(grid, sigma_frac: float = 0.4) -> np.ndarray:
    """Fixed smooth Gaussian profile sampled on the grid, for action tests."""
    if isinstance(grid, Grid1D):
        c = 0.5 * (grid.xmin + grid.xmax)
        r = 0.5 * (grid.xmax - grid.xmin)
        u = (grid.x - c) / r
        return np.exp(-(u**2) / (2.0 * sigma_frac**2))
    xx, yy = grid.nodes()
    cx = 0.5 * (grid.xmin + grid.xmax)
    cy = 0.5 * (grid.ymin + grid.ymax)
    rx = 0.5 * (grid.xmax - grid.xmin)
    ry = 0.5 * (grid.ymax - grid.ymin)
    u = (xx - cx) / rx
    v = (yy - cy) / ry
    return np.exp(-(u**2 + v**2) / (2.0 * sigma_frac**2))


def action_gap(a, b, grid, layers: int = 2, sigma_frac: float = 0.4) -> float:
    """How differently two operators act on one fixed smooth profile.

    Agreeing discretizations of the same continuum operator differ at
    O(h^2) in this measure even where their raw entries do not converge.
    Rows within `layers` of a wall are excluded from the max.
    """
    am = a.matrix if isinstance(a, LinearOperator) else sp.csr_matrix(a)
    bm = b.matrix if isinstance(b, LinearOperator) else sp.csr_matrix(b)
    psi = smooth_probe(grid, sigma_frac)
    w = np.abs((am - bm) @ psi)
    if isinstance(grid, Grid2D):
        mask = grid.interior_mask(layers)
        w = w[mask]
    elif layers:
        w = w[layers:-layers]
    return float(w.max())
