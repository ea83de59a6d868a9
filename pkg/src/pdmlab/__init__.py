"""pdmlab: quantum and classical mechanics of position-dependent-mass particles
in two-dimensional magnetic fields.

Thread pinning must happen before the first numpy import so the BLAS pool
honors it; default is single-threaded for reproducible reports.
"""

import os as _os

_threads = _os.environ.get("PDMLAB_THREADS", "1")
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS",
             "NUMEXPR_NUM_THREADS"):
    _os.environ.setdefault(_var, _threads)

from .fields import (  # noqa: E402
    FieldError,
    MassProfile,
    PhysicalConstants,
    ScalarField,
    VectorPotential,
    gauge_transform,
    make_mass_profile,
    make_potential,
    make_scalar_field,
    make_vector_potential,
)
from .grid import (  # noqa: E402
    Grid1D,
    Grid2D,
    GridError,
    LinearOperator,
    build_derivative,
    make_grid,
    make_grid_1d,
    sample_diagonal,
)
from .operators import (  # noqa: E402
    BEN_DANIEL_DUKE,
    MUSTAFA_MAZHARIMOUSAVI,
    ZHU_KROEMER,
    ExpandedHamiltonian,
    MassPositivityError,
    OrderingError,
    OrderingParams,
    action_gap,
    build_corrected_hamiltonian,
    build_dutra_oliveira_hamiltonian,
    build_expanded_hamiltonian,
    build_pdm_momentum,
    build_von_roos,
    hermiticity_defect,
    make_ordering,
    relative_entry_gap,
)
from .spectral import (  # noqa: E402
    ComparisonReport,
    SolverConvergenceError,
    SolverError,
    Spectrum,
    compare_spectra,
    solve_lowest,
)
from .classical import (  # noqa: E402
    ClassicalState,
    Trajectory,
    TrajectoryAborted,
    hamiltonian_flow,
    hamiltonian_value,
    integrate_trajectory,
    pseudo_momentum,
)
from .evolution import (  # noqa: E402
    EhrenfestReport,
    Wavefunction1D,
    ehrenfest_check,
    expectations,
    evolve_series,
    gaussian_packet,
    propagate,
)

__version__ = "0.1.0"
