"""Hamiltonian builders: exact identities, convergence rates, failure modes."""

import numpy as np
import pytest
import scipy.sparse as sp

from pdmlab import (
    BEN_DANIEL_DUKE,
    MUSTAFA_MAZHARIMOUSAVI,
    ZHU_KROEMER,
    MassPositivityError,
    OrderingError,
    action_gap,
    build_corrected_hamiltonian,
    build_dutra_oliveira_hamiltonian,
    build_expanded_hamiltonian,
    build_pdm_momentum,
    build_von_roos,
    build_derivative,
    hermiticity_defect,
    make_grid,
    make_grid_1d,
    make_mass_profile,
    make_ordering,
    make_potential,
    make_scalar_field,
    make_vector_potential,
    relative_entry_gap,
    sample_diagonal,
    gauge_transform,
)
from pdmlab.grid import max_entry


def _ratio_window(values, lo=2.7, hi=6.0):
    ratios = [values[i] / values[i + 1] for i in range(len(values) - 1)]
    assert all(lo <= r <= hi for r in ratios), f"ratios {ratios} outside [{lo}, {hi}]"


def test_ordering_presets_satisfy_constraint():
    for o in (ZHU_KROEMER, MUSTAFA_MAZHARIMOUSAVI, BEN_DANIEL_DUKE):
        assert abs(o.alpha + o.beta + o.gamma + 1.0) <= 1e-12
    assert (ZHU_KROEMER.alpha, ZHU_KROEMER.beta, ZHU_KROEMER.gamma) == (-0.5, 0.0, -0.5)
    assert (MUSTAFA_MAZHARIMOUSAVI.alpha, MUSTAFA_MAZHARIMOUSAVI.beta,
            MUSTAFA_MAZHARIMOUSAVI.gamma) == (-0.25, -0.5, -0.25)


def test_ordering_constraint_violation_rejected():
    with pytest.raises(OrderingError):
        make_ordering(0.0, 0.0, 0.0)


def test_von_roos_constant_mass_is_ordering_independent():
    g = make_grid(10, 10, (-3, 3, -3, 3))
    m = make_mass_profile("constant", m0=2.0)
    mats = [build_von_roos(g, m, o) for o in (ZHU_KROEMER, MUSTAFA_MAZHARIMOUSAVI, BEN_DANIEL_DUKE)]
    for other in mats[1:]:
        assert relative_entry_gap(mats[0], other) <= 1e-14


def test_von_roos_constant_mass_equals_scaled_laplacian():
    g = make_grid(8, 8, (-2, 2, -2, 2))
    m0 = 2.0
    m = make_mass_profile("constant", m0=m0)
    H = build_von_roos(g, m, ZHU_KROEMER)
    lap = (build_derivative(g, "x", 2).matrix + build_derivative(g, "y", 2).matrix)
    ref = -(1.0 / (2 * m0)) * lap
    assert relative_entry_gap(H, ref) <= 1e-14


def test_von_roos_orderings_differ_for_pdm():
    g = make_grid(16, 16, (-2, 2, -2, 2))
    m = make_mass_profile("quadratic", m0=1.0, lam=1.0)
    hz = build_von_roos(g, m, ZHU_KROEMER)
    hm = build_von_roos(g, m, MUSTAFA_MAZHARIMOUSAVI)
    assert max_entry(hz.matrix - hm.matrix) > 1e-3


def test_von_roos_oscillator_action_matches_direct_stencil():
    """Constant-mass H applied to a sampled Gaussian equals the direct stencil."""
    g = make_grid(24, 24, (-6, 6, -6, 6))
    m = make_mass_profile("constant", m0=1.0)
    pot = make_potential("harmonic", k=1.0)
    H = build_von_roos(g, m, ZHU_KROEMER, pot)
    xx, yy = g.nodes()
    psi = np.exp(-(xx**2 + yy**2) / 2.0)
    got = (H.matrix @ psi).real
    lap = (build_derivative(g, "x", 2).matrix + build_derivative(g, "y", 2).matrix).real
    want = -0.5 * (lap @ psi) + 0.5 * (xx**2 + yy**2) * psi
    assert np.abs(got - want).max() <= 1e-12 * np.abs(want).max()


def test_von_roos_rejects_nonpositive_mass():
    g = make_grid(8, 8, (-2, 2, -2, 2))

    class BadMass:
        kind = "bad"
        m0 = 1.0

        def evaluate(self, x, y):
            return np.asarray(x) * 0.0  # identically zero

        def gradient(self, x, y):
            return (np.zeros_like(np.asarray(x)),) * 2

    with pytest.raises(MassPositivityError):
        build_von_roos(g, BadMass(), ZHU_KROEMER)


def test_momentum_constant_mass_collapses_to_derivative():
    g = make_grid_1d(12, (-3, 3))
    m = make_mass_profile("constant", m0=1.0)
    P = build_pdm_momentum(g, m, "x", mode="canonical")
    D = build_derivative(g, "x", 1)
    assert max_entry(P.matrix - (-1j) * D.matrix) == 0.0


def test_hermitian_momentum_constant_mass_scaling():
    g = make_grid_1d(12, (-3, 3))
    m = make_mass_profile("constant", m0=4.0)
    Pi = build_pdm_momentum(g, m, "x", mode="hermitian")
    D = build_derivative(g, "x", 1)
    assert max_entry(Pi.matrix - (-0.5j) * D.matrix) <= 1e-15


def test_canonical_momentum_defect_and_hermitian_momentum_exactness():
    g = make_grid_1d(32, (-4, 4))
    m = make_mass_profile("quadratic", m0=1.0, lam=1.0)
    P = build_pdm_momentum(g, m, "x", mode="canonical")
    Pi = build_pdm_momentum(g, m, "x", mode="hermitian")
    assert P.hermiticity_defect > 1e-3  # canonical form is not Hermitian
    assert Pi.hermiticity_defect == 0.0


def test_hermitian_momentum_converges_to_mass_weighted_canonical():
    """Pi and M^(-1/2) P act identically in the continuum, O(h^2) apart on the grid."""
    m = make_mass_profile("quadratic", m0=1.0, lam=1.0)
    gaps = []
    for n in (64, 128, 256):
        g = make_grid_1d(n, (-4, 4))
        P = build_pdm_momentum(g, m, "x", mode="canonical")
        Pi = build_pdm_momentum(g, m, "x", mode="hermitian")
        F = sample_diagonal(g, m.evaluate(g.x, np.zeros(n)) ** -0.5)
        gaps.append(action_gap(Pi, F.matrix @ P.matrix, g, layers=2))
    _ratio_window(gaps, 3.0, 5.0)


def test_corrected_constant_mass_equals_von_roos():
    g = make_grid(10, 10, (-3, 3, -3, 3))
    m = make_mass_profile("constant", m0=1.5)
    pot = make_potential("harmonic", k=1.0)
    hc = build_corrected_hamiltonian(g, m, None, pot)
    for ordering in (ZHU_KROEMER, MUSTAFA_MAZHARIMOUSAVI):
        hv = build_von_roos(g, m, ordering, pot)
        assert relative_entry_gap(hc, hv) <= 1e-12


def test_corrected_matches_mm_von_roos_under_refinement():
    m = make_mass_profile("rational-bump", m0=1.0, a=1.0)
    gaps = []
    for n in (16, 32, 64):
        g = make_grid(n, n, (-2, 2, -2, 2))
        hc = build_corrected_hamiltonian(g, m)
        hv = build_von_roos(g, m, MUSTAFA_MAZHARIMOUSAVI)
        gaps.append(relative_entry_gap(hc, hv))
    _ratio_window(gaps)


def test_centered_momentum_square_matches_mm_von_roos():
    """Half the summed squares of the exposed Hermitian momenta is the MM
    kinetic operator in the continuum."""
    m = make_mass_profile("quadratic", m0=1.0, lam=0.5)
    gaps = []
    for n in (16, 32, 64):
        g = make_grid(n, n, (-2, 2, -2, 2))
        pix = build_pdm_momentum(g, m, "x", mode="hermitian").matrix
        piy = build_pdm_momentum(g, m, "y", mode="hermitian").matrix
        half_sq = 0.5 * (pix @ pix + piy @ piy)
        hv = build_von_roos(g, m, MUSTAFA_MAZHARIMOUSAVI)
        gaps.append(action_gap(half_sq, hv, g))
    _ratio_window(gaps)


def test_corrected_kinetic_is_positive_semidefinite():
    for mass_kind, params in (("constant", {"m0": 1.0}),
                              ("quadratic", {"m0": 1.0, "lam": 0.5}),
                              ("rational-bump", {"m0": 1.0, "a": 1.0})):
        m = make_mass_profile(mass_kind, **params)
        for gauge in (None, make_vector_potential("symmetric", 1.0)):
            g = make_grid(14, 14, (-4, 4, -4, 4))
            H = build_corrected_hamiltonian(g, m, gauge)
            w = np.linalg.eigvalsh(H.toarray())
            assert w[0] >= -1e-10


def test_expanded_reduces_to_corrected_without_field():
    g = make_grid(12, 12, (-3, 3, -3, 3))
    m = make_mass_profile("quadratic", m0=1.0, lam=0.3)
    zero_gauge = make_vector_potential("symmetric", 0.0)
    pair = build_expanded_hamiltonian(g, m, zero_gauge)
    hc = build_corrected_hamiltonian(g, m)
    assert relative_entry_gap(pair.literal, hc) <= 1e-14
    assert pair.literal.hermiticity_defect <= 1e-14 * pair.literal.max_entry()


def test_expanded_constant_mass_equals_corrected_exactly():
    g = make_grid(12, 12, (-3, 3, -3, 3))
    m = make_mass_profile("constant", m0=2.0)
    gauge = make_vector_potential("symmetric", 1.1)
    pair = build_expanded_hamiltonian(g, m, gauge)
    hc = build_corrected_hamiltonian(g, m, gauge)
    assert relative_entry_gap(pair.literal, hc) <= 1e-12
    assert pair.literal.hermiticity_defect <= 1e-13 * pair.literal.max_entry()


def test_expanded_symmetrized_converges_and_defect_decays():
    m = make_mass_profile("quadratic", m0=1.0, lam=0.1)
    gauge = make_vector_potential("symmetric", 1.0)
    sym_gaps, defects = [], []
    for n in (16, 32, 64):
        g = make_grid(n, n, (-2, 2, -2, 2))
        pair = build_expanded_hamiltonian(g, m, gauge)
        hc = build_corrected_hamiltonian(g, m, gauge)
        sym_gaps.append(action_gap(pair.symmetrized, hc, g))
        defects.append(pair.literal.hermiticity_defect / pair.literal.max_entry())
    assert min(defects) > 0
    _ratio_window(sym_gaps)
    _ratio_window(defects)


def test_dutra_oliveira_without_field_equals_von_roos():
    g = make_grid(12, 12, (-3, 3, -3, 3))
    m = make_mass_profile("rational-bump", m0=1.0, a=1.0)
    pot = make_potential("harmonic", k=1.0)
    zero_gauge = make_vector_potential("symmetric", 0.0)
    hd = build_dutra_oliveira_hamiltonian(g, m, zero_gauge, pot, MUSTAFA_MAZHARIMOUSAVI)
    hv = build_von_roos(g, m, MUSTAFA_MAZHARIMOUSAVI, pot)
    assert relative_entry_gap(hd, hv) <= 1e-14


def test_dutra_oliveira_constant_mass_equals_corrected():
    g = make_grid(12, 12, (-3, 3, -3, 3))
    m = make_mass_profile("constant", m0=3.0)
    gauge = make_vector_potential("landau-x", 0.8)
    hd = build_dutra_oliveira_hamiltonian(g, m, gauge)
    hc = build_corrected_hamiltonian(g, m, gauge)
    assert relative_entry_gap(hd, hc) <= 1e-12


def test_dutra_oliveira_differs_from_corrected_for_pdm():
    g = make_grid(24, 24, (-6, 6, -6, 6))
    m = make_mass_profile("rational-bump", m0=1.0, a=1.0)
    gauge = make_vector_potential("symmetric", 1.0)
    hd = build_dutra_oliveira_hamiltonian(g, m, gauge)
    hc = build_corrected_hamiltonian(g, m, gauge)
    # genuine operator-level disagreement, not a discretization artifact
    assert action_gap(hd, hc, g) > 1e-2


def test_builders_are_exactly_hermitian():
    g = make_grid(12, 12, (-3, 3, -3, 3))
    m = make_mass_profile("rational-bump", m0=1.0, a=1.0)
    gauge = make_vector_potential("symmetric", 1.0)
    pot = make_potential("harmonic", k=1.0)
    for op in (
        build_von_roos(g, m, ZHU_KROEMER, pot),
        build_von_roos(g, m, MUSTAFA_MAZHARIMOUSAVI, pot),
        build_corrected_hamiltonian(g, m, gauge, pot),
        build_dutra_oliveira_hamiltonian(g, m, gauge, pot),
        build_expanded_hamiltonian(g, m, gauge, pot).symmetrized,
    ):
        assert op.hermiticity_defect <= 1e-13 * op.max_entry()


def test_hermiticity_defect_of_test_matrix():
    mat = sp.diags([1j], 0, shape=(4, 4), format="csr")
    assert hermiticity_defect(mat) == pytest.approx(2.0)


def test_gauge_covariance_of_corrected_hamiltonian():
    """Conjugating by the gauge phase maps one gauge's H onto the other's at O(h^2)."""
    m = make_mass_profile("rational-bump", m0=1.0, a=1.0)
    B = 1.0
    chi = make_scalar_field("bilinear", c=-B / 2)  # symmetric -> landau-x
    gaps = []
    for n in (16, 32, 64):
        g = make_grid(n, n, (-3, 3, -3, 3))
        xx, yy = g.nodes()
        phase = sp.diags(np.exp(1j * chi.evaluate(xx, yy)), 0, format="csr")
        h_sym = build_corrected_hamiltonian(g, m, make_vector_potential("symmetric", B))
        h_lan = build_corrected_hamiltonian(g, m, make_vector_potential("landau-x", B))
        conj = (phase.getH() @ h_lan.matrix @ phase).tocsr()
        gaps.append(action_gap(conj, h_sym, g))
    _ratio_window(gaps)


def test_gauge_transformed_potential_builds_identical_operator():
    """A + grad(chi) from the transformer equals the target catalog gauge."""
    g = make_grid(10, 10, (-2, 2, -2, 2))
    m = make_mass_profile("quadratic", m0=1.0, lam=0.4)
    B = 0.9
    A2 = gauge_transform(make_vector_potential("symmetric", B),
                         make_scalar_field("bilinear", c=-B / 2))
    h_direct = build_corrected_hamiltonian(g, m, make_vector_potential("landau-x", B))
    h_transf = build_corrected_hamiltonian(g, m, A2)
    assert relative_entry_gap(h_direct, h_transf) <= 1e-13
