"""Eigensolution of Hermitian grid operators and spectrum comparison.

Two paths: dense LAPACK for small problems, and a seeded block Lanczos with
full reorthogonalization for the rest. Determinism outranks speed here: the
start block is drawn from a fixed seed, reorthogonalization is unconditional,
and residuals are certified post hoc by explicit matrix-vector products.
The block start matters for this problem family because magnetic spectra
carry tightly clustered (near-degenerate) lowest levels that a single-vector
Krylov sweep resolves only slowly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .grid import LinearOperator, max_entry

__all__ = [
    "Spectrum",
    "ComparisonReport",
    "SolverError",
    "SolverConvergenceError",
    "solve_lowest",
    "compare_spectra",
]

DENSE_DIM_LIMIT = 2500
HERMITICITY_GATE = 1e-10


class SolverError(ValueError):
    """Bad solver request (non-Hermitian input, k out of range, unknown method)."""


class SolverConvergenceError(RuntimeError):
    """Iteration cap reached; carries the best available estimates."""

    def __init__(self, message: str, best: "Spectrum | None" = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with grid-normalized eigenvectors and diagnostics."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # shape (dim, k), sum |psi|^2 * measure = 1
    residuals: np.ndarray
    method: str
    iterations: int
    measure: float = 1.0

    def orthogonality_defect(self) -> float:
        """Largest off-diagonal overlap in the grid inner product."""
        g = self.eigenvectors.conj().T @ self.eigenvectors * self.measure
        off = g - np.diag(np.diag(g))
        return float(np.abs(off).max()) if off.size else 0.0


@dataclass(frozen=True)
class ComparisonLevel:
    level: int
    e1: float
    e2: float
    abs_diff: float
    rel_diff: float


@dataclass(frozen=True)
class ComparisonReport:
    levels: list[ComparisonLevel]
    max_abs_diff: float
    mean_abs_diff: float
    max_rel_diff: float
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "levels": [
                {"level": l.level, "e1": l.e1, "e2": l.e2,
                 "abs_diff": l.abs_diff, "rel_diff": l.rel_diff}
                for l in self.levels
            ],
            "summary": {
                "max_abs_diff": self.max_abs_diff,
                "mean_abs_diff": self.mean_abs_diff,
                "max_rel_diff": self.max_rel_diff,
            },
        }
        out.update(self.extras)
        return out


def _operator_scale(mat: sp.csr_matrix) -> float:
    """Infinity-norm bound, a cheap stand-in for ||H||."""
    return float(np.abs(mat).sum(axis=1).max())


def _finalize(mat, w, Y, measure: float, method: str, iterations: int) -> Spectrum:
    """Certify residuals by explicit matvec and grid-normalize the vectors."""
    res = np.empty(len(w))
    for i in range(len(w)):
        y = Y[:, i]
        nrm = np.linalg.norm(y)
        res[i] = np.linalg.norm(mat @ y - w[i] * y) / nrm
        Y[:, i] = y / (nrm * np.sqrt(measure))
    return Spectrum(
        eigenvalues=np.asarray(w, dtype=float),
        eigenvectors=Y,
        residuals=res,
        method=method,
        iterations=iterations,
        measure=measure,
    )


def solve_lowest(
    op: LinearOperator,
    k: int,
    method: str = "auto",
    tol: float = 1e-9,
    seed: int = 0,
    max_basis: int | None = None,
) -> Spectrum:
    """k smallest eigenpairs of a Hermitian operator.

    method "dense" (dim <= 2500), "lanczos", or "auto" (dense when it fits).
    Residuals are guaranteed <= tol * ||H|| (infinity-norm bound); for the
    Lanczos path non-convergence at the basis cap raises with the best
    estimates attached.
    """
    mat = op.matrix
    dim = op.dim
    if not 1 <= k <= dim // 4:
        raise SolverError(f"k must satisfy 1 <= k <= dim/4 = {dim // 4}, got {k}")
    gate = HERMITICITY_GATE * max(max_entry(mat), np.finfo(float).tiny)
    if op.hermiticity_defect > gate:
        raise SolverError(
            f"operator is not Hermitian (defect {op.hermiticity_defect:.3e} > "
            f"{gate:.3e}); symmetrize first"
        )
    if method == "auto":
        method = "dense" if dim <= DENSE_DIM_LIMIT else "lanczos"
    if method == "dense":
        if dim > DENSE_DIM_LIMIT:
            raise SolverError(f"dense path limited to dim <= {DENSE_DIM_LIMIT}, got {dim}")
        return _solve_dense(mat, k, op.measure)
    if method == "lanczos":
        return _solve_block_lanczos(mat, k, tol, seed, op.measure, max_basis)
    raise SolverError(f"unknown method {method!r}")


def _solve_dense(mat: sp.csr_matrix, k: int, measure: float) -> Spectrum:
    dense = mat.toarray()
    if np.count_nonzero(dense.imag) == 0:
        w, v = sla.eigh(dense.real)
    else:
        w, v = sla.eigh(dense)
    Y = v[:, :k].astype(complex)
    return _finalize(mat, w[:k], Y, measure, "dense", iterations=0)


FILTER_DEGREE = 150


def _cheb_filter(mat: sp.csr_matrix, V: np.ndarray, lo: float, hi: float, degree: int) -> np.ndarray:
    """Apply the Chebyshev polynomial mapped to damp [lo, hi].

    Components of V along eigenvectors below lo are amplified exponentially
    in the degree while the window [lo, hi] stays bounded by one, which turns
    each appended block into nearly pure low-spectrum content. The recurrence
    is rescaled periodically and the output column-normalized: the
    amplification reaches overflow territory otherwise, wrecking the basis.
    """
    c = 0.5 * (hi + lo)
    e = 0.5 * (hi - lo)
    t_prev = V.copy()
    t_cur = (mat @ V - c * V) / e
    for step in range(degree - 1):
        t_next = (2.0 / e) * (mat @ t_cur - c * t_cur) - t_prev
        t_prev, t_cur = t_cur, t_next
        if step % 8 == 7:
            norm = np.abs(t_cur).max()
            if norm > 1e12:
                t_cur /= norm
                t_prev /= norm
    norms = np.linalg.norm(t_cur, axis=0)
    norms[norms == 0] = 1.0
    return t_cur / norms


def _solve_block_lanczos(
    mat: sp.csr_matrix,
    k: int,
    tol: float,
    seed: int,
    measure: float,
    max_basis: int | None,
) -> Spectrum:
    """Block Krylov subspace with full reorthogonalization and thick
    Rayleigh-Ritz on the original operator; blocks after the first are
    Chebyshev-filtered Ritz vectors, which keeps the basis small on stiff
    and clustered spectra. Ritz values always come from H itself and the
    final residuals are certified by explicit matvec."""
    dim = mat.shape[0]
    block = min(max(2 * k, 4), 12)
    cap = max_basis or min(dim, 1600)
    scale = _operator_scale(mat)
    target = tol * scale
    rng = np.random.default_rng(seed)

    def fresh_block(width: int) -> np.ndarray:
        return rng.standard_normal((dim, width)) + 1j * rng.standard_normal((dim, width))

    # Fortran order: column blocks are contiguous for the BLAS-heavy loop
    Q = np.empty((dim, cap), dtype=complex, order="F")
    HQ = np.empty((dim, cap), dtype=complex, order="F")
    T = np.zeros((cap, cap), dtype=complex)

    Qb = fresh_block(block)
    m = 0
    prev_vals = None
    last = None

    def orthogonalize_block(Vb: np.ndarray) -> np.ndarray | None:
        """Full reorthogonalization, immune to renormalization roundoff.

        Projecting out the basis (or the mutual QR of a near-dependent
        block) can shrink a column by many orders of magnitude, and the
        subsequent renormalization amplifies in-span roundoff by the same
        factor. Both the projection and the QR are therefore followed by a
        second clean-up round whose normalizations are all O(1). Returns
        None when no genuine new direction survives.
        """
        norms = np.linalg.norm(Vb, axis=0)
        good = norms > 0
        if not good.any():
            return None
        Vb = Vb[:, good] / norms[good]
        for stage in range(2):
            for _ in range(2):
                if m:
                    Vb = Vb - Q[:, :m] @ (Q[:, :m].conj().T @ Vb)
            norms = np.linalg.norm(Vb, axis=0)
            floor = 1e-10 if stage == 0 else 0.5
            good = norms > floor
            if not good.any():
                return None
            Vb = Vb[:, good] / norms[good]
            Vb, R = np.linalg.qr(Vb)
            keep = np.abs(np.diag(R)) > (1e-8 if stage == 0 else 0.5)
            if not keep.any():
                return None
            Vb = Vb[:, keep]
        return Vb

    while True:
        Qb = orthogonalize_block(Qb)
        if Qb is None:
            # basis already contains the filtered directions: top up randomly
            Qb = orthogonalize_block(fresh_block(block))
            if Qb is None:
                Qb = orthogonalize_block(fresh_block(2 * block))
        width = min(Qb.shape[1], cap - m)
        Qb = Qb[:, :width]
        HQb = mat @ Qb
        Q[:, m:m + width] = Qb
        HQ[:, m:m + width] = HQb
        T[: m + width, m:m + width] = Q[:, : m + width].conj().T @ HQb
        T[m:m + width, :m] = T[:m, m:m + width].conj().T
        m += width

        Tm = 0.5 * (T[:m, :m] + T[:m, :m].conj().T)
        vals, vecs = np.linalg.eigh(Tm)
        kk = min(k, m)
        S = vecs[:, :kk]
        resid = np.linalg.norm(HQ[:, :m] @ S - (Q[:, :m] @ S) * vals[:kk], axis=0)
        stable = (
            prev_vals is not None
            and len(prev_vals) == k
            and kk == k
            and np.abs(vals[:k] - prev_vals).max() <= max(target, 1e-14 * scale)
        )
        converged = kk == k and resid.max() <= target and (stable or m >= dim)
        last = (vals[:kk].copy(), S.copy(), resid.copy(), m)
        if converged:
            break
        prev_vals = vals[:k].copy() if kk == k else None
        if m >= cap:
            Y = Q[:, :m] @ last[1]
            best = _finalize(mat, last[0], Y, measure, "lanczos", iterations=m)
            raise SolverConvergenceError(
                f"filtered block Lanczos hit the basis cap ({cap}) with max "
                f"residual {last[2].max():.3e} > {target:.3e}",
                best=best,
            )
        # next block: Chebyshev-filtered lowest Ritz vectors; the window is
        # cut just above the wanted part of the current Ritz spectrum
        bb = min(block, m)
        Y = Q[:, :m] @ vecs[:, :bb]
        cut_idx = min(k + 2, m) - 1
        lo = float(vals[cut_idx])
        lo = max(lo, float(vals[0]) + 1e-12 * scale)
        lo = min(lo, 0.5 * (float(vals[0]) + scale))
        Qb = _cheb_filter(mat, Y, lo, scale, FILTER_DEGREE)

    vals_k, S, _, m_used = last
    Y = Q[:, :m_used] @ S
    return _finalize(mat, vals_k, Y, measure, "lanczos", iterations=m_used)


def compare_spectra(s1: Spectrum, s2: Spectrum, k: int) -> ComparisonReport:
    """Per-level differences over the first k levels, as sorted multisets."""
    if k < 1 or k > len(s1.eigenvalues) or k > len(s2.eigenvalues):
        raise SolverError(
            f"k = {k} exceeds available levels ({len(s1.eigenvalues)}, {len(s2.eigenvalues)})"
        )
    e1 = np.sort(s1.eigenvalues[:k])
    e2 = np.sort(s2.eigenvalues[:k])
    levels = []
    for i in range(k):
        ad = abs(e1[i] - e2[i])
        denom = max(abs(e1[i]), abs(e2[i]), np.finfo(float).tiny)
        levels.append(ComparisonLevel(level=i, e1=float(e1[i]), e2=float(e2[i]),
                                      abs_diff=float(ad), rel_diff=float(ad / denom)))
    abs_diffs = np.array([l.abs_diff for l in levels])
    return ComparisonReport(
        levels=levels,
        max_abs_diff=float(abs_diffs.max()),
        mean_abs_diff=float(abs_diffs.mean()),
        max_rel_diff=float(max(l.rel_diff for l in levels)),
    )
