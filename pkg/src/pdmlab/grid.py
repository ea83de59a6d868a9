"""Tensor-product grids with Dirichlet walls and sparse finite-difference blocks.

Conventions fixed once: interior nodes only, node(i, j) = (xmin + (i+1)hx,
ymin + (j+1)hy), linear index i + nx*j (x fastest). The wavefunction is zero
outside the domain, so boundary stencils simply drop the ghost values.

Besides the node-to-node centered derivatives exposed as ``build_derivative``,
the module provides the staggered (node-to-midpoint) difference and average
used by the Hamiltonian builders to form compact flux-form products.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Grid1D",
    "Grid2D",
    "LinearOperator",
    "GridError",
    "make_grid",
    "make_grid_1d",
    "build_derivative",
    "sample_diagonal",
    "hermiticity_defect_matrix",
    "max_entry",
]


class GridError(ValueError):
    """Degenerate bounds, too few points, or bad stencil request."""


@dataclass(frozen=True)
class Grid1D:
    """n interior nodes on (xmin, xmax); h = (xmax - xmin)/(n + 1)."""

    n: int
    xmin: float
    xmax: float

    def __post_init__(self):
        if self.n < 3:
            raise GridError(f"need at least 3 interior points, got {self.n}")
        if not self.xmax > self.xmin:
            raise GridError(f"degenerate bounds [{self.xmin}, {self.xmax}]")

    @property
    def h(self) -> float:
        return (self.xmax - self.xmin) / (self.n + 1)

    @property
    def x(self) -> np.ndarray:
        return self.xmin + self.h * np.arange(1, self.n + 1)

    @property
    def xmid(self) -> np.ndarray:
        """n + 1 midpoints, including the half-cells touching each wall."""
        return self.xmin + self.h * (0.5 + np.arange(self.n + 1))

    @property
    def dim(self) -> int:
        return self.n

    @property
    def measure(self) -> float:
        return self.h


@dataclass(frozen=True)
class Grid2D:
    """nx*ny interior nodes over [xmin,xmax] x [ymin,ymax], x-fastest indexing."""

    nx: int
    ny: int
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise GridError(f"need at least 3 interior points per axis, got {self.nx}x{self.ny}")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise GridError("degenerate bounds")

    @property
    def hx(self) -> float:
        return (self.xmax - self.xmin) / (self.nx + 1)

    @property
    def hy(self) -> float:
        return (self.ymax - self.ymin) / (self.ny + 1)

    @property
    def x(self) -> np.ndarray:
        return self.xmin + self.hx * np.arange(1, self.nx + 1)

    @property
    def y(self) -> np.ndarray:
        return self.ymin + self.hy * np.arange(1, self.ny + 1)

    @property
    def dim(self) -> int:
        return self.nx * self.ny

    @property
    def measure(self) -> float:
        return self.hx * self.hy

    def node(self, i: int, j: int) -> tuple[float, float]:
        return (self.xmin + (i + 1) * self.hx, self.ymin + (j + 1) * self.hy)

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened node coordinates in linear-index order (i + nx*j)."""
        return np.tile(self.x, self.ny), np.repeat(self.y, self.nx)

    def interior_mask(self, layers: int) -> np.ndarray:
        """Nodes at least `layers` rows away from every wall."""
        ix = np.tile(np.arange(self.nx), self.ny)
        iy = np.repeat(np.arange(self.ny), self.nx)
        return (
            (ix >= layers)
            & (ix < self.nx - layers)
            & (iy >= layers)
            & (iy < self.ny - layers)
        )


@dataclass(frozen=True)
class LinearOperator:
    """Sparse complex matrix on grid vectors, with build-time diagnostics."""

    matrix: sp.csr_matrix
    dim: int
    hermiticity_defect: float
    measure: float

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def __matmul__(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def max_entry(self) -> float:
        return max_entry(self.matrix)

    def dump_coo(self, stream) -> None:
        """Coordinate-list text dump: "row col real imag", sorted by (row, col)."""
        close = False
        if isinstance(stream, (str, bytes)):
            stream = open(stream, "w", encoding="utf-8")
            close = True
        try:
            coo = self.matrix.tocoo()
            order = np.lexsort((coo.col, coo.row))
            for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
                stream.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")
        finally:
            if close:
                stream.close()

    def dump_coo_text(self) -> str:
        buf = io.StringIO()
        self.dump_coo(buf)
        return buf.getvalue()


def make_grid(nx: int, ny: int, bounds) -> Grid2D:
    """bounds = (xmin, xmax, ymin, ymax)."""
    xmin, xmax, ymin, ymax = (float(b) for b in bounds)
    return Grid2D(nx=int(nx), ny=int(ny), xmin=xmin, xmax=xmax, ymin=ymin, ymax=ymax)


def make_grid_1d(n: int, bounds) -> Grid1D:
    xmin, xmax = (float(b) for b in bounds)
    return Grid1D(n=int(n), xmin=xmin, xmax=xmax)


def _d1_1d(n: int, h: float) -> sp.csr_matrix:
    off = np.full(n - 1, 1.0 / (2.0 * h))
    return sp.diags([-off, off], [-1, 1], format="csr")


def _d2_1d(n: int, h: float) -> sp.csr_matrix:
    main = np.full(n, -2.0 / h**2)
    off = np.full(n - 1, 1.0 / h**2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def staggered_difference_1d(n: int, h: float) -> sp.csr_matrix:
    """(n+1) x n forward difference onto cell midpoints, ghosts zero."""
    rows = np.concatenate([np.arange(n), np.arange(1, n + 1)])
    cols = np.concatenate([np.arange(n), np.arange(n)])
    vals = np.concatenate([np.full(n, 1.0 / h), np.full(n, -1.0 / h)])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n + 1, n))


def staggered_average_1d(n: int) -> sp.csr_matrix:
    """(n+1) x n two-point average onto cell midpoints, ghosts zero."""
    rows = np.concatenate([np.arange(n), np.arange(1, n + 1)])
    cols = np.concatenate([np.arange(n), np.arange(n)])
    vals = np.concatenate([np.full(n, 0.5), np.full(n, 0.5)])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n + 1, n))


def build_derivative(grid, axis: str, order: int) -> LinearOperator:
    """Centered stencils: order 1 is (-1/2h, 0, 1/2h), order 2 is (1, -2, 1)/h^2.

    Order 1 is exactly antisymmetric and order 2 exactly symmetric under the
    Dirichlet truncation.
    """
    if order not in (1, 2):
        raise GridError(f"unsupported derivative order {order}")
    if isinstance(grid, Grid1D):
        if axis != "x":
            raise GridError(f"1D grid has only axis 'x', got {axis!r}")
        mat = _d1_1d(grid.n, grid.h) if order == 1 else _d2_1d(grid.n, grid.h)
    elif isinstance(grid, Grid2D):
        if axis == "x":
            one_d = _d1_1d(grid.nx, grid.hx) if order == 1 else _d2_1d(grid.nx, grid.hx)
            mat = sp.kron(sp.identity(grid.ny, format="csr"), one_d, format="csr")
        elif axis == "y":
            one_d = _d1_1d(grid.ny, grid.hy) if order == 1 else _d2_1d(grid.ny, grid.hy)
            mat = sp.kron(one_d, sp.identity(grid.nx, format="csr"), format="csr")
        else:
            raise GridError(f"unknown axis {axis!r}")
    else:
        raise GridError(f"unsupported grid type {type(grid).__name__}")
    mat = mat.astype(complex).tocsr()
    mat.sort_indices()
    return LinearOperator(
        matrix=mat,
        dim=grid.dim,
        hermiticity_defect=hermiticity_defect_matrix(mat),
        measure=grid.measure,
    )


def sample_diagonal(grid, values_or_field) -> LinearOperator:
    """Diagonal multiplication operator from node samples of a field.

    Accepts a precomputed node vector or anything with an ``evaluate(x, y)``
    (2D) / callable (1D) interface.
    """
    if isinstance(grid, Grid2D):
        if hasattr(values_or_field, "evaluate"):
            xx, yy = grid.nodes()
            vals = np.asarray(values_or_field.evaluate(xx, yy))
        else:
            vals = np.asarray(values_or_field)
    else:
        if hasattr(values_or_field, "evaluate"):
            vals = np.asarray(values_or_field.evaluate(grid.x, np.zeros_like(grid.x)))
        elif callable(values_or_field):
            vals = np.asarray(values_or_field(grid.x))
        else:
            vals = np.asarray(values_or_field)
    vals = vals * np.ones(grid.dim)
    if not np.all(np.isfinite(vals)):
        raise GridError("non-finite sample in diagonal operator")
    mat = sp.diags(vals.astype(complex), 0, format="csr")
    return LinearOperator(matrix=mat, dim=grid.dim, hermiticity_defect=0.0, measure=grid.measure)


def max_entry(mat: sp.spmatrix) -> float:
    """Largest entry magnitude of a sparse matrix (0 for an empty one)."""
    m = sp.csr_matrix(mat, copy=True)
    m.eliminate_zeros()
    return float(np.abs(m.data).max()) if m.nnz else 0.0


def hermiticity_defect_matrix(mat: sp.spmatrix) -> float:
    """max |H_mn - conj(H_nm)| over the union sparsity pattern."""
    return max_entry(sp.csr_matrix(mat) - sp.csr_matrix(mat).getH().tocsr())
