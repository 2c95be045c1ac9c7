"""
Dense small-dimension linear algebra: validated vectors and matrices,
determinants, column deletion and the generalized cross product.
"""

import warnings
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor

from utils.errors import DimensionMismatchError


def as_vector(values, dim: Optional[int] = None, name: str = "vector") -> np.ndarray:
    """Convert to a finite 1-D float array, optionally checking its dimension."""
    vector = np.asarray(values, dtype=float)
    if vector.ndim != 1 or vector.size == 0:
        raise DimensionMismatchError(f"{name} must be a non-empty 1-D vector, got shape {vector.shape}")
    if dim is not None and vector.size != dim:
        raise DimensionMismatchError(f"{name} must have dimension {dim}, got {vector.size}")
    if not np.all(np.isfinite(vector)):
        raise ValueError(f"{name} contains non-finite entries")
    return vector


def as_matrix(values, rows: Optional[int] = None, cols: Optional[int] = None, name: str = "matrix") -> np.ndarray:
    """Convert to a finite 2-D float array, optionally checking its shape."""
    matrix = np.asarray(values, dtype=float)
    if matrix.ndim != 2 or matrix.size == 0:
        raise DimensionMismatchError(f"{name} must be a non-empty 2-D matrix, got shape {matrix.shape}")
    if rows is not None and matrix.shape[0] != rows:
        raise DimensionMismatchError(f"{name} must have {rows} rows, got {matrix.shape[0]}")
    if cols is not None and matrix.shape[1] != cols:
        raise DimensionMismatchError(f"{name} must have {cols} columns, got {matrix.shape[1]}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{name} contains non-finite entries")
    return matrix


def determinant(matrix) -> float:
    """
    Determinant of a square matrix.

    Orders 1-3 use the cofactor formulas directly; larger orders use an LU
    factorization with partial pivoting, tracking the sign of the row swaps.
    """
    a = as_matrix(matrix)
    size = a.shape[0]
    if a.shape[1] != size:
        raise DimensionMismatchError(f"determinant needs a square matrix, got shape {a.shape}")

    if size == 1:
        return float(a[0, 0])
    if size == 2:
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    if size == 3:
        return float(
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )

    with warnings.catch_warnings():
        # exactly singular input is a legitimate zero determinant here
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, pivots = lu_factor(a, check_finite=False)
    swaps = int(np.count_nonzero(pivots != np.arange(size)))
    sign = -1.0 if swaps % 2 else 1.0
    return float(sign * np.prod(np.diag(lu)))


def delete_column(matrix, j: int) -> np.ndarray:
    """Return a copy of the matrix without its j-th column (1-based)."""
    a = as_matrix(matrix)
    if not 1 <= j <= a.shape[1]:
        raise IndexError(f"column index {j} out of range 1..{a.shape[1]}")
    return np.delete(a, j - 1, axis=1)


def generalized_cross(vectors: Sequence) -> np.ndarray:
    """
    Generalized cross product of d-1 vectors in R^d.

    Stacks the vectors as rows of a (d-1) x d matrix G and returns
    sum_j (-1)^(j-1) det(G_j) b_j, where G_j is G without column j and b_j
    the j-th basis vector. The result is orthogonal to every input and
    vanishes exactly when the inputs are linearly dependent.
    """
    if len(vectors) == 0:
        raise DimensionMismatchError("generalized cross product needs at least one vector")

    rows = [as_vector(v, name=f"vector {idx + 1}") for idx, v in enumerate(vectors)]
    dim = rows[0].size
    if any(row.size != dim for row in rows):
        raise DimensionMismatchError(f"all vectors must share one dimension, got {[row.size for row in rows]}")
    if dim < 2 or len(rows) != dim - 1:
        raise DimensionMismatchError(f"generalized cross product in R^{dim} needs {dim - 1} vectors, got {len(rows)}")

    stacked = np.vstack(rows)
    result = np.empty(dim)
    for j in range(1, dim + 1):
        sign = 1.0 if j % 2 else -1.0
        result[j - 1] = sign * determinant(delete_column(stacked, j))
    return result
