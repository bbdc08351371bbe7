"""Dense linear algebra helpers: adjoints, null spaces, least squares."""

from __future__ import annotations

import numpy as np
import scipy.linalg

#: Relative singular-value threshold shared by every rank decision.
RANK_RTOL = 1e-10


def as_matrix(A, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    if rows is not None and A.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {A.shape[0]}")
    if cols is not None and A.shape[1] != cols:
        raise ValueError(f"expected {cols} cols, got {A.shape[1]}")
    return A


def adjoint_apply(A, y) -> np.ndarray:
    """Apply the adjoint map: returns A^T y."""
    A = as_matrix(A)
    y = np.asarray(y, dtype=float).ravel()
    if y.size != A.shape[0]:
        raise ValueError(f"length(y)={y.size} does not match rows(A)={A.shape[0]}")
    return A.T @ y


def null_space_basis(M, rtol: float = RANK_RTOL) -> list[np.ndarray]:
    """Orthonormal basis of the (numerical) kernel of M."""
    M = as_matrix(M)
    if M.shape[0] == 0:
        return [np.eye(M.shape[1])[:, j] for j in range(M.shape[1])]
    ns = scipy.linalg.null_space(M, rcond=rtol)
    return [ns[:, j].copy() for j in range(ns.shape[1])]


def least_squares_solve(M, v, rtol: float = RANK_RTOL) -> tuple[np.ndarray, float]:
    """Minimum-norm least-squares solution of M x = v and its residual norm."""
    M = as_matrix(M)
    v = np.asarray(v, dtype=float).ravel()
    if v.size != M.shape[0]:
        raise ValueError(f"length(v)={v.size} does not match rows(M)={M.shape[0]}")
    x, _, _, _ = np.linalg.lstsq(M, v, rcond=rtol)
    residual = float(np.linalg.norm(M @ x - v))
    return x, residual
