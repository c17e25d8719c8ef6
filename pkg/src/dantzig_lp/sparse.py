"""Column-compressed storage helpers.

Every matrix handed to the solvers (``X``, difference operators, LP blocks) is
kept as a canonical :class:`scipy.sparse.csc_matrix`: float64 values, strictly
increasing row indices inside each column and no explicitly stored zeros.
"""
import numpy as np
import scipy.sparse as sp

from .errors import NonFiniteInput


def as_csc(X, copy=False):
    """Return ``X`` as a canonical float64 CSC matrix."""
    if sp.issparse(X):
        A = sp.csc_matrix(X, dtype=np.float64, copy=copy)
    else:
        A = sp.csc_matrix(np.asarray(X, dtype=np.float64))
    if not np.all(np.isfinite(A.data)):
        raise NonFiniteInput("matrix contains NaN or infinite entries")
    A.eliminate_zeros()
    A.sort_indices()
    A.sum_duplicates()
    return A


def check_csc(A):
    """Raise ``ValueError`` unless ``A`` satisfies the canonical-storage invariants."""
    if not sp.isspmatrix_csc(A):
        raise ValueError("expected a CSC matrix")
    n_rows = A.shape[0]
    for j in range(A.shape[1]):
        idx = A.indices[A.indptr[j]:A.indptr[j + 1]]
        if idx.size and (idx[0] < 0 or idx[-1] >= n_rows or np.any(np.diff(idx) <= 0)):
            raise ValueError(f"column {j}: row indices not strictly increasing in range")
    if np.any(A.data == 0):
        raise ValueError("explicitly stored zero")


def column_sq_norms(A):
    """Squared Euclidean norm of every column."""
    sq = A.copy()
    sq.data **= 2
    return np.asarray(sq.sum(axis=0)).ravel()


def dense_column(A, j, out=None):
    """Column ``j`` of a CSC matrix as a dense vector."""
    if out is None:
        out = np.zeros(A.shape[0])
    else:
        out[:] = 0.0
    s, e = A.indptr[j], A.indptr[j + 1]
    out[A.indices[s:e]] = A.data[s:e]
    return out


def identity(n):
    return sp.identity(n, format="csc", dtype=np.float64)


def difference_operator(n):
    """The n x n matrix ``D = [e1^T; D0]`` with ``(D b)_i = b_i - b_{i-1}``."""
    main = np.ones(n)
    lower = -np.ones(n - 1)
    return sp.diags([main, lower], [0, -1], shape=(n, n), format="csc")


def cumsum_operator(n):
    """``H = D^{-1}``, the lower-triangular all-ones matrix (dense)."""
    return np.tril(np.ones((n, n)))
