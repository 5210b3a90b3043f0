"""Linear least squares via pivoted QR / complete orthogonal decomposition."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EmptyDesignError, NumericError

RANK_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class LsqSolution:
    coefficients: np.ndarray
    residuals: np.ndarray
    rank: int
    column_names: tuple[str, ...]

    def __post_init__(self):
        if len(self.coefficients) != len(self.column_names):
            raise ValueError("coefficient vector does not match column names")

    @property
    def sse(self) -> float:
        return float(self.residuals @ self.residuals)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.column_names, self.coefficients.tolist()))


def solve_lsq(X, y=None, column_names=None, rtol: float = RANK_RTOL) -> LsqSolution:
    """Minimise ``||y - X b||^2``.

    ``X`` may be a :class:`~inertia_forecast.features.DesignMatrix`, in which
    case ``y`` and the column names are taken from it.  Columns are scaled to
    unit norm before a column-pivoted QR; pivots whose ``|R_ii|`` fall below
    ``rtol * |R_00|`` are treated as zero.  For rank-deficient problems the
    trailing triangle is eliminated with a second QR (complete orthogonal
    decomposition), giving the minimum-norm solution in scaled coordinates.
    All-zero columns always receive a zero coefficient.
    """
    if hasattr(X, "X") and hasattr(X, "targets"):
        design = X
        X, y = design.X, design.targets
        column_names = design.column_names if column_names is None else column_names
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: X {X.shape}, y {y.shape}")
    n, p = X.shape
    if column_names is None:
        column_names = tuple(f"x{j}" for j in range(p))
    column_names = tuple(column_names)
    if n == 0:
        raise EmptyDesignError("design has no rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NumericError("design or target contains non-finite values")
    if p == 0:
        return LsqSolution(np.zeros(0), y.copy(), 0, column_names)

    norms = np.linalg.norm(X, axis=0)
    scale = np.where(norms > 0, norms, 1.0)
    Xs = X / scale

    Q, R, piv = scipy.linalg.qr(Xs, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = 0 if diag[0] == 0 else int(np.count_nonzero(diag > rtol * diag[0]))
    z = np.zeros(p)
    if rank > 0:
        c = Q[:, :rank].T @ y
        if rank == p:
            z = scipy.linalg.solve_triangular(R, c)
        else:
            # [R11 R12] = T^T Z^T  =>  min-norm z = Z T^{-T} c
            Z, T = scipy.linalg.qr(R[:rank, :].T, mode="economic")
            w = scipy.linalg.solve_triangular(T, c, trans="T")
            z = Z @ w
    beta_scaled = np.empty(p)
    beta_scaled[piv] = z
    beta = beta_scaled / scale
    residuals = y - X @ beta
    return LsqSolution(beta, residuals, rank, column_names)
