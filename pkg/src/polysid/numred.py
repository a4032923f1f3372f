"""Numerical reduction kernels.

Three operations shared by the identification pipeline:

* ``mdtrunc`` -- truncation of a nonnegative descending diagonal by
  cumulative l1 mass fraction.
* ``svd_trunc`` -- truncated-SVD least-squares approximation of one data
  matrix by a linear map of another, factored to expose a reduced state.
* ``lk_reduce`` -- pruning of coefficient columns (and the matching power
  matrix rows) whose l1 norm falls below a fraction of the largest column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError
from .monomials import PowerMatrix

#: Relative threshold under which singular values are treated as exact zeros
#: before mass-fraction truncation (scaled by max matrix dimension).
SINGULAR_VALUE_EPS = 1e-12


@dataclass(frozen=True)
class TruncationTable:
    """Cumulative mass fractions of a descending nonnegative diagonal.

    Entry ``j`` (1-based) holds ``sum(D[:j]) / sum(D)``; fractions are
    nondecreasing and the final entry equals 1 exactly.
    """

    fractions: np.ndarray

    def __post_init__(self) -> None:
        fr = np.asarray(self.fractions, dtype=float)
        fr.setflags(write=False)
        object.__setattr__(self, "fractions", fr)

    def __len__(self) -> int:
        return self.fractions.size

    def entries(self) -> list[tuple[int, float]]:
        """(index, cumulative fraction) pairs, index starting at 1."""
        return [(j + 1, float(f)) for j, f in enumerate(self.fractions)]

    def to_text(self) -> str:
        """Two-column text table: index and fraction to 6 significant digits."""
        return "\n".join(f"{j} {f:.6g}" for j, f in self.entries())


def mdtrunc(D, r: float) -> tuple[int, np.ndarray, TruncationTable]:
    """Truncate a descending nonnegative diagonal at cumulative mass ``r``.

    Args:
        D: Diagonal entries, nonincreasing, not all zero.
        r: Mass-fraction threshold in the open interval (0, 1).

    Returns:
        ``(n_r, D_r, table)`` where ``n_r`` is the smallest 1-based index
        whose cumulative fraction reaches ``r``, ``D_r`` keeps the first
        ``n_r`` entries and zeroes the rest, and ``table`` lists every
        cumulative fraction.

    Raises:
        InvalidInputError: On an all-zero, negative, or unsorted diagonal,
            or ``r`` outside (0, 1).
    """
    d = np.asarray(D, dtype=float)
    if d.ndim != 1 or d.size == 0:
        raise InvalidInputError("diagonal must be a nonempty vector")
    if not np.isfinite(d).all():
        raise InvalidInputError("diagonal contains non-finite entries")
    if (d < 0).any():
        raise InvalidInputError("diagonal entries must be nonnegative")
    if (np.diff(d) > 0).any():
        raise InvalidInputError("diagonal entries must be nonincreasing")
    if not (0.0 < r < 1.0):
        raise InvalidInputError(f"threshold r must lie in (0, 1), got {r}")
    cum = np.cumsum(d)
    total = cum[-1]
    if total == 0.0:
        raise InvalidInputError("diagonal must not be identically zero")
    fractions = cum / total  # final entry is total/total == 1.0 exactly
    n_r = int(np.searchsorted(fractions, r, side="left")) + 1
    D_r = d.copy()
    D_r[n_r:] = 0.0
    return n_r, D_r, TruncationTable(fractions)


@dataclass(frozen=True)
class SvdTruncResult:
    """Output of the truncated-SVD linear approximation.

    Attributes:
        n: Retained rank.
        D_n: The ``n`` retained singular values, positive and nonincreasing.
        C: Left factor, ``d_vy x n``.
        L: Right factor, ``n x d_vu`` (top rows of the left singular basis).
        X: Reduced state ``L @ V_u``, ``n x s``.
        H_star: Full regression matrix ``C @ L``, ``d_vy x d_vu``.
        table: Cumulative-mass table of the positive singular values.
    """

    n: int
    D_n: np.ndarray
    C: np.ndarray
    L: np.ndarray
    X: np.ndarray
    H_star: np.ndarray
    table: TruncationTable


def svd_trunc(V_y: np.ndarray, V_u: np.ndarray, r: float) -> SvdTruncResult:
    """Best-fit linear map of ``V_u`` onto ``V_y`` through a truncated SVD.

    Computes the SVD of ``V_u``, keeps the leading singular values up to
    cumulative mass fraction ``r`` (after zeroing values below the numerical
    rank threshold), and forms the regression ``H* = V_y @ pinv_n(V_u)``
    factored as ``H* = C @ L`` with reduced state ``X = L @ V_u`` so that
    ``V_y ~= H* V_u = C X``.

    Raises:
        InvalidInputError: If ``V_u`` is identically zero or ``r`` invalid.
        DimensionMismatchError: If the column counts differ.
    """
    Vy = np.asarray(V_y, dtype=float)
    Vu = np.asarray(V_u, dtype=float)
    if Vy.ndim != 2 or Vu.ndim != 2:
        raise InvalidInputError("data matrices must be 2-D")
    if Vy.shape[1] != Vu.shape[1]:
        raise DimensionMismatchError(
            f"column counts differ: V_y has {Vy.shape[1]}, V_u has {Vu.shape[1]}"
        )
    if not (np.isfinite(Vy).all() and np.isfinite(Vu).all()):
        raise InvalidInputError("data matrices contain non-finite entries")
    if not Vu.any():
        raise InvalidInputError("V_u must not be identically zero")
    if not (0.0 < r < 1.0):
        raise InvalidInputError(f"threshold r must lie in (0, 1), got {r}")

    U, sv, Vt = np.linalg.svd(Vu, full_matrices=False)
    # Numerical rank: values below eps * sigma_max count as exact zeros.
    tol = SINGULAR_VALUE_EPS * max(Vu.shape) * sv[0]
    n1 = int(np.sum(sv > tol))
    n, _, table = mdtrunc(sv[:n1], r)
    D_n = sv[:n].copy()
    L = U[:, :n].T
    C = Vy @ (Vt[:n].T / D_n[None, :])
    H_star = C @ L
    X = L @ Vu
    return SvdTruncResult(n=n, D_n=D_n, C=C, L=L, X=X, H_star=H_star, table=table)


def lk_reduce(
    L: np.ndarray, pm: PowerMatrix, r: float
) -> tuple[np.ndarray, PowerMatrix, list[int]]:
    """Prune small columns of ``L`` and the matching rows of ``pm``.

    Column ``j`` is deleted iff its l1 norm is at most ``r`` times the
    largest column l1 norm of the original matrix (ties deleted).  Kept
    columns preserve their order, so the power-matrix row order survives.

    Returns:
        ``(L', pm', kept)`` with the retained columns, the matching power
        matrix, and the kept column indices.

    Raises:
        InvalidInputError: If ``r`` is outside (0, 1), shapes disagree, or
            ``L`` has no nonzero column (nothing could survive).
    """
    if not (0.0 < r < 1.0):
        raise InvalidInputError(f"threshold r must lie in (0, 1), got {r}")
    M = np.asarray(L, dtype=float)
    if M.ndim != 2:
        raise InvalidInputError("coefficient matrix must be 2-D")
    if M.shape[1] != pm.d_v:
        raise DimensionMismatchError(
            f"{M.shape[1]} coefficient columns vs {pm.d_v} power matrix rows"
        )
    if not np.isfinite(M).all():
        raise InvalidInputError("coefficient matrix contains non-finite entries")
    norms = np.abs(M).sum(axis=0)
    max_norm = norms.max() if norms.size else 0.0
    if max_norm == 0.0:
        raise InvalidInputError("coefficient matrix has no nonzero column")
    kept = np.flatnonzero(norms > r * max_norm)
    return M[:, kept].copy(), pm.select_rows(kept), [int(j) for j in kept]
