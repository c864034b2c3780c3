# src/notionport/core/solver.py
"""
Sum-constrained least squares: minimize ||R p - r_P||_2 subject to sum(p) = 1.

The constraint is eliminated with p = e_1 + N z, where the columns of N span the
sum-zero subspace {v : 1^T v = 0}; z then solves an ordinary least-squares problem.
No sign constraint is imposed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.linalg import lstsq, null_space

from notionport.core.price_series import frozen_array
from notionport.core.rank import DEFAULT_RANK_TOLERANCE, require_full_column_rank
from notionport.errors import DimensionMismatchError, UnderdeterminedError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProportionSolution:
    proportions: np.ndarray = field(repr=False)
    residual_abs: float
    residual_rel: float
    tickers: tuple[str, ...] = ()

    def as_mapping(self) -> dict[str, float]:
        labels = self.tickers or tuple(f"x{j + 1}" for j in range(self.proportions.shape[0]))
        return {t: float(v) for t, v in zip(labels, self.proportions)}

    def to_dict(self) -> dict[str, Any]:
        return {
            "proportions": self.as_mapping(),
            "residual_abs": self.residual_abs,
            "residual_rel": self.residual_rel,
        }


def sum_zero_basis(n: int) -> np.ndarray:
    """Orthonormal n x (n-1) basis of {v : sum(v) = 0}."""
    return null_space(np.ones((1, n)))


def solve_proportions(
        R: np.ndarray,
        rP: np.ndarray,
        *,
        tickers: Sequence[str] = (),
        rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> ProportionSolution:
    R = np.asarray(R, dtype=np.float64)
    rP = np.asarray(rP, dtype=np.float64)
    if R.ndim != 2 or rP.ndim != 1 or R.shape[0] != rP.shape[0]:
        raise DimensionMismatchError(f"Return matrix {R.shape} and portfolio returns {rP.shape} do not agree")
    if tickers and len(tickers) != R.shape[1]:
        raise DimensionMismatchError(f"{len(tickers)} tickers for {R.shape[1]} return columns")
    m, n = R.shape
    if m < n:
        raise UnderdeterminedError(f"{m} return periods cannot determine {n} proportions")
    require_full_column_rank(R, "Return matrix", rank_tolerance)

    p0 = np.zeros(n)
    p0[0] = 1.0
    if n == 1:
        p = p0
    else:
        N = sum_zero_basis(n)
        z, _, _, _ = lstsq(R @ N, rP - R @ p0)
        p = p0 + N @ z

    residual_abs = float(np.linalg.norm(R @ p - rP))
    target = float(np.linalg.norm(rP))
    if target > 0:
        residual_rel = residual_abs / target
    else:
        residual_rel = 0.0 if residual_abs == 0.0 else float("inf")
    logger.debug(f"Solved {m}x{n} system: residual {residual_abs:.3e} (relative {residual_rel:.3%})")
    return ProportionSolution(frozen_array(p), residual_abs, residual_rel, tuple(tickers))
