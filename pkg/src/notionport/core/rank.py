# src/notionport/core/rank.py
"""Numerical rank checks shared by the portfolio and solver modules."""
from __future__ import annotations

import numpy as np
from scipy.linalg import svdvals

from notionport.errors import RankDeficiencyError

DEFAULT_RANK_TOLERANCE = 1e-8


def singular_value_ratio(matrix: np.ndarray) -> float:
    """Smallest over largest singular value; 0 for an all-zero matrix."""
    sv = svdvals(np.asarray(matrix, dtype=np.float64))
    if sv.size == 0 or sv[0] == 0.0:
        return 0.0
    return float(sv[-1] / sv[0])


def require_full_column_rank(
        matrix: np.ndarray,
        what: str,
        tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> float:
    """Raise RankDeficiencyError unless `matrix` (rows >= columns) has full column rank."""
    rows, cols = np.shape(matrix)
    ratio = singular_value_ratio(matrix) if rows >= cols else 0.0
    if ratio < tolerance:
        raise RankDeficiencyError(
            f"{what} does not have full column rank ({cols} columns)", ratio=ratio
        )
    return ratio
