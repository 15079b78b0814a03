"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

import math
import numbers

import numpy as np
from sklearn.utils import check_array


def check_unit_cube(X, n_dims: int | None = None, closed: bool = True) -> np.ndarray:
    """2-d float array with every entry in ``[0, 1]`` (``[0, 1)`` when ``closed`` is False)."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if n_dims is not None and X.shape[1] != n_dims:
        raise ValueError(f"X has {X.shape[1]} columns, expected {n_dims}")
    upper_ok = (X <= 1).all() if closed else (X < 1).all()
    if (X < 0).any() or not upper_ok:
        raise ValueError("entries of X must lie in the unit interval")
    return X


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_alpha(alpha) -> float:
    alpha = float(alpha)
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def check_p(p) -> float:
    p = math.inf if p in ("inf", None) else float(p)
    if not p >= 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    return p
