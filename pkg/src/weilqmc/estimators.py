"""scikit-learn style wrappers around the point sets and the quadrature rule."""

from __future__ import annotations

import math
import warnings
from typing import Callable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_alpha, check_p, check_positive_int, check_unit_cube
from .finitefield import FieldParams, find_field_poly
from .integrands import SeriesSpec
from .pointsets import (
    PointSet,
    gen_walsh_pset,
    gen_walsh_pset_fast,
    gen_weil_pset,
    gen_weil_pset_exponents,
    gen_weil_pset_fast,
    tent_transform,
)
from .quadrature import BoundQuery, ErrorReport, bound, error, qmc_apply

_FAMILY_SPACE = {
    "weil": "K",
    "weil-fast": "K",
    "weil-exponents": "K",
    "tent": "C",
    "walsh": "W",
    "walsh-fast": "W",
}


class TentTransformer(TransformerMixin, BaseEstimator):
    """Coordinatewise tent map ``t -> 1 - |2t - 1|`` on ``[0, 1]``."""

    def fit(self, X, y=None):
        X = check_unit_cube(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_unit_cube(X, self.n_features_in_)
        return 1.0 - np.abs(2.0 * X - 1.0)


class QuasiMonteCarloIntegrator(BaseEstimator):
    """Equal-weight rule on one of the point families.

    ``n_points`` is a prime for the prime-modulus families and ``b^m`` for
    the Walsh families (``b`` is required there; ``field`` optionally fixes
    the polynomial as ``"b,m,p0,...,pm"``). ``fit`` ignores its arguments
    and builds the nodes.

    Fitted attributes: ``point_set_``, ``points_`` (float nodes),
    ``space_`` and ``bound_`` (the worst-case error bound per unit norm).
    """

    def __init__(
        self,
        family: str = "weil",
        n_points: int = 101,
        n_dims: int = 2,
        exponents: Sequence[int] | None = None,
        b: int | None = None,
        field: str | None = None,
        alpha: float = 1.0,
        p: float = math.inf,
    ):
        self.family = family
        self.n_points = n_points
        self.n_dims = n_dims
        self.exponents = exponents
        self.b = b
        self.field = field
        self.alpha = alpha
        self.p = p

    def _field_params(self) -> FieldParams:
        if self.field is not None:
            params = FieldParams.from_string(self.field)
        else:
            if self.b is None:
                raise ValueError("Walsh families need b or field")
            m = round(math.log(self.n_points, self.b))
            params = find_field_poly(self.b, m, primitive_required=self.family == "walsh-fast")
        if params.order != self.n_points:
            raise ValueError(f"n_points={self.n_points} differs from the field size {params.order}")
        return params

    def _build(self) -> PointSet:
        N, s, fam = self.n_points, self.n_dims, self.family
        exps = None if self.exponents is None else tuple(self.exponents)
        if fam == "weil":
            return gen_weil_pset(N, s)
        if fam == "weil-fast":
            return gen_weil_pset_fast(N, s, exps)
        if fam == "weil-exponents":
            if exps is None or len(exps) != s:
                raise ValueError("weil-exponents needs n_dims exponents")
            return gen_weil_pset_exponents(N, exps)
        if fam == "tent":
            return tent_transform(gen_weil_pset(N, s))
        if fam in ("walsh", "walsh-fast"):
            gen = gen_walsh_pset if fam == "walsh" else gen_walsh_pset_fast
            return gen(self._field_params(), s, exps)
        raise ValueError(f"unknown family {fam!r}")

    def fit(self, X=None, y=None):
        check_positive_int(self.n_points, "n_points", 2)
        check_positive_int(self.n_dims, "n_dims")
        alpha, p = check_alpha(self.alpha), check_p(self.p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            P = self._build()
        self.point_set_ = P
        self.points_ = P.points
        self.space_ = _FAMILY_SPACE[self.family]
        exps = P.params.get("exponents")
        if self.space_ == "W":
            q = BoundQuery("W", P.denom, P.dim, alpha, p, b=P.params["b"])
        else:
            default = list(range(1, P.dim + 1))
            q = BoundQuery(self.space_, P.denom, P.dim, alpha, p, None if exps == default else tuple(exps))
        self.bound_ = bound(q)
        self.n_features_in_ = P.dim
        return self

    def integrate(self, f: SeriesSpec | Callable[[np.ndarray], np.ndarray]) -> complex | float:
        """Rule applied to a series spec (exact residue evaluation) or to a vectorised callable."""
        check_is_fitted(self, "point_set_")
        if isinstance(f, SeriesSpec):
            return qmc_apply(f, self.point_set_)
        vals = np.asarray(f(self.points_))
        if vals.shape != (len(self.points_),):
            raise ValueError("the callable must return one value per point")
        if np.iscomplexobj(vals):
            return complex(math.fsum(vals.real), math.fsum(vals.imag)) / len(vals)
        return math.fsum(vals.astype(float)) / len(vals)

    def error(self, f: SeriesSpec) -> ErrorReport:
        check_is_fitted(self, "point_set_")
        return error(f, self.point_set_)

    def transform(self, X=None):
        """The fitted nodes; ``X`` is ignored."""
        check_is_fitted(self, "points_")
        return self.points_.copy()
