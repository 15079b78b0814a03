"""Weil-sum quadrature point sets with exact rational coordinates.

Every point set stores integer numerators over one common denominator
(a prime ``N`` or a field size ``b^m``). Floating-point coordinates are only
produced on request through :attr:`PointSet.points`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .finitefield import FieldParams, index_to_coeffs, pow_arrays
from .modarith import is_prime, primitive_root

PRIME_FAMILIES = ("weil", "weil-fast", "weil-exponents")
WALSH_FAMILIES = ("walsh", "walsh-fast")


class WeakBoundWarning(UserWarning):
    """The dimension is too large for the Weil bound to say anything useful."""


@dataclass(frozen=True, eq=False)
class PointSet:
    """A multiset of ``denom`` points in ``[0, 1]^dim``.

    ``residues[n, j] / denom`` is coordinate ``j`` of point ``n``. ``family``
    and ``params`` are enough to regenerate the set.
    """

    denom: int
    residues: np.ndarray
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        res = np.ascontiguousarray(self.residues, dtype=np.int64)
        if res.ndim != 2:
            raise ValueError("residues must be a 2-d array")
        # the tent transform may produce the right endpoint 1 = denom/denom
        hi = self.denom if self.family == "tent" else self.denom - 1
        if res.size and (res.min() < 0 or res.max() > hi):
            raise ValueError("residues out of range for the denominator")
        res.setflags(write=False)
        object.__setattr__(self, "residues", res)

    def __len__(self) -> int:
        return self.residues.shape[0]

    @property
    def dim(self) -> int:
        return self.residues.shape[1]

    @property
    def points(self) -> np.ndarray:
        """Coordinates as float64, shape ``(len(self), dim)``."""
        return self.residues / self.denom

    def fractions(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(int(r), self.denom) for r in row) for row in self.residues]

    def sorted_rows(self) -> np.ndarray:
        """Rows in lexicographic order; equal arrays mean equal multisets."""
        if self.dim == 0:
            return self.residues
        order = np.lexsort(self.residues.T[::-1])
        return self.residues[order]

    def same_multiset(self, other: "PointSet") -> bool:
        return (
            self.denom == other.denom
            and self.residues.shape == other.residues.shape
            and bool(np.array_equal(self.sorted_rows(), other.sorted_rows()))
        )

    def metadata(self) -> dict[str, Any]:
        meta = {"family": self.family, "denom": self.denom, "s": self.dim}
        meta.update(self.params)
        if self.notes:
            meta["notes"] = list(self.notes)
        return meta


# --- exponent choices --------------------------------------------------------


def exponent_sequence(b: int, s: int) -> tuple[int, ...]:
    """First ``s`` positive integers that are not multiples of ``b``."""
    if not is_prime(b):
        raise ValueError(f"b must be prime, got {b}")
    if s < 1:
        raise ValueError("s must be >= 1")
    # c_j - floor(c_j / b) = j inverts to c_j = j + floor((j - 1) / (b - 1))
    return tuple(j + (j - 1) // (b - 1) for j in range(1, s + 1))


def _check_exponents(exponents: Sequence[int], upper: int) -> tuple[int, ...]:
    exps = tuple(int(e) for e in exponents)
    if not exps:
        raise ValueError("at least one exponent is required")
    if any(e < 1 or e >= upper for e in exps):
        raise ValueError(f"exponents must lie in [1, {upper})")
    if any(a >= c for a, c in zip(exps, exps[1:])):
        raise ValueError("exponents must be strictly increasing")
    return exps


def _prime_checks(N: int, s: int) -> tuple[str, ...]:
    if not is_prime(N):
        raise ValueError(f"N must be prime, got {N}")
    if not 1 <= s < N:
        raise ValueError(f"need 1 <= s < N, got s={s}, N={N}")
    if s * s > N:
        msg = f"s={s} exceeds sqrt(N)={math.sqrt(N):.3f}; the Weil bound is trivial here"
        warnings.warn(msg, WeakBoundWarning, stacklevel=3)
        return (msg,)
    return ()


# --- prime p-sets ------------------------------------------------------------


def _power_table(N: int, exps: Sequence[int]) -> np.ndarray:
    n = np.arange(N, dtype=np.int64)
    cols = []
    for e in exps:
        col = np.ones(N, dtype=np.int64)
        base, k = n.copy(), e
        while k:
            if k & 1:
                col = col * base % N
            base = base * base % N
            k >>= 1
        cols.append(col)
    return np.stack(cols, axis=1)


def gen_weil_pset(N: int, s: int) -> PointSet:
    """Point ``n`` is ``(n, n^2, ..., n^s) mod N`` over ``N``, for ``0 <= n < N``."""
    notes = _prime_checks(N, s)
    exps = tuple(range(1, s + 1))
    return PointSet(N, _power_table(N, exps), "weil", {"N": N, "exponents": list(exps)}, notes)


def gen_weil_pset_exponents(N: int, exponents: Sequence[int]) -> PointSet:
    """Point ``n`` is ``(n^j_1, ..., n^j_s) mod N`` for increasing exponents ``j``."""
    if not is_prime(N):
        raise ValueError(f"N must be prime, got {N}")
    exps = _check_exponents(exponents, N)
    notes = _prime_checks(N, len(exps))
    return PointSet(N, _power_table(N, exps), "weil-exponents", {"N": N, "exponents": list(exps)}, notes)


def gen_weil_pset_fast(N: int, s: int, exponents: Sequence[int] | None = None) -> PointSet:
    """Same multiset as :func:`gen_weil_pset`, built from one table of powers of a primitive root.

    With ``g`` the smallest primitive root and ``a_n = g^n mod N``, point 0 is
    the origin and point ``n + 1`` has coordinate ``i`` equal to
    ``a_{e_i n mod (N-1)}``.
    """
    exps = tuple(range(1, s + 1)) if exponents is None else _check_exponents(exponents, N)
    notes = _prime_checks(N, len(exps))
    g = primitive_root(N)
    table = np.empty(N - 1, dtype=np.int64)
    acc = 1
    for n in range(N - 1):
        table[n] = acc
        acc = acc * g % N
    n = np.arange(N - 1, dtype=np.int64)
    res = np.zeros((N, len(exps)), dtype=np.int64)
    for i, e in enumerate(exps):
        res[1:, i] = table[(e * n) % (N - 1)]
    params = {"N": N, "exponents": list(exps), "primitive_root": g}
    return PointSet(N, res, "weil-fast", params, notes)


# --- tent transform ------------------------------------------------------------


def tent_residues(res: np.ndarray, d: int) -> np.ndarray:
    """Exact tent map ``t -> 1 - |2t - 1|`` on numerators over ``d``."""
    res = np.asarray(res, dtype=np.int64)
    return np.where(2 * res < d, 2 * res, 2 * d - 2 * res)


def tent_transform(P: PointSet) -> PointSet:
    """Apply the tent map to every coordinate; the denominator is unchanged.

    Distinct points may collide (e.g. ``n`` and ``N - n`` in the first
    coordinate); the result is kept as a multiset indexed like ``P``.
    """
    params = dict(P.params)
    params["base_family"] = P.family
    return PointSet(P.denom, tent_residues(P.residues, P.denom), "tent", params, P.notes)


# --- Walsh point sets ------------------------------------------------------------


def _walsh_checks(params: FieldParams, s: int, exponents) -> tuple[int, ...]:
    if s < 1:
        raise ValueError("s must be >= 1")
    exps = exponent_sequence(params.b, s) if exponents is None else tuple(int(e) for e in exponents)
    if len(exps) != s:
        raise ValueError(f"expected {s} exponents, got {len(exps)}")
    if any(e < 1 for e in exps):
        raise ValueError("exponents must be positive")
    return exps


def gen_walsh_pset(params: FieldParams, s: int, exponents: Sequence[int] | None = None) -> PointSet:
    """Elementary construction: coordinate ``j`` of point ``n`` is ``nu_m(n(x)^c_j mod p)``.

    ``n(x)`` is the digit-map image of ``n``; the default exponents are the
    first ``s`` integers not divisible by ``b``.
    """
    exps = _walsh_checks(params, s, exponents)
    Y = index_to_coeffs(np.arange(params.order), params)
    weights = params.b ** np.arange(params.m - 1, -1, -1, dtype=np.int64)
    cols = [pow_arrays(Y, e, params) @ weights for e in exps]
    res = np.stack(cols, axis=1)
    meta = {"field": params.to_string(), "b": params.b, "m": params.m, "exponents": list(exps)}
    return PointSet(params.order, res, "walsh", meta)


def gen_walsh_pset_fast(params: FieldParams, s: int, exponents: Sequence[int] | None = None) -> PointSet:
    """Fast construction from the powers ``a_n = x^n mod p`` of a primitive ``p``.

    Point 0 is the origin and point ``n + 1`` has coordinate ``i`` equal to
    ``nu_m(a_{e_i n mod (b^m - 1)})``.
    """
    if not params.is_primitive:
        raise ValueError(f"the fast construction needs a primitive polynomial; {params} is not")
    exps = _walsh_checks(params, s, exponents)
    B = params.order
    weights = params.b ** np.arange(params.m - 1, -1, -1, dtype=np.int64)
    # a_n for 0 <= n < B - 1, by repeated multiplication with x
    a = np.zeros((B - 1, params.m), dtype=np.int64)
    cur = np.zeros(params.m, dtype=np.int64)
    cur[0] = 1
    p_low = np.array(params.p[:-1], dtype=np.int64)
    for n in range(B - 1):
        a[n] = cur
        lead = cur[-1]
        cur = np.concatenate(([0], cur[:-1]))
        cur = (cur - lead * p_low) % params.b
    table = a @ weights
    n = np.arange(B - 1, dtype=np.int64)
    res = np.zeros((B, s), dtype=np.int64)
    for i, e in enumerate(exps):
        res[1:, i] = table[(e * n) % (B - 1)]
    meta = {"field": params.to_string(), "b": params.b, "m": params.m, "exponents": list(exps)}
    return PointSet(B, res, "walsh-fast", meta)


def regenerate(meta: dict[str, Any]) -> PointSet:
    """Rebuild a point set from its :meth:`PointSet.metadata`."""
    family = meta["family"]
    exps = meta.get("exponents")
    if family == "tent":
        base = dict(meta, family=meta["base_family"])
        return tent_transform(regenerate(base))
    if family in PRIME_FAMILIES:
        N = int(meta["N"])
        if family == "weil":
            return gen_weil_pset(N, len(exps))
        if family == "weil-fast":
            return gen_weil_pset_fast(N, len(exps), exps)
        return gen_weil_pset_exponents(N, exps)
    if family in WALSH_FAMILIES:
        params = FieldParams.from_string(meta["field"])
        gen = gen_walsh_pset if family == "walsh" else gen_walsh_pset_fast
        return gen(params, len(exps), exps)
    raise ValueError(f"unknown family {family!r}")
