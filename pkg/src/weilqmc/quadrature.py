"""Equal-weight quadrature, per-function errors and worst-case error bounds."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .charsums import phase_indices, walsh_sum
from .finitefield import FieldParams
from .integrands import (
    SPACE_OF_BASIS,
    SeriesSpec,
    compose_tent,
    evaluate_residues,
    holder_upper,
    norm,
    sup_bound,
    true_integral,
)
from .modarith import MAX_MODULUS, is_prime, next_prime
from .pointsets import (
    PRIME_FAMILIES,
    WALSH_FAMILIES,
    PointSet,
    WeakBoundWarning,
    exponent_sequence,
    gen_walsh_pset,
    gen_weil_pset,
    regenerate,
    tent_transform,
)

SPACES = ("K", "C", "W")
IDENTITY_TOL = 1e-12


def _is_power_of(N: int, b: int) -> bool:
    if N < b:
        return False
    while N % b == 0:
        N //= b
    return N == 1


@dataclass(frozen=True)
class BoundQuery:
    """Inputs of a worst-case error bound.

    ``N`` is a prime for the spaces ``K`` and ``C`` and a power of the prime
    ``b`` for ``W``. ``exponents`` replaces ``1..s`` in the prime case.
    """

    space: str
    N: int
    s: int
    alpha: float = 1.0
    p: float = math.inf
    exponents: tuple[int, ...] | None = None
    b: int | None = None

    def __post_init__(self):
        space = self.space.upper()
        object.__setattr__(self, "space", space)
        if space not in SPACES:
            raise ValueError(f"space must be one of {SPACES}, got {self.space!r}")
        if not 1 <= self.s < self.N:
            raise ValueError(f"need 1 <= s < N, got s={self.s}, N={self.N}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.p >= 1:
            raise ValueError(f"p must lie in [1, inf], got {self.p}")
        if space == "W":
            if self.b is None or not is_prime(self.b):
                raise ValueError("space W needs a prime base b")
            if not _is_power_of(self.N, self.b):
                raise ValueError(f"N={self.N} is not a power of b={self.b}")
            if self.exponents is not None:
                raise ValueError("exponents apply to the prime-modulus spaces only")
        else:
            if not is_prime(self.N):
                raise ValueError(f"N must be prime, got {self.N}")
            if self.exponents is not None:
                exps = tuple(int(e) for e in self.exponents)
                if len(exps) != self.s or any(a >= c for a, c in zip(exps, exps[1:])):
                    raise ValueError("exponents must be s strictly increasing integers")
                if exps[0] < 1 or exps[-1] >= self.N:
                    raise ValueError("exponents must lie in [1, N)")
                object.__setattr__(self, "exponents", exps)


def bound_terms(q: BoundQuery) -> tuple[float, float]:
    """The character-sum term and the aliasing term of the bound."""
    N, s = q.N, q.s
    if q.space == "W":
        b = q.b
        weil = (b * (s - 1) + 1) / ((b - 1) * math.sqrt(N))
    else:
        top = s if q.exponents is None else q.exponents[-1]
        weil = (top - 1) / math.sqrt(N)
    # s^(alpha/p) is 1 at p = inf
    spread = 1.0 if math.isinf(q.p) else s ** (q.alpha / q.p)
    return weil, spread / N**q.alpha


def bound(q: BoundQuery) -> float:
    """Upper bound on the worst-case error relative to the norm."""
    return max(bound_terms(q))


# --- applying the rule ----------------------------------------------------------------


def _check_dim(f: SeriesSpec, P: PointSet):
    if f.dim is not None and f.dim != P.dim:
        raise ValueError(f"spec dimension {f.dim} does not match point set dimension {P.dim}")


def qmc_apply(f: SeriesSpec, P: PointSet) -> complex:
    """Mean of ``f`` over the points, accumulated in row order with ``math.fsum``."""
    _check_dim(f, P)
    vals = evaluate_residues(f, P.residues, P.denom)
    n = len(P)
    return complex(math.fsum(vals.real) / n, math.fsum(vals.imag) / n)


def _fsum_complex(values: Iterable[complex]) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def coefficient_side(f: SeriesSpec, P: PointSet) -> complex:
    """``sum_{k != 0} a_k N^-1 sum_n basis_k(x_n)`` with every inner sum tallied exactly.

    Equals ``qmc_apply(f, P) - true_integral(f)`` for a finite series; it is
    computed independently of :func:`qmc_apply`.
    """
    _check_dim(f, P)
    if f.dim is None:
        return 0j
    zero = (0,) * f.dim
    n = len(P)
    if f.basis == "cosine" and P.family == "tent":
        with warnings.catch_warnings():
            # the tent set already carries the same note
            warnings.simplefilter("ignore", WeakBoundWarning)
            base = regenerate(dict(P.metadata(), family=P.params["base_family"]))
        return coefficient_side(compose_tent(f), base)
    parts = []
    if f.basis == "fourier":
        keys = [k for k in f.terms if k != zero]
        d = P.denom
        omega = np.exp(2j * np.pi * np.arange(d) / d)
        step = max(1, (1 << 21) // max(1, n))
        for t0 in range(0, len(keys), step):
            block = keys[t0 : t0 + step]
            idx = np.stack([phase_indices(k, P) for k in block])
            rows = np.repeat(np.arange(len(block), dtype=np.int64) * d, n)
            counts = np.bincount(rows + idx.ravel(), minlength=len(block) * d).reshape(-1, d)
            sums = counts @ omega
            parts.extend(f.terms[k] * v / n for k, v in zip(block, sums))
        return _fsum_complex(parts)
    if f.basis == "walsh" and P.family in WALSH_FAMILIES and P.params.get("field") == f.field.to_string():
        for k, a in f.terms.items():
            if k != zero:
                parts.append(a * walsh_sum(k, P, f.field).value / n)
        return _fsum_complex(parts)
    for k, a in f.terms.items():
        if k != zero:
            single = f.with_terms({k: 1.0}, tail=0.0, holder=None)
            vals = evaluate_residues(single, P.residues, P.denom)
            parts.append(a * complex(math.fsum(vals.real), math.fsum(vals.imag)) / n)
    return _fsum_complex(parts)


@dataclass(frozen=True)
class ErrorReport:
    """One quadrature error measurement against the matching bound.

    ``error_upper`` adds ``2 * tail`` to ``abs_error`` so it bounds the error of
    the full (untruncated) function; ``ratio`` uses it.
    """

    N: int
    s: int
    space: str
    function: str
    qmc_value: complex
    true_value: complex
    abs_error: float
    error_upper: float
    bound: float
    norm_total: float
    ratio: float
    certified: bool
    identity_error: float
    binding: bool

    def row(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "s": self.s,
            "space": self.space,
            "function": self.function,
            "error": repr(self.abs_error),
            "bound": repr(self.bound),
            "norm": repr(self.norm_total),
            "ratio": repr(self.ratio),
            "certified": int(self.certified),
        }

    def as_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for key in ("qmc_value", "true_value"):
            d[key] = [d[key].real, d[key].imag]
        return d


def matched_query(f: SeriesSpec, P: PointSet) -> BoundQuery | None:
    """The bound query certified for this spec and point set, or None for a mismatch."""
    space = SPACE_OF_BASIS[f.basis]
    fam = P.family
    base = P.params.get("base_family") if fam == "tent" else fam
    s = P.dim
    try:
        if space == "K" and fam in PRIME_FAMILIES or space == "C" and fam == "tent" and base in PRIME_FAMILIES:
            exps = tuple(P.params.get("exponents", range(1, s + 1)))
            exps = None if exps == tuple(range(1, s + 1)) else exps
            return BoundQuery(space, P.denom, s, f.alpha, f.p, exps)
        if space == "W" and fam in WALSH_FAMILIES and P.params.get("field") == f.field.to_string():
            if tuple(P.params["exponents"]) != exponent_sequence(f.field.b, s):
                return None
            return BoundQuery("W", P.denom, s, f.alpha, f.p, b=f.field.b)
    except ValueError:
        return None
    return None


def error(f: SeriesSpec, P: PointSet, function: str | None = None) -> ErrorReport:
    """Quadrature error of ``f`` on ``P`` with the matching bound and norm."""
    qv = qmc_apply(f, P)
    tv = true_integral(f)
    abs_err = abs(tv - qv)
    coef = coefficient_side(f, P)
    scale = max(1.0, sup_bound(f))
    identity_err = abs((qv - tv) - coef) / scale
    q = matched_query(f, P)
    nr = norm(f)
    err_up = abs_err + 2 * f.tail
    if q is not None:
        bd = bound(q)
        denom = bd * nr.total
        ratio = err_up / denom if denom > 0 else (0.0 if err_up == 0 else math.inf)
        binding = bd < 1
    else:
        bd, ratio, binding = math.nan, math.nan, False
    return ErrorReport(
        N=len(P),
        s=P.dim,
        space=SPACE_OF_BASIS[f.basis],
        function=function or f.name or "f",
        qmc_value=qv,
        true_value=tv,
        abs_error=abs_err,
        error_upper=err_up,
        bound=bd,
        norm_total=nr.total,
        ratio=ratio,
        certified=q is not None,
        identity_error=identity_err,
        binding=binding,
    )


# --- aliasing -------------------------------------------------------------------------


def aliasing_check(f: SeriesSpec, L: int, budget: int = 10**7) -> dict[str, Any]:
    """Compare ``sum_{k != 0} a(L k)`` with the grid-average identity and the Hölder bound.

    For Walsh specs the grid identity needs ``L`` to be a power of ``b^m``
    (a multiple is not enough). The bound is checked with the truncation
    tail added as slack.
    """
    if f.basis not in ("fourier", "walsh"):
        raise ValueError("aliasing checks apply to fourier and walsh specs")
    if L < 1:
        raise ValueError("L must be positive")
    s = f.dim or 1
    if f.basis == "walsh" and not _is_power_of(L, f.field.order):
        raise ValueError(f"L={L} must be a power of b^m={f.field.order} for Walsh specs")
    if L**s > budget:
        raise ValueError(f"grid of {L}^{s} points exceeds the budget {budget}")
    zero = (0,) * s
    direct = _fsum_complex(
        a for k, a in f.terms.items() if k != zero and all(v % L == 0 for v in k)
    )
    grid = np.stack(np.unravel_index(np.arange(L**s), (L,) * s), axis=1)
    vals = evaluate_residues(f, grid, L) if f.dim is not None else np.zeros(L**s, dtype=complex)
    avg = complex(math.fsum(vals.real), math.fsum(vals.imag)) / L**s
    via_grid = avg - true_integral(f)
    spread = 1.0 if math.isinf(f.p) else s ** (f.alpha / f.p)
    bd = spread / L**f.alpha * holder_upper(f)
    diff = abs(direct - via_grid)
    return {
        "L": L,
        "s": s,
        "direct": abs(direct),
        "grid": abs(via_grid),
        "difference": diff,
        "agree": diff <= IDENTITY_TOL * max(1.0, sup_bound(f)),
        "bound": bd,
        "tail": f.tail,
        "compliant": abs(direct) <= bd + f.tail,
    }


# --- information complexity --------------------------------------------------------------


def info_complexity(
    eps: float,
    s: int,
    alpha: float = 1.0,
    p: float = math.inf,
    space: str = "K",
    b: int | None = None,
) -> int:
    """Smallest admissible ``N`` whose bound is at most ``eps``.

    Admissible means prime for ``K``/``C`` and a power of ``b`` for ``W``, with
    ``s < N`` in both cases. The result is an upper bound on the information
    complexity, since the bound itself is only an upper bound.
    """
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    space = space.upper()
    spread = 1.0 if math.isinf(p) else s ** (alpha / p)
    if space == "W":
        if b is None or not is_prime(b):
            raise ValueError("space W needs a prime base b")
        N = b
        while True:
            if N > s and bound(BoundQuery("W", N, s, alpha, p, b=b)) <= eps:
                return N
            N *= b
            if N >= MAX_MODULUS:
                raise OverflowError("required N exceeds the supported range")
    if space not in ("K", "C"):
        raise ValueError(f"space must be one of {SPACES}")
    # both terms decrease in N; start just below the analytic threshold
    lower = max(((s - 1) / eps) ** 2, (spread / eps) ** (1 / alpha))
    N = next_prime(max(s + 1, int(lower * (1 - 1e-9))))
    while bound(BoundQuery(space, N, s, alpha, p)) > eps:
        N = next_prime(N + 1)
        if N >= MAX_MODULUS:
            raise OverflowError("required N exceeds the supported range")
    return N


# --- convergence studies ------------------------------------------------------------------


def point_set_for(space: str, N: int, s: int, field: FieldParams | None = None) -> PointSet:
    """The point set certified for ``space`` with ``N`` points."""
    space = space.upper()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if space == "K":
            return gen_weil_pset(N, s)
        if space == "C":
            return tent_transform(gen_weil_pset(N, s))
    if space == "W":
        if field is None or field.order != N:
            raise ValueError("space W needs field parameters with b^m = N")
        return gen_walsh_pset(field, s)
    raise ValueError(f"space must be one of {SPACES}")


def fitted_slope(reports: Sequence[ErrorReport]) -> float | None:
    """Least-squares slope of log error against log N over rows where the bound is nontrivial."""
    pts = [(math.log(r.N), math.log(r.abs_error)) for r in reports if r.binding and r.abs_error > 0]
    if len(pts) < 2:
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])
