"""Exact exponential and Walsh character sums, and exhaustive bound sweeps.

A sum of ``d``-th roots of unity is kept as a :class:`RootOfUnityTally`, the
vector of how often each root ``exp(2 pi i t / d)`` occurs. Tallies are exact
integers; floating point enters only when a complex value or magnitude is
requested. Comparisons against a bound are decided exactly, so a sum that
attains its bound (quadratic Gauss sums do) is reported as a tie rather than
as a rounding-dependent pass or fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Sequence

import mpmath
import numpy as np

from .finitefield import FieldParams, find_field_poly
from .modarith import is_prime
from .pointsets import PRIME_FAMILIES, WALSH_FAMILIES, PointSet, gen_walsh_pset, gen_weil_pset

DEFAULT_BUDGET = 10**8
_BLOCK_ELEMS = 1 << 22


@dataclass(frozen=True, eq=False)
class RootOfUnityTally:
    """``counts[t]`` occurrences of ``exp(2 pi i t / modulus)``."""

    modulus: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.modulus,) or (counts < 0).any():
            raise ValueError("counts must be a nonnegative vector of length modulus")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_indices(cls, idx: np.ndarray, modulus: int) -> "RootOfUnityTally":
        idx = np.asarray(idx, dtype=np.int64) % modulus
        return cls(modulus, np.bincount(idx.ravel(), minlength=modulus))

    def __add__(self, other: "RootOfUnityTally") -> "RootOfUnityTally":
        if other.modulus != self.modulus:
            raise ValueError("cannot merge tallies of different moduli")
        return RootOfUnityTally(self.modulus, self.counts + other.counts)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RootOfUnityTally)
            and other.modulus == self.modulus
            and bool(np.array_equal(other.counts, self.counts))
        )

    @property
    def total(self) -> int:
        """Number of summed terms."""
        return int(self.counts.sum())

    @property
    def value(self) -> complex:
        t = np.flatnonzero(self.counts)
        c = self.counts[t].astype(float)
        ang = 2.0 * np.pi * t / self.modulus
        return complex(math.fsum(c * np.cos(ang)), math.fsum(c * np.sin(ang)))

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    def is_exact_integer(self) -> int | None:
        """The sum as an int when it is a rational integer, else None (prime modulus)."""
        c = self.counts
        if self.modulus == 1:
            return int(c[0])
        if not is_prime(self.modulus):
            raise ValueError("exact identification needs a prime modulus")
        # sum c_t w^t is rational iff c_1 = ... = c_{d-1}; its value is then c_0 - c_1
        if (c[1:] == c[1]).all():
            return int(c[0] - c[1])
        return None

    def _autocorrelation(self) -> list[int]:
        c = [int(v) for v in self.counts]
        d = self.modulus
        return [sum(c[t] * c[(t + delta) % d] for t in range(d)) for delta in range(d)]

    def compare_sq(self, bound_sq: Fraction | int) -> int:
        """Sign of ``|sum|^2 - bound_sq``, decided exactly for a prime modulus.

        ``|sum|^2 = sum_delta a_delta cos(2 pi delta / d)`` with integer
        autocorrelations ``a_delta``. For ``d <= 3`` this is a rational integer.
        Otherwise a zero difference is detected from the coefficients in the
        basis ``w, ..., w^(d-1)``, and a nonzero difference is an algebraic
        integer whose conjugates are bounded, so its size is bounded below and
        a finite-precision evaluation settles the sign.
        """
        R = Fraction(bound_sq)
        d = self.modulus
        if d == 1:
            return _sign(self.total**2 - R)
        if not is_prime(d):
            raise ValueError("exact comparison needs a prime modulus")
        a = self._autocorrelation()
        if d <= 3:
            return _sign(a[0] - a[1] - R)
        num, den = R.numerator, R.denominator
        # den*|S|^2 - num = sum_{delta>=1} (den*a_delta - den*a_0 + num) w^delta
        if all(den * a[k] == den * a[0] - num for k in range(1, d)):
            return 0
        conj_max = den * self.total**2 + num + 1
        digits = int(((d - 3) / 2) * math.log10(conj_max)) + 30
        with mpmath.workdps(digits):
            x = den * a[0] - num + sum(
                den * a[k] * mpmath.cos(2 * mpmath.pi * k / d) for k in range(1, d)
            )
            if abs(x) < mpmath.mpf(10) ** (-(digits - 20)):
                raise ArithmeticError("certified comparison failed; precision estimate too small")
            return 1 if x > 0 else -1


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# --- exponential sums over prime p-sets -----------------------------------------


def _check_wave(k: Sequence[int], P: PointSet) -> np.ndarray:
    k = np.asarray([int(v) for v in k], dtype=object)
    if k.shape != (P.dim,):
        raise ValueError(f"wave vector of length {len(k)} does not match dimension {P.dim}")
    return np.array([int(v) % P.denom for v in k], dtype=np.int64)


def phase_indices(k: Sequence[int], P: PointSet) -> np.ndarray:
    """``(k . r_n) mod denom`` for every point, in exact integer arithmetic."""
    kk = _check_wave(k, P)
    d = P.denom
    acc = np.zeros(len(P), dtype=np.int64)
    for j in range(P.dim):
        if kk[j]:
            acc = (acc + kk[j] * P.residues[:, j] % d) % d
    return acc


def exp_sum(k: Sequence[int], P: PointSet) -> RootOfUnityTally:
    """Tally of ``sum_n exp(2 pi i k . x_n)`` over a point set with prime denominator."""
    if not is_prime(P.denom):
        raise ValueError(f"exponential sums need a prime denominator, got {P.denom}")
    return RootOfUnityTally.from_indices(phase_indices(k, P), P.denom)


def weil_bound_prime(N: int, s: int) -> float:
    """Normalised Weil bound ``(s - 1) / sqrt(N)``."""
    return (s - 1) / math.sqrt(N)


# --- exhaustive sweep engine -------------------------------------------------------


def _sweep_indices(tables: Sequence[np.ndarray], d: int) -> Iterator[np.ndarray]:
    """Yield root indices for every wave vector, last coordinate fastest.

    ``tables[j][k, n]`` is the root index contributed by coordinate ``j`` with
    wavenumber ``k`` at point ``n``. Blocks are ``(rows, npts)`` arrays whose
    rows follow mixed-radix order over ``(k_1, ..., k_s)``. Indices are left
    unreduced (below ``s * d``); callers reduce mod ``d``.
    """
    dtype = np.int16 if len(tables) * d < 2**15 else np.int64
    tables = [np.asarray(t, dtype=dtype) for t in tables]
    npts = tables[0].shape[1]
    head, last = tables[:-1], tables[-1]
    K_last = last.shape[0]
    prefix_shape = tuple(t.shape[0] for t in head)
    n_prefix = math.prod(prefix_shape)
    chunk = max(1, _BLOCK_ELEMS // (K_last * npts))
    for start in range(0, n_prefix, chunk):
        stop = min(n_prefix, start + chunk)
        partial = np.zeros((stop - start, npts), dtype=dtype)
        if head:
            idx = np.unravel_index(np.arange(start, stop), prefix_shape)
            for t, ix in zip(head, idx):
                partial += t[ix]
        full = partial[:, None, :] + last[None, :, :]
        yield full.reshape(-1, npts)


def _tally_rows(idx: np.ndarray, d: int) -> np.ndarray:
    """Per-row tallies of a ``(rows, npts)`` index block."""
    idx = idx % d
    npts = idx.shape[1]
    if d <= 4:
        counts = np.empty((idx.shape[0], d), dtype=np.int64)
        for t in range(1, d):
            counts[:, t] = np.count_nonzero(idx == t, axis=1)
        counts[:, 0] = npts - counts[:, 1:].sum(axis=1)
        return counts
    rows = np.repeat(np.arange(idx.shape[0], dtype=np.int64) * d, npts)
    return np.bincount(rows + idx.ravel(), minlength=idx.shape[0] * d).reshape(-1, d)


def _exact_mag_sq(counts: np.ndarray, d: int) -> np.ndarray | None:
    """Vectorised exact ``|S|^2`` for moduli where it is always an integer."""
    if d == 2:
        return (counts[:, 0] - counts[:, 1]) ** 2
    if d == 3:
        c0, c1, c2 = counts[:, 0], counts[:, 1], counts[:, 2]
        return c0 * c0 + c1 * c1 + c2 * c2 - c0 * c1 - c1 * c2 - c0 * c2
    return None


class _BoundAudit:
    """Accumulates the outcome of comparing many tallies with one bound."""

    def __init__(self, d: int, npts: int, bound_sq: Fraction, s: int = 1):
        self.d, self.npts, self.bound_sq = d, npts, bound_sq
        # long enough for unreduced indices from the sweep
        self.omega = np.exp(2j * np.pi * np.arange(d) / d)
        self.omega_ext = np.tile(self.omega, s)
        self.cases = 0
        self.violations = 0
        self.ties = 0
        self.max_sq = 0.0
        self.examples: list[list[int]] = []
        self.argmax: int | None = None
        bsq = float(bound_sq)
        # forward-error margin for |S|^2 from float counts, with headroom
        self.margin = max(1e-9 * max(bsq, 1.0), 1e3 * d * npts * npts * np.finfo(float).eps)

    def feed(self, idx: np.ndarray, offset: int, skip_first: bool = False):
        """Audit one ``(rows, npts)`` block of root indices."""
        d = self.d
        counts = _tally_rows(idx, d) if d <= 3 else None
        exact = _exact_mag_sq(counts, d) if counts is not None else None
        if exact is not None:
            mag2 = exact.astype(float)
        else:
            vals = self.omega_ext[idx].sum(axis=1)
            mag2 = vals.real**2 + vals.imag**2
        live = np.ones(len(mag2), dtype=bool)
        if skip_first:
            live[0] = False  # the zero wave vector
            mag2[0] = -1.0
        self.cases += int(live.sum())
        if live.any():
            i = int(np.argmax(mag2))
            if mag2[i] > self.max_sq:
                self.max_sq = float(mag2[i])
                self.argmax = offset + i
        bsq = self.bound_sq
        if exact is not None:
            over = live & (exact * bsq.denominator > bsq.numerator)
            tie = live & (exact * bsq.denominator == bsq.numerator)
            self.ties += int(tie.sum())
            self._record(np.flatnonzero(over), offset)
            return
        suspect = np.flatnonzero(live & (mag2 > float(bsq) - self.margin))
        over = []
        if len(suspect):
            # floats only shortlist; the verdict comes from exact tallies
            for i, c in zip(suspect, _tally_rows(idx[suspect], d)):
                sign = RootOfUnityTally(d, c).compare_sq(bsq)
                if sign > 0:
                    over.append(i)
                elif sign == 0:
                    self.ties += 1
        self._record(np.asarray(over, dtype=np.int64), offset)

    def _record(self, over: np.ndarray, offset: int):
        self.violations += len(over)
        for i in over[: max(0, 10 - len(self.examples))]:
            self.examples.append(int(offset + i))


def _unravel(flat: int, shape: Sequence[int]) -> list[int]:
    return [int(v) for v in np.unravel_index(flat, tuple(shape))]


def _run_audit(tables, d, npts, bound_sq, mode, samples, seed, budget, force_sample=False):
    shape = [t.shape[0] for t in tables]
    total = math.prod(shape)
    audit = _BoundAudit(d, npts, bound_sq, len(tables))
    info: dict[str, Any] = {}
    if mode == "exhaustive" and total > budget:
        if not force_sample:
            raise BudgetExceededError(
                f"exhaustive sweep needs {total} wave vectors, budget is {budget}"
            )
        mode = "sampled"
        info["note"] = f"exhaustive sweep over budget ({total} > {budget}); sampled instead"
    if mode == "exhaustive":
        offset = 0
        for idx in _sweep_indices(tables, d):
            audit.feed(idx, offset, skip_first=offset == 0)
            offset += len(idx)
        examples = [_unravel(i, shape) for i in audit.examples]
        argmax = _unravel(audit.argmax, shape) if audit.argmax is not None else None
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        ks = rng.integers(0, np.array(shape), size=(samples, len(shape)))
        nonzero = ks.any(axis=1)
        ks = ks[nonzero]
        for start in range(0, len(ks), 4096):
            audit.feed(_indices_for_vectors(tables, d, ks[start : start + 4096]), start)
        examples = [ks[i].tolist() for i in audit.examples]
        argmax = ks[audit.argmax].tolist() if audit.argmax is not None else None
        info.update(seed=seed, generator="numpy.random.default_rng (PCG64)", samples=samples)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    info.update(
        mode=mode,
        cases_checked=audit.cases,
        violations=audit.violations,
        violation_examples=examples,
        ties=audit.ties,
        max_abs_sum=math.sqrt(audit.max_sq),
        max_normalized=math.sqrt(audit.max_sq) / npts,
        argmax=argmax,
    )
    return info


def _indices_for_vectors(tables, d, ks: np.ndarray) -> np.ndarray:
    idx = np.zeros((len(ks), tables[0].shape[1]), dtype=np.int64)
    for j, t in enumerate(tables):
        idx += t[ks[:, j]]
    return idx % d


class BudgetExceededError(RuntimeError):
    """An exhaustive sweep would exceed the configured number of wave vectors."""


def verify_weil_prime(
    N: int,
    s: int,
    mode: str = "exhaustive",
    samples: int = 10_000,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    force_sample: bool = False,
) -> dict[str, Any]:
    """Check ``|N^-1 sum_n e(k . x_n)| <= (s-1)/sqrt(N)`` for ``k`` with ``N`` not dividing ``k``.

    Exhaustive mode visits every ``k`` in ``{0..N-1}^s`` except zero (wave
    vectors are periodic mod ``N``, so this covers all of ``Z^s``). ``budget``
    caps the number of wave vectors.
    """
    if not is_prime(N):
        raise ValueError(f"N must be prime, got {N}")
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        P = gen_weil_pset(N, s)
    kk = np.arange(N, dtype=np.int64)
    tables = [np.outer(kk, P.residues[:, j]) % N for j in range(s)]
    bound_sq = Fraction((s - 1) ** 2 * N)
    report = {"kind": "weil-prime", "N": N, "s": s}
    report.update(_run_audit(tables, N, N, bound_sq, mode, samples, seed, budget, force_sample))
    bound = weil_bound_prime(N, s)
    report.update(
        bound=bound,
        binding=bound < 1.0,
        precondition_s_le_sqrtN=s * s <= N,
        passed=report["violations"] == 0,
    )
    return report


# --- Walsh functions -----------------------------------------------------------------


def base_digits(n: int, B: int) -> list[int]:
    """Base-``B`` digits of ``n >= 0``, least significant first (``[]`` for 0)."""
    out = []
    while n:
        n, r = divmod(n, B)
        out.append(r)
    return out


def x_digits(x, B: int, count: int) -> list[int]:
    """First ``count`` base-``B`` digits of ``x`` in ``[0, 1)``, using the finite expansion."""
    fr = Fraction(x)
    if not 0 <= fr < 1:
        raise ValueError(f"x={x} outside [0, 1)")
    out = []
    for _ in range(count):
        fr *= B
        dig = fr.numerator // fr.denominator
        out.append(dig)
        fr -= dig
    return out


def walsh_index(k, x, params: FieldParams) -> int:
    """Root index ``t`` with ``wal_k(x) = exp(2 pi i t / b)``.

    Scalars give the one-dimensional function; equal-length sequences give
    the product over coordinates.
    """
    if isinstance(k, (list, tuple, np.ndarray)):
        if len(k) != len(x):
            raise ValueError("wave vector and point differ in dimension")
        return sum(walsh_index(kj, xj, params) for kj, xj in zip(k, x)) % params.b
    k = int(k)
    if k < 0:
        raise ValueError("Walsh wavenumbers are nonnegative")
    B = params.order
    kappa = base_digits(k, B)
    xi = x_digits(x, B, len(kappa))
    table = params.pairing_table
    return int(sum(int(table[a, c]) for a, c in zip(kappa, xi)) % params.b)


def walsh_eval(k, x, params: FieldParams) -> complex:
    """``wal_k(x)`` as a complex number."""
    t = walsh_index(k, x, params)
    return complex(np.exp(2j * np.pi * t / params.b)) if t else 1.0 + 0.0j


def walsh_index_residues(k: int, res: np.ndarray, denom: int, params: FieldParams) -> np.ndarray:
    """Vectorised :func:`walsh_index` at the points ``res / denom`` (one coordinate)."""
    B, b = params.order, params.b
    res = np.asarray(res, dtype=np.int64)
    if (res < 0).any() or (res >= denom).any():
        raise ValueError("points outside [0, 1)")
    table = params.pairing_table
    out = np.zeros(res.shape, dtype=np.int64)
    rem = res.copy()
    for kappa in base_digits(int(k), B):
        rem = rem * B
        digit = rem // denom
        rem = rem % denom
        if kappa:
            out += table[kappa, digit]
    return out % b


def walsh_digit_add(k1: int, k2: int, params: FieldParams) -> int:
    """Digitwise field addition of wavenumbers (each base-``b^m`` digit as a field element)."""
    B, b = params.order, params.b
    out, place = 0, 1
    while k1 or k2:
        (k1, a1), (k2, a2) = divmod(k1, B), divmod(k2, B)
        s = 0
        for i in range(params.m):
            s += ((a1 // b**i + a2 // b**i) % b) * b**i
        out += s * place
        place *= B
    return out


def _check_walsh_set(R: PointSet, params: FieldParams):
    if R.family not in WALSH_FAMILIES:
        raise ValueError(f"expected a Walsh point set, got family {R.family!r}")
    if R.params.get("field") != params.to_string():
        raise ValueError(f"point set field {R.params.get('field')} differs from {params.to_string()}")


def walsh_sum(ell: Sequence[int], R: PointSet, params: FieldParams) -> RootOfUnityTally:
    """Exact tally of ``sum_n wal_ell(z_n)`` over a Walsh point set."""
    _check_walsh_set(R, params)
    if len(ell) != R.dim:
        raise ValueError(f"wave vector of length {len(ell)} does not match dimension {R.dim}")
    idx = np.zeros(len(R), dtype=np.int64)
    for j, lj in enumerate(ell):
        idx += walsh_index_residues(int(lj), R.residues[:, j], R.denom, params)
    return RootOfUnityTally.from_indices(idx, params.b)


def walsh_bound(b: int, m: int, s: int) -> float:
    """``(s b / (b - 1) - 1) sqrt(b^m)``, the bound on ``|sum_n wal_ell(z_n)|``."""
    return (s * b / (b - 1) - 1) * math.sqrt(b**m)


def verify_walsh(
    params: FieldParams | tuple[int, int],
    s: int,
    mode: str = "exhaustive",
    samples: int = 10_000,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    force_sample: bool = False,
    exponents: Sequence[int] | None = None,
) -> dict[str, Any]:
    """Check the Walsh-sum bound over every ``ell`` in ``{0..b^m-1}^s`` except zero.

    Wavenumbers at or above ``b^m`` only read digits that are zero for these
    points, so the first digit range covers every class with ``b^m`` not
    dividing ``ell``. Cases whose bound is at least the trivial bound ``b^m``
    are labelled non-binding.
    """
    if not isinstance(params, FieldParams):
        params = find_field_poly(*params)
    R = gen_walsh_pset(params, s, exponents)
    pair = params.pairing_table.astype(np.int64)
    tables = [pair[:, R.residues[:, j]] for j in range(s)]
    b, m, B = params.b, params.m, params.order
    bound_sq = Fraction((s * b - b + 1) ** 2 * B, (b - 1) ** 2)
    report: dict[str, Any] = {
        "kind": "walsh",
        "b": b,
        "m": m,
        "field": params.to_string(),
        "s": s,
        "exponents": R.params["exponents"],
    }
    report.update(_run_audit(tables, b, B, bound_sq, mode, samples, seed, budget, force_sample))
    bound = walsh_bound(b, m, s)
    report.update(
        bound=bound / B,
        bound_sum=bound,
        binding=bound < B,
        passed=report["violations"] == 0,
    )
    return report


def walsh_orthonormality_check(params: FieldParams, K: int | None = None, a: int = 1) -> dict[str, Any]:
    """Exact Gram matrix of ``wal_0 .. wal_{K-1}`` under the rule on ``{l / L}``, ``L = b^(m a)``.

    Entry ``(k, k')`` is ``L^-1 sum_l wal_k(l/L) conj(wal_k'(l/L))``. It is 1
    exactly when every term is the root 1, and 0 exactly when all ``b`` roots
    occur equally often.
    """
    b, B = params.b, params.order
    L = B**a
    K = L if K is None else K
    if not 1 <= K <= L:
        raise ValueError(f"need 1 <= K <= L = {L}")
    grid = np.arange(L, dtype=np.int64)
    W = np.stack([walsh_index_residues(k, grid, L, params) for k in range(K)])
    diff = (W[:, None, :] - W[None, :, :]) % b
    counts = np.stack([np.count_nonzero(diff == t, axis=2) for t in range(b)], axis=2)
    eye = np.eye(K, dtype=bool)
    diag_ok = bool((counts[eye][:, 0] == L).all())
    off = counts[~eye]
    off_ok = bool((off == L // b).all()) if L % b == 0 else False
    gram = counts @ np.exp(2j * np.pi * np.arange(b) / b) / L
    return {
        "b": b,
        "m": params.m,
        "field": params.to_string(),
        "K": K,
        "L": L,
        "identity": diag_ok and off_ok,
        "max_offdiag": float(np.abs(gram[~eye]).max()) if K > 1 else 0.0,
    }
