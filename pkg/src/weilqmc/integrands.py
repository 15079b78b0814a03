"""Test integrands given by finitely many Fourier, cosine or Walsh coefficients.

A :class:`SeriesSpec` carries the coefficients together with the Hölder
parameters ``(alpha, p)`` of the space it is measured in. Infinite series
enter only through a truncation plus two certified numbers: ``tail``, an
upper bound on the absolute sum of the dropped coefficients, and ``holder``,
an upper bound on the Hölder seminorm of the full function.

Hölder bounds for trigonometric terms use ``|e^{i t} - 1| <= min(2, |t|)``
together with ``min(2, t) <= 2^(1 - alpha) t^alpha`` for ``0 < alpha <= 1``,
so a Fourier term ``a_k e(k . x)`` contributes
``|a_k| 2^(1 - alpha) (2 pi ||k||_q)^alpha`` with ``1/p + 1/q = 1``.
Cosine specs are bounded through their tent composition, using
``|g|_H <= 2^-alpha |g o tent|_H``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .charsums import walsh_index, walsh_index_residues
from .finitefield import FieldParams

BASES = ("fourier", "cosine", "walsh")
SPACE_OF_BASIS = {"fourier": "K", "cosine": "C", "walsh": "W"}
_EVAL_BLOCK = 1 << 21


def dual_exponent(p: float) -> float:
    """``q`` with ``1/p + 1/q = 1``."""
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def lp_norm(v: Sequence[float], p: float) -> float:
    v = np.abs(np.asarray(v, dtype=float))
    if v.size == 0:
        return 0.0
    if math.isinf(p):
        return float(v.max())
    return float(np.sum(v**p) ** (1.0 / p))


@dataclass(frozen=True, eq=False)
class SeriesSpec:
    """A finite series ``sum_k terms[k] * basis_k(x)`` with Hölder parameters."""

    basis: str
    terms: Mapping[tuple[int, ...], complex]
    alpha: float = 1.0
    p: float = math.inf
    field: FieldParams | None = None
    tail: float = 0.0
    holder: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}, got {self.basis!r}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.p >= 1:
            raise ValueError(f"p must lie in [1, inf], got {self.p}")
        if self.tail < 0 or (self.holder is not None and self.holder < 0):
            raise ValueError("tail and holder bounds must be nonnegative")
        if self.basis == "walsh" and self.field is None:
            raise ValueError("walsh specs need field parameters")
        clean: dict[tuple[int, ...], complex] = {}
        dims = set()
        for k, a in self.terms.items():
            key = tuple(int(v) for v in k)
            dims.add(len(key))
            a = complex(a)
            if self.basis != "fourier" and any(v < 0 for v in key):
                raise ValueError(f"{self.basis} wavenumbers must be nonnegative, got {key}")
            if self.basis == "cosine" and a.imag != 0:
                raise ValueError("cosine coefficients must be real")
            if a != 0:
                clean[key] = clean.get(key, 0) + a
        if len(dims) > 1:
            raise ValueError(f"wave vectors of mixed lengths {sorted(dims)}")
        if dims and min(dims) < 1:
            raise ValueError("wave vectors need at least one coordinate")
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_dim", dims.pop() if dims else None)

    @property
    def dim(self) -> int | None:
        """Dimension fixed by the terms; None for the empty (zero) spec."""
        return self._dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesSpec):
            return NotImplemented
        return all(getattr(self, f.name) == getattr(other, f.name) for f in fields(self))

    __hash__ = None

    def with_terms(self, terms: Mapping[tuple[int, ...], complex], **changes) -> "SeriesSpec":
        return replace(self, terms=terms, **changes)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Wave vectors as a ``(T, s)`` int array and coefficients as ``(T,)`` complex."""
        keys = list(self.terms)
        s = self.dim or 0
        K = np.array(keys, dtype=np.int64).reshape(len(keys), s)
        a = np.array([self.terms[k] for k in keys], dtype=complex)
        return K, a


# --- serialisation ------------------------------------------------------------------


def spec_to_dict(f: SeriesSpec) -> dict[str, Any]:
    out: dict[str, Any] = {"basis": f.basis}
    if f.field is not None:
        out["field"] = f.field.to_string()
    out["alpha"] = f.alpha
    out["p"] = "inf" if math.isinf(f.p) else f.p
    out["terms"] = [{"k": list(k), "re": a.real, "im": a.imag} for k, a in sorted(f.terms.items())]
    if f.tail:
        out["tail"] = f.tail
    if f.holder is not None:
        out["holder"] = f.holder
    if f.name:
        out["name"] = f.name
    return out


def spec_from_dict(d: Mapping[str, Any]) -> SeriesSpec:
    try:
        basis = d["basis"]
        p = d.get("p", "inf")
        p = math.inf if p in ("inf", "infinity", None) else float(p)
        fld = FieldParams.from_string(d["field"]) if d.get("field") else None
        terms: dict[tuple[int, ...], complex] = {}
        for t in d["terms"]:
            key = tuple(int(v) for v in t["k"])
            terms[key] = terms.get(key, 0) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        return SeriesSpec(
            basis=basis,
            terms=terms,
            alpha=float(d.get("alpha", 1.0)),
            p=p,
            field=fld,
            tail=float(d.get("tail", 0.0)),
            holder=None if d.get("holder") is None else float(d["holder"]),
            name=str(d.get("name", "")),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed series spec: {exc}") from exc


def load_spec(path: str | Path) -> SeriesSpec:
    with open(path) as fh:
        return spec_from_dict(json.load(fh))


def dump_spec(f: SeriesSpec, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_dict(f), fh, indent=2)
        fh.write("\n")


# --- evaluation ---------------------------------------------------------------------


def _as_points(f: SeriesSpec, x) -> tuple[np.ndarray, bool]:
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError("points must have shape (s,) or (n, s)")
    if f.dim is not None and X.shape[1] != f.dim:
        raise ValueError(f"point dimension {X.shape[1]} does not match spec dimension {f.dim}")
    return X, single


def _cosine_factor(k: np.ndarray, angle_unit: np.ndarray) -> np.ndarray:
    # sigma_0 = 1, sigma_k(x) = sqrt(2) cos(pi k x)
    return np.where(k == 0, 1.0, math.sqrt(2.0) * np.cos(angle_unit))


def evaluate(f: SeriesSpec, x) -> complex | np.ndarray:
    """Evaluate the series at one point ``(s,)`` or many points ``(n, s)``.

    Walsh series are evaluated from the exact binary value of each float.
    """
    X, single = _as_points(f, x)
    K, a = f.arrays()
    out = np.zeros(len(X), dtype=complex)
    if len(a) == 0:
        return out[0] if single else out
    if f.basis == "walsh":
        if (X < 0).any() or (X >= 1).any():
            raise ValueError("Walsh series are defined on [0, 1)")
        b = f.field.b
        roots = np.exp(2j * np.pi * np.arange(b) / b)
        for n, pt in enumerate(X):
            idx = [walsh_index(list(k), list(pt), f.field) for k in K]
            out[n] = np.dot(roots[idx], a)
        return out[0] if single else out
    step = max(1, _EVAL_BLOCK // max(1, len(X)))
    for t0 in range(0, len(a), step):
        Kb, ab = K[t0 : t0 + step], a[t0 : t0 + step]
        if f.basis == "fourier":
            vals = np.exp(2j * np.pi * (X @ Kb.T))
        else:
            vals = np.ones((len(X), len(ab)))
            for j in range(X.shape[1]):
                vals = vals * _cosine_factor(Kb[:, j][None, :], np.pi * np.outer(X[:, j], Kb[:, j]))
        out += vals @ ab
    return out[0] if single else out


def evaluate_residues(f: SeriesSpec, res: np.ndarray, denom: int) -> np.ndarray:
    """Evaluate at the points ``res / denom`` with exact reduction of every phase."""
    res = np.asarray(res, dtype=np.int64)
    if res.ndim != 2:
        raise ValueError("residues must be a 2-d array")
    if f.dim is not None and res.shape[1] != f.dim:
        raise ValueError(f"point dimension {res.shape[1]} does not match spec dimension {f.dim}")
    K, a = f.arrays()
    n = res.shape[0]
    out = np.zeros(n, dtype=complex)
    if len(a) == 0:
        return out
    if f.basis == "walsh":
        b = f.field.b
        roots = np.exp(2j * np.pi * np.arange(b) / b)
        cache: dict[tuple[int, int], np.ndarray] = {}

        def column(j: int, k: int) -> np.ndarray:
            if (j, k) not in cache:
                cache[(j, k)] = walsh_index_residues(k, res[:, j], denom, f.field)
            return cache[(j, k)]

        for key, coef in zip(K, a):
            idx = np.zeros(n, dtype=np.int64)
            for j, k in enumerate(key):
                if k:
                    idx += column(j, int(k))
            out += coef * roots[idx % b]
        return out
    step = max(1, _EVAL_BLOCK // max(1, n))
    if f.basis == "fourier":
        Km = K % denom
        for t0 in range(0, len(a), step):
            Kb, ab = Km[t0 : t0 + step], a[t0 : t0 + step]
            t = np.zeros((n, len(ab)), dtype=np.int64)
            for j in range(res.shape[1]):
                t = (t + np.outer(res[:, j], Kb[:, j]) % denom) % denom
            out += np.exp(2j * np.pi * t / denom) @ ab
        return out
    # cos(pi k r / d) depends on k r mod 2d
    Km = K % (2 * denom)
    for t0 in range(0, len(a), step):
        Kb, ab = Km[t0 : t0 + step], a[t0 : t0 + step]
        vals = np.ones((n, len(ab)))
        for j in range(res.shape[1]):
            t = np.outer(res[:, j], Kb[:, j]) % (2 * denom)
            vals = vals * _cosine_factor(K[t0 : t0 + step, j][None, :], np.pi * t / denom)
        out += vals @ ab
    return out


def true_integral(f: SeriesSpec) -> complex:
    """The coefficient at the zero wave vector."""
    if f.dim is None:
        return 0j
    return complex(f.terms.get((0,) * f.dim, 0))


def sup_bound(f: SeriesSpec) -> float:
    """Upper bound on ``sup |f|`` from the coefficients and the tail."""
    parts = []
    for k, a in f.terms.items():
        w = 2.0 ** (sum(1 for v in k if v) / 2) if f.basis == "cosine" else 1.0
        parts.append(abs(a) * w)
    return math.fsum(parts) + f.tail


# --- tent composition and norms -------------------------------------------------------


def _tent_weight(u: int) -> float:
    return 2.0 ** (-u / 2)


def _tent_terms(key: tuple[int, ...], coef: complex):
    u = [j for j, v in enumerate(key) if v]
    c = coef * _tent_weight(len(u))
    for signs in itertools.product((1, -1), repeat=len(u)):
        k = list(key)
        for j, sg in zip(u, signs):
            k[j] = sg * key[j]
        yield tuple(k), c


def compose_tent(g: SeriesSpec) -> SeriesSpec:
    """Fourier spec of ``g`` composed with the tent map in every coordinate.

    ``sqrt(2) cos(pi k tent(t)) = sqrt(2) cos(2 pi k t)`` splits into two
    exponentials with coefficient ``1/sqrt(2)`` each, so a cosine term with
    support ``u`` becomes ``2^|u|`` Fourier terms of coefficient
    ``g_k 2^(-|u|/2)``.
    """
    if g.basis != "cosine":
        raise ValueError("compose_tent needs a cosine spec")
    terms: dict[tuple[int, ...], complex] = {}
    for key, coef in g.terms.items():
        for k, c in _tent_terms(key, coef):
            terms[k] = c
    holder = None if g.holder is None else 2.0**g.alpha * g.holder
    name = f"{g.name} o tent" if g.name else ""
    return SeriesSpec("fourier", terms, g.alpha, g.p, None, g.tail, holder, name)


def holder_upper(f: SeriesSpec) -> float:
    """Certified upper bound on the Hölder seminorm ``|f|_{H_{alpha,p}}``.

    A supplied ``holder`` value wins. Otherwise Fourier terms use the bound in
    the module docstring, cosine specs go through :func:`compose_tent`, and a
    truncated trigonometric series without a supplied bound gets ``inf``.
    Finite Walsh series are step functions, so any non-constant one has
    infinite seminorm.
    """
    if f.holder is not None:
        return float(f.holder)
    zero = (0,) * (f.dim or 0)
    varying = [k for k in f.terms if k != zero]
    if not varying and f.tail == 0:
        return 0.0
    if f.tail > 0 or f.basis == "walsh":
        return math.inf
    if f.basis == "cosine":
        return 2.0 ** (-f.alpha) * holder_upper(compose_tent(f))
    q = dual_exponent(f.p)
    c = 2.0 ** (1 - f.alpha)
    return math.fsum(
        abs(f.terms[k]) * c * (2 * math.pi * lp_norm(k, q)) ** f.alpha for k in varying
    )


@dataclass(frozen=True)
class NormReport:
    """Certified components of a norm in one of the spaces ``K``, ``C``, ``W``."""

    space: str
    coeff_sum: float
    holder_upper: float
    total: float
    tail: float = 0.0


def coefficient_sum(f: SeriesSpec) -> float:
    """``sum |coefficients|``; for cosine specs each term carries the weight ``2^(|u|/2)``.

    The cosine sum is accumulated over the same split terms that
    :func:`compose_tent` produces, so it agrees bit for bit with the Fourier
    sum of the composed spec.
    """
    if f.basis == "cosine":
        parts = [abs(c) for key, coef in f.terms.items() for _, c in _tent_terms(key, coef)]
    else:
        parts = [abs(a) for a in f.terms.values()]
    return math.fsum(parts)


def norm(f: SeriesSpec, space: str | None = None) -> NormReport:
    """Norm report for ``f`` in its space (``K`` fourier, ``C`` cosine, ``W`` walsh)."""
    expected = SPACE_OF_BASIS[f.basis]
    space = expected if space is None else space.upper()
    if space != expected:
        raise ValueError(f"a {f.basis} spec belongs to space {expected}, not {space}")
    coeff = coefficient_sum(f) + f.tail
    hol = holder_upper(f)
    weight = 2.0**f.alpha if space == "C" else 1.0
    return NormReport(space, coeff, hol, coeff + weight * hol, f.tail)


# --- parametric families ----------------------------------------------------------------


def harmonic(K: int, beta: float) -> float:
    """``sum_{k=1}^K k^-beta``."""
    return math.fsum(k ** (-beta) for k in range(1, K + 1))


def decaying_coeff_sum(s: int, K: int, beta: float, c: float = 1.0) -> float:
    """Closed form ``c (1 + 2 H_K(beta))^s`` of the family's coefficient sum."""
    return c * (1 + 2 * harmonic(K, beta)) ** s


def decaying_family(
    s: int,
    K: int,
    beta: float,
    c: float = 1.0,
    alpha: float = 1.0,
    p: float = math.inf,
) -> SeriesSpec:
    """Real even Fourier spec with ``a_k = c prod_j min(1, |k_j|^-beta)`` for ``|k_j| <= K``."""
    if s < 1 or K < 0 or beta <= 0:
        raise ValueError("need s >= 1, K >= 0, beta > 0")
    one_dim = {k: (1.0 if k == 0 else abs(k) ** (-beta)) for k in range(-K, K + 1)}
    terms = {
        key: c * math.prod(one_dim[v] for v in key)
        for key in itertools.product(range(-K, K + 1), repeat=s)
    }
    name = f"decay(s={s},K={K},beta={beta:g})"
    return SeriesSpec("fourier", terms, alpha, p, name=name)


def _digit_character_coeffs(params: FieldParams) -> np.ndarray:
    """Coefficients ``c_a`` with ``u = sum_a c_a chi_a(u)`` on the digit set ``{0..B-1}``."""
    B, b = params.order, params.b
    roots = np.exp(2j * np.pi * np.arange(b) / b)
    chi = roots[params.pairing_table.astype(np.int64)]  # chi[a, u]
    return (np.conj(chi) @ np.arange(B, dtype=float)) / B


def walsh_linear_spec(
    params: FieldParams,
    weights: Sequence[float],
    const: float = 0.0,
    depth: int = 2,
    alpha: float = 1.0,
    p: float = math.inf,
) -> SeriesSpec:
    """Walsh expansion of ``x -> const + w . x``, truncated after ``depth`` digits.

    Digit ``i`` of ``x_j`` contributes ``B^-i xi_i``, and the digit value is
    expanded in the characters of the digit set. The dropped digits are
    covered by ``tail``; ``holder`` is the seminorm of the full linear
    function on ``[0, 1)^s``, namely ``||w||_q s^((1 - alpha)/p)``.
    """
    w = [float(v) for v in weights]
    s = len(w)
    if s < 1 or depth < 1:
        raise ValueError("need at least one weight and depth >= 1")
    B = params.order
    ca = _digit_character_coeffs(params)
    terms: dict[tuple[int, ...], complex] = {(0,) * s: const + 0.5 * sum(w)}
    for j, wj in enumerate(w):
        if wj == 0:
            continue
        for i in range(1, depth + 1):
            for a in range(1, B):
                key = [0] * s
                key[j] = a * B ** (i - 1)
                terms[tuple(key)] = wj * B ** (-i) * ca[a]
    A = math.fsum(abs(ca[1:]))
    tail = math.fsum(abs(v) for v in w) * A * B ** (-depth) / (B - 1)
    q = dual_exponent(p)
    spread = 1.0 if math.isinf(p) else s ** ((1 - alpha) / p)
    holder = lp_norm(w, q) * spread
    name = f"linear(w={','.join(f'{v:g}' for v in w)},depth={depth})"
    return SeriesSpec("walsh", terms, alpha, p, params, tail, holder, name)


def linear_value(weights: Sequence[float], const: float, X: np.ndarray) -> np.ndarray:
    """Closed-form value of ``const + w . x`` at float points ``(n, s)``."""
    return const + np.asarray(X, dtype=float) @ np.asarray(weights, dtype=float)
