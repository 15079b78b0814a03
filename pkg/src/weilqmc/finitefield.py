"""Arithmetic in F_{b^m} realised as Z_b[x]/(p).

Field elements (``FieldPoly``) are tuples ``(q_0, ..., q_{m-1})`` of residues
mod ``b``, constant coefficient first. The digit map sends the integer
``n = z_0 + z_1 b + ... + z_{m-1} b^{m-1}`` to the polynomial with those
coefficients; it is the single bijection ``Z_{b^m} -> F_{b^m}`` used for point
indices, Walsh wavenumber digits and Walsh point digits alike.

Additive characters are represented by their index ``t`` in ``Z_b`` (the value
being ``exp(2 pi i t / b)``); the fixed non-trivial character is
``y -> Tr(y)``.

Bulk operations work on ``(n, m)`` integer arrays of coefficients so that a
whole field can be processed at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .modarith import factorize, is_prime

FieldPoly = tuple[int, ...]


# --- polynomials over Z_b (lists, constant first, no trailing zeros) -------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod_rem(a: list[int], mod: Sequence[int], b: int) -> list[int]:
    """Remainder of ``a`` modulo the monic-or-not polynomial ``mod``."""
    a = _trim([c % b for c in a])
    mod = _trim([c % b for c in mod])
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], -1, b)
    while len(a) - 1 >= dm and a:
        coef = a[-1] * inv_lead % b
        shift = len(a) - 1 - dm
        for i, c in enumerate(mod):
            a[shift + i] = (a[shift + i] - coef * c) % b
        _trim(a)
    return a


def _poly_mulmod(u: Sequence[int], v: Sequence[int], mod: Sequence[int], b: int) -> list[int]:
    if not u or not v:
        return []
    prod = [0] * (len(u) + len(v) - 1)
    for i, ui in enumerate(u):
        if ui:
            for j, vj in enumerate(v):
                prod[i + j] += ui * vj
    return _poly_divmod_rem(prod, mod, b)


def _poly_powmod(u: Sequence[int], e: int, mod: Sequence[int], b: int) -> list[int]:
    result = [1]
    base = _poly_divmod_rem(list(u), mod, b)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, b)
        base = _poly_mulmod(base, base, mod, b)
        e >>= 1
    return _poly_divmod_rem(result, mod, b)


def _poly_gcd(u: Sequence[int], v: Sequence[int], b: int) -> list[int]:
    u = _trim([c % b for c in u])
    v = _trim([c % b for c in v])
    while v:
        u, v = v, _poly_divmod_rem(u, v, b)
    if u:
        inv = pow(u[-1], -1, b)
        u = [c * inv % b for c in u]
    return u


def _poly_sub(u: Sequence[int], v: Sequence[int], b: int) -> list[int]:
    n = max(len(u), len(v))
    out = [((u[i] if i < len(u) else 0) - (v[i] if i < len(v) else 0)) % b for i in range(n)]
    return _trim(out)


def _check_monic(p: Sequence[int], b: int) -> tuple[int, ...]:
    p = tuple(int(c) % b for c in p)
    if len(p) < 2 or p[-1] != 1:
        raise ValueError(f"polynomial {p} must be monic of degree >= 1 (constant term first)")
    return p


def is_irreducible(p: Sequence[int], b: int) -> bool:
    """Rabin's test for a monic polynomial ``p`` (constant first) over Z_b.

    ``p`` of degree ``m`` is irreducible iff ``x^(b^m) = x (mod p)`` and
    ``gcd(x^(b^(m/r)) - x, p) = 1`` for every prime ``r | m``.
    """
    if not is_prime(b):
        raise ValueError(f"b must be prime, got {b}")
    p = _check_monic(p, b)
    m = len(p) - 1
    if m == 1:
        return True

    def frob_power(k: int) -> list[int]:
        # x^(b^k) mod p
        y = [0, 1]
        for _ in range(k):
            y = _poly_powmod(y, b, p, b)
        return y

    if _poly_sub(frob_power(m), [0, 1], b) != []:
        return False
    for r in factorize(m):
        g = _poly_gcd(p, _poly_sub(frob_power(m // r), [0, 1], b), b)
        if len(g) > 1:
            return False
    return True


def is_primitive(p: Sequence[int], b: int) -> bool:
    """True iff ``p`` is irreducible and ``x`` has order ``b^m - 1`` modulo ``p``."""
    p = _check_monic(p, b)
    if not is_irreducible(p, b):
        return False
    m = len(p) - 1
    order = b**m - 1
    if _poly_powmod([0, 1], order, p, b) != [1]:
        return False
    return all(_poly_powmod([0, 1], order // r, p, b) != [1] for r in factorize(order)) if order > 1 else True


def poly_to_string(p: Sequence[int]) -> str:
    """Human-readable form, highest degree first, e.g. ``x^2+x+1``."""
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if i == 0:
            parts.append(str(c))
        else:
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts) or "0"


@dataclass(frozen=True)
class FieldParams:
    """The field ``Z_b[x]/(p)`` with ``p`` monic irreducible of degree ``m``.

    ``p`` is stored constant coefficient first, so ``x^2 + x + 1`` is
    ``(1, 1, 1)``.
    """

    b: int
    m: int
    p: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.b):
            raise ValueError(f"b must be prime, got {self.b}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        p = _check_monic(self.p, self.b)
        if len(p) != self.m + 1:
            raise ValueError(f"polynomial {p} does not have degree m={self.m}")
        object.__setattr__(self, "p", p)
        if not is_irreducible(p, self.b):
            raise ValueError(f"polynomial {poly_to_string(p)} is reducible over Z_{self.b}")

    @property
    def order(self) -> int:
        return self.b**self.m

    @property
    def is_primitive(self) -> bool:
        return is_primitive(self.p, self.b)

    def to_string(self) -> str:
        return ",".join(str(v) for v in (self.b, self.m, *self.p))

    @classmethod
    def from_string(cls, text: str) -> "FieldParams":
        vals = [int(v) for v in text.replace(" ", "").split(",") if v]
        if len(vals) < 3:
            raise ValueError(f"expected 'b,m,p_0,...,p_m', got {text!r}")
        b, m, *p = vals
        return cls(b, m, tuple(p))

    def __str__(self) -> str:
        return f"F_{self.b}^{self.m} = Z_{self.b}[x]/({poly_to_string(self.p)})"

    # -- cached tables --------------------------------------------------

    @cached_property
    def _powers_of_x(self) -> np.ndarray:
        """Row k holds the coefficients of ``x^k mod p`` for ``0 <= k < 2m - 1``."""
        rows = []
        for k in range(2 * self.m - 1):
            q = _poly_divmod_rem([0] * k + [1], self.p, self.b)
            rows.append(q + [0] * (self.m - len(q)))
        return np.array(rows, dtype=np.int64)

    @cached_property
    def trace_vector(self) -> np.ndarray:
        """``Tr(x^k)`` for ``0 <= k < m``; the trace is linear in the coefficients."""
        return np.array(
            [trace(tuple(int(c) for c in self._powers_of_x[k]), self) for k in range(self.m)],
            dtype=np.int64,
        )

    @cached_property
    def trace_form(self) -> np.ndarray:
        """Gram matrix ``G[i, j] = Tr(x^(i+j))`` so that ``Tr(u v) = u^T G v``."""
        m = self.m
        tr_all = (self._powers_of_x @ self.trace_vector) % self.b
        return np.array([[tr_all[i + j] for j in range(m)] for i in range(m)], dtype=np.int64)

    @cached_property
    def digits(self) -> np.ndarray:
        """``(b^m, m)`` table; row ``n`` is the digit-map image of ``n``."""
        return index_to_coeffs(np.arange(self.order), self)

    @cached_property
    def pairing_table(self) -> np.ndarray:
        """``T[u, v] = Tr(phi(u) phi(v))`` over all index pairs, as int16."""
        D = self.digits
        return ((D @ self.trace_form @ D.T) % self.b).astype(np.int16)

    @cached_property
    def nu_numerators(self) -> np.ndarray:
        """``b^m * nu_m(phi(n))`` for every index ``n``."""
        weights = self.b ** np.arange(self.m - 1, -1, -1, dtype=np.int64)
        return self.digits @ weights


# --- scalar field operations -----------------------------------------------


def _check_elem(u: Sequence[int], params: FieldParams) -> FieldPoly:
    u = tuple(int(c) for c in u)
    if len(u) != params.m or any(not 0 <= c < params.b for c in u):
        raise ValueError(f"{u} is not a valid element of {params}")
    return u


def _pad(q: list[int], m: int) -> FieldPoly:
    return tuple(q) + (0,) * (m - len(q))


def zero(params: FieldParams) -> FieldPoly:
    return (0,) * params.m


def one(params: FieldParams) -> FieldPoly:
    return (1,) + (0,) * (params.m - 1)


def poly_add(u: Sequence[int], v: Sequence[int], params: FieldParams) -> FieldPoly:
    return tuple((a + c) % params.b for a, c in zip(u, v))


def poly_mul_mod(u: Sequence[int], v: Sequence[int], params: FieldParams) -> FieldPoly:
    """Product of two field elements, reduced modulo ``p`` and ``b``."""
    u, v = _check_elem(u, params), _check_elem(v, params)
    return _pad(_poly_mulmod(_trim(list(u)), _trim(list(v)), params.p, params.b), params.m)


def poly_pow_mod(u: Sequence[int], e: int, params: FieldParams) -> FieldPoly:
    """``u**e`` in the field by square-and-multiply; ``u**0 == 1`` (also for ``u = 0``)."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    u = _check_elem(u, params)
    return _pad(_poly_powmod(_trim(list(u)), e, params.p, params.b), params.m)


def find_field_poly(b: int, m: int, primitive_required: bool = False) -> FieldParams:
    """Smallest suitable monic polynomial of degree ``m`` over Z_b.

    Candidates are scanned in lexicographic order of ``(p_0, ..., p_{m-1})``,
    constant term most significant.
    """
    if not is_prime(b):
        raise ValueError(f"b must be prime, got {b}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    test = is_primitive if primitive_required else is_irreducible
    for low in itertools.product(range(b), repeat=m):
        p = (*low, 1)
        if test(p, b):
            return FieldParams(b, m, p)
    raise AssertionError("unreachable: irreducible polynomials exist in every degree")


def digit_bijection(n: int, params: FieldParams) -> FieldPoly:
    """Base-``b`` digits of ``n`` as polynomial coefficients (``0 -> 0``)."""
    if not 0 <= n < params.order:
        raise ValueError(f"n={n} outside [0, {params.order})")
    out = []
    for _ in range(params.m):
        n, r = divmod(n, params.b)
        out.append(r)
    return tuple(out)


def digit_bijection_inv(q: Sequence[int], params: FieldParams) -> int:
    q = _check_elem(q, params)
    n = 0
    for c in reversed(q):
        n = n * params.b + c
    return n


def nu_m_numerator(q: Sequence[int], params: FieldParams) -> int:
    """Integer ``q_0 b^(m-1) + q_1 b^(m-2) + ... + q_{m-1}``."""
    q = _check_elem(q, params)
    n = 0
    for c in q:
        n = n * params.b + c
    return n


def nu_m(q: Sequence[int], params: FieldParams) -> Fraction:
    """``q_0/b + q_1/b^2 + ... + q_{m-1}/b^m`` as an exact fraction."""
    return Fraction(nu_m_numerator(q, params), params.order)


def trace(y: Sequence[int], params: FieldParams) -> int:
    """Absolute trace ``y + y^b + ... + y^(b^(m-1))`` returned as a residue mod ``b``.

    Evaluated literally through Frobenius powers; ``FieldParams.trace_vector``
    holds the equivalent linear form used by the bulk routines.
    """
    y = _check_elem(y, params)
    acc = zero(params)
    term = y
    for _ in range(params.m):
        acc = poly_add(acc, term, params)
        term = poly_pow_mod(term, params.b, params)
    if any(acc[1:]):
        raise AssertionError(f"trace {acc} left the prime field; is p irreducible?")
    return acc[0]


def additive_character(a: Sequence[int], z: Sequence[int], params: FieldParams) -> int:
    """Index ``t`` of ``theta_a(z) = psi(a z) = exp(2 pi i t / b)``, ``t = Tr(a z)``."""
    return trace(poly_mul_mod(a, z, params), params)


# --- bulk (array) operations -------------------------------------------------


def index_to_coeffs(idx: np.ndarray, params: FieldParams) -> np.ndarray:
    """Digit map applied elementwise: ``(...,) -> (..., m)`` coefficient arrays."""
    idx = np.asarray(idx, dtype=np.int64)
    powers = params.b ** np.arange(params.m, dtype=np.int64)
    return (idx[..., None] // powers) % params.b


def coeffs_to_index(coeffs: np.ndarray, params: FieldParams) -> np.ndarray:
    powers = params.b ** np.arange(params.m, dtype=np.int64)
    return np.asarray(coeffs, dtype=np.int64) @ powers


def mul_arrays(U: np.ndarray, V: np.ndarray, params: FieldParams) -> np.ndarray:
    """Row-wise field product of two ``(n, m)`` coefficient arrays."""
    m, b = params.m, params.b
    U = np.asarray(U, dtype=np.int64)
    V = np.asarray(V, dtype=np.int64)
    prod = np.zeros(np.broadcast_shapes(U.shape[:-1], V.shape[:-1]) + (2 * m - 1,), dtype=np.int64)
    for i in range(m):
        prod[..., i : i + m] += U[..., i : i + 1] * V
    prod %= b
    # x^k for k >= m is replaced by its reduced form
    return (prod[..., :m] + prod[..., m:] @ params._powers_of_x[m:]) % b


def pow_arrays(U: np.ndarray, e: int, params: FieldParams) -> np.ndarray:
    """Row-wise ``U**e``; ``0**0`` is taken to be 1."""
    U = np.asarray(U, dtype=np.int64)
    result = np.zeros_like(U)
    result[..., 0] = 1
    base = U
    while e:
        if e & 1:
            result = mul_arrays(result, base, params)
        base = mul_arrays(base, base, params)
        e >>= 1
    return result


def trace_arrays(Y: np.ndarray, params: FieldParams) -> np.ndarray:
    return (np.asarray(Y, dtype=np.int64) @ params.trace_vector) % params.b
