"""Integer arithmetic modulo a prime.

Everything here works on plain Python ints. The supported modulus range is
``N < 2**31``; factorisation is by trial division, which is instant there.
"""

from __future__ import annotations

import math
from functools import lru_cache

MAX_MODULUS = 2**31
EULER_GAMMA = 0.57721566490153286060

# Deterministic Miller-Rabin witnesses, valid for every n < 3.4e14
# (Jaeschke 1993); comfortably covers the supported range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17)


class InsufficientExponentsError(ValueError):
    """Raised when fewer coprime exponents exist than requested dimensions."""


def is_prime(n: int) -> bool:
    """Return True iff ``n`` is prime.

    Uses trial division by the witness bases followed by deterministic
    Miller-Rabin with bases 2..17, which has no pseudoprimes below 3.4e14.
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    """Sieve of Eratosthenes, inclusive of ``n``."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return [i for i, v in enumerate(sieve) if v]


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes ``p`` with ``lo <= p <= hi``."""
    return [p for p in primes_up_to(hi) if p >= lo]


def next_prime(n: int) -> int:
    """Smallest prime ``>= n``."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


def pow_mod(a: int, e: int, N: int) -> int:
    """``a**e mod N`` by square-and-multiply (the builtin three-argument pow)."""
    if N == 0:
        raise ValueError("modulus must be nonzero")
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    return pow(a, e, N)


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation ``{p: k}`` by trial division."""
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_totient(n: int) -> int:
    """Number of ``a`` in ``[1, n]`` coprime to ``n``."""
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def multiplicative_order(a: int, N: int) -> int:
    """Order of ``a`` in ``(Z/NZ)^*`` for prime ``N``; ``a`` must be nonzero mod N."""
    if a % N == 0:
        raise ValueError("zero has no multiplicative order")
    order = N - 1
    for p in (factorize(N - 1) if N > 2 else {}):
        while order % p == 0 and pow(a, order // p, N) == 1:
            order //= p
    return order


@lru_cache(maxsize=None)
def primitive_root(N: int) -> int:
    """Smallest generator of the multiplicative group modulo the prime ``N``."""
    if not is_prime(N):
        raise ValueError(f"N must be prime, got {N}")
    if N == 2:
        return 1
    cofactors = [(N - 1) // p for p in factorize(N - 1)]
    for g in range(2, N):
        if all(pow(g, c, N) != 1 for c in cofactors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def coprime_exponent_set(N: int) -> list[int]:
    """All ``a`` in ``{1, ..., N-2}`` with ``gcd(a, N-1) == 1``, increasing."""
    return [a for a in range(1, N - 1) if math.gcd(a, N - 1) == 1]


def coprime_exponents(N: int, s: int) -> tuple[int, ...]:
    """The ``s`` smallest exponents coprime to ``N - 1``.

    Coordinates built from these exponents have one-dimensional projections
    equal to the full grid ``{0, 1/N, ..., (N-1)/N}`` since ``n -> n**j`` is then
    a permutation of ``Z_N``.
    """
    if not is_prime(N):
        raise ValueError(f"N must be prime, got {N}")
    pool = coprime_exponent_set(N)
    if s > len(pool):
        raise InsufficientExponentsError(
            f"insufficient coprime exponents: N={N} admits {len(pool)}, requested s={s}"
        )
    return tuple(pool[:s])


def totient_lower_bound(n: int) -> float:
    """Rosser-Schoenfeld lower bound ``n / (e^gamma loglog n + 3 / loglog n)``, n >= 3."""
    ll = math.log(math.log(n))
    return n / (math.exp(EULER_GAMMA) * ll + 3.0 / ll)

