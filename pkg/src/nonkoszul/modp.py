"""Exact arithmetic mod a prime: digit-wise binomials, multinomials, base-q splits."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

MAX_PRIME = 2**31  # products of two residues must stay inside a 64-bit word


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Deterministic trial division; adequate for word-sized moduli."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    """Return p if it is a prime below 2^31, else raise ValueError."""
    p = int(p)
    if p >= MAX_PRIME:
        raise ValueError(f"modulus {p} too large (must be < 2^31)")
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    return p


@dataclass(frozen=True)
class PrimeModulus:
    """A validated prime modulus."""

    p: int

    def __post_init__(self) -> None:
        check_prime(self.p)

    def __int__(self) -> int:
        return self.p


def _small_binomial_mod(n: int, k: int, p: int) -> int:
    # n, k < p; multiplicative form keeps every intermediate below p^2
    if k < 0 or k > n:
        return 0
    k = min(k, n - k)
    num = 1
    den = 1
    for i in range(1, k + 1):
        num = num * ((n - k + i) % p) % p
        den = den * i % p
    return num * pow(den, -1, p) % p if k else 1


def binomial_mod(nn: int, kk: int, p: int) -> int:
    """C(nn, kk) mod p, digit by digit in base p (no large factorials)."""
    check_prime(p)
    if nn < 0 or kk < 0:
        raise ValueError("binomial_mod expects nonnegative arguments")
    if kk > nn:
        return 0
    result = 1
    while nn or kk:
        nn, nd = divmod(nn, p)
        kk, kd = divmod(kk, p)
        if kd > nd:
            return 0
        result = result * _small_binomial_mod(nd, kd, p) % p
    return result


def multinomial_mod(total: int, parts: Sequence[int], p: int) -> int:
    """total! / prod(parts!) mod p, as a product of digit-wise binomials."""
    check_prime(p)
    parts = list(parts)
    if any(x < 0 for x in parts) or total < 0:
        raise ValueError("multinomial_mod expects nonnegative arguments")
    if sum(parts) != total:
        raise ValueError(f"parts {parts} do not sum to {total}")
    result = 1
    remaining = total
    for part in parts:
        result = result * binomial_mod(remaining, part, p) % p
        if result == 0:
            return 0
        remaining -= part
    return result


@dataclass(frozen=True)
class QSplit:
    """d = k*q + r with 0 <= r < q."""

    d: int
    q: int
    k: int
    r: int


def q_split(d: int, q: int) -> QSplit:
    """Split a positive exponent against a prime power q."""
    if d <= 0:
        raise ValueError(f"exponent {d} must be positive")
    if q <= 0:
        raise ValueError(f"q must be positive, got {q}")
    k, r = divmod(d, q)
    return QSplit(d=d, q=q, k=k, r=r)


def is_power_of(q: int, p: int) -> bool:
    """True iff q = p^e for some e >= 0."""
    if q < 1:
        return False
    while q % p == 0:
        q //= p
    return q == 1


def largest_power_leq(p: int, x: int) -> tuple[int, int]:
    """Largest q = p^e with q <= x, returned as (q, e). Requires x >= 1."""
    if x < 1:
        raise ValueError(f"need x >= 1, got {x}")
    q, e = 1, 0
    while q * p <= x:
        q *= p
        e += 1
    return q, e


@dataclass(frozen=True)
class PrimePowerContext:
    """A prime p together with a fixed power q = p^e."""

    p: int
    e: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        if self.e < 0:
            raise ValueError("exponent e must be nonnegative")

    @property
    def q(self) -> int:
        return self.p**self.e

    def split(self, d: int) -> QSplit:
        return q_split(d, self.q)
