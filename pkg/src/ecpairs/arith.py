"""Exact integer utilities shared by the whole package.

Primes, the Kronecker symbol, prime valuations, and the small
combinatorial functions (kappa, delta, the symmetric discriminant
D(m,n)) that parameterize the class-number and local-density work.
Everything here is a pure function of its arguments; the sieve is
immutable once built.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

# Exact rational values (class numbers, matrix masses) are plain Fractions:
# always in lowest terms, denominator > 0.
Rational = Fraction


class GuardError(RuntimeError):
    """A tractability guard was exceeded (modulus/enumeration too large)."""


class PrimeSieve:
    """Primality table up to a fixed limit, immutable after construction."""

    def __init__(self, limit: int):
        if limit < 1:
            raise ValueError("sieve limit must be >= 1")
        self.limit = limit
        table = np.ones(limit + 1, dtype=bool)
        table[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if table[p]:
                table[p * p :: p] = False
        table.setflags(write=False)
        self._table = table
        self._primes = np.flatnonzero(table)

    def is_prime(self, n: int) -> bool:
        if n > self.limit:
            raise ValueError(f"{n} exceeds sieve limit {self.limit}")
        return n >= 2 and bool(self._table[n])

    def primes(self, lo: int = 2, hi: int | None = None) -> list[int]:
        """Primes in [lo, hi], ascending; hi defaults to the sieve limit."""
        if hi is None:
            hi = self.limit
        if hi > self.limit:
            raise ValueError(f"{hi} exceeds sieve limit {self.limit}")
        i = np.searchsorted(self._primes, max(lo, 2), side="left")
        j = np.searchsorted(self._primes, hi, side="right")
        return self._primes[i:j].tolist()

    def __contains__(self, n: int) -> bool:
        return self.is_prime(n)


_sieve = PrimeSieve(1 << 12)


def _shared_sieve(at_least: int) -> PrimeSieve:
    # Grows geometrically; each PrimeSieve instance stays immutable.
    global _sieve
    if _sieve.limit < at_least:
        new_limit = _sieve.limit
        while new_limit < at_least:
            new_limit *= 2
        _sieve = PrimeSieve(new_limit)
    return _sieve


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return _shared_sieve(n).is_prime(n)


def primes_in(lo: int, hi: int) -> list[int]:
    """All primes in [lo, hi], ascending."""
    if lo > hi:
        raise ValueError("need lo <= hi")
    if hi < 2:
        return []
    return _shared_sieve(hi).primes(lo, hi)


def primes_upto(n: int) -> list[int]:
    return primes_in(2, n)


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for n >= 0.

    Completely multiplicative in n; agrees with the Legendre symbol when
    n is an odd prime not dividing d.  (d/0) is 1 for d = +-1 and 0
    otherwise; (d/1) = 1 for every d; (d/2) vanishes for even d and is
    (-1)^((d^2-1)/8) for odd d.
    """
    if n < 0:
        raise ValueError("lower argument must be non-negative")
    if n == 0:
        return 1 if d in (1, -1) else 0
    result = 1
    # Peel off the even part of n via (d/2).
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            result = -result
    # Jacobi symbol (d/n) for odd n by reciprocity.
    d %= n
    while d != 0:
        while d % 2 == 0:
            d //= 2
            if n % 8 in (3, 5):
                result = -result
        d, n = n, d
        if d % 4 == 3 and n % 4 == 3:
            result = -result
        d %= n
    return result if n == 1 else 0


def d_disc(m: int, n: int) -> int:
    """The symmetric discriminant (m+1-n)^2 - 4m = (n+1-m)^2 - 4n."""
    return (m + 1 - n) ** 2 - 4 * m


def nu(ell: int, n: int) -> int:
    """Exact power of the prime ell dividing n (n != 0)."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    e = 0
    while n % ell == 0:
        n //= ell
        e += 1
    return e


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; desk-scale inputs only."""
    if n < 1:
        raise ValueError("need n >= 1")
    out: dict[int, int] = {}
    for p in _shared_sieve(math.isqrt(n) + 1).primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).items():
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def kappa(m: int, n: int) -> int:
    """Multiplicative kappa_m(n): a prime-power factor ell^nu contributes
    ell when nu is odd and ell does not divide m, and 1 otherwise."""
    if m < 1 or n < 1:
        raise ValueError("kappa needs positive arguments")
    out = 1
    for ell, e in factorize(n).items():
        if e % 2 == 1 and m % ell != 0:
            out *= ell
    return out


def delta_count(m: int) -> int:
    """Count of 1 <= a <= m-1 with gcd(a,m) = gcd(a+1,m) = 1.

    delta(1) is defined as 1 so the function can sit inside multiplicative
    Euler factors; the defining set is empty there.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    if m == 1:
        return 1
    return sum(
        1 for a in range(1, m) if math.gcd(a, m) == 1 and math.gcd(a + 1, m) == 1
    )


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out -= out // p
    return out


# ---------------------------------------------------------------------------
# Bulk sieved tables (numpy) for the partial-sum and property experiments.
# ---------------------------------------------------------------------------


def totient_sieve(limit: int) -> np.ndarray:
    """phi(n) for 0 <= n <= limit as int64 (phi[0] = 0)."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in primes_upto(limit):
        phi[p::p] -= phi[p::p] // p
    return phi


def kappa_sieve(m: int, limit: int) -> np.ndarray:
    """kappa_m(n) for 0 <= n <= limit as int64 (entry 0 is unused, set 1).

    Built one prime power at a time: multiplying the slice of multiples of
    ell^k by ell for odd k and dividing for even k leaves exactly
    ell^(parity of nu_ell(n)) on each n.
    """
    kap = np.ones(limit + 1, dtype=np.int64)
    for ell in primes_upto(limit):
        if m % ell == 0:
            continue
        pk = ell
        k = 1
        while pk <= limit:
            if k % 2 == 1:
                kap[pk::pk] *= ell
            else:
                kap[pk::pk] //= ell
            pk *= ell
            k += 1
    return kap


def kappa_phi_partial_sum(p: int, limit: int) -> float:
    """S(limit) = sum_{1 <= n <= limit} 1 / (kappa_{2p}(n) * phi(n))."""
    phi = totient_sieve(limit)
    kap = kappa_sieve(2 * p, limit)
    terms = 1.0 / (kap[1:] * phi[1:]).astype(np.float64)
    return float(np.sum(terms))
