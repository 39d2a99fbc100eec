"""Local densities and the Euler-product constants built from them.

Two families of local counts are computed twice each, once by closed
form and once by literal enumeration, and the package treats agreement
of the two routes as its central correctness check:

* cp_ell: the number of units m mod ell^e (e the exact power of ell in
  4nf^2) with D(p,m) = a f^2 mod ell^e, for a = 1 mod 4 and odd f;
* cpf: the constrained double character sum over residues a1, a2 that
  collapses, prime power by prime power, to the closed multiplicative
  formulas used in the density derivation.

On top sit the per-prime constant c2(p) (an Euler product over odd
primes), its prime-average c (a single Euler product), and the assembled
product r(p) built from the intermediate F-factors, which must agree
with c2(p) up to a p^-2-sized band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import GuardError, factorize, is_prime, kronecker, nu, primes_in, primes_upto

CP_ELL_MODULUS_GUARD = 1_000_000
CPF_MODULUS_GUARD = 100_000


@dataclass(frozen=True)
class LocalParams:
    """Arguments of the unit-count density: modulus prime ell, base prime p,
    residue a = 1 mod 4, odd conductor f, level n."""

    p: int
    ell: int
    a: int
    f: int
    n: int

    def __post_init__(self):
        if self.p % 2 == 0 or not is_prime(self.p):
            raise ValueError("p must be an odd prime")
        if not is_prime(self.ell):
            raise ValueError("ell must be prime")
        if self.a % 4 != 1:
            raise ValueError("a must be 1 mod 4")
        if self.f < 1 or self.f % 2 == 0:
            raise ValueError("f must be odd and positive")
        if self.n < 1:
            raise ValueError("n must be positive")


@dataclass(frozen=True)
class PairDensityParams:
    """Arguments of the paired density: levels n1, n2 and odd conductors f1, f2."""

    p: int
    n1: int
    n2: int
    f1: int = 1
    f2: int = 1

    def __post_init__(self):
        if self.p % 2 == 0 or not is_prime(self.p):
            raise ValueError("p must be an odd prime")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("levels must be positive")
        if self.f1 % 2 == 0 or self.f2 % 2 == 0 or self.f1 < 1 or self.f2 < 1:
            raise ValueError("conductors must be odd and positive")


@dataclass(frozen=True)
class TruncatedConstant:
    """A truncated Euler product with the prime bound and a rigorous tail."""

    value: float
    truncation: int
    tail_bound: float


def s2(a: int, n: int) -> int:
    """Dyadic factor: 1 for odd n; for even n, 2 when a = 5 mod 8, else 0."""
    if n % 2 == 1:
        return 1
    return 2 if a % 8 == 5 else 0


def cp_ell_formula(params: LocalParams) -> int:
    """Closed form for the unit count mod ell^e, e = nu_ell(4 n f^2).

    For odd ell not dividing 4p + a f^2 the count is 1 + ((4p+af^2)/ell)
    unless ell divides (p-1)^2 - a f^2, where a unit root degenerates and
    the count is 1.  When s = nu_ell(4p + a f^2) > 0 the double root at
    m = p+1 governs: the count is 2((p+1)/ell)^2 ell^(s/2) for even s < e
    with ((4p+af^2)/ell^s / ell) = 1, is ((p+1)/ell)^2 ell^(floor(e/2))
    for s >= e, and vanishes otherwise.
    """
    p, ell, a, f, n = params.p, params.ell, params.a, params.f, params.n
    if ell == 2:
        return 2 * s2(a, n)
    e = nu(ell, 4 * n * f * f)
    if e == 0:
        return 1
    A = 4 * p + a * f * f
    s = None if A == 0 else nu(ell, A)  # None: infinite valuation
    if s == 0:
        if ((p - 1) ** 2 - a * f * f) % ell == 0:
            return 1
        return 1 + kronecker(A, ell)
    unit_sq = 1 if (p + 1) % ell != 0 else 0  # ((p+1)/ell)^2
    if s is not None and s < e:
        if s % 2 == 0 and kronecker(A // ell**s, ell) == 1:
            return 2 * unit_sq * ell ** (s // 2)
        return 0
    return unit_sq * ell ** (e // 2)


def cp_ell_bruteforce(params: LocalParams) -> int:
    """Literal count of units m mod ell^e with D(p,m) = a f^2 (oracle)."""
    p, ell, a, f, n = params.p, params.ell, params.a, params.f, params.n
    e = nu(ell, 4 * n * f * f)
    modulus = ell**e
    if modulus > CP_ELL_MODULUS_GUARD:
        raise GuardError(f"modulus {modulus} exceeds brute-force guard")
    if modulus == 1:
        return 1
    m = np.arange(modulus, dtype=np.int64)
    disc = ((p + 1 - m) ** 2 - 4 * p) % modulus
    hits = disc == (a * f * f) % modulus
    if ell > 1:
        hits &= m % ell != 0
    return int(np.count_nonzero(hits))


def _cp_ell_conductor(p: int, ell: int) -> int:
    """The f-only value C(1, f, 1) for ell | f: 1 + (p(p-1)^2/ell), or 0 at ell = p."""
    if ell == p:
        return 0
    return 1 + kronecker(p * (p - 1) ** 2, ell)


def cpf_formula(params: PairDensityParams) -> int:
    """Closed multiplicative form of the paired density.

    Prime-power factors (alpha_i the exact powers of ell in n_i,
    M = max(alpha_1, alpha_2) > 0):

      ell = 2:               2^M (-1)^(alpha1+alpha2)
      ell = p, ell∤f1f2:     p^(M-1) (p-2)
      ell ∤ p f1 f2:         ell^(M-1) (ell-1-(p/ell)-((p-1)/ell)^2)  [even sum]
                             ell^(M-1) (-1-((p-1)/ell)^2)            [odd sum]
      ell | f1 f2:           C(1,f,1) ell^(M-1) (ell-1) when the conductor
                             valuations admit a solution and the relevant
                             alpha-parity is even; 0 otherwise.
    """
    p, n1, n2, f1, f2 = params.p, params.n1, params.n2, params.f1, params.f2
    result = 1
    for ell in sorted(set(factorize(n1)) | set(factorize(n2))):
        a1, a2 = nu(ell, n1), nu(ell, n2)
        m = max(a1, a2)
        if ell == 2:
            factor = 2**m * (-1) ** (a1 + a2)
        elif (f1 * f2) % ell != 0:
            if ell == p:
                factor = p ** (m - 1) * (p - 2)
            elif (a1 + a2) % 2 == 0:
                factor = ell ** (m - 1) * (
                    ell - 1 - kronecker(p, ell) - kronecker(p - 1, ell) ** 2
                )
            else:
                factor = ell ** (m - 1) * (-1 - kronecker(p - 1, ell) ** 2)
        else:
            v1, v2 = nu(ell, f1 * f1), nu(ell, f2 * f2)
            if a2 == 0 and a1 % 2 == 0 and v1 >= v2:
                val = ell - 1
            elif a1 == 0 and a2 % 2 == 0 and v2 >= v1:
                val = ell - 1
            elif a1 > 0 and a2 > 0 and (a1 + a2) % 2 == 0 and v1 == v2:
                val = ell - 1
            else:
                val = 0
            factor = _cp_ell_conductor(p, ell) * ell ** (m - 1) * val
        result *= factor
    return result


def cpf_bruteforce(params: PairDensityParams) -> int:
    """The paired density as a literal double character sum (oracle).

    Sums (a1/n1)(a2/n2) S2(a,n) prod_{ell | n1 n2 odd} cp_ell(a,f,n) over
    a_i in (Z/4n_i)^* with a_i = 1 mod 4 under the compatibility congruence
    a1 f1^2 = a2 f2^2 mod gcd(4 n1 f1^2, 4 n2 f2^2); each local factor is
    evaluated by cp_ell_bruteforce at the max-valuation tuple (ties take
    the first tuple, which cannot change the value).
    """
    p, n1, n2, f1, f2 = params.p, params.n1, params.n2, params.f1, params.f2
    m1sq, m2sq = 4 * n1 * f1 * f1, 4 * n2 * f2 * f2
    if m1sq > CPF_MODULUS_GUARD or m2sq > CPF_MODULUS_GUARD:
        raise GuardError("pair-density moduli exceed brute-force guard")
    g = math.gcd(m1sq, m2sq)
    odd_ells = sorted(ell for ell in set(factorize(n1)) | set(factorize(n2)) if ell != 2)
    a1_list = [a for a in range(1, 4 * n1, 4) if math.gcd(a, 4 * n1) == 1]
    a2_list = [a for a in range(1, 4 * n2, 4) if math.gcd(a, 4 * n2) == 1]
    total = 0
    for a1 in a1_list:
        ka1 = kronecker(a1, n1)
        lhs = a1 * f1 * f1 % g
        for a2 in a2_list:
            if (a2 * f2 * f2 - lhs) % g != 0:
                continue
            a_dy, n_dy = (a1, n1) if nu(2, n1) >= nu(2, n2) else (a2, n2)
            term = ka1 * kronecker(a2, n2) * s2(a_dy, n_dy)
            for ell in odd_ells:
                if term == 0:
                    break
                e1, e2 = nu(ell, m1sq), nu(ell, m2sq)
                aa, ff, nn = (a1, f1, n1) if e1 >= e2 else (a2, f2, n2)
                term *= cp_ell_bruteforce(LocalParams(p, ell, aa, ff, nn))
            total += term
    return total


# ---------------------------------------------------------------------------
# F-factors, the vanishing identity, and the assembled product r(p).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FFactors:
    """The intermediate Euler-product pieces at one odd prime ell."""

    f0: Fraction  # global p-factor, no ell dependence
    f1: Fraction
    f2_distinct: Fraction  # conductor valuations differ at ell
    f2_equal: Fraction


def f_factors(p: int, ell: int) -> FFactors:
    """Exact values of F0(p), F1(ell) and both F2 branches."""
    if ell == 2 or not is_prime(ell):
        raise ValueError("ell must be an odd prime")
    f0 = 1 + Fraction((p - 2) * (2 * p - 1), (p - 1) ** 3)
    s1 = kronecker(p - 1, ell) ** 2
    sp = kronecker(p, ell)
    f1 = 1 - Fraction(
        (2 * ell**3 + 3 * ell**2 - 1) * s1
        + (3 * ell**2 - 1) * sp
        - ell**3
        + 3 * ell**2
        + ell
        - 1,
        (ell - 1) * (ell**2 - 1) ** 2,
    )
    f2_distinct = 1 + Fraction(1, ell * (ell + 1))
    f2_equal = 1 + Fraction(3 * ell**2 - 1, ell * (ell - 1) * (ell + 1) ** 2)
    return FFactors(f0, f1, f2_distinct, f2_equal)


def vanishing_identity(p: int, ell: int) -> int:
    """((p-1)/ell)^2 + (p/ell) - 1 - (p(p-1)^2/ell); identically 0 for ell != p."""
    if ell == p:
        raise ValueError("identity requires ell != p")
    if ell == 2 or not is_prime(ell):
        raise ValueError("ell must be an odd prime")
    return (
        kronecker(p - 1, ell) ** 2
        + kronecker(p, ell)
        - 1
        - kronecker(p * (p - 1) ** 2, ell)
    )


def appendix_abc(ell: int) -> tuple[int, int, int]:
    """Coefficients (a, b, c) with f_p(ell) = a*((p-1)/ell)^2 + b*(p/ell) + c."""
    return (
        2 * ell**4 + 3 * ell**3,
        ell**3,
        2 * ell**3 - ell**4 + 4 * ell**2 - 1,
    )


def c2_factor(p: int, ell: int) -> Fraction:
    """Exact Euler factor of c2(p) at an odd prime ell."""
    a, b, c = appendix_abc(ell)
    s1 = kronecker(p - 1, ell) ** 2
    sp = kronecker(p, ell)
    return 1 - Fraction(a * s1 + b * sp + c, (ell**2 - 1) ** 3)


def c_factor(ell: int) -> Fraction:
    """Exact Euler factor of the averaged constant c at any prime ell."""
    a, _, _ = appendix_abc(ell)
    return 1 - Fraction(
        a * (ell - 2) - (ell - 1) * (ell**4 - 2 * ell**3 - 4 * ell**2 + 1),
        (ell - 1) * (ell**2 - 1) ** 3,
    )


@lru_cache(maxsize=None)
def _tail_log_majorant(lam: int) -> float:
    # sum over primes ell > lam of |log factor|, majorized by 6/ell^2: the
    # primes in (lam, 10*lam] are summed explicitly and the rest bounded by
    # the integral tail sum_{n > 10*lam} 6/n^2 < 6/(10*lam).
    t = sum(6.0 / (ell * ell) for ell in primes_in(lam + 1, 10 * lam))
    return t + 6.0 / (10 * lam)


def _tail_bound(value: float, lam: int) -> float:
    return abs(value) * math.expm1(_tail_log_majorant(lam))


def c2_of_p(p: int, lam: int = 1000) -> TruncatedConstant:
    """Truncated c2(p) = (4/9) prod_{2 < ell <= lam} c2_factor(p, ell).

    Exact rational factors accumulated in floating point in ascending ell;
    the tail bound covers the whole untruncated remainder, so doubling the
    truncation must move the value by less than tail_bound.
    """
    if p <= 3 or not is_prime(p):
        raise ValueError("need a prime p > 3")
    if lam < 3:
        raise ValueError("need lam >= 3")
    value = 4.0 / 9.0
    for ell in primes_in(3, lam):
        value *= float(c2_factor(p, ell))
    return TruncatedConstant(value, lam, _tail_bound(value, lam))


def c_global(lam: int = 100_000) -> TruncatedConstant:
    """Truncated averaged constant c = prod_{ell <= lam} c_factor(ell)."""
    if lam < 2:
        raise ValueError("need lam >= 2")
    value = 1.0
    for ell in primes_upto(lam):
        value *= float(c_factor(ell))
    return TruncatedConstant(value, lam, _tail_bound(value, lam))


def r_of_p(p: int, lam: int = 1000) -> float:
    """The product r(p) assembled from the F-factors and the conductor sum.

    r(p) = (4/9) F0(p) prod_{ell <= lam, ell != 2, p}
           [ F1(ell) + (1 + (p(p-1)^2/ell)) (2 ell^3 + 3 ell^2 - ell - 1) / (ell^2-1)^3 ],

    the bracketed factor being F1(ell) times the closed form of the f1, f2
    Euler sum at ell.  Agrees with c2_of_p within a p^-2-sized band.
    """
    if p <= 3 or not is_prime(p):
        raise ValueError("need a prime p > 3")
    ff = f_factors(p, 3)
    value = 4.0 / 9.0 * float(ff.f0)
    for ell in primes_in(3, lam):
        if ell == p:
            continue
        f1 = f_factors(p, ell).f1
        cond = _cp_ell_conductor(p, ell)
        factor = f1 + cond * Fraction(2 * ell**3 + 3 * ell**2 - ell - 1, (ell**2 - 1) ** 3)
        value *= float(factor)
    return value


def giri_average(x: int, lam: int = 1000) -> float:
    """Average of the truncated c2(p) over primes p <= x.

    The sum runs over p > 3 (where c2 is defined) but is normalized by the
    full prime count pi(x), matching the averaging statement; the two
    missing primes shift the average by O(1/pi(x)).
    """
    if x < 100:
        raise ValueError("need x >= 100")
    ps = primes_upto(x)
    total = 0.0
    for p in ps:
        if p > 3:
            total += c2_of_p(p, lam).value
    return total / len(ps)
