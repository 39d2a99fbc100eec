"""Matrix-pair mass counts over GL2(Z/nZ).

The pair condition

    det(g2) = det(g1) + 1 - tr(g1)   and   det(g1) = det(g2) + 1 - tr(g2)

depends on g1, g2 only through (trace, determinant), so the quadratic-cost
pair count collapses to a trace/determinant histogram: adding the two
congruences forces tr(g2) = 2 - tr(g1), and the first then fixes det(g2).
That turns |G|^2 literal pairs into n^2 histogram-class pairs, which is
what makes depth ell^k = 81 feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import GuardError, factorize, is_prime, primes_upto

ENUMERATION_GUARD = 10**8  # n^4 cells


@dataclass(frozen=True)
class TraceDetHistogram:
    """counts[t, d] = number of elements of GL2(Z/nZ) with trace t, det d."""

    n: int
    counts: np.ndarray

    def total(self) -> int:
        return int(self.counts.sum())


def gl2_order(n: int) -> int:
    """|GL2(Z/nZ)| = n^4 prod_{ell | n} (1 - ell^-1)(1 - ell^-2)."""
    if n < 1:
        raise ValueError("need n >= 1")
    order = n**4
    for ell in factorize(n):
        order = order // ell**3 * (ell - 1) * (ell * ell - 1) // ell
    return order


def gl2_order_bruteforce(n: int) -> int:
    """Invertible matrices counted by full 4-fold enumeration (n <= 16)."""
    if n**4 > ENUMERATION_GUARD:
        raise GuardError(f"n = {n} exceeds the enumeration guard")
    count = 0
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    if math.gcd((a * d - b * c) % n, n) == 1:
                        count += 1
    return count


def trace_det_histogram(n: int) -> TraceDetHistogram:
    """Exact histogram by a single pass over all n^4 matrices.

    The pass is blocked over (a, d): the determinants (ad - bc) mod n of the
    full (b, c) grid are binned at trace (a + d) mod n.  Non-unit
    determinant columns are zeroed at the end, which is the invertibility
    test applied per class.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if n**4 > ENUMERATION_GUARD:
        raise GuardError(f"n^4 = {n**4} exceeds the enumeration guard {ENUMERATION_GUARD}")
    bc = np.multiply.outer(np.arange(n, dtype=np.int64), np.arange(n, dtype=np.int64)).ravel() % n
    counts = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for d in range(n):
            dets = (a * d - bc) % n
            counts[(a + d) % n] += np.bincount(dets, minlength=n)
    nonunit = [d for d in range(n) if math.gcd(d, n) != 1]
    counts[:, nonunit] = 0
    counts.setflags(write=False)
    return TraceDetHistogram(n, counts)


def _pair_count_from_histogram(hist: TraceDetHistogram) -> int:
    # Exact big-int accumulation; the two congruences leave, for each class
    # (t1, d1), the single partner class (2 - t1, d1 + 1 - t1).
    n = hist.n
    rows = hist.counts.tolist()
    total = 0
    for t1 in range(n):
        row = rows[t1]
        partner = rows[(2 - t1) % n]
        for d1 in range(n):
            c = row[d1]
            if c:
                total += c * partner[(d1 + 1 - t1) % n]
    return total


def m_count(ell: int, k: int, guard: int = 81) -> Fraction:
    """M(ell, k) = ell^(2k) * #(admissible pairs) / |GL2(Z/ell^k Z)|^2, exact."""
    if not is_prime(ell) or k < 1:
        raise ValueError("need prime ell and k >= 1")
    n = ell**k
    if n > guard:
        raise GuardError(f"ell^k = {n} exceeds the depth guard {guard}")
    pairs = _pair_count_from_histogram(trace_det_histogram(n))
    order = gl2_order(n)
    return Fraction(ell ** (2 * k) * pairs, order * order)


def m_count_literal(n: int) -> Fraction:
    """M by literal enumeration of all |G|^2 matrix pairs (tiny n only)."""
    if n > 6:
        raise GuardError("literal pair enumeration is for n <= 6")
    mats = [
        (a, b, c, d)
        for a in range(n)
        for b in range(n)
        for c in range(n)
        for d in range(n)
        if math.gcd((a * d - b * c) % n, n) == 1
    ]
    pairs = 0
    for a1, b1, c1, d1 in mats:
        t1, e1 = (a1 + d1) % n, (a1 * d1 - b1 * c1) % n
        for a2, b2, c2, d2 in mats:
            t2, e2 = (a2 + d2) % n, (a2 * d2 - b2 * c2) % n
            if e2 == (e1 + 1 - t1) % n and e1 == (e2 + 1 - t2) % n:
                pairs += 1
    order = len(mats)
    return Fraction(n * n * pairs, order * order)


def dks_partial_product(ell_max: int, k_per_ell: dict[int, int] | None = None,
                        guard: int = 81) -> float:
    """(8 / 3 pi^2) * prod_{ell <= ell_max} M(ell, k(ell)); k defaults to 1."""
    value = 8.0 / (3.0 * math.pi**2)
    if ell_max >= 2:
        for ell in primes_upto(ell_max):
            k = 1 if k_per_ell is None else k_per_ell.get(ell, 1)
            value *= float(m_count(ell, k, guard=guard))
    return value
