"""Elliptic curves over prime fields F_p, p > 3.

Point counting drives everything: the exhaustive x-sweep sums the
quadratic character of x^3 + ax + b, and a baby-step/giant-step order
finder takes over for larger p.  On top of that sit the amicable-pair
scan (#E_p = q prime and #E_q = p) and the exact isogeny-class census
that realizes the mass identity sum 1/#Aut = H(t^2 - 4p).
"""

from __future__ import annotations

import csv
import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import is_prime, primes_in

# Exhaustive counting below this; BSGS order finding above.
EXHAUSTIVE_LIMIT = 10_000


class SingularCurveError(ValueError):
    """Discriminant vanishes (over Z, or mod p: bad reduction)."""


@dataclass(frozen=True)
class CurveOverFp:
    """Reduced Weierstrass curve y^2 = x^3 + ax + b over F_p, p > 3 prime."""

    a: int
    b: int
    p: int

    def __post_init__(self):
        p = self.p
        if p <= 3 or not is_prime(p):
            raise ValueError(f"p = {p} must be a prime > 3")
        object.__setattr__(self, "a", self.a % p)
        object.__setattr__(self, "b", self.b % p)
        if (4 * self.a**3 + 27 * self.b**2) % p == 0:
            raise SingularCurveError(f"curve ({self.a},{self.b}) is singular mod {p}")


@dataclass(frozen=True)
class PairRecord:
    """One admissible scanned prime p with partner q = #E_p(F_p)."""

    p: int
    q: int
    n_p: int
    n_q: int


@lru_cache(maxsize=None)
def quadratic_character(p: int) -> np.ndarray:
    """chi[x] = Legendre symbol (x/p) for 0 <= x < p, as int8."""
    chi = np.full(p, -1, dtype=np.int8)
    chi[0] = 0
    x = np.arange(1, p, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi.setflags(write=False)
    return chi


@lru_cache(maxsize=None)
def _x_cubed(p: int) -> np.ndarray:
    x = np.arange(p, dtype=np.int64)
    x3 = (x * x % p) * x % p
    x3.setflags(write=False)
    return x3


def point_count_exhaustive(a: int, b: int, p: int) -> int:
    """#E(F_p) = p + 1 + sum_x chi(x^3 + ax + b), including infinity."""
    chi = quadratic_character(p)
    x = np.arange(p, dtype=np.int64)
    vals = (_x_cubed(p) + a * x + b) % p
    return p + 1 + int(chi[vals].sum())


def point_counts_batch(p: int, a_vec: np.ndarray, b_vec: np.ndarray) -> np.ndarray:
    """Exhaustive counts for many curves over one F_p at once."""
    chi = quadratic_character(p)
    x = np.arange(p, dtype=np.int64)
    rhs = (_x_cubed(p)[None, :] + np.asarray(a_vec)[:, None] * x[None, :] + np.asarray(b_vec)[:, None]) % p
    return p + 1 + chi[rhs].astype(np.int64).sum(axis=1)


@lru_cache(maxsize=None)
def count_table(p: int) -> np.ndarray:
    """N[a, b] = #E_{a,b}(F_p) for every residue pair, singular entries 0."""
    chi = quadratic_character(p)
    x3 = _x_cubed(p)
    x = np.arange(p, dtype=np.int64)
    bcol = np.arange(p, dtype=np.int64)[None, :]
    table = np.empty((p, p), dtype=np.int64)
    for a in range(p):
        t = (x3 + a * x) % p
        table[a] = p + 1 + chi[(t[:, None] + bcol) % p].astype(np.int64).sum(axis=0)
    a_grid = np.arange(p, dtype=np.int64)[:, None]
    b_grid = np.arange(p, dtype=np.int64)[None, :]
    singular = (4 * (a_grid**3 % p) + 27 * (b_grid**2 % p)) % p == 0
    table[singular] = 0
    table.setflags(write=False)
    return table


# ---------------------------------------------------------------------------
# Group arithmetic (affine points, None = point at infinity).
# ---------------------------------------------------------------------------


def _ec_add(P, Q, a: int, p: int):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _ec_neg(P, p: int):
    return None if P is None else (P[0], (-P[1]) % p)


def _ec_mul(k: int, P, a: int, p: int):
    if k < 0:
        return _ec_mul(-k, _ec_neg(P, p), a, p)
    R = None
    while k:
        if k & 1:
            R = _ec_add(R, P, a, p)
        P = _ec_add(P, P, a, p)
        k >>= 1
    return R


def sqrt_mod(n: int, p: int) -> int:
    """One square root of n mod an odd prime p (n must be a QR); Tonelli-Shanks."""
    n %= p
    if n == 0:
        return 0
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    # p = 1 mod 4
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    c = pow(z, q, p)
    x = pow(n, (q + 1) // 2, p)
    t = pow(n, q, p)
    m = s
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        x = x * b % p
        t = t * b * b % p
        c = b * b % p
        m = i
    return x


def _random_point(a: int, b: int, p: int, rng: random.Random):
    while True:
        x = rng.randrange(p)
        ysq = (x * x % p * x + a * x + b) % p
        if ysq == 0:
            return (x, 0)
        if pow(ysq, (p - 1) // 2, p) == 1:
            return (x, sqrt_mod(ysq, p))


def _annihilating_orders(P, a: int, p: int) -> set[int]:
    """All n in the open Hasse window with n*P = O (BSGS in the window)."""
    w = math.isqrt(4 * p - 1)  # max |m| with m^2 < 4p
    R = _ec_neg(_ec_mul(p + 1, P, a, p), p)  # want m*P = R
    s = math.isqrt(2 * w) + 1
    baby = {}
    T = None
    for j in range(s):
        baby.setdefault(T, []).append(j)
        T = _ec_add(T, P, a, p)
    S = _ec_mul(s, P, a, p)
    hits = set()
    i_lo = -(w // s) - 1
    G = _ec_add(R, _ec_mul(-i_lo, _ec_neg(S, p), a, p), a, p)  # R - i_lo*S
    for i in range(i_lo, w // s + 2):
        # G = R - i*S; a baby match j gives m = i*s + j, a negated match -j.
        if G in baby:
            for j in baby[G]:
                m = i * s + j
                if m * m < 4 * p:
                    hits.add(p + 1 + m)
        Gn = _ec_neg(G, p)
        if Gn in baby and Gn != G:
            for j in baby[Gn]:
                m = i * s - j
                if m * m < 4 * p:
                    hits.add(p + 1 + m)
        G = _ec_add(G, S, a, p)
    return hits


def _cubic_roots_mod(a: int, b: int, p: int) -> int:
    x = np.arange(p, dtype=np.int64)
    return int(np.count_nonzero((_x_cubed(p) + a * x + b) % p == 0))


def _three_torsion_count(a: int, b: int, p: int) -> int:
    """#E[3](F_p) via the 3-division polynomial 3x^4 + 6ax^2 + 12bx - a^2."""
    x = np.arange(p, dtype=np.int64)
    x2 = x * x % p
    psi3 = (3 * x2 % p * x2 + 6 * a * x2 + 12 * b * x - a * a) % p
    roots = x[psi3 == 0]
    count = 1
    chi = quadratic_character(p)
    for x0 in roots.tolist():
        f = (x0 * x0 % p * x0 + a * x0 + b) % p
        if f == 0:
            count += 1
        elif chi[f] == 1:
            count += 2
    return count


def _torsion_filter(cands: set[int], a: int, b: int, p: int) -> set[int]:
    # Necessary structural conditions only; the true order always survives.
    r = _cubic_roots_mod(a, b, p)
    if r == 0:
        cands = {n for n in cands if n % 2 == 1}
    elif r == 1:
        cands = {n for n in cands if n % 2 == 0}
    else:
        cands = {n for n in cands if n % 4 == 0}
    if len(cands) > 1:
        t3 = _three_torsion_count(a, b, p)
        if t3 == 1:
            cands = {n for n in cands if n % 3 != 0}
        elif t3 == 3:
            cands = {n for n in cands if n % 3 == 0}
        else:
            cands = {n for n in cands if n % 9 == 0}
    return cands


def point_count_bsgs(a: int, b: int, p: int, max_rounds: int = 64) -> int:
    """#E(F_p) by BSGS order finding on E and its quadratic twist.

    Candidate orders are the common annihilators (in the Hasse window) of
    randomly sampled points; the twist constrains via N + N' = 2p + 2, and
    residual small-p ambiguity falls to 2-/3-torsion counts.  Sampling is
    deterministic in (a, b, p).
    """
    a %= p
    b %= p
    if (4 * a**3 + 27 * b**2) % p == 0:
        raise SingularCurveError(f"curve ({a},{b}) is singular mod {p}")
    seed = (a * 0x9E3779B97F4A7C15 + b * 0xC2B2AE3D27D4EB4F + p) & 0xFFFFFFFFFFFF
    rng = random.Random(seed)
    d = 2
    while pow(d, (p - 1) // 2, p) != p - 1:
        d += 1
    at, bt = a * d * d % p, b * pow(d, 3, p) % p
    cand: set[int] | None = None
    cand_tw: set[int] | None = None
    for rounds in range(max_rounds):
        A = _annihilating_orders(_random_point(a, b, p, rng), a, p)
        cand = A if cand is None else cand & A
        if len(cand) == 1:
            return next(iter(cand))
        At = _annihilating_orders(_random_point(at, bt, p, rng), at, p)
        cand_tw = At if cand_tw is None else cand_tw & At
        joint = cand & {2 * p + 2 - n for n in cand_tw}
        if len(joint) == 1:
            return next(iter(joint))
        if rounds >= 2:
            joint = _torsion_filter(joint, a, b, p)
            if len(joint) == 1:
                return next(iter(joint))
        if not joint:
            raise RuntimeError(f"order search lost all candidates for ({a},{b},{p})")
    raise RuntimeError(f"ambiguous group order for ({a},{b},{p}) after {max_rounds} rounds")


def point_count(curve: CurveOverFp) -> int:
    """#E_p(F_p); strictly inside the Hasse window p + 1 +- 2*sqrt(p)."""
    if curve.p < EXHAUSTIVE_LIMIT:
        return point_count_exhaustive(curve.a, curve.b, curve.p)
    return point_count_bsgs(curve.a, curve.b, curve.p)


def trace(curve: CurveOverFp) -> int:
    """Frobenius trace a_p = p + 1 - #E_p(F_p)."""
    return curve.p + 1 - point_count(curve)


def aut_order(curve: CurveOverFp) -> int:
    """#{u in F_p^* : u^4 a = a and u^6 b = b}, the twist stabilizer."""
    a, b, p = curve.a, curve.b, curve.p
    return sum(
        1
        for u in range(1, p)
        if pow(u, 4, p) * a % p == a and pow(u, 6, p) * b % p == b
    )


def quadratic_twist(curve: CurveOverFp) -> CurveOverFp:
    """A quadratic twist (a d^2, b d^3) by the least non-residue d."""
    p = curve.p
    d = 2
    while pow(d, (p - 1) // 2, p) != p - 1:
        d += 1
    return CurveOverFp(curve.a * d * d % p, curve.b * pow(d, 3, p) % p, p)


# ---------------------------------------------------------------------------
# Amicable-pair scanning.
# ---------------------------------------------------------------------------


def disc_core(a: int, b: int) -> int:
    """4a^3 + 27b^2; vanishes iff Delta(E_{a,b}) = 0, and for p > 3 shares
    exactly the odd prime divisors > 3 of the discriminant."""
    return 4 * a**3 + 27 * b**2


def _count_at(a: int, b: int, p: int, tables) -> int:
    if tables is not None and p in tables:
        return int(tables[p][a % p, b % p])
    return point_count(CurveOverFp(a, b, p))


def amicable_scan(a: int, b: int, x: int, tables=None) -> list[PairRecord]:
    """All primes p <= x forming an amicable event for E_{a,b}.

    A record is emitted for every prime p with 3 < p <= x, good reduction
    at p, q := #E_p(F_p) a prime > 3 distinct from p with good reduction,
    and #E_q(F_q) = p.  Both members of a pair are scanned primes in their
    own right, so a pair with both primes <= x yields two records; the
    partner q may exceed x.  `tables` may map p -> residue count table.
    """
    core = disc_core(a, b)
    if core == 0:
        raise SingularCurveError(f"E_({a},{b}) is singular over Q")
    records = []
    for p in primes_in(2, x) if x >= 2 else []:
        if p <= 3:
            continue
        if core % p == 0:
            continue
        n_p = _count_at(a, b, p, tables)
        q = n_p
        if q <= 3 or q == p or not is_prime(q) or core % q == 0:
            continue
        n_q = _count_at(a, b, q, tables)
        if n_q == p:
            records.append(PairRecord(p=p, q=q, n_p=n_p, n_q=n_q))
    return records


# ---------------------------------------------------------------------------
# Deuring census: sum of 1/#Aut over isomorphism classes with given trace.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def trace_census(p: int) -> dict[int, Fraction]:
    """For each trace t, the exact mass sum_{Ebar: a_p = t} 1/#Aut(Ebar).

    Isomorphism classes over F_p are the orbits of (a, b) under
    (a, b) ~ (u^4 a, u^6 b); the stabilizer order is #Aut.
    """
    if p <= 3 or not is_prime(p):
        raise ValueError("census needs a prime p > 3")
    table = count_table(p)
    u4 = [pow(u, 4, p) for u in range(1, p)]
    u6 = [pow(u, 6, p) for u in range(1, p)]
    seen = np.zeros((p, p), dtype=bool)
    census: dict[int, Fraction] = {}
    for a in range(p):
        for b in range(p):
            if seen[a, b]:
                continue
            seen[a, b] = True
            if table[a, b] == 0:  # singular
                continue
            orbit = {(v4 * a % p, v6 * b % p) for v4, v6 in zip(u4, u6)}
            for oa, ob in orbit:
                seen[oa, ob] = True
            t = p + 1 - int(table[a, b])
            census[t] = census.get(t, Fraction(0)) + Fraction(1, (p - 1) // len(orbit))
    return census


def isogeny_class_census(p: int, t: int) -> Fraction:
    """Mass of the trace-t isogeny classes over F_p, exact rational."""
    if t * t >= 4 * p:
        raise ValueError(f"need t^2 < 4p, got t={t}, p={p}")
    return trace_census(p).get(t, Fraction(0))


# ---------------------------------------------------------------------------
# Append-only a_p cache (CSV rows: a,b,p,a_p).
# ---------------------------------------------------------------------------


class ApCache:
    """Trace cache keyed by integer coefficients (a, b) and prime p.

    Duplicate rows with identical payloads are tolerated on read;
    conflicting duplicates are an error.  Appends go through a single
    writer handle and are flushed per batch.
    """

    def __init__(self, path: str):
        self.path = path
        self._data: dict[tuple[int, int, int], int] = {}
        if os.path.exists(path):
            with open(path, newline="") as fh:
                for row in csv.reader(fh):
                    if not row:
                        continue
                    a, b, p, ap = (int(v) for v in row)
                    key = (a, b, p)
                    if key in self._data and self._data[key] != ap:
                        raise ValueError(f"conflicting cache rows for {key}")
                    self._data[key] = ap

    def get(self, a: int, b: int, p: int) -> int | None:
        return self._data.get((a, b, p))

    def put_many(self, rows: list[tuple[int, int, int, int]]) -> None:
        if not rows:
            return
        with open(self.path, "a", newline="") as fh:
            writer = csv.writer(fh)
            for a, b, p, ap in rows:
                self._data[(a, b, p)] = ap
                writer.writerow([a, b, p, ap])
            fh.flush()

    def __len__(self) -> int:
        return len(self._data)
