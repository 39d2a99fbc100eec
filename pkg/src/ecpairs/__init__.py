"""Amicable-pair statistics for elliptic curves over prime fields.

Exact class-number machinery (binary quadratic forms, Hurwitz-Kronecker
numbers), local densities with brute-force oracles, Euler-product
constants, GL2 matrix-pair masses, and the experiment harness that runs
the headline asymptotics as desk-scale statistical checks.
"""

from .arith import GuardError, PrimeSieve, Rational, d_disc, delta_count, kappa, kronecker, primes_in
from .classno import ClassData, QuadForm, class_number, hurwitz, hurwitz_pair_sum, l_from_class_number, l_truncated
from .curves import (
    ApCache,
    CurveOverFp,
    PairRecord,
    SingularCurveError,
    amicable_scan,
    aut_order,
    isogeny_class_census,
    point_count,
    trace,
)
from .gl2 import TraceDetHistogram, dks_partial_product, gl2_order, m_count, trace_det_histogram
from .localdens import (
    LocalParams,
    PairDensityParams,
    TruncatedConstant,
    c2_of_p,
    c_global,
    cp_ell_bruteforce,
    cp_ell_formula,
    cpf_bruteforce,
    cpf_formula,
    f_factors,
    giri_average,
    vanishing_identity,
)

__version__ = "0.1.0"
