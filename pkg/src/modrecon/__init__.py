"""Error tolerant rational reconstruction and modular ideal reconstruction."""

from .arith import PrimeStream, Residue, crt_combine, crt_pair, is_prime, next_prime, rational_mod
from .lift import (
    LatticeVector,
    LiftResult,
    cn_membership,
    diagnose_bad_factors,
    error_tolerant_lift,
    farey_preimage,
    gaussian_reduce,
)
from .modframe import (
    BadPrimeType,
    FaultPlan,
    ModularJob,
    PrimeRejected,
    RunConfig,
    groebner_job,
    linear_solve_job,
    run_job,
)
from .poly import GroebnerBasis, MonomialOrdering, Polynomial, Ring, buchberger
from .reconstruct import ModularOracle, TerminationPolicy, reconstruct_rational

__version__ = "0.1.0"
