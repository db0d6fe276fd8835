"""robincheck: rigorous Robin-inequality verification and certification.

Subpackages:
  intervals      directed-rounding interval arithmetic (MPFR backend)
  primes         segmented sieve, theta sums, divisor-sum windows
  factorization  prime-exponent representation of (possibly huge) integers
  robin          exact sigma/rho, direct RI checks, range verification
  mertens        prime-harmonic sums log(p/(p-1)) and their remainder
  criterion      exponent-threshold certification for astronomically large N
  extremal       colossally-abundant-style stress inputs
  cli            command-line interface and report serialization
"""

from .intervals import (
    Certainty,
    IntervalReal,
    StraddlesInteger,
    certified_compare,
    euler_gamma,
    make_interval,
)
from .factorization import Factorization
from .robin import RiVerdict, check_ri, rho_exact, sigma_exact, verify_range
from .mertens import MertensRecord, mertens_sum, remainder
from .criterion import CertificateReport, build_table, certify, compute_T

__version__ = "0.1.0"

__all__ = [
    "Certainty",
    "CertificateReport",
    "Factorization",
    "IntervalReal",
    "MertensRecord",
    "RiVerdict",
    "StraddlesInteger",
    "build_table",
    "certified_compare",
    "certify",
    "check_ri",
    "compute_T",
    "euler_gamma",
    "make_interval",
    "mertens_sum",
    "remainder",
    "rho_exact",
    "sigma_exact",
    "verify_range",
]
