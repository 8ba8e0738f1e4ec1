from .sieve import primes_up_to, prime_power_index, von_mangoldt_sieve
from .tables import (
    BudgetError,
    CoefficientTable,
    PrimeCoefficientTable,
    lambda_table,
    local_coefficients,
    local_inverse_coefficients,
    orthogonality_sum,
    prime_coefficients,
    satake_power,
    satake_power_table,
)
from .tau import TauExpansion, ramanujan_tau

__all__ = [
    "BudgetError",
    "CoefficientTable",
    "PrimeCoefficientTable",
    "TauExpansion",
    "lambda_table",
    "local_coefficients",
    "local_inverse_coefficients",
    "orthogonality_sum",
    "prime_coefficients",
    "prime_power_index",
    "primes_up_to",
    "ramanujan_tau",
    "satake_power",
    "satake_power_table",
    "von_mangoldt_sieve",
]
