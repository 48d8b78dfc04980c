"""Asymptotics of entry growth in products of nonnegative 2x2 matrices.

The entries of M_{k+1}...M_{k+n} for a convergent matrix sequence grow like
powers of the limit spectral radius; normalizing by tails of an associated
continued fraction yields finite limits with computable constants.  This
package computes those tails with certified truncation error, the limit
constants, and diagnostic tables, all cross-checked against exact rational
oracles.
"""

from .asymptotics import (
    RatioDiagnostics,
    ScaledEntry,
    cf_from_sequence,
    m_to_a_entry_identity,
    phi,
    product_entry,
    psi,
    ratio_diagnostics,
    sigma,
    spectral_radius_ratio,
)
from .contfrac import (
    CFCoeffs,
    TailEstimate,
    approximant,
    contraction_rate,
    limit_tail,
    seidel_stern_check,
    tail,
    tails_range,
)
from .errors import (
    CfmpError,
    ConvergenceError,
    DegenerateIndexError,
    DegenerateSpectrumError,
    DomainError,
    NegativeDiscriminantError,
    NonContractiveError,
    ParseError,
    SingularApproximantError,
    ValidationError,
)
from .mat2 import (
    CompanionMat,
    Eigenpair,
    LowerUnitriangular,
    Mat2,
    ValidationReport,
    companion,
    eigenvalues,
    lambda_of,
    validate_limit_matrix,
)
from .sequences import (
    MatrixSequence,
    constant_sequence,
    detect_k0,
    detect_stable_start,
    load_sequence,
    loads_sequence,
    perturbed_sequence,
    sequence_from_rows,
)

__version__ = "0.1.0"

__all__ = [
    "CFCoeffs",
    "CfmpError",
    "CompanionMat",
    "ConvergenceError",
    "DegenerateIndexError",
    "DegenerateSpectrumError",
    "DomainError",
    "Eigenpair",
    "LowerUnitriangular",
    "Mat2",
    "MatrixSequence",
    "NegativeDiscriminantError",
    "NonContractiveError",
    "ParseError",
    "RatioDiagnostics",
    "ScaledEntry",
    "SingularApproximantError",
    "TailEstimate",
    "ValidationError",
    "ValidationReport",
    "approximant",
    "cf_from_sequence",
    "companion",
    "constant_sequence",
    "contraction_rate",
    "detect_k0",
    "detect_stable_start",
    "eigenvalues",
    "lambda_of",
    "limit_tail",
    "load_sequence",
    "loads_sequence",
    "m_to_a_entry_identity",
    "perturbed_sequence",
    "phi",
    "product_entry",
    "psi",
    "ratio_diagnostics",
    "seidel_stern_check",
    "sequence_from_rows",
    "sigma",
    "spectral_radius_ratio",
    "tail",
    "tails_range",
    "validate_limit_matrix",
    "__version__",
]
