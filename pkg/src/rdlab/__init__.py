"""Rényi-divergence tools for classical-quantum and entanglement-assisted coding.

Submodules
----------
linalg      Hermitian operators, matrix functions, partial traces.
quotient    Logarithmic and symmetric matrix quotients.
renyi       Petz, sandwiched and measured Rényi divergences.
channels    cq channels, mutual informations and divergence radii.
coding      Pretty good measurements and random-coding simulation.
ea          Quantum channels and position-based entanglement-assisted coding.
exponents   Error-exponent curves and CSV output.
estimators  scikit-learn style wrappers.
"""

__version__ = "0.1.0"

from .channels import (
    CQChannel,
    channel_mutual_info,
    divergence_radius,
    joint_state,
    mutual_info,
)
from .coding import Codebook, DecoderSpec, build_quotient_pgm, build_standard_pgm, simulate, theorem1_rhs
from .ea import QuantumChannel, ea_channel_mutual_info, position_based_error, theorem3_rhs
from .estimators import ChannelMutualInformation, ErrorExponentCurve, QuotientPGM, RenyiRadius
from .exceptions import ConvergenceError, RdlabError
from .linalg import HermitianOperator, partial_trace, random_density_matrix, tensor
from .quotient import log_quotient, standard_division
from .renyi import divergence

__all__ = [
    "CQChannel",
    "ChannelMutualInformation",
    "Codebook",
    "ConvergenceError",
    "DecoderSpec",
    "ErrorExponentCurve",
    "HermitianOperator",
    "QuantumChannel",
    "QuotientPGM",
    "RdlabError",
    "RenyiRadius",
    "build_quotient_pgm",
    "build_standard_pgm",
    "channel_mutual_info",
    "divergence",
    "divergence_radius",
    "ea_channel_mutual_info",
    "joint_state",
    "log_quotient",
    "mutual_info",
    "partial_trace",
    "position_based_error",
    "random_density_matrix",
    "simulate",
    "standard_division",
    "tensor",
    "theorem1_rhs",
    "theorem3_rhs",
]
