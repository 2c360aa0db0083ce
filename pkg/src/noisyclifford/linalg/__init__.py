"""Dense operator algebra and quantum channels."""

from .channels import (
    NaturalRep,
    Picture,
    QuantumChannel,
    apply_channel,
    build_noise_channel,
    natural_representation,
)
from .operators import (
    DenseOperator,
    kron,
    operator_schmidt,
    partial_trace,
    permutation_operator,
)

__all__ = [
    "DenseOperator",
    "NaturalRep",
    "Picture",
    "QuantumChannel",
    "apply_channel",
    "build_noise_channel",
    "kron",
    "natural_representation",
    "operator_schmidt",
    "partial_trace",
    "permutation_operator",
]
