"""Kirkwood-Dirac joint quasi-probabilities, complex conditionals and their
classical limit."""

from .errors import KDQError
from .hilbert import (
    Basis,
    computational_basis,
    energy_basis,
    fourier_basis,
    product_basis,
    qubit_basis,
)
from .kdcore import KDDistribution, expectation, kd_distribution, reconstruct_density, weak_value
from .determinism import conditional_kernel, transform_kd, verify_determinism

__all__ = [
    "KDQError", "Basis", "computational_basis", "energy_basis", "fourier_basis",
    "product_basis", "qubit_basis", "KDDistribution", "expectation", "kd_distribution",
    "reconstruct_density", "weak_value", "conditional_kernel", "transform_kd",
    "verify_determinism",
]

__version__ = "0.1.0"
