"""Complex conditional probabilities and changes of representation.

``p(c|a,b) = <b|c><c|a> / <b|a>`` maps a joint distribution over ``(A, B)``
onto one over ``(C, B)``.  The map is reversible: the kernels compose to
the identity, ``sum_c p(a'|c,b) p(c|a,b) = delta(a, a')``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatch, DimensionMismatch
from .hilbert import Basis, overlaps, require_overlap
from .kdcore import KDDistribution

__all__ = [
    "ConditionalKernel", "conditional_kernel", "transform_kd", "replace_second",
    "determinism_matrix", "verify_determinism", "product_terms",
]


@dataclass(frozen=True, eq=False)
class ConditionalKernel:
    """Dense tensor ``values[c, a, b] = p(c|a,b)``."""

    basis_c: Basis
    basis_a: Basis
    basis_b: Basis
    values: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis_a.dim

    def completeness_error(self) -> float:
        """max over (a, b) of |sum_c p(c|a,b) - 1|."""
        return float(np.max(np.abs(self.values.sum(axis=0) - 1)))


def conditional_kernel(C: Basis, A: Basis, B: Basis) -> ConditionalKernel:
    if not (C.dim == A.dim == B.dim):
        raise DimensionMismatch(f"basis dims {C.dim}, {A.dim}, {B.dim}")
    O_ab = require_overlap(A, B)           # <a|b>
    O_cb = overlaps(C, B)                  # <c|b>
    O_ca = overlaps(C, A)                  # <c|a>
    # <b|c><c|a>/<b|a>
    vals = O_cb.conj()[:, None, :] * O_ca[:, :, None] / O_ab.conj()[None, :, :]
    vals.setflags(write=False)
    return ConditionalKernel(C, A, B, vals)


def _check_same(expected: Basis, got: Basis, role: str):
    if not expected.same_as(got):
        raise BasisMismatch(f"{role}: kernel has {expected!r}, distribution has {got!r}")


def transform_kd(kd: KDDistribution, kernel: ConditionalKernel) -> KDDistribution:
    """Replace the first slot: ``rho(c,b) = sum_a p(c|a,b) rho(a,b)``."""
    _check_same(kernel.basis_a, kd.basis_a, "first basis")
    _check_same(kernel.basis_b, kd.basis_b, "second basis")
    out = np.einsum("cab,ab->cb", kernel.values, kd.values)
    return KDDistribution(kernel.basis_c, kd.basis_b, out)


def replace_second(kd: KDDistribution, kernel: ConditionalKernel) -> KDDistribution:
    """Replace the second slot: ``rho(a,c) = sum_b p(c|a,b) rho(a,b)``.

    This is the form used to move a two-time representation forward in
    time, where the first outcome is held fixed.
    """
    _check_same(kernel.basis_a, kd.basis_a, "first basis")
    _check_same(kernel.basis_b, kd.basis_b, "second basis")
    out = np.einsum("cab,ab->ac", kernel.values, kd.values)
    return KDDistribution(kd.basis_a, kernel.basis_c, out)


def determinism_matrix(A: Basis, B: Basis, C: Basis) -> np.ndarray:
    """``D[a', a, b] = sum_c p(a'|c,b) p(c|a,b)``."""
    forward = conditional_kernel(C, A, B).values    # [c, a, b]
    backward = conditional_kernel(A, C, B).values   # [a', c, b]
    return np.einsum("xcb,cab->xab", backward, forward)


def verify_determinism(A: Basis, B: Basis, C: Basis) -> float:
    """Largest deviation of the composed kernels from ``delta(a, a')``.

    Only ``<b|a>`` and ``<b|c>`` appear in denominators, so only those
    overlaps are required to be non-zero; ``C = A`` is allowed.
    """
    D = determinism_matrix(A, B, C)
    d = A.dim
    return float(np.max(np.abs(D - np.eye(d)[:, :, None])))


def product_terms(A: Basis, B: Basis, C: Basis, a: int, a2: int, b: int) -> np.ndarray:
    """Per-``c`` contributions ``p(a2|c,b) p(c|a,b)``; they sum to ``delta(a, a2)``."""
    forward = conditional_kernel(C, A, B).values
    backward = conditional_kernel(A, C, B).values
    return backward[a2, :, b] * forward[:, a, b]
