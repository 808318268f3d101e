"""Kirkwood-Dirac joint probabilities and their operator algebra.

For two bases ``A = {|a>}`` and ``B = {|b>}`` the complex joint probability
of a state ``rho`` is ``rho(a, b) = <b|a><a|rho|b>``.  The operators
``Lambda(a, b) = |a><b| / <b|a>`` form an orthogonal operator basis in which
these numbers are the expansion coefficients of ``rho``, and the weak values
``<b|M|a> / <b|a>`` are the expansion coefficients of an observable ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidKDDistribution, NearOrthogonalOverlap
from .hilbert import (
    ETA,
    TOL,
    Basis,
    density_operator,
    operator,
    overlaps,
    require_overlap,
)

__all__ = [
    "KDDistribution", "kd_distribution", "lambda_operator", "reconstruct_density",
    "weak_value", "weak_value_table", "expectation",
]


@dataclass(frozen=True, eq=False)
class KDDistribution:
    """Complex joint distribution ``values[a, b]`` over a basis pair.

    The source state is not stored; the values alone determine it.
    On construction the values must sum to one and both marginals must be
    real and non-negative (they are Born probabilities).
    """

    basis_a: Basis
    basis_b: Basis
    values: np.ndarray
    meta: dict | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        d = self.basis_a.dim
        if self.basis_b.dim != d or v.shape != (d, d):
            raise DimensionMismatch(
                f"values shape {v.shape} does not match bases ({self.basis_a.dim}, {self.basis_b.dim})"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidKDDistribution("non-finite KD values")
        total = v.sum()
        if abs(total - 1) > TOL:
            raise InvalidKDDistribution(f"KD values sum to {total!r}")
        for name, marg in (("row", v.sum(axis=1)), ("column", v.sum(axis=0))):
            if np.max(np.abs(marg.imag)) > TOL or marg.real.min() < -TOL:
                raise InvalidKDDistribution(f"{name} marginals are not probabilities: {marg}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.basis_a.dim

    def row_marginals(self) -> np.ndarray:
        """Born probabilities of the outcomes ``a``."""
        return self.values.sum(axis=1).real

    def column_marginals(self) -> np.ndarray:
        """Born probabilities of the outcomes ``b``."""
        return self.values.sum(axis=0).real


def kd_distribution(rho, A: Basis, B: Basis) -> KDDistribution:
    """Kirkwood-Dirac distribution ``rho(a,b) = <b|a><a|rho|b>``.

    Parameters
    ----------
    rho : array_like
        Density operator, or a pure state vector (promoted to ``|v><v|``).
    A, B : Basis
        The basis pair; ``A`` indexes rows and ``B`` columns.
    """
    rho = density_operator(rho)
    if rho.shape[0] != A.dim:
        raise DimensionMismatch(f"state dim {rho.shape[0]} vs basis dim {A.dim}")
    O = overlaps(A, B)  # <a|b>
    values = O.conj() * (A.vectors.conj().T @ rho @ B.vectors)
    return KDDistribution(A, B, values)


def _overlap_or_raise(a, b, A, B):
    ov = np.vdot(B.state(b), A.state(a))
    if abs(ov) < ETA:
        raise NearOrthogonalOverlap(f"|<{B.label}{b}|{A.label}{a}>| = {abs(ov):.3e}")
    return ov


def lambda_operator(a: int, b: int, A: Basis, B: Basis) -> np.ndarray:
    """``|a><b| / <b|a>``; trace one by construction."""
    ov = _overlap_or_raise(a, b, A, B)
    L = np.outer(A.state(a), B.state(b).conj()) / ov
    L.setflags(write=False)
    return L


def reconstruct_density(kd: KDDistribution) -> np.ndarray:
    """Invert :func:`kd_distribution`: ``rho = sum_ab rho(a,b) Lambda(a,b)``."""
    A, B = kd.basis_a, kd.basis_b
    O = require_overlap(A, B)
    coeff = kd.values / O.conj()
    rho = A.vectors @ coeff @ B.vectors.conj().T
    return density_operator(rho)


def weak_value(M, a: int, b: int, A: Basis, B: Basis) -> complex:
    """``<b|M|a> / <b|a>`` for preparation ``a`` and post-selection ``b``."""
    M = operator(M)
    if M.shape[0] != A.dim:
        raise DimensionMismatch(f"operator dim {M.shape[0]} vs basis dim {A.dim}")
    ov = _overlap_or_raise(a, b, A, B)
    return complex(np.vdot(B.state(b), M @ A.state(a)) / ov)


def weak_value_table(M, A: Basis, B: Basis) -> np.ndarray:
    """All weak values ``W[a, b] = <b|M|a> / <b|a>``."""
    M = operator(M)
    if M.shape[0] != A.dim:
        raise DimensionMismatch(f"operator dim {M.shape[0]} vs basis dim {A.dim}")
    O = require_overlap(A, B)
    num = (B.vectors.conj().T @ M @ A.vectors).T  # [a, b] = <b|M|a>
    return num / O.conj()


def expectation(kd: KDDistribution, M) -> complex:
    """Average weak value ``sum_ab rho(a,b) <b|M|a>/<b|a>``.

    Returned complex as computed; for Hermitian ``M`` the imaginary part is
    rounding noise.
    """
    W = weak_value_table(M, kd.basis_a, kd.basis_b)
    return complex(np.sum(kd.values * W))
