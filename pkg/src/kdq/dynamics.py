"""Time evolution as a change of representation.

A fixed state ``rho`` is described by joint distributions over measurement
bases referring to different times.  The measurement basis for time ``t``
is ``|a(t)> = U(t)^dag |a>`` with ``U(t) = exp(-iHt)``, so that
``<a(t)|rho|a(t)>`` is the Born probability of outcome ``a`` measured at
time ``t`` on a state prepared as ``rho`` at ``t = 0``.

The conditional Schroedinger equation is the one exception: it tracks the
evolved vector ``U(t)|a>`` (i.e. the timed basis at ``-t``), which is the
orientation in which its right-hand side carries ``-i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .determinism import conditional_kernel, replace_second
from .errors import DimensionMismatch
from .hilbert import (
    Basis,
    density_operator,
    energy_basis,
    hermitian_operator,
    require_overlap,
    unitary,
)
from .kdcore import KDDistribution, kd_distribution

__all__ = [
    "TimedBasis", "PathKernel", "timed_basis", "two_time_kd", "three_time_step",
    "path_kernel", "direct_path_kernel", "conditional_vector",
    "schrodinger_conditional_check", "rate_via_imaginary_energy", "rate_via_commutator",
]


@dataclass(frozen=True, eq=False)
class TimedBasis:
    base: Basis
    H: np.ndarray
    t: float
    basis: Basis

    @property
    def vectors(self):
        return self.basis.vectors


def timed_basis(A: Basis, H, t: float) -> TimedBasis:
    H = hermitian_operator(H)
    if H.shape[0] != A.dim:
        raise DimensionMismatch(f"H is {H.shape[0]}-dimensional, basis is {A.dim}-dimensional")
    U = unitary(H, t)
    return TimedBasis(A, H, float(t), Basis(f"{A.label}@{t:g}", U.conj().T @ A.vectors))


def two_time_kd(rho, A: Basis, H, t1: float, t2: float) -> KDDistribution:
    """Joint distribution of outcome ``a1`` at ``t1`` and ``a2`` at ``t2``.

    Raises NearOrthogonalOverlap when the evolution does not mix the two
    timed bases (``t1 == t2``, or ``H`` diagonal in ``A``).
    """
    rho = density_operator(rho)
    B1 = timed_basis(A, H, t1).basis
    B2 = timed_basis(A, H, t2).basis
    require_overlap(B1, B2)
    kd = kd_distribution(rho, B1, B2)
    return KDDistribution(B1, B2, kd.values, meta={"times": [float(t1), float(t2)]})


def three_time_step(kd12: KDDistribution, A: Basis, H, t3: float) -> KDDistribution:
    """Move the second time of a two-time distribution to ``t3``.

    ``rho(a1,a3) = sum_a2 p(a3|a1,a2) rho(a1,a2)``, evaluated from the joint
    distribution alone.
    """
    B3 = timed_basis(A, H, t3).basis
    require_overlap(kd12.basis_a, B3)
    kernel = conditional_kernel(B3, kd12.basis_a, kd12.basis_b)
    out = replace_second(kd12, kernel)
    times = list((kd12.meta or {}).get("times", [None, None]))
    return KDDistribution(out.basis_a, out.basis_b, out.values,
                          meta={"times": [times[0], float(t3)]})


@dataclass(frozen=True, eq=False)
class PathKernel:
    """``values[an, a1, a2] = p(an | a1, a2)`` over the timed bases."""

    times: tuple
    basis: Basis
    H: np.ndarray
    values: np.ndarray

    def normalization_error(self) -> float:
        return float(np.max(np.abs(self.values.sum(axis=0) - 1)))


def _timed(A, H, times):
    return [timed_basis(A, H, t).basis for t in times]


def path_kernel(A: Basis, H, times) -> PathKernel:
    """Chain of single-step conditionals summed over intermediate outcomes.

    ``p(an|a1,a2) = sum p(an|a1,a_{n-1}) ... p(a4|a1,a3) p(a3|a1,a2)``.
    Every step divides by ``<a_k(t_k)|a1(t_1)>`` for ``k = 2 .. n-1``;
    those overlaps must be non-zero.
    """
    times = tuple(float(t) for t in times)
    if len(times) < 3:
        raise ValueError("a path needs at least three times")
    H = hermitian_operator(H)
    bases = _timed(A, H, times)
    first = bases[0]
    total = conditional_kernel(bases[2], first, bases[1]).values   # [a3, a1, a2]
    for k in range(2, len(times) - 1):
        step = conditional_kernel(bases[k + 1], first, bases[k]).values  # [a_{k+1}, a1, a_k]
        total = np.einsum("nak,kab->nab", step, total)
    total.setflags(write=False)
    return PathKernel(times, A, H, total)


def direct_path_kernel(A: Basis, H, times) -> PathKernel:
    """Single conditional ``p(an|a1,a2)`` between first, second and last time."""
    times = tuple(float(t) for t in times)
    H = hermitian_operator(H)
    b1, b2, bn = _timed(A, H, (times[0], times[1], times[-1]))
    return PathKernel(times, A, H, conditional_kernel(bn, b1, b2).values)


def conditional_vector(A: Basis, H, n: int, a: int, t: float) -> np.ndarray:
    """Rescaled conditional ``q(a') = p(a(t)|n,a') <a'|n>`` as a vector over ``a'``.

    ``|a(t)> = U(t)|a>`` and ``|n>`` is the n-th energy eigenstate.  The
    product is evaluated in its cancelled form ``<a'|a(t)><a(t)|n>``, which
    stays finite where ``<a'|n>`` vanishes.
    """
    _, E = energy_basis(H)
    at = unitary(H, t) @ A.state(a)
    return (A.vectors.conj().T @ at) * np.vdot(at, E.state(n))


def schrodinger_conditional_check(A: Basis, H, n: int, a: int, t: float, dt: float) -> float:
    """Residual of ``dq/dt = -i sum_a'' <a'|(H - E_n)|a''> q(a'')``.

    The time derivative is a central difference with step ``dt``; the
    residual is the largest component difference and falls off as ``dt**2``.
    """
    if not 0 < dt <= 1e-2:
        raise ValueError(f"dt must lie in (0, 1e-2], got {dt!r}")
    H = hermitian_operator(H)
    energies, _ = energy_basis(H)
    lhs = (conditional_vector(A, H, n, a, t + dt) - conditional_vector(A, H, n, a, t - dt)) / (2 * dt)
    H_a = A.vectors.conj().T @ H @ A.vectors
    rhs = -1j * (H_a - energies[n] * np.eye(A.dim)) @ conditional_vector(A, H, n, a, t)
    return float(np.max(np.abs(lhs - rhs)))


def rate_via_imaginary_energy(rho, A: Basis, H, a: int) -> float:
    """``d/dt <a|rho|a> = sum_n 2 E_n Im rho(E_n, a)``.

    ``rho(E_n, a) = <a|n><n|rho|a>`` is the joint distribution of energy and
    ``A``.  No overlap is divided by, so no overlap condition applies.
    """
    rho = density_operator(rho)
    H = hermitian_operator(H)
    if rho.shape != H.shape or A.dim != H.shape[0]:
        raise DimensionMismatch("state, Hamiltonian and basis dimensions differ")
    energies, E = energy_basis(H)
    va = A.state(a)
    joint = (E.vectors.conj().T @ va).conj() * (E.vectors.conj().T @ rho @ va)
    return float(np.sum(2 * energies * joint.imag))


def rate_via_commutator(rho, A: Basis, H, a: int) -> float:
    """``-i (<a|H rho|a> - <a|rho H|a>)``."""
    rho = density_operator(rho)
    H = hermitian_operator(H)
    va = A.state(a)
    val = -1j * (np.vdot(va, H @ rho @ va) - np.vdot(va, rho @ H @ va))
    return float(val.real)
