"""Dense complex linear algebra on finite-dimensional Hilbert spaces.

States, operators and bases are plain ``numpy`` arrays (or the small
:class:`Basis` container) that are validated on construction and then
frozen (``writeable=False``).  Constructors reject invalid data instead
of repairing it.

Units: hbar = 1 everywhere.  Times are measured in units of 1/energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidDimension,
    NearOrthogonalOverlap,
    NonFinite,
    NotDensityOperator,
    NotHermitian,
    NotNormalized,
    NotOrthonormal,
)

#: Validation tolerance for norms, traces, Hermiticity and orthonormality.
TOL = 1e-10
#: Overlaps |<b|a>| below this value are treated as orthogonal.
ETA = 1e-9
#: Reduced Planck constant.  Fixed by convention, not a parameter.
HBAR = 1.0

__all__ = [
    "TOL", "ETA", "HBAR", "Basis",
    "state_vector", "operator", "hermitian_operator", "density_operator",
    "is_hermitian", "inner", "overlaps", "require_overlap",
    "computational_basis", "fourier_basis", "qubit_basis", "product_basis",
    "energy_basis", "unitary", "evolve",
    "random_unitary", "random_basis", "random_density", "random_hermitian",
    "random_state",
]


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise NonFinite("non-finite entries")
    arr.setflags(write=False)
    return arr


def state_vector(amps, tol=TOL):
    """Validated, normalized, read-only state vector."""
    v = _frozen(amps)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"state must be a non-empty 1-D array, got shape {v.shape}")
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > tol:
        raise NotNormalized(f"|v|^2 = {norm2!r}")
    return v


def operator(m):
    M = _frozen(m)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionMismatch(f"operator must be square, got shape {M.shape}")
    return M


def is_hermitian(M, tol=TOL):
    M = np.asarray(M)
    return M.ndim == 2 and M.shape[0] == M.shape[1] and np.max(np.abs(M - M.conj().T), initial=0.0) <= tol


def hermitian_operator(m, tol=TOL):
    M = operator(m)
    if not is_hermitian(M, tol):
        raise NotHermitian(f"max |H - H^dag| = {np.max(np.abs(M - M.conj().T)):.3e}")
    return M


def density_operator(m, tol=TOL):
    """Validate a density operator.

    A 1-D input is taken as a pure state and promoted to ``|v><v|``.
    """
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        v = state_vector(arr, tol)
        return _frozen(np.outer(v, v.conj()))
    M = operator(arr)
    if not is_hermitian(M, tol):
        raise NotDensityOperator("density operator is not Hermitian")
    tr = np.trace(M)
    if abs(tr - 1.0) > tol:
        raise NotDensityOperator(f"trace = {tr!r}")
    lmin = np.linalg.eigvalsh(M).min()
    if lmin < -tol:
        raise NotDensityOperator(f"negative eigenvalue {lmin!r}")
    return M


def inner(u, v):
    """<u|v>, conjugate-linear in the first argument."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise DimensionMismatch(f"{u.shape} vs {v.shape}")
    return complex(np.vdot(u, v))


@dataclass(frozen=True, eq=False)
class Basis:
    """Ordered orthonormal basis.

    ``vectors[:, k]`` holds the amplitudes of the k-th basis state in the
    computational basis, so ``vectors`` is the unitary whose columns are the
    basis states.
    """

    label: str
    vectors: np.ndarray

    def __post_init__(self):
        U = operator(self.vectors)
        gram = U.conj().T @ U
        err = np.max(np.abs(gram - np.eye(U.shape[0])))
        if err > TOL:
            raise NotOrthonormal(f"basis {self.label!r}: max |<i|j> - delta| = {err:.3e}")
        object.__setattr__(self, "vectors", U)

    @classmethod
    def from_states(cls, label, states):
        """Build from a sequence of state vectors (one per row)."""
        S = np.asarray(states, dtype=complex)
        if S.ndim != 2:
            raise DimensionMismatch("states must be a list of equal-length vectors")
        return cls(label, S.T)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def states(self) -> np.ndarray:
        """Basis states as rows."""
        return self.vectors.T

    def state(self, k: int) -> np.ndarray:
        return self.vectors[:, k]

    def same_as(self, other: "Basis", tol=TOL) -> bool:
        """Equal label and entrywise equal states."""
        return (
            self.label == other.label
            and self.dim == other.dim
            and np.max(np.abs(self.vectors - other.vectors)) <= tol
        )

    def __repr__(self):
        return f"Basis(label={self.label!r}, dim={self.dim})"


def overlaps(A: Basis, B: Basis) -> np.ndarray:
    """Matrix of overlaps ``O[a, b] = <a|b>``."""
    if A.dim != B.dim:
        raise DimensionMismatch(f"basis dims {A.dim} and {B.dim}")
    return A.vectors.conj().T @ B.vectors


def require_overlap(A: Basis, B: Basis, eta=ETA):
    """Return ``overlaps(A, B)``; raise if any |<a|b>| < eta."""
    O = overlaps(A, B)
    m = np.abs(O).min()
    if m < eta:
        a, b = np.unravel_index(np.argmin(np.abs(O)), O.shape)
        raise NearOrthogonalOverlap(
            f"|<{A.label}{a}|{B.label}{b}>| = {m:.3e} < {eta:g}"
        )
    return O


def computational_basis(d: int) -> Basis:
    if int(d) != d or d < 2:
        raise InvalidDimension(f"d must be an integer >= 2, got {d!r}")
    return Basis("Z", np.eye(int(d), dtype=complex))


def fourier_basis(d: int) -> Basis:
    """Discrete Fourier basis, ``<a|b> = exp(2 pi i a b / d) / sqrt(d)``."""
    if int(d) != d or d < 2:
        raise InvalidDimension(f"d must be an integer >= 2, got {d!r}")
    k = np.arange(int(d))
    return Basis("F", np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d))


_S = 1 / np.sqrt(2)
_QUBIT = {
    "Z": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[_S, _S], [_S, -_S]], dtype=complex),
    "Y": np.array([[_S, _S], [1j * _S, -1j * _S]], dtype=complex),
}


def qubit_basis(axis: str) -> Basis:
    """Pauli eigenbasis: Z = {|0>,|1>}, X = {|+>,|->}, Y = {|y+>,|y->}."""
    try:
        return Basis(axis.upper(), _QUBIT[axis.upper()].copy())
    except KeyError:
        raise ValueError(f"unknown qubit axis {axis!r}") from None


def product_basis(axis: str, n: int) -> Basis:
    """n-fold tensor power of a qubit Pauli basis (dimension 2**n)."""
    U = np.ones((1, 1), dtype=complex)
    q = qubit_basis(axis).vectors
    for _ in range(n):
        U = np.kron(U, q)
    return Basis(f"{axis.upper()}^{n}", U)


def energy_basis(H, degeneracy_tol=1e-9):
    """Deterministic eigenbasis of a Hermitian operator.

    Eigenvalues are sorted ascending.  Each eigenspace (a degenerate block
    or a single eigenvector) is spanned anew by Gram-Schmidt on its
    projections of the computational basis vectors, taken in index order,
    so that phases and degenerate-block bases are reproducible.

    Returns
    -------
    energies : ndarray, shape (d,)
    basis : Basis labelled ``"E"``
    """
    H = hermitian_operator(H)
    d = H.shape[0]
    evals, evecs = np.linalg.eigh(H)
    out = np.empty((d, d), dtype=complex)
    col = 0
    start = 0
    scale = max(1.0, np.max(np.abs(evals)))
    while start < d:
        stop = start + 1
        while stop < d and evals[stop] - evals[stop - 1] < degeneracy_tol * scale:
            stop += 1
        V = evecs[:, start:stop]
        P = V @ V.conj().T
        picked = []
        for k in range(d):
            r = P[:, k].copy()
            for u in picked:
                r -= u * np.vdot(u, r)
            n = np.linalg.norm(r)
            # Some column of the remaining block always has norm >= 1/sqrt(d).
            if n > 1e-3:
                picked.append(r / n)
                if len(picked) == stop - start:
                    break
        out[:, col:col + len(picked)] = np.array(picked).T
        col += len(picked)
        start = stop
    energies = np.array(evals, dtype=float)
    energies.setflags(write=False)
    return energies, Basis("E", out)


def unitary(H, t: float) -> np.ndarray:
    """``exp(-i H t)`` via Hermitian eigendecomposition."""
    H = hermitian_operator(H)
    evals, evecs = np.linalg.eigh(H)
    return _frozen((evecs * np.exp(-1j * evals * t / HBAR)) @ evecs.conj().T)


def evolve(H, t: float, v):
    """Apply ``U(t) = exp(-iHt)`` to a state, or ``U rho U^dag`` to an operator."""
    H = hermitian_operator(H)
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != H.shape[0]:
        raise DimensionMismatch(f"H is {H.shape[0]}-dimensional, argument has shape {v.shape}")
    U = unitary(H, t)
    if v.ndim == 1:
        return _frozen(U @ v)
    if v.ndim == 2 and v.shape[0] == v.shape[1]:
        return _frozen(U @ v @ U.conj().T)
    raise DimensionMismatch(f"cannot evolve array of shape {v.shape}")


# -- seeded random inputs ----------------------------------------------------

def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary (QR of a complex Ginibre matrix with phase fix)."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_basis(d: int, rng: np.random.Generator, label: str = "R") -> Basis:
    return Basis(label, random_unitary(d, rng))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return state_vector(v / np.linalg.norm(v))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state ``G G^dag / Tr`` with ``G`` of shape (d, rank)."""
    rank = d if rank is None else rank
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    return density_operator(rho / np.trace(rho).real)


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return hermitian_operator(scale * (G + G.conj().T) / 2)
