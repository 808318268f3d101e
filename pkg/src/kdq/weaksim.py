"""Post-selected weak measurement with a simulated von Neumann pointer.

The pointer is a continuous degree of freedom on a uniform position grid,
prepared in a real Gaussian of standard deviation ``width`` centred at 0.
The system projector ``|a><a|`` is coupled through
``exp(-i g |a><a| (x) P)``, which shifts the pointer by ``g`` on the
``|a>`` branch; the shift is applied exactly in momentum space.  After
post-selecting the system on ``|b>``, the pointer's mean position and
momentum give the weak value ``W`` of ``|a><a|`` through the first-order
relations

    <x> = g Re W,        <p> = 2 g Var_p Im W,    Var_p = 1 / (4 width^2),

and ``W`` times the Born probability of ``b`` estimates the joint value
``rho(a, b)``.  The model is ours; its first-order relations are checked
against the exact joint distribution by the tests rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooCoarse, InsufficientSamples, PostSelectionImpossible
from .hilbert import Basis, density_operator, require_overlap

__all__ = ["PointerSpec", "WeakEstimate", "weak_estimate_kd", "sample_weak_records",
           "pointer_distributions", "MIN_SAMPLES", "CHUNK"]

MIN_SAMPLES = 1000
#: Samples per shard; shard seeds derive from (seed, a, b, quadrature, shard index).
CHUNK = 1 << 16
BORN_FLOOR = 1e-12


@dataclass(frozen=True)
class PointerSpec:
    g: float
    width: float = 1.0
    step: float | None = None
    half_span: float | None = None

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("pointer width must be positive")
        if self.step is None:
            object.__setattr__(self, "step", self.width / 16)
        if self.half_span is None:
            object.__setattr__(self, "half_span", 10 * self.width + abs(self.g))
        if self.step > self.width / 8:
            raise GridTooCoarse(f"pointer step {self.step:g} must be <= width/8")
        if self.half_span < 8 * self.width:
            raise GridTooCoarse(f"pointer grid must span +/- {8 * self.width:g}")

    @property
    def x(self) -> np.ndarray:
        n = int(math.ceil(self.half_span / self.step))
        return self.step * np.arange(-n, n + 1)

    @property
    def momentum_variance(self) -> float:
        return 1 / (4 * self.width ** 2)


@dataclass(frozen=True, eq=False)
class WeakEstimate:
    est: np.ndarray
    g: float
    stderr: np.ndarray | None = None
    n: int | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict)


def _pointer(spec: PointerSpec):
    x = spec.x
    phi = np.exp(-x ** 2 / (4 * spec.width ** 2))
    phi = phi / np.linalg.norm(phi)
    p = 2 * np.pi * np.fft.fftfreq(len(x), spec.step)
    return x, p, phi


def pointer_distributions(rho, A: Basis, B: Basis, a: int, b: int, spec: PointerSpec):
    """Post-selected pointer position and momentum distributions.

    The mixed state is split into its eigen-components; each is evolved as
    a system (x) pointer array of shape ``(d, n_grid)`` in the ``A`` basis.
    Returns ``(x, pos, p, mom)`` with unnormalised weights; ``pos.sum()`` is
    the post-selection probability.
    """
    x, p, phi = _pointer(spec)
    lam, vecs = np.linalg.eigh(rho)
    shift = np.exp(-1j * spec.g * p)
    bra_b = B.state(b).conj() @ A.vectors        # <b|a_s> for every s
    pos = np.zeros(len(x))
    mom = np.zeros(len(x))
    for weight, v in zip(lam, vecs.T):
        if weight <= 0:
            continue
        coeff = A.vectors.conj().T @ v          # amplitudes in the A basis
        joint_k = np.outer(coeff, np.fft.fft(phi))
        joint_k[a] *= shift
        chi_k = bra_b @ joint_k                 # post-selected pointer, momentum space
        chi = np.fft.ifft(chi_k)
        pos += weight * np.abs(chi) ** 2
        mom += weight * np.abs(chi_k) ** 2 / len(x)
    return x, pos, p, mom


def _born(rho, B: Basis):
    return np.einsum("ib,ij,jb->b", B.vectors.conj(), rho, B.vectors).real


def _validate(rho, A, B, spec):
    rho = density_operator(rho)
    require_overlap(A, B)
    if spec.g == 0:
        raise ValueError("coupling g must be non-zero")
    born = _born(rho, B)
    if born.min() < BORN_FLOOR:
        b = int(np.argmin(born))
        raise PostSelectionImpossible(f"Born probability of {B.label}{b} is {born[b]:.3e}")
    return rho, born


def _invert(mean_x, mean_p, spec: PointerSpec):
    return mean_x / spec.g + 1j * mean_p / (2 * spec.g * spec.momentum_variance)


def weak_estimate_kd(rho, A: Basis, B: Basis, spec: PointerSpec) -> WeakEstimate:
    """Estimate every ``rho(a, b)`` from exact post-selected pointer statistics."""
    rho, born = _validate(rho, A, B, spec)
    d = A.dim
    est = np.empty((d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            x, pos, p, mom = pointer_distributions(rho, A, B, a, b, spec)
            W = _invert(np.dot(x, pos) / pos.sum(), np.dot(p, mom) / mom.sum(), spec)
            est[a, b] = W * born[b]
    return WeakEstimate(est, spec.g, meta={"width": spec.width})


def _sample_mean(values, weights, n, seed_seq):
    """Mean and standard deviation of ``n`` draws from a discrete distribution."""
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    total = 0.0
    total_sq = 0.0
    remaining = n
    for shard, child in enumerate(seed_seq.spawn(int(math.ceil(n / CHUNK)))):
        m = min(CHUNK, remaining)
        rng = np.random.default_rng(child)
        idx = np.searchsorted(cdf, rng.random(m), side="right")
        draws = values[np.minimum(idx, len(values) - 1)]
        total += draws.sum()
        total_sq += np.dot(draws, draws)
        remaining -= m
    mean = total / n
    var = max(total_sq / n - mean ** 2, 0.0) * n / (n - 1)
    return mean, math.sqrt(var)


def sample_weak_records(rho, A: Basis, B: Basis, spec: PointerSpec, n: int, seed: int) -> WeakEstimate:
    """Monte Carlo version of :func:`weak_estimate_kd`.

    For every cell ``(a, b)``, ``n`` post-selected position readings and
    ``n`` post-selected momentum readings are drawn from the exact pointer
    distributions.  Each shard of :data:`CHUNK` draws has its own seed
    derived from ``(seed, a, b, quadrature)``, so results do not depend on
    how the shards are scheduled.
    """
    if n < MIN_SAMPLES:
        raise InsufficientSamples(f"need n >= {MIN_SAMPLES}, got {n}")
    rho, born = _validate(rho, A, B, spec)
    d = A.dim
    est = np.empty((d, d), dtype=complex)
    err = np.empty((d, d), dtype=complex)
    scale_x = 1 / spec.g
    scale_p = 1 / (2 * spec.g * spec.momentum_variance)
    for a in range(d):
        for b in range(d):
            x, pos, p, mom = pointer_distributions(rho, A, B, a, b, spec)
            mx, sx = _sample_mean(x, pos, n, np.random.SeedSequence(seed, spawn_key=(a, b, 0)))
            mp, sp = _sample_mean(p, mom, n, np.random.SeedSequence(seed, spawn_key=(a, b, 1)))
            est[a, b] = born[b] * _invert(mx, mp, spec)
            err[a, b] = born[b] * complex(abs(scale_x) * sx, abs(scale_p) * sp) / math.sqrt(n)
    return WeakEstimate(est, spec.g, stderr=err, n=n, seed=seed, meta={"width": spec.width})
