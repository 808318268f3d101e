"""Classical limit of complex conditional probabilities.

When overlaps vary slowly with the basis index, ``p(c|a,b)`` is a complex
Gaussian in ``c`` of imaginary variance ``i*Vq`` centred at the classical
value ``fc(a,b)``.  Folding it with a real Gaussian of variance ``sigma**2``
gives a complex Gaussian of variance ``sigma**2 * (1 + i*eps)`` with
``eps = Vq / sigma**2``; for ``eps -> 0`` this is the classical prediction
``N(fc, sigma**2)``.

The module also holds the discrete phase-space checks: the state-count
metric of a basis pair and the finite-difference law relating the
imaginary part of a joint distribution to the mixed derivative of its real
part.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionTooSmall, GridTooCoarse, NearOrthogonalOverlap
from .hilbert import ETA, Basis, overlaps
from .kdcore import KDDistribution

__all__ = [
    "GaussianModel", "Grid", "ComplexCurve", "Fig1Panel",
    "imaginary_variance", "fc_gradients", "epsilon",
    "gaussian_conditional", "coarse_grain_analytic", "coarse_grain_numeric",
    "classical_gaussian", "convolution_max_diff", "resolve_phase_sign",
    "default_grid", "figure1_data", "state_count_check",
    "phase_orientation", "discrete_im_law", "discrete_im_law_residual",
    "smooth_test_state",
]

KERNEL_HALF_WIDTH = 8.0  # in units of sigma


def _overlap2(u, v):
    o = abs(np.vdot(u, v)) ** 2
    if o < ETA ** 2:
        raise NearOrthogonalOverlap(f"|<u|v>| = {math.sqrt(o):.3e}")
    return o


def imaginary_variance(a, b, c) -> float:
    """``Vq = |<b|a>|^2 / (2 pi |<b|c>|^2 |<c|a>|^2)``."""
    ba = _overlap2(b, a)
    bc = _overlap2(b, c)
    ca = _overlap2(c, a)
    return ba / (2 * math.pi * bc * ca)


def fc_gradients(a, b, c) -> tuple[float, float]:
    """Gradients ``(dfc/da, dfc/db)`` of the classical coordinate map."""
    ba = _overlap2(b, a)
    bc = _overlap2(b, c)
    ca = _overlap2(c, a)
    return ba / bc, ba / ca


@dataclass(frozen=True)
class GaussianModel:
    """Local complex-Gaussian model of ``p(c|a,b)``.

    ``fc0`` is the classical value of ``c``; the gradients describe the
    linearised map ``fc(a, b)`` around it.
    """

    vq: float
    fc0: float = 0.0
    dfda: float = 1.0
    dfdb: float = 1.0

    def __post_init__(self):
        if not (self.vq > 0 and math.isfinite(self.vq)):
            raise ValueError(f"Vq must be positive and finite, got {self.vq!r}")
        if not all(math.isfinite(x) for x in (self.fc0, self.dfda, self.dfdb)):
            raise ValueError("fc0 and gradients must be finite")

    @classmethod
    def from_states(cls, a, b, c, fc0=0.0):
        dfda, dfdb = fc_gradients(a, b, c)
        return cls(imaginary_variance(a, b, c), fc0, dfda, dfdb)

    def fc(self, da=0.0, db=0.0) -> float:
        """Linearised classical value at an offset ``(da, db)``."""
        return self.fc0 + self.dfda * da + self.dfdb * db


@dataclass(frozen=True)
class Grid:
    """Symmetric uniform grid ``center + step * k`` for ``k = -n_half..n_half``."""

    center: float
    step: float
    n_half: int

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise GridTooCoarse(f"grid step must be positive, got {self.step!r}")
        if self.n_half < 1:
            raise GridTooCoarse("grid needs at least three points")

    @classmethod
    def symmetric(cls, center, half_span, step):
        return cls(float(center), float(step), int(math.ceil(half_span / step - 1e-9)))

    @property
    def half_span(self) -> float:
        return self.n_half * self.step

    @property
    def points(self) -> np.ndarray:
        return self.center + self.step * np.arange(-self.n_half, self.n_half + 1)

    def widened(self, extra_points: int) -> "Grid":
        return Grid(self.center, self.step, self.n_half + extra_points)


@dataclass(frozen=True, eq=False)
class ComplexCurve:
    c: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def step(self) -> float:
        return float(self.c[1] - self.c[0])

    def integral(self) -> complex:
        return complex(self.values.sum() * self.step)


def epsilon(vq, sigma) -> float:
    return vq / sigma ** 2


def default_grid(sigma, vq, fc0=0.0) -> Grid:
    """step = sigma/16, half span = 8 max(sigma, sqrt(Vq))."""
    return Grid.symmetric(fc0, 8 * max(sigma, math.sqrt(vq)), sigma / 16)


def _check_coarse_grid(grid: Grid, sigma, model: GaussianModel):
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if grid.step >= sigma / 4:
        raise GridTooCoarse(f"grid step {grid.step:g} must be < sigma/4 = {sigma / 4:g}")
    need = 6 * max(sigma, math.sqrt(model.vq))
    lo = grid.center - grid.half_span
    hi = grid.center + grid.half_span
    if model.fc0 - need < lo - 1e-12 or model.fc0 + need > hi + 1e-12:
        raise GridTooCoarse(f"grid [{lo:g}, {hi:g}] must cover fc0 +/- {need:g}")


def gaussian_conditional(model: GaussianModel, grid: Grid, sign: int | None = None) -> ComplexCurve:
    """Sample ``exp(i (c-fc)^2 / (2 Vq) - i pi/4) / sqrt(2 pi Vq)`` on ``grid``.

    ``sign`` selects the orientation of the imaginary exponent; the default
    is the one confirmed by :func:`resolve_phase_sign`.
    """
    if grid.step >= math.sqrt(model.vq) / 4:
        raise GridTooCoarse(f"grid step {grid.step:g} must be < sqrt(Vq)/4")
    if sign is None:
        sign, flipped = resolve_phase_sign()
    else:
        flipped = sign != 1
    c = grid.points
    x = c - model.fc0
    vals = np.exp(sign * 1j * (x ** 2 / (2 * model.vq) - math.pi / 4)) / math.sqrt(2 * math.pi * model.vq)
    meta = {"kind": "conditional", "vq": model.vq, "fc0": model.fc0,
            "phase_sign": sign, "phase_sign_flipped": flipped}
    return ComplexCurve(c, vals, meta)


def coarse_grain_analytic(model: GaussianModel, sigma: float, grid: Grid, check_grid=True) -> ComplexCurve:
    """Closed-form coarse-grained conditional.

    ``p(c; sigma^2) = exp(-(c-fc)^2 (1 - i eps) / (2 sigma^2 (1 + eps^2)))
    / sqrt(2 pi sigma^2 (1 + i eps))``, i.e. a Gaussian of complex variance
    ``sigma^2 + i Vq``.
    """
    if check_grid:
        _check_coarse_grid(grid, sigma, model)
    eps = epsilon(model.vq, sigma)
    c = grid.points
    x = c - model.fc0
    sign, flipped = resolve_phase_sign()
    pref = 1 / np.sqrt(2 * np.pi * sigma ** 2 * (1 + 1j * eps))
    vals = pref * np.exp(-(x ** 2) * (1 - 1j * eps) / (2 * sigma ** 2 * (1 + eps ** 2)))
    meta = {"kind": "coarse_grained", "vq": model.vq, "fc0": model.fc0, "sigma": sigma,
            "epsilon": eps, "phase_sign": sign, "phase_sign_flipped": flipped}
    return ComplexCurve(c, vals, meta)


def classical_gaussian(model: GaussianModel, sigma: float, grid: Grid) -> np.ndarray:
    """Classical prediction: the delta function at ``fc0`` folded to ``N(fc0, sigma^2)``."""
    x = grid.points - model.fc0
    return np.exp(-(x ** 2) / (2 * sigma ** 2)) / math.sqrt(2 * math.pi * sigma ** 2)


def coarse_grain_numeric(curve: ComplexCurve, sigma: float) -> ComplexCurve:
    """Discrete convolution with a unit-mass Gaussian of variance ``sigma**2``.

    The kernel is truncated at ``8 sigma``.  Only output points whose kernel
    support lies inside the input grid are returned, so the output grid is
    the input grid trimmed by the kernel half width on each side.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    h = curve.step
    if h >= sigma / 4:
        raise GridTooCoarse(f"grid step {h:g} must be < sigma/4 = {sigma / 4:g}")
    K = int(math.ceil(KERNEL_HALF_WIDTH * sigma / h))
    n = len(curve.c)
    if n <= 2 * K:
        raise GridTooCoarse(
            f"grid of {n} points is narrower than the {2 * K + 1}-point kernel"
        )
    u = h * np.arange(-K, K + 1)
    kernel = h * np.exp(-(u ** 2) / (2 * sigma ** 2)) / math.sqrt(2 * math.pi * sigma ** 2)
    out = np.convolve(curve.values, kernel, mode="valid")
    meta = dict(curve.meta, kind="coarse_grained_numeric", sigma=sigma)
    return ComplexCurve(curve.c[K:n - K], out, meta)


def _refined_conditional(model: GaussianModel, grid: Grid, sigma: float, sign):
    """Conditional sampled finely enough for a faithful convolution onto ``grid``.

    The input is widened by the kernel half width and subdivided by an
    integer factor until the chirp advances at most pi/4 per sample at the
    outer edge.  Returns the curve and the subdivision factor.
    """
    x_max = abs(grid.center - model.fc0) + grid.half_span + KERNEL_HALF_WIDTH * sigma
    max_step = math.pi * model.vq / (4 * x_max)
    m = max(1, int(math.ceil(grid.step / max_step)))
    fine_step = grid.step / m
    K = int(math.ceil(KERNEL_HALF_WIDTH * sigma / fine_step))
    fine = Grid(grid.center, fine_step, grid.n_half * m + K)
    return gaussian_conditional(model, fine, sign=sign), m


def convolution_max_diff(model: GaussianModel, sigma: float, grid: Grid, sign: int | None = None) -> float:
    """Max modulus difference between numeric and analytic coarse graining on ``grid``.

    The conditional is sampled on a refined, widened copy of ``grid`` so
    that every target point receives a full, alias-free convolution.
    """
    raw, m = _refined_conditional(model, grid, sigma, sign)
    num = coarse_grain_numeric(raw, sigma)
    ana = coarse_grain_analytic(model, sigma, grid, check_grid=False)
    return float(np.max(np.abs(num.values[::m] - ana.values)))


@functools.lru_cache(maxsize=None)
def resolve_phase_sign(tol: float = 1e-6) -> tuple[int, bool]:
    """Pick the orientation of the conditional's imaginary exponent.

    The closed form as written (decaying envelope with ``1 - i eps`` and
    prefactor ``1/sqrt(1 + i eps)``) is compared against a brute-force
    convolution of the conditional with ``+i`` and with ``-i`` in its
    exponent.  Returns ``(sign, flipped)``.
    """
    model = GaussianModel(1.0)
    sigma = 1.0
    grid = default_grid(sigma, model.vq)
    x = grid.points
    eps = model.vq / sigma ** 2
    target = np.exp(-(x ** 2) * (1 - 1j * eps) / (2 * sigma ** 2 * (1 + eps ** 2))) \
        / np.sqrt(2 * np.pi * sigma ** 2 * (1 + 1j * eps))
    for sign in (1, -1):
        raw, m = _refined_conditional(model, grid, sigma, sign)
        num = coarse_grain_numeric(raw, sigma)
        if np.max(np.abs(num.values[::m] - target)) <= tol:
            return sign, sign != 1
    raise RuntimeError("neither phase orientation reproduces the closed-form coarse graining")


@dataclass(frozen=True, eq=False)
class Fig1Panel:
    sigma: float
    epsilon: float
    c: np.ndarray
    re_q: np.ndarray
    im_q: np.ndarray
    classical: np.ndarray
    meta: dict

    def rows(self):
        for row in zip(self.c, self.re_q, self.im_q, self.classical):
            yield (self.sigma,) + tuple(float(x) for x in row)


def figure1_data(vq=1.0, sigmas=(0.25, 0.5, 1.0, 2.0), fc0=0.0,
                 grid_step=None, grid_span=None, check=True) -> list[Fig1Panel]:
    """Quantum (coarse-grained) and classical curves, one panel per ``sigma``.

    ``grid_step`` and ``grid_span`` (half width) override the per-panel
    defaults of :func:`default_grid`.  With ``check`` set, each panel's
    metadata records the numeric-convolution cross-check.
    """
    model = GaussianModel(vq, fc0)
    panels = []
    for sigma in sigmas:
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma!r}")
        g = default_grid(sigma, vq, fc0)
        step = grid_step if grid_step is not None else g.step
        span = grid_span if grid_span is not None else g.half_span
        grid = Grid.symmetric(fc0, span, step)
        q = coarse_grain_analytic(model, sigma, grid)
        meta = dict(q.meta)
        if check:
            meta["numeric_max_diff"] = convolution_max_diff(model, sigma, grid)
        panels.append(Fig1Panel(sigma, epsilon(vq, sigma), q.c, q.values.real, q.values.imag,
                                classical_gaussian(model, sigma, grid), meta))
    return panels


def state_count_check(A: Basis, B: Basis) -> float:
    """``sum_ab |<a|b>|^2``; equals the dimension for any orthonormal pair."""
    return float(np.sum(np.abs(overlaps(A, B)) ** 2))


def _mixed_difference(f):
    # central difference for d^2 f / da db with unit steps, interior points only
    return (f[2:, 2:] - f[2:, :-2] - f[:-2, 2:] + f[:-2, :-2]) / 4


def phase_orientation(A: Basis, B: Basis) -> int:
    """Sign of the mixed index-difference of ``arg <a|b>``.

    +1 for :func:`~kdq.hilbert.fourier_basis` against the computational
    basis, where ``arg <a|b> = 2 pi a b / d``.
    """
    O = overlaps(A, B)
    plaquette = O[1:, 1:] * O[:-1, :-1] * np.conj(O[1:, :-1] * O[:-1, 1:])
    s = np.sign(np.angle(plaquette).mean())
    return int(s) if s != 0 else 1


def discrete_im_law(kd: KDDistribution):
    """Both sides of the classical-limit law on interior grid points.

    ``Im rho(a,b) ~ -s / (4 pi |<a|b>|^2) * d^2 Re rho / da db`` where ``s``
    is :func:`phase_orientation` of the basis pair.  Returns
    ``(im, rhs)`` arrays of shape ``(d-2, d-2)``.
    """
    d = kd.dim
    if d < 8:
        raise DimensionTooSmall(f"need d >= 8 for finite differences, got {d}")
    s = phase_orientation(kd.basis_a, kd.basis_b)
    dens = np.abs(overlaps(kd.basis_a, kd.basis_b)) ** 2
    rhs = -s * _mixed_difference(kd.values.real) / (4 * np.pi * dens[1:-1, 1:-1])
    return kd.values.imag[1:-1, 1:-1], rhs


def discrete_im_law_residual(kd: KDDistribution) -> float:
    """max |Im rho - rhs| / max |rho| over interior points."""
    im, rhs = discrete_im_law(kd)
    scale = np.max(np.abs(kd.values[1:-1, 1:-1]))
    return float(np.max(np.abs(im - rhs)) / scale)


def smooth_test_state(d: int, spread: float = 0.1) -> np.ndarray:
    """Gaussian Schell-model state centred in the discrete phase space.

    Position and Fourier-conjugate momentum both have Gaussian profiles of
    width ``spread * d`` centred at ``d/2``, so the state covers a growing
    number of phase-space cells as ``d`` increases.  The operator is
    positive only for ``spread**2 > 1/(4 pi d)`` (coherence length below
    twice the width); other values raise NotDensityOperator downstream.
    """
    a = np.arange(d)
    width = spread * d
    coherence = (d / (2 * np.pi)) / width
    mean = (a[:, None] + a[None, :]) / 2
    diff = a[:, None] - a[None, :]
    rho = (np.exp(-(mean - d / 2) ** 2 / (2 * width ** 2))
           * np.exp(-diff ** 2 / (2 * coherence ** 2))
           * np.exp(2j * np.pi * (d / 2) * diff / d))
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real
