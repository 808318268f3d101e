import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from helpers import random_hermitian
from kdq import dynamics as dy
from kdq.errors import DimensionMismatch, NearOrthogonalOverlap, NotHermitian
from kdq.hilbert import (
    computational_basis,
    energy_basis,
    qubit_basis,
    random_basis,
    random_density,
)
from kdq.kdcore import kd_distribution

S = 1 / math.sqrt(2)
Z, X, Y = (qubit_basis(ax) for ax in "ZXY")
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
RHO0 = np.diag([1.0, 0.0]).astype(complex)


def born_at(rho, A, H, t):
    U = scipy.linalg.expm(-1j * H * t)
    rho_t = U @ rho @ U.conj().T
    return np.einsum("ia,ij,ja->a", A.vectors.conj(), rho_t, A.vectors).real


def test_timed_basis_examples():
    tb = dy.timed_basis(Z, SX, 0.0)
    assert tb.basis.same_as(Z.__class__("Z@0", Z.vectors))
    tb = dy.timed_basis(Z, SX, math.pi / 4)
    np.testing.assert_allclose(tb.vectors[:, 0], [S, 1j * S], atol=1e-15)
    rho = random_density(2, np.random.default_rng(0))
    p0 = born_at(rho, Z, SZ, 0.0)
    for t in (0.3, 1.7):
        tb = dy.timed_basis(Z, SZ, t)
        pt = np.einsum("ia,ij,ja->a", tb.vectors.conj(), rho, tb.vectors).real
        np.testing.assert_allclose(pt, p0, atol=1e-12)


def test_timed_basis_errors():
    with pytest.raises(NotHermitian):
        dy.timed_basis(Z, np.array([[0, 1], [0, 0]]), 1.0)
    with pytest.raises(DimensionMismatch):
        dy.timed_basis(Z, np.eye(3), 1.0)


def test_two_time_examples():
    kd = dy.two_time_kd(RHO0, Z, SX, 0.0, math.pi / 4)
    np.testing.assert_allclose(kd.values, [[0.5, 0.5], [0, 0]], atol=1e-15)
    np.testing.assert_allclose(kd.row_marginals(), [1, 0], atol=1e-15)
    assert kd.meta["times"] == [0.0, math.pi / 4]
    with pytest.raises(NearOrthogonalOverlap):
        dy.two_time_kd(RHO0, Z, SX, 0.4, 0.4)
    with pytest.raises(NearOrthogonalOverlap):
        dy.two_time_kd(RHO0, Z, SZ, 0.0, 1.0)


@given(st.integers(0, 10_000), st.sampled_from([2, 3, 4]))
def test_two_time_marginals_are_born(seed, d):
    rng = np.random.default_rng(seed)
    A = random_basis(d, rng)
    H = random_hermitian(d, rng)
    rho = random_density(d, rng)
    t1, t2 = 0.2, 0.9
    kd = dy.two_time_kd(rho, A, H, t1, t2)
    np.testing.assert_allclose(kd.row_marginals(), born_at(rho, A, H, t1), atol=1e-10)
    np.testing.assert_allclose(kd.column_marginals(), born_at(rho, A, H, t2), atol=1e-10)


def test_three_time_examples(rng):
    kd = dy.two_time_kd(RHO0, Z, SX, 0.0, 0.5)
    same = dy.three_time_step(kd, Z, SX, 0.5)
    np.testing.assert_allclose(same.values, kd.values, atol=1e-14)
    A = random_basis(4, rng)
    H = random_hermitian(4, rng)
    rho = random_density(4, rng)
    kd12 = dy.two_time_kd(rho, A, H, 0.0, 0.3)
    out = dy.three_time_step(kd12, A, H, 0.7)
    direct = dy.two_time_kd(rho, A, H, 0.0, 0.7)
    assert np.max(np.abs(out.values - direct.values)) < 1e-10
    assert out.meta["times"] == [0.0, 0.7]
    with pytest.raises(NearOrthogonalOverlap):
        dy.three_time_step(kd12, A, H, 0.0)
    with pytest.raises(NearOrthogonalOverlap):
        dy.two_time_kd(rho, A, np.zeros((4, 4)), 0.0, 0.3)


def test_path_kernel_examples(rng):
    A = random_basis(4, rng)
    H = random_hermitian(4, rng)
    chain = dy.path_kernel(A, H, (0.0, 0.4, 0.9))
    direct = dy.direct_path_kernel(A, H, (0.0, 0.4, 0.9))
    assert np.max(np.abs(chain.values - direct.values)) < 1e-12
    times = np.linspace(0, 1.5, 6)
    chain = dy.path_kernel(A, H, times)
    direct = dy.direct_path_kernel(A, H, times)
    assert np.max(np.abs(chain.values - direct.values)) < 1e-10
    assert chain.normalization_error() < 1e-10
    with pytest.raises(ValueError):
        dy.path_kernel(A, H, (0.0, 1.0))


def test_path_kernel_loop_oracle(rng):
    # explicit sum over intermediate outcomes for n = 4
    d = 3
    A = random_basis(d, rng)
    H = random_hermitian(d, rng)
    times = (0.0, 0.35, 0.8, 1.2)
    b1, b2, b3, b4 = (dy.timed_basis(A, H, t).basis for t in times)

    def p(c, C, a, b, B):
        vc, va, vb = C.state(c), b1.state(a), B.state(b)
        return np.vdot(vb, vc) * np.vdot(vc, va) / np.vdot(vb, va)

    chain = dy.path_kernel(A, H, times).values
    for a4 in range(d):
        for a1 in range(d):
            for a2 in range(d):
                total = sum(p(a4, b4, a1, a3, b3) * p(a3, b3, a1, a2, b2) for a3 in range(d))
                assert abs(chain[a4, a1, a2] - total) < 1e-12


def test_schrodinger_examples():
    H = np.diag([0.3, -1.1, 0.7]).astype(complex)
    A = computational_basis(3)
    assert dy.schrodinger_conditional_check(A, H, 0, 1, 0.4, 1e-4) < 1e-8
    # tracking an energy eigenstate: q is constant in time
    Hr = random_hermitian(3, np.random.default_rng(7))
    _, E = energy_basis(Hr)
    q0 = dy.conditional_vector(E, Hr, 1, 1, 0.0)
    q1 = dy.conditional_vector(E, Hr, 1, 1, 0.5)
    np.testing.assert_allclose(q1, q0, atol=1e-12)
    assert dy.schrodinger_conditional_check(E, Hr, 1, 1, 0.5, 1e-4) < 1e-8
    with pytest.raises(ValueError):
        dy.schrodinger_conditional_check(A, H, 0, 1, 0.4, 0.1)


@pytest.mark.parametrize("seed", range(5))
def test_schrodinger_second_order(seed):
    rng = np.random.default_rng(seed)
    A = random_basis(4, rng)
    H = random_hermitian(4, rng)
    r3 = dy.schrodinger_conditional_check(A, H, 2, 1, 0.6, 1e-3)
    r4 = dy.schrodinger_conditional_check(A, H, 2, 1, 0.6, 1e-4)
    assert 60 <= r3 / r4 <= 140


def test_rate_examples():
    plus = X.state(0)
    assert dy.rate_via_imaginary_energy(plus, Y, SZ, 0) == pytest.approx(1.0, abs=1e-12)
    H = random_hermitian(3, np.random.default_rng(2))
    _, E = energy_basis(H)
    A = random_basis(3, np.random.default_rng(5))
    for a in range(3):
        assert abs(dy.rate_via_imaginary_energy(E.state(0), A, H, a)) < 1e-12
        assert abs(dy.rate_via_imaginary_energy(random_density(3, np.random.default_rng(a)), E, H, a)) < 1e-12
    with pytest.raises(DimensionMismatch):
        dy.rate_via_imaginary_energy(plus, Y, np.eye(3), 0)


@given(st.integers(0, 10_000), st.sampled_from([2, 3, 4, 6]))
def test_rate_law_matches_commutator_and_derivative(seed, d):
    rng = np.random.default_rng(seed)
    A = random_basis(d, rng)
    H = random_hermitian(d, rng)
    rho = random_density(d, rng)
    a = int(rng.integers(d))
    r = dy.rate_via_imaginary_energy(rho, A, H, a)
    assert abs(r - dy.rate_via_commutator(rho, A, H, a)) < 1e-10
    h = 1e-5
    fd = (born_at(rho, A, H, h)[a] - born_at(rho, A, H, -h)[a]) / (2 * h)
    assert abs(r - fd) < 1e-6
