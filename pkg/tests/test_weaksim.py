import numpy as np
import pytest
from hypothesis import given, strategies as st

from kdq import weaksim as ws
from kdq.errors import GridTooCoarse, InsufficientSamples, NearOrthogonalOverlap, PostSelectionImpossible
from kdq.hilbert import qubit_basis, random_density
from kdq.kdcore import kd_distribution

Z, X, Y = (qubit_basis(ax) for ax in "ZXY")
YPLUS = Y.state(0)
RHO0 = np.diag([1.0, 0.0]).astype(complex)


def max_error(rho, A, B, g):
    est = ws.weak_estimate_kd(rho, A, B, ws.PointerSpec(g)).est
    return np.max(np.abs(est - kd_distribution(rho, A, B).values))


def test_pointer_spec_validation():
    spec = ws.PointerSpec(0.1)
    assert spec.step == pytest.approx(1 / 16)
    assert spec.momentum_variance == pytest.approx(0.25)
    assert spec.x[-1] >= 8
    with pytest.raises(GridTooCoarse):
        ws.PointerSpec(0.1, step=0.2)
    with pytest.raises(GridTooCoarse):
        ws.PointerSpec(0.1, half_span=5.0)
    with pytest.raises(ValueError):
        ws.PointerSpec(0.1, width=0.0)


def test_post_selected_mass_tends_to_born_probability():
    rho = random_density(2, np.random.default_rng(0))
    for b in range(2):
        born = np.vdot(X.state(b), rho @ X.state(b)).real
        gaps = []
        for g in (0.2, 0.1):
            x, pos, p, mom = ws.pointer_distributions(rho, Z, X, 0, b, ws.PointerSpec(g))
            assert mom.sum() == pytest.approx(pos.sum(), abs=1e-12)   # Parseval
            gaps.append(abs(pos.sum() - born))
        # back-action of the coupling is second order in g
        assert gaps[1] < gaps[0] / 3.5


def test_g_sweep_converges():
    errors = [max_error(YPLUS, Z, X, g) for g in (0.2, 0.1, 0.05)]
    assert errors[0] > errors[1] > errors[2]
    C = max(e / g for e, g in zip(errors, (0.2, 0.1, 0.05)))
    assert all(e <= C * g for e, g in zip(errors, (0.2, 0.1, 0.05)))


def test_bias_is_second_order():
    # the pointer is symmetric, so the estimate is even in g
    e1, e2 = max_error(YPLUS, Z, X, 0.1), max_error(YPLUS, Z, X, 0.05)
    assert 3.5 < e1 / e2 < 4.5
    np.testing.assert_allclose(
        ws.weak_estimate_kd(YPLUS, Z, X, ws.PointerSpec(0.1)).est,
        ws.weak_estimate_kd(YPLUS, Z, X, ws.PointerSpec(-0.1)).est, atol=1e-12)


def test_real_case():
    g = 0.05
    est = ws.weak_estimate_kd(RHO0, Z, X, ws.PointerSpec(g)).est
    assert abs(est[0, 0] - 0.5) < g
    assert np.max(np.abs(est.imag)) < g


def test_errors():
    with pytest.raises(PostSelectionImpossible):
        ws.weak_estimate_kd(X.state(0), Z, X, ws.PointerSpec(0.1))
    with pytest.raises(NearOrthogonalOverlap):
        ws.weak_estimate_kd(RHO0, Z, Z, ws.PointerSpec(0.1))
    with pytest.raises(InsufficientSamples):
        ws.sample_weak_records(YPLUS, Z, X, ws.PointerSpec(0.1), 100, 0)
    with pytest.raises(ValueError):
        ws.weak_estimate_kd(RHO0, Z, X, ws.PointerSpec(0.0))


@given(st.integers(0, 10_000))
def test_column_sums_track_born(seed):
    rho = random_density(2, np.random.default_rng(seed))
    g = 0.1
    est = ws.weak_estimate_kd(rho, Z, Y, ws.PointerSpec(g)).est
    born = kd_distribution(rho, Z, Y).column_marginals()
    assert np.max(np.abs(est.sum(axis=0) - born)) < g


def test_sampling_is_seed_deterministic():
    spec = ws.PointerSpec(0.1)
    r1 = ws.sample_weak_records(YPLUS, Z, X, spec, 5000, 42)
    r2 = ws.sample_weak_records(YPLUS, Z, X, spec, 5000, 42)
    r3 = ws.sample_weak_records(YPLUS, Z, X, spec, 5000, 43)
    assert np.array_equal(r1.est, r2.est) and np.array_equal(r1.stderr, r2.stderr)
    assert not np.array_equal(r1.est, r3.est)


def test_sampled_agrees_with_exact_within_errors():
    spec = ws.PointerSpec(0.2)
    exact = ws.weak_estimate_kd(YPLUS, Z, X, spec).est
    res = ws.sample_weak_records(YPLUS, Z, X, spec, 200_000, 7)
    z_re = np.abs(res.est.real - exact.real) / res.stderr.real
    z_im = np.abs(res.est.imag - exact.imag) / res.stderr.imag
    assert np.all(z_re < 5) and np.all(z_im < 5)
    # standard error falls as 1/sqrt(n)
    small = ws.sample_weak_records(YPLUS, Z, X, spec, 50_000, 7)
    np.testing.assert_allclose(small.stderr.real / res.stderr.real, 2, rtol=0.05)
