import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgtraffic import physics
from sgtraffic.errors import ContractError, DomainError
from sgtraffic.physics import PhysicsParams


def scalar_weights(rho, N, partial=False):
    """Plain-loop recursion, units rho_max = 1."""
    if rho >= 0.5:
        return [0.0] * (N - 1) + [rho]
    out, total = [], 0.0
    for _ in range(N - 1):
        a = (1 - 2 * rho) * rho - 2 * (1 - rho) * total
        c = total if partial else (out[-1] if out else 0.0)
        out.append((a + math.sqrt(a * a + 4 * rho * rho * (1 - rho) * c)) / (2 * (1 - rho)))
        total += out[-1]
    return out + [rho - total]


def test_hesitation_examples():
    assert physics.hesitation(0.5, PhysicsParams(gamma=1)) == 0.5
    assert physics.hesitation(0.0, PhysicsParams(gamma=2)) == 0.0
    assert physics.hesitation(0.5, PhysicsParams(gamma=3)) == 0.125
    with pytest.raises(DomainError):
        physics.hesitation(-0.1, PhysicsParams())


def test_hesitation_derivative():
    p = PhysicsParams(gamma=3)
    r = np.linspace(0.1, 0.9, 9)
    d = 1e-6
    np.testing.assert_allclose(physics.hesitation_drho(r, p),
                               (physics.hesitation(r + d, p) - physics.hesitation(r - d, p)) / (2 * d), rtol=1e-8)


def test_equilibrium_examples(params):
    assert physics.v_eq(0.0, params) == 1.0 and physics.q_eq(0.0, params) == 0.0
    assert physics.v_eq(0.5, params) == 0.0 and physics.q_eq(0.5, params) == 0.0
    assert physics.q_eq(0.25, params) == 0.125
    # no clamping above one half
    assert physics.v_eq(0.75, params) == -0.5


def test_velocity_orders():
    np.testing.assert_allclose(physics.velocities(PhysicsParams(n_v=3)), [1.0, 0.5, 0.0])
    np.testing.assert_allclose(physics.velocities(PhysicsParams(n_v=3, velocity_order="ascending")), [0.0, 0.5, 1.0])


def test_params_validation():
    for bad in (dict(gamma=4), dict(n_v=1), dict(v_max=0), dict(velocity_order="x"),
                dict(radicand="x"), dict(v_eq_model="x"), dict(fd_delta=0)):
        with pytest.raises(ContractError):
            PhysicsParams(**bad)


@pytest.mark.parametrize("N", [3, 5, 10])
def test_weights_match_scalar_oracle(N):
    p = PhysicsParams(n_v=N)
    rho = np.linspace(0, 1, 101)
    oracle = np.array([scalar_weights(r, N) for r in rho])
    np.testing.assert_allclose(physics.maxwellian_weights(rho, p), oracle, atol=1e-15)


@pytest.mark.parametrize("N", [3, 5, 10])
def test_normalisation_and_sign(N):
    p = PhysicsParams(n_v=N)
    rho = np.linspace(0, 1, 1000)
    f = physics.maxwellian_weights(rho, p)
    np.testing.assert_allclose(f.sum(axis=-1), rho, atol=1e-12)
    assert f.min() >= 0.0


def test_partial_sum_reading_goes_negative():
    # the alternative radicand reading breaks nonnegativity for larger N
    p = PhysicsParams(n_v=10, radicand="partial_sum")
    f = physics.maxwellian_weights(np.linspace(0, 1, 1000), p)
    assert f.min() < 0
    np.testing.assert_allclose(f[500], scalar_weights(np.linspace(0, 1, 1000)[500], 10, partial=True), atol=1e-15)


def test_congested_branch_exact():
    f = physics.maxwellian_weights(0.75, PhysicsParams(n_v=3))
    assert f.tolist() == [0.0, 0.0, 0.75]
    assert physics.maxwellian_weights(0.0, PhysicsParams(n_v=7)).tolist() == [0.0] * 7


def test_weights_domain():
    with pytest.raises(DomainError):
        physics.maxwellian_weights(1.2, PhysicsParams())


def test_moment_examples():
    p = PhysicsParams(n_v=5)
    assert physics.maxwellian_moment(0, 0.3, p) == 0.3
    assert physics.maxwellian_moment(2, 0.0, p) == 0.0
    asc = PhysicsParams(n_v=3, velocity_order="ascending")
    assert physics.maxwellian_moment(1, 0.75, asc) == pytest.approx(0.75)
    # descending order puts congested mass at v = 0
    assert physics.maxwellian_moment(1, 0.75, PhysicsParams(n_v=3)) == 0.0


def test_second_moment_derivative_congested():
    asc = PhysicsParams(n_v=3, velocity_order="ascending")
    np.testing.assert_allclose(physics.maxwellian_second_moment_drho([0.6, 0.8, 1.0], asc), 1.0, atol=1e-8)
    np.testing.assert_allclose(physics.maxwellian_second_moment_drho([0.6, 1.0], PhysicsParams(n_v=3)), 0.0, atol=1e-8)


def test_fd_on_surrogate():
    # m2 = rho/N * sum v_j^2 plus a cubic; exact derivative known
    p = PhysicsParams(n_v=5)
    v2 = np.sum(physics.velocities(p) ** 2) / p.n_v
    func = lambda r: r * v2 + r ** 3
    rho = np.array([0.0, 0.1, 0.3, 0.4999995, 0.5, 0.7, 1.0])
    exact = v2 + 3 * rho ** 2
    got = physics._fd_drho(func, rho, p, 1e-6)
    np.testing.assert_allclose(got, exact, rtol=1e-6)


def test_fd_boundaries_finite(params):
    assert np.all(np.isfinite(physics.maxwellian_second_moment_drho([0.0, 0.5, 1.0], params)))


def test_fd_second_order():
    p = PhysicsParams(n_v=5)
    rho = np.array([0.2, 0.35])
    dense = physics.maxwellian_second_moment_drho(rho, p, delta=1e-4)
    err = [np.abs(physics.maxwellian_second_moment_drho(rho, p, delta=d) - dense).max() for d in (4e-3, 2e-3)]
    assert err[0] / err[1] == pytest.approx(4.0, rel=0.1)


def test_mg_moments(params):
    rho = np.linspace(0, 1, 101)
    np.testing.assert_allclose(physics.mg_moments(rho, 0, params), rho, atol=1e-12)
    assert physics.mg_moments(0.0, 1, params) == 0.0
    asc = PhysicsParams(n_v=3, velocity_order="ascending")
    assert physics.mg_moments(0.75, 1, asc) == pytest.approx(1.3125)
    assert physics.m2_residual(0.75, asc) == pytest.approx(1.3125 - 0.1875)


def test_m2_holds_with_maxwellian_equilibrium():
    p = PhysicsParams(v_eq_model="maxwellian")
    rho = np.linspace(0.01, 1, 100)
    np.testing.assert_allclose(physics.m2_residual(rho, p), 0, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.sampled_from([2, 3, 5, 8, 10, 20]), st.sampled_from([1, 2, 3]))
def test_weights_property(rho, N, gamma):
    p = PhysicsParams(n_v=N, gamma=gamma)
    f = physics.maxwellian_weights(rho, p)
    assert f.min() >= 0
    assert f.sum() == pytest.approx(rho, abs=1e-12)
