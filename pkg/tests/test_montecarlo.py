import numpy as np
import pytest

from sgtraffic import arz, montecarlo as mc
from sgtraffic.errors import ContractError
from sgtraffic.gpc import build_haar_basis, compute_triple_products
from sgtraffic.grid import Mesh
from sgtraffic.physics import PhysicsParams

MESH = Mesh(0, 2, 0.05)


def test_sample_points():
    np.testing.assert_allclose(mc.sample_points(4), [0.125, 0.375, 0.625, 0.875])
    a = mc.sample_points(5, "pseudo-random", seed=3)
    np.testing.assert_array_equal(a, mc.sample_points(5, "pseudo-random", seed=3))
    assert np.all((a > 0) & (a < 1))
    with pytest.raises(ContractError):
        mc.sample_points(0)
    with pytest.raises(ContractError):
        mc.sample_points(3, "sobol")


def test_zero_time_mean_is_midpoint_value():
    m = mc.run_samples(arz.perturbed_constant(0.4, 0.1), MESH, PhysicsParams(), 1e-2, 0.0, 10)
    np.testing.assert_allclose(m.mean[0], 0.4, atol=1e-15)
    np.testing.assert_allclose(m.variance[0], np.var(0.4 + 0.1 * (mc.sample_points(10) - 0.5)), atol=1e-15)


def test_single_sample_is_deterministic_run():
    p = PhysicsParams()
    m = mc.run_samples(arz.SHOCK, MESH, p, 1e-2, 0.2, 1)
    run = mc.deterministic_run(arz.SHOCK, 0.5, MESH, p, 1e-2, 0.2)
    np.testing.assert_array_equal(m.mean[-1], run.final.rho[:, 0])
    np.testing.assert_array_equal(m.variance[-1], 0.0)


def test_welford_matches_two_pass():
    p = PhysicsParams()
    m = mc.run_samples(arz.SHOCK, MESH, p, 1e-2, 0.1, 7, sampling="pseudo-random", seed=11)
    finals = np.array([mc.deterministic_run(arz.SHOCK, x, MESH, p, 1e-2, 0.1).final.rho[:, 0] for x in m.xi])
    np.testing.assert_allclose(m.mean[-1], finals.mean(axis=0), atol=1e-14)
    np.testing.assert_allclose(m.variance[-1], finals.var(axis=0), atol=1e-14)
    assert m.seed == 11


def test_workers_do_not_change_result():
    p = PhysicsParams()
    a = mc.run_samples(arz.SHOCK, MESH, p, 1e-2, 0.1, 6)
    b = mc.run_samples(arz.SHOCK, MESH, p, 1e-2, 0.1, 6, workers=3)
    np.testing.assert_array_equal(a.mean, b.mean)
    np.testing.assert_array_equal(a.variance, b.variance)


def test_projected_data_matches_gpc_at_t0():
    p = PhysicsParams()
    for L in (2, 4):
        b = build_haar_basis(L)
        T = compute_triple_products(b)
        s0 = arz.project_initial_data(arz.RAREFACTION, b, MESH, p)
        m = mc.run_samples(arz.RAREFACTION, MESH, p, 1e-2, 0.0, b.size)
        rep = mc.compare_with_gpc(m, [s0])
        assert rep.linf_mean[0] < 1e-14 and rep.linf_var[0] < 1e-14


def test_deterministic_scenario_errors_vanish():
    p = PhysicsParams()
    data = arz.riemann(0.3, 0.6, 0.5, 0.2)
    b = build_haar_basis(2)
    T = compute_triple_products(b)
    run = arz.run_arz(arz.project_initial_data(data, b, MESH, p), T, p, 1e-2, 0.3, record_schedule=True)
    m = mc.run_samples(data, MESH, p, 1e-2, 0.3, 4, schedule=run.schedule)
    rep = mc.compare_with_gpc(m, run.snapshots)
    assert rep.l1_mean.max() < 1e-13 and rep.l1_var.max() < 1e-13


def test_replayed_samples_equal_gpc_nodes():
    # with the Galerkin schedule and n = 2^L grid samples the two methods coincide
    p = PhysicsParams()
    b = build_haar_basis(3)
    T = compute_triple_products(b)
    run = arz.run_arz(arz.project_initial_data(arz.RAREFACTION, b, MESH, p), T, p, 1e-2, 0.5, record_schedule=True)
    m = mc.run_samples(arz.RAREFACTION, MESH, p, 1e-2, 0.5, b.size, schedule=run.schedule)
    rep = mc.compare_with_gpc(m, run.snapshots)
    assert rep.linf_mean.max() < 1e-12 and rep.linf_var.max() < 1e-12


def test_report_rows_and_mismatch():
    p = PhysicsParams()
    b = build_haar_basis(1)
    s0 = arz.project_initial_data(arz.RAREFACTION, b, MESH, p)
    m = mc.run_samples(arz.RAREFACTION, MESH, p, 1e-2, 0.0, 2)
    rep = mc.compare_with_gpc(m, [s0])
    assert len(rep.rows) == MESH.n_cells
    assert set(rep.rows[0]) == set(mc.REPORT_COLUMNS)
    with pytest.raises(ContractError):
        mc.compare_with_gpc(m, [s0, s0])
    with pytest.raises(ContractError):
        mc.compare_with_gpc(m, [arz.project_initial_data(arz.RAREFACTION, b, Mesh(0, 2, 0.1), p)])
