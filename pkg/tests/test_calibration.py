"""Tests for parameter handling and accuracy calibration."""

import numpy as np
import pytest

from lbmfd import calibration as cal
from lbmfd.errors import DomainError, NoRealRoot

# Recorded high-precision sixth-order triples (omega0, s1, s2), one per
# mesh Fourier number.  Used as regression pins at 1e-9 relative.
SIXTH_REFERENCE = {
    0.1: (0.8310204592587027, 0.9159290534201945, 1.1450386147380731),
    0.15: (0.8101626131270389, 0.775103705680168, 1.1476236168426883),
    0.175: (0.8370678725639358, 0.6352970255557769, 1.1776696173022918),
    0.2: (0.870066309422671, 0.49037716562528605, 1.2047312964902426),
    0.24: (0.9274277013170459, 0.2626707812024917, 1.2388413217086902),
}

# Closed-form fourth-order values at s1 = 1: omega0 = 1 - 2*epsilon and
# s2 = (6 - 12*epsilon) / (5 - 6*epsilon).
FOURTH_REFERENCE = {
    0.1: (0.8, 12.0 / 11.0),
    0.15: (0.7, 42.0 / 41.0),
    0.175: (0.65, 78.0 / 79.0),
    0.2: (0.6, 18.0 / 19.0),
    0.24: (0.52, 78.0 / 89.0),
}


def test_weights_from_omega0_splits_the_rest_weight():
    w = cal.weights_from_omega0(0.8)
    np.testing.assert_allclose(w.omega0, 0.8, rtol=1e-15)
    np.testing.assert_allclose(w.omega1, 0.1, rtol=1e-15)
    w = cal.weights_from_omega0(1.0 / 3.0)
    np.testing.assert_allclose(w.omega1, 1.0 / 3.0, rtol=1e-15)


def test_weights_from_omega0_rejects_closed_ends():
    for omega0 in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(DomainError):
            cal.weights_from_omega0(omega0)


def test_weights_dataclass_rejects_inconsistent_pair():
    with pytest.raises(DomainError):
        cal.Weights(0.8, 0.2)


def test_relaxations_validation():
    r = cal.Relaxations(1.0, 0.5, 1.5)
    assert (r.s0, r.s1, r.s2) == (1.0, 0.5, 1.5)
    cal.Relaxations(-5.0, 0.5, 1.5)
    with pytest.raises(DomainError):
        cal.Relaxations(float("inf"), 0.5, 1.5)
    with pytest.raises(DomainError):
        cal.Relaxations(1.0, 2.0, 1.5)
    with pytest.raises(DomainError):
        cal.Relaxations(1.0, 0.5, 0.0)


def test_collision_presets():
    r = cal.from_srt(1.2)
    assert (r.s0, r.s1, r.s2) == (1.2, 1.2, 1.2)
    r = cal.from_trt(1.1, 0.7)
    assert (r.s0, r.s1, r.s2) == (1.1, 0.7, 1.1)
    r = cal.from_regularized(0.9)
    assert (r.s0, r.s1, r.s2) == (1.0, 0.9, 1.0)
    r = cal.from_modified_lattice_kinetic(0.8, 0.5)
    np.testing.assert_allclose(r.s1, 0.8 / 0.6, rtol=1e-15)
    assert (r.s0, r.s2) == (0.8, 0.8)
    with pytest.raises(DomainError):
        cal.from_modified_lattice_kinetic(1.25, 0.8)


def test_mesh_fourier_values():
    np.testing.assert_allclose(cal.mesh_fourier(0.8, 1.0), 0.1, rtol=1e-14)
    np.testing.assert_allclose(cal.mesh_fourier(0.6, 1.0), 0.2, rtol=1e-14)
    for eps, (omega0, s1, _) in SIXTH_REFERENCE.items():
        np.testing.assert_allclose(cal.mesh_fourier(omega0, s1), eps,
                                   rtol=1e-12)
    with pytest.raises(DomainError):
        cal.mesh_fourier(1.0, 1.0)
    with pytest.raises(DomainError):
        cal.mesh_fourier(0.8, 2.0)


def test_model_params_from_rates_and_diffusivity():
    params = cal.ModelParams.from_rates(0.8, 1.0, 1.0, dx=0.025, dt=0.01875)
    np.testing.assert_allclose(params.kappa, 1.0 / 300.0, rtol=1e-14)
    np.testing.assert_allclose(cal.diffusivity(params), params.kappa,
                               rtol=1e-15)
    np.testing.assert_allclose(params.epsilon, 0.1, rtol=1e-14)
    rng = np.random.default_rng(7)
    for _ in range(20):
        omega0 = rng.uniform(0.05, 0.95)
        s1 = rng.uniform(0.1, 1.9)
        s2 = rng.uniform(0.1, 1.9)
        dx = rng.uniform(0.01, 0.5)
        dt = rng.uniform(0.01, 0.5)
        params = cal.ModelParams.from_rates(omega0, s1, s2, dx=dx, dt=dt)
        np.testing.assert_allclose(
            cal.diffusivity(params) * params.dt / params.dx ** 2,
            params.epsilon, rtol=1e-13)


def test_model_params_rejects_inconsistent_fields():
    good = cal.ModelParams.from_rates(0.8, 1.0, 1.0, dx=0.1, dt=0.3)
    with pytest.raises(DomainError):
        cal.ModelParams(good.dx, good.dt, good.kappa * 1.01, 0.0,
                        good.weights, good.relax, good.epsilon)
    with pytest.raises(DomainError):
        cal.ModelParams(good.dx, good.dt, good.kappa, 0.0,
                        good.weights, good.relax, good.epsilon * 1.01)
    with pytest.raises(DomainError):
        cal.ModelParams(-0.1, good.dt, good.kappa, 0.0,
                        good.weights, good.relax, good.epsilon)


def test_residual_second_vanishes_on_calibrated_parameters():
    assert abs(cal.residual_second(0.8, 1.0, 12.0 / 11.0, 0.1)) < 1e-15
    assert abs(cal.residual_second(0.6, 1.0, 18.0 / 19.0, 0.2)) < 1e-15
    for eps, (omega0, s1, s2) in SIXTH_REFERENCE.items():
        assert abs(cal.residual_second(omega0, s1, s2, eps)) < 1e-9


def test_residual_fourth_separates_the_orders():
    for eps, (omega0, s1, s2) in SIXTH_REFERENCE.items():
        assert abs(cal.residual_fourth(omega0, s1, s2, eps)) < 1e-9
    # Fourth-order parameters leave the next truncation term standing.
    assert abs(cal.residual_fourth(0.8, 1.0, 12.0 / 11.0, 0.1)) > 1e-6


def test_calibrate_sixth_matches_reference_triples():
    for eps, (omega0, s1, s2) in SIXTH_REFERENCE.items():
        res = cal.calibrate_sixth(eps)
        np.testing.assert_allclose(res.omega0, omega0, rtol=1e-9)
        np.testing.assert_allclose(res.s1, s1, rtol=1e-9)
        np.testing.assert_allclose(res.s2, s2, rtol=1e-9)
        assert res.order == "sixth"


def test_calibrate_sixth_residuals_and_identity():
    rng = np.random.default_rng(11)
    for eps in rng.uniform(0.01, 0.25, size=25):
        res = cal.calibrate_sixth(float(eps))
        assert abs(res.residual_second) <= 1e-12
        assert abs(res.residual_fourth) <= 1e-12
        assert abs(cal.residual_second(res.omega0, res.s1, res.s2,
                                       res.epsilon)) <= 1e-12
        np.testing.assert_allclose(cal.mesh_fourier(res.omega0, res.s1),
                                   eps, rtol=1e-10)


def test_calibrate_sixth_rejects_nonpositive_epsilon():
    for eps in (0.0, -0.1):
        with pytest.raises(DomainError):
            cal.calibrate_sixth(eps)


def test_calibrate_sixth_beyond_the_solvable_range():
    with pytest.raises(NoRealRoot) as info:
        cal.calibrate_sixth(0.3)
    assert "0.262" in str(info.value)


def test_epsilon_max_brackets_the_boundary():
    em = cal.epsilon_max()
    assert 0.255 < em < 0.270
    cal.calibrate_sixth(em)
    cal.calibrate_sixth(em - 1e-4)
    with pytest.raises(NoRealRoot):
        cal.calibrate_sixth(em + 1e-3)


def test_calibrate_fourth_closed_form():
    for eps, (omega0, s2) in FOURTH_REFERENCE.items():
        res = cal.calibrate_fourth(eps, 1.0)
        assert res.omega0 == omega0
        np.testing.assert_allclose(res.s2, s2, atol=1e-14)
        assert res.s1 == 1.0
        assert res.order == "fourth"
        assert abs(res.residual_second) <= 1e-12


def test_calibrate_fourth_validation():
    with pytest.raises(DomainError):
        cal.calibrate_fourth(0.0, 1.0)
    with pytest.raises(DomainError):
        cal.calibrate_fourth(0.1, 2.0)
    # epsilon = 0.6 at s1 = 1 forces omega0 = -0.2.
    with pytest.raises(DomainError):
        cal.calibrate_fourth(0.6, 1.0)


def test_second_order_reference_values():
    res = cal.second_order_reference(0.1)
    assert res.omega0 == 0.8
    assert res.s1 == 1.0 and res.s2 == 1.0
    assert res.order == "second"
    assert abs(res.residual_second) > 1e-3
    for eps in (0.0, 0.5, -0.2):
        with pytest.raises(DomainError):
            cal.second_order_reference(eps)


def test_calibration_result_validates_residuals_and_order():
    res = cal.calibrate_sixth(0.1)
    with pytest.raises(DomainError):
        cal.CalibrationResult(0.1, res.omega0, res.s1, res.s2,
                              residual_second=1e-3, residual_fourth=0.0,
                              order="sixth")
    with pytest.raises(DomainError):
        cal.CalibrationResult(0.1, res.omega0, res.s1, res.s2,
                              residual_second=0.0, residual_fourth=0.0,
                              order="fifth")


def test_calibration_result_json_keys():
    payload = cal.calibrate_sixth(0.1).to_json_dict()
    assert tuple(payload) == ("epsilon", "omega0", "s1", "s2",
                              "residual_second", "residual_fourth", "order")
    assert payload["order"] == "sixth"


def test_calibration_sweep_reproduces_the_reference_grid():
    rows = cal.calibration_sweep((0.1, 0.15, 0.175, 0.2, 0.24))
    assert [r.status for r in rows] == ["ok"] * 5
    for row in rows:
        omega0, s1, s2 = SIXTH_REFERENCE[row.epsilon]
        np.testing.assert_allclose(row.omega0, omega0, rtol=1e-9)
        np.testing.assert_allclose(row.s1, s1, rtol=1e-9)
        np.testing.assert_allclose(row.s2, s2, rtol=1e-9)


def test_calibration_sweep_stays_in_the_parameter_box():
    grid = np.linspace(0.01, 0.25, 49)
    rows = cal.calibration_sweep(grid)
    assert all(r.status == "ok" for r in rows)
    for row in rows:
        assert 0.79 < row.omega0 < 1.0
        assert 0.0 < row.s1 < 0.95
        assert 1.1 < row.s2 < 2.0
    # The solution branch is smooth: adjacent rows 0.005 apart in epsilon
    # move every parameter by less than 0.1.
    for a, b in zip(rows, rows[1:]):
        assert abs(b.omega0 - a.omega0) < 0.1
        assert abs(b.s1 - a.s1) < 0.1
        assert abs(b.s2 - a.s2) < 0.1


def test_calibration_sweep_flags_unsolvable_points():
    rows = cal.calibration_sweep((0.25, 0.26, 0.27, 0.28))
    assert [r.status for r in rows] == ["ok", "ok", "no_real_root",
                                        "no_real_root"]
    for row in rows[2:]:
        assert row.omega0 is None and row.s1 is None and row.s2 is None


def test_calibration_sweep_rejects_bad_grids():
    with pytest.raises(DomainError):
        cal.calibration_sweep(())
    with pytest.raises(DomainError):
        cal.calibration_sweep((0.1, 0.1))
    with pytest.raises(DomainError):
        cal.calibration_sweep((-0.1, 0.2))
