import math

import pytest

import robusthalf as rh


def test_exponents():
    assert rh.dual_exponent(2.0).value == 2.0
    assert rh.dual_exponent("inf").value == 1.0
    assert rh.Exponent(math.inf).is_infinite
    with pytest.raises(ValueError):
        rh.dual_exponent(1.5)


def test_margin_and_robust_error_agree():
    pd = rh.planted_margin_dataset(3, 2.0, 0.2, 200, eta=0.1, seed=4)
    assert rh.margin_error(pd.w, pd.data, 0.2) == pytest.approx(0.1)
    assert rh.robust_error(pd.w, pd.data, 0.2) == rh.margin_error(pd.w.normalized(), pd.data, 0.2)
    z = rh.worst_case_perturbation(pd.w, pd.data.x[0], pd.data.y[0], 0.1, 2.0)
    assert len(z) == 3


def test_learner_against_oracle():
    pd = rh.planted_margin_dataset(2, "inf", 0.3, 16, eta=0.125, seed=2, boundary_noise=True)
    opt = rh.opt_margin_subset(pd.data, 0.3)
    res = rh.learn_empirical(pd.data, 0.3, nu=0.2, restarts=64, seed=1)
    assert res.error <= 1.5 * opt.rate + 1 / 16
    assert len(res.run_errors) == 64
    grid = rh.opt_margin_grid(pd.data, 0.3, 1e-2)
    assert opt.rate <= grid.rate + 1e-12


def test_budget_and_margin():
    assert rh.mistake_budget(5, 2.0, 0.2, 0.5) == 1600
    data = rh.Dataset([[1.0, 0.0]], [1], 2.0)
    lower, upper, w = rh.max_min_margin(data)
    assert lower == pytest.approx(1.0, abs=1e-6)
    assert lower <= upper


def test_gadget():
    assert rh.rademacher_tail(2, 50) == pytest.approx(0.25)
    assert rh.anticoncentration_constant(5, 5)["C"] == pytest.approx(0.44)
    inst, phi = rh.random_instance(15, 3, seed=3)
    assert rh.value(inst, phi) == 1.0
    rep = rh.verify_completeness(inst, phi)
    assert rep["passed"]
    assert min(rep["label_cover"]) == pytest.approx(0.5)


def test_io_round_trip(tmp_path):
    pd = rh.planted_margin_dataset(2, 3.0, 0.1, 20, seed=9)
    rh.write_dataset(str(tmp_path / "d.data"), pd.data)
    back = rh.read_dataset(str(tmp_path / "d.data"))
    assert back.x == pd.data.x and back.y == pd.data.y
    rh.write_model(str(tmp_path / "w.model"), pd.w)
    assert rh.read_model(str(tmp_path / "w.model")).w == pd.w.w
