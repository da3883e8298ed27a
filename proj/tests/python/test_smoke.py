import math

import numpy as np
import pytest

import selinf


def test_version():
    assert selinf.__version__


def test_soft_threshold_on_identity_design():
    X = np.eye(2)
    y = np.array([3.0, 0.5])
    sol = selinf.solve_lasso(X, y, lam=1.0)
    assert sol["beta"] == pytest.approx([2.0, 0.0], abs=1e-10)
    assert sol["model"] == [0]
    assert sol["signs"] == [1]
    assert sol["kkt_residual"] <= 1e-8

    enet = selinf.solve_lasso(X, y, lam=1.0, gamma=1.0)
    assert enet["beta"][0] == pytest.approx(1.0, abs=1e-10)


def test_kkt_check_flags_perturbations():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(12, 4))
    y = rng.normal(size=12)
    lam = 0.4 * np.max(np.abs(X.T @ y))
    sol = selinf.solve_lasso(X, y, lam=lam)
    residual, _ = selinf.kkt_check(X, y, sol["beta"], lam=lam)
    assert residual <= 1e-6
    bad = np.array(sol["beta"])
    bad[0] += 0.1
    residual_bad, _ = selinf.kkt_check(X, y, bad, lam=lam)
    assert residual_bad > 1e-3


def test_polyhedron_matches_hand_example():
    A, b = selinf.build_polyhedron(np.eye(2), model=[0], signs=[1], lam=1.0)
    assert A.shape == (3, 2)
    assert np.allclose(A, [[0, 1], [0, -1], [-1, 0]])
    assert np.allclose(b, [1, 1, -1])


def test_truncated_gaussian_primitives():
    assert selinf.tn_cdf(0.0, 0.0, 1.0, [(-1.0, 1.0)]) == pytest.approx(0.5)
    union = [(-math.inf, -2.0), (2.0, math.inf)]
    assert selinf.tn_cdf(0.0, 0.0, 1.0, union) == pytest.approx(0.5)
    left, two_sided = selinf.tn_pivot(0.5, 0.0, 1.0, [(-1.0, 1.0)])
    assert two_sided == pytest.approx(2 * min(left, 1 - left))
    lo, hi = selinf.tn_interval_bounds(0.0, 1.0, [(-math.inf, math.inf)], 0.1)
    assert lo == pytest.approx(-1.6449, abs=1e-3)
    assert hi == pytest.approx(1.6449, abs=1e-3)


def test_estimate_sigma_and_lambda_rule():
    X = np.ones((4, 1))
    y = np.array([1.0, -1.0, 1.0, -1.0])
    assert selinf.estimate_sigma(X, y) == pytest.approx(4.0 / 3.0)

    lam = selinf.select_lambda(np.ones((1, 1)), sigma2=1.0, n_draws=10000, seed=3)
    assert lam == pytest.approx(2.0 * math.sqrt(2.0 / math.pi), rel=0.03)


def test_infer_end_to_end_and_determinism():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(30, 8))
    beta = np.zeros(8)
    beta[:2] = (4.0, -4.0)
    y = X @ beta + rng.normal(size=30)
    lam = selinf.select_lambda(X, sigma2=1.0, n_draws=2000, seed=1)

    res = selinf.infer(X, y, lam=lam, sigma2=1.0, alpha=0.1, mode="sign")
    assert not res["null_model"]
    assert {0, 1} <= set(res["model"])
    for iv in res["intervals"]:
        assert iv["lower"] < iv["upper"]
        assert 0.0 <= iv["p_value"] <= 1.0
        assert any(lo - 1e-9 <= iv["estimate"] <= hi + 1e-9 for lo, hi in iv["region"])

    again = selinf.infer(X, y, lam=lam, sigma2=1.0, alpha=0.1, mode="sign")
    assert [iv["lower"] for iv in res["intervals"]] == [
        iv["lower"] for iv in again["intervals"]
    ]

    # model conditioning on the same data: same selected model, valid intervals
    model_res = selinf.infer(X, y, lam=lam, sigma2=1.0, alpha=0.1, mode="model")
    assert model_res["model"] == res["model"]


def test_null_model_and_errors():
    X = np.eye(3)
    y = np.array([0.1, 0.2, -0.1])
    res = selinf.infer(X, y, lam=1e9, sigma2=1.0)
    assert res["null_model"]
    assert res["intervals"] == []

    with pytest.raises(Exception):
        selinf.tn_cdf(0.0, 0.0, -1.0, [(-1.0, 1.0)])
    with pytest.raises(Exception):
        selinf.estimate_sigma(np.eye(3), np.zeros(3))


def test_split_baseline_and_coverage_harness():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(60, 5))
    beta = np.array([5.0, -5.0, 0.0, 0.0, 0.0])
    y = X @ beta + rng.normal(size=60)
    split = selinf.data_split_baseline(X, y, sigma2=1.0, alpha=0.1, seed=4)
    assert not split["null_model"]
    for iv in split["intervals"]:
        assert iv["mode"] == "data-split"
        assert iv["lower"] < iv["upper"]

    report = selinf.run_coverage(
        n=10,
        p=5,
        true_beta=np.array([3.0, -2.0, 1.5, 0.0, 0.0]),
        replications=200,
        seed=42,
    )
    assert report["valid"]
    assert abs(report["coverage"] - 0.9) < 0.08
    assert report["fcr"] == pytest.approx(
        report["pfcr"] * report["selection_rate"], abs=1e-12
    )
