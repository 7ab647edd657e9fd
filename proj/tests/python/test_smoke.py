import math

import numpy as np
import pytest

import neucept


def test_threshold_hand_cases():
    w = np.array([3.0, 2.0, -1.0, 0.5])
    tau = neucept.knockoff_threshold(w, 0.5)
    assert tau == 2.0
    assert neucept.select(w, tau) == [0, 1]
    assert neucept.knockoff_threshold(np.array([1.0, 2.0, 3.0]), 0.5) == 1.0


def test_threshold_rejects_bad_q():
    with pytest.raises(ValueError):
        neucept.knockoff_threshold(np.array([1.0]), 1.5)


def test_covariance_and_equi_s():
    x = np.array([[0.0, 0.0], [2.0, 2.0]])
    s = neucept.sample_covariance(x)
    assert np.allclose(s, [[2.0, 2.0], [2.0, 2.0]])
    d = neucept.solve_equi_s(np.array([[1.0, 0.75], [0.75, 1.0]]))
    assert np.allclose(d, [0.5, 0.5])


def test_knockoffs_preserve_shape_and_seed():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(200, 5))
    a = neucept.knockoffs(x, seed=3)
    b = neucept.knockoffs(x, seed=3)
    assert a.shape == x.shape
    assert np.array_equal(a, b)


def test_statistic_spikes_on_signal():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(2000, 4))
    xt = rng.normal(size=(2000, 4))
    y = x[:, 2].copy()
    w = neucept.statistic("marginal_corr", x, xt, y)
    assert w[2] > 0.9
    assert max(abs(w[j]) for j in (0, 1, 3)) < 0.1


def test_discover_finds_drivers():
    rng = np.random.default_rng(2)
    z = rng.normal(size=(400, 12))
    y = 2.0 * z[:, 0] + z[:, 1] + z[:, 2] + z[:, 3] + z[:, 4] + z[:, 5]
    out = neucept.discover(z, y, q=0.2, repetitions=20, seed=7)
    assert 0 in out["selected"]
    assert len(out["frequency"]) == 12


def test_cluster_and_entropy():
    blob_a = np.random.default_rng(3).normal(size=(40, 2)) * 0.1 - 5.0
    blob_b = np.random.default_rng(4).normal(size=(40, 2)) * 0.1 + 5.0
    v = np.vstack([blob_a, blob_b])
    out = neucept.cluster(v, 2, method="kmeans", seed=5)
    labels = out["labels"]
    truth = [0] * 40 + [1] * 40
    assert neucept.clusters_entropy(labels, truth) == pytest.approx(0.0)
    assert neucept.clusters_entropy([0] * 80, truth) == pytest.approx(1.0)


def test_xor_oracle():
    z = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.int32)
    y = [0, 1, 1, 0]
    assert neucept.empirical_mi(z, [0], y) == pytest.approx(0.0)
    assert neucept.empirical_mi(z, [0, 1], y) == pytest.approx(1.0)
    subset, mi = neucept.discrete_cni(z, y, 2)
    assert subset == [0, 1]
    assert mi == pytest.approx(1.0)


def test_linear_case_shapes():
    case = neucept.linear_gaussian_case(20, 5, 3.5, 0.3, 100, seed=9)
    assert case["x"].shape == (100, 20)
    assert case["y"].shape == (100,)
    assert len(case["support"]) == 5


def test_synth_trace_mechanism_recovery():
    t = neucept.synth_trace([16, 12], [8, 8], k_true=4, n=400, pkt=True, seed=11)
    critical = t["critical_sets"][1]
    v = t["L1"][:, critical]
    labels = neucept.cluster(v, 4, method="kmeans", seed=12)["labels"]
    ce = neucept.clusters_entropy(labels, t["prior_labels"])
    assert ce <= 0.3
    assert math.isclose(neucept.label_entropy(t["prior_labels"]), 2.0, abs_tol=1e-9)
