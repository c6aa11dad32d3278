import json
import math

import numpy as np
import pytest

import oracles
from conftest import euclidean
from geoward import alpha_curves, inertia_curve, tune
from geoward.dissimilarity import uniform_weights
from geoward.tuner import (
    AlphaCurves,
    TuningGrid,
    gain_loss,
    improvement,
    majority_vote,
    optimal_k,
    select_alpha_max,
    select_alpha_min,
)


def _curves(alphas, q0n=None, q1n=None, qbar=None):
    m = len(alphas)
    zeros = np.zeros(m)
    return AlphaCurves(
        k=2,
        alphas=np.asarray(alphas, dtype=float),
        q0=zeros,
        q1=zeros,
        q0_norm=np.asarray(q0n if q0n is not None else zeros, dtype=float),
        q1_norm=np.asarray(q1n if q1n is not None else zeros, dtype=float),
        q_bar=np.asarray(qbar if qbar is not None else zeros, dtype=float),
    )


def test_select_alpha_min_example():
    c = _curves([0, 0.5, 1], q0n=[1, 0.8, 0.5], q1n=[0.4, 0.8, 1])
    assert select_alpha_min(c) == 0.5


def test_select_alpha_min_ties_and_crossing():
    assert select_alpha_min(_curves([0, 0.5, 1])) == 0.0
    alphas = np.round(np.arange(0, 1.0001, 0.1), 10)
    # 1 - a crosses 0.3 + a at a = 0.35, nearest grid points 0.3 and 0.4 tie; smallest wins
    c = _curves(alphas, q0n=1 - alphas, q1n=0.3 + alphas)
    assert select_alpha_min(c) == pytest.approx(0.3)
    c = _curves(alphas, q0n=1 - alphas, q1n=0.32 + alphas)
    assert select_alpha_min(c) == pytest.approx(0.3)


def test_select_alpha_max_example():
    assert select_alpha_max(_curves([0, 0.5, 1], qbar=[0.2, 0.9, 0.4])) == 0.5
    assert select_alpha_max(_curves([0, 0.5, 1], qbar=[0.7, 0.7, 0.7])) == 0.0


def test_gain_loss_undefined_cases():
    assert gain_loss(1.0, 0.0) is None
    assert gain_loss(math.inf, 1.0) is None
    assert gain_loss(1.0, math.nan) is None
    assert improvement("dunn", None) == "undefined"


def test_improvement_examples():
    assert improvement("c_index", -10.0) == "gain"
    assert improvement("silhouette", -5.0) == "loss"
    assert improvement("dunn", 0.0) == "neutral"
    with pytest.raises(ValueError):
        improvement("davies_bouldin", 1.0)


def test_majority_vote_examples():
    assert majority_vote([4, 4, 5, 2]) == 4
    assert majority_vote([3, 3, 3]) == 3
    assert majority_vote([4, 5]) == 4


def test_optimal_k_respects_direction():
    values = {2: 0.5, 3: 0.7, 4: 0.1}
    assert optimal_k(values, "silhouette") == 3
    assert optimal_k(values, "mcclain_rao") == 4
    assert optimal_k({2: 1.0, 3: 1.0}, "dunn") == 2
    assert optimal_k({2: math.nan, 3: 0.2}, "dunn") == 3


def test_grid_validation():
    with pytest.raises(ValueError):
        TuningGrid(alphas=(0.1, 1.0))
    with pytest.raises(ValueError):
        TuningGrid(alphas=(0.0, 0.6, 0.5, 1.0))
    with pytest.raises(ValueError):
        TuningGrid(k_min=5, k_max=3)
    g = TuningGrid()
    assert len(g.alphas) == 101 and g.alphas[37] == 0.37
    assert list(g.for_size(6).ks) == [2, 3, 4, 5]


def test_inertia_curve_three_points():
    curve = inertia_curve(euclidean([0.0, 1.0, 10.0]), k_max=3)
    assert [k for k, _ in curve] == [1, 2, 3]
    np.testing.assert_allclose([w for _, w in curve], [182 / 9, 1 / 6, 0.0], atol=1e-12)


@pytest.fixture(scope="module")
def small_problem():
    rng = np.random.default_rng(21)
    X = rng.normal(size=(11, 2))
    G = X + rng.normal(scale=0.8, size=X.shape)
    D0, D1 = euclidean(X), euclidean(G)
    return D0 / D0.max(), D1 / D1.max()


def test_curves_match_summation_oracle(small_problem):
    D0n, D1n = small_problem
    n = len(D0n)
    w = uniform_weights(n).tolist()
    alphas = [0.0, 0.25, 0.5, 1.0]
    from geoward import agglomerate, cut, mix_dissimilarities

    for K in (2, 3, 5):
        c = alpha_curves(K, alphas, D0n, D1n)
        refs = {a: cut(agglomerate(mix_dissimilarities(D0n, D1n, a)), K).tolist() for a in alphas}
        T0 = oracles.pseudo_inertia(range(n), D0n.tolist(), w)
        T1 = oracles.pseudo_inertia(range(n), D1n.tolist(), w)
        q0_ref = 1 - oracles.within(refs[0.0], D0n.tolist(), w) / T0
        q1_ref = 1 - oracles.within(refs[1.0], D1n.tolist(), w) / T1
        for i, a in enumerate(alphas):
            q0 = 1 - oracles.within(refs[a], D0n.tolist(), w) / T0
            q1 = 1 - oracles.within(refs[a], D1n.tolist(), w) / T1
            assert c.q0[i] == pytest.approx(q0, abs=1e-9)
            assert c.q1[i] == pytest.approx(q1, abs=1e-9)
            assert c.q0_norm[i] == pytest.approx(q0 / q0_ref, abs=1e-9)
            assert c.q1_norm[i] == pytest.approx(q1 / q1_ref, abs=1e-9)
            assert c.q_bar[i] == pytest.approx((T0 * q0 + T1 * q1) / (T0 + T1), abs=1e-9)
        assert c.q0_norm[0] == pytest.approx(1.0) and c.q1_norm[-1] == pytest.approx(1.0)


def test_identical_matrices_select_zero(small_problem):
    D0n, _ = small_problem
    report = tune(D0n, D0n, grid=TuningGrid.regular(0.1, 2, 6))
    for K in report.grid.ks:
        np.testing.assert_allclose(report.curves[K].q0_norm, report.curves[K].q1_norm)
        assert report.alpha_min_star(K) == 0.0


def test_single_k_range(small_problem):
    report = tune(*small_problem, grid=TuningGrid.regular(0.1, 2, 2))
    assert list(report.to_dict()["per_k"][i]["k"] for i in range(1)) == [2]
    assert len(report.to_dict()["per_k"]) == 1
    assert report.selected["k_star"] == 2


def test_report_invariants(small_problem):
    report = tune(*small_problem, grid=TuningGrid.regular(0.05, 2, 6))
    alphas = set(report.grid.alphas)
    for K in report.grid.ks:
        assert report.alpha_min_star(K) in alphas and report.alpha_max_star(K) in alphas
        for criterion, stars in report.alpha_star[K].items():
            if stars == 0.0:
                for g in report.gain_loss[K][criterion].values():
                    assert g is None or g == 0.0
    sel = report.selected
    assert sel["rule"] in ("gain_loss_vote", "absolute_vote")
    assert sel["alpha_star"] in alphas


def test_refined_grid_is_never_worse(small_problem):
    coarse = tune(*small_problem, grid=TuningGrid.regular(0.1, 2, 5))
    fine = tune(*small_problem, grid=TuningGrid.regular(0.05, 2, 5))
    for K in coarse.grid.ks:
        assert fine.curves[K].q_bar.max() >= coarse.curves[K].q_bar.max() - 1e-12
        cd = np.abs(coarse.curves[K].q0_norm - coarse.curves[K].q1_norm).min()
        fd = np.abs(fine.curves[K].q0_norm - fine.curves[K].q1_norm).min()
        assert fd <= cd + 1e-12


def test_parallel_build_gives_same_report(small_problem):
    a = tune(*small_problem, grid=TuningGrid.regular(0.05, 2, 6), n_jobs=1)
    b = tune(*small_problem, grid=TuningGrid.regular(0.05, 2, 6), n_jobs=3)
    assert json.dumps(a.to_dict(), default=str) == json.dumps(b.to_dict(), default=str)


def test_features_index_matrix(small_problem):
    report = tune(*small_problem, grid=TuningGrid.regular(0.1, 2, 4), index_matrix="features")
    assert report.index_matrix == "features"
    with pytest.raises(ValueError):
        tune(*small_problem, index_matrix="geo")
