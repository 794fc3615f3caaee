import itertools

import numpy as np
import pytest
from scipy import stats

from qdart.fitness import (
    CorrelationReport,
    FitnessConfig,
    fitness,
    hat_fitness,
    proxy_selection,
    rank_with_ties,
    spearman,
)
from qdart.metrics import MetricVector


def closed_form_hat(mu, cfg=FitnessConfig()):
    if mu <= cfg.mu_min or mu >= cfg.mu_max:
        return 0.0
    if mu <= cfg.gamma:
        return (mu - cfg.mu_min) / (cfg.gamma - cfg.mu_min)
    return (cfg.mu_max - mu) / (cfg.mu_max - cfg.gamma)


def synth_metrics(values_by_id: dict[str, dict]) -> dict[str, MetricVector]:
    base = dict(mean=0.0, variance=0.0, cx=0.5, cy=0.5, skew=0.0, entropy=0.0,
                energy=0.5, euler=0, fractal_dim=1.0)
    out = {}
    for image_id, overrides in values_by_id.items():
        fields = dict(base)
        fields.update(overrides)
        out[image_id] = MetricVector(**fields)
    return out


def test_config_validation():
    with pytest.raises(ValueError):
        FitnessConfig(mu_min=0.8, gamma=0.75, mu_max=0.95)
    with pytest.raises(ValueError):
        FitnessConfig(mu_min=0.05, gamma=0.96, mu_max=0.95)
    with pytest.raises(ValueError):
        FitnessConfig(mu_min=-0.1, gamma=0.5, mu_max=0.9)


def test_hat_peak_and_boundaries():
    assert hat_fitness(0.75) == 1.0
    assert hat_fitness(0.05) == 0.0
    assert hat_fitness(0.95) == 0.0
    assert hat_fitness(0.40) == pytest.approx(0.5, abs=1e-12)


def test_hat_matches_closed_form_everywhere():
    mus = np.linspace(0.0, 1.0, 1001)
    got = hat_fitness(mus)
    want = np.array([closed_form_hat(m) for m in mus])
    assert np.abs(got - want).max() < 1e-12


def test_hat_unique_maximum_at_gamma():
    mus = np.linspace(0.0, 1.0, 2001)
    vals = hat_fitness(mus)
    peak = mus[np.argmax(vals)]
    assert abs(peak - 0.75) < 1e-3
    assert np.all(vals[np.abs(mus - 0.75) > 1e-6] < 1.0)


def test_fitness_of_image_uses_mean():
    img = np.full((16, 16), 0.75)
    assert fitness(img) == 1.0
    assert fitness(np.ones((8, 8))) == 0.0


def test_rank_with_ties_average():
    ranks = rank_with_ties([10.0, 20.0, 20.0, 30.0])
    assert list(ranks) == [1.0, 2.5, 2.5, 4.0]


def test_spearman_identical_and_reversed():
    x = [1.0, 2.0, 3.0, 4.0, 5.0]
    assert spearman(x, x)[0] == 1.0
    assert spearman(x, x[::-1])[0] == -1.0


def test_spearman_closed_formula_no_ties():
    # rho = 1 - 6*sum(d^2)/(n(n^2-1)) without ties
    rho, _ = spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])
    assert rho == pytest.approx(0.8, abs=1e-12)


def test_spearman_matches_scipy():
    rng = np.random.default_rng(0)
    for _ in range(25):
        x = rng.normal(size=30)
        y = rng.normal(size=30) + 0.5 * x
        x[rng.integers(30)] = x[rng.integers(30)]  # induce an occasional tie
        rho, p = spearman(x, y)
        expected = stats.spearmanr(x, y)
        assert rho == pytest.approx(expected.statistic, abs=1e-12)
        assert p == pytest.approx(expected.pvalue, rel=1e-9, abs=1e-12)


def test_spearman_p_value_against_exact_permutation():
    # exact permutation oracle for small n
    rng = np.random.default_rng(1)
    x = rng.normal(size=7)
    y = rng.normal(size=7)
    rho, p = spearman(x, y)
    count = 0
    total = 0
    for perm in itertools.permutations(range(7)):
        r, _ = spearman(x, np.asarray(y)[list(perm)])
        total += 1
        if abs(r) >= abs(rho) - 1e-12:
            count += 1
    exact = count / total
    assert p == pytest.approx(exact, abs=0.06)


def test_spearman_monotone_invariance():
    rng = np.random.default_rng(2)
    x = rng.normal(size=40)
    y = rng.normal(size=40)
    rho1, _ = spearman(x, y)
    rho2, _ = spearman(np.exp(x), y)
    rho3, _ = spearman(x, 3.0 * y - 7.0)
    assert rho1 == pytest.approx(rho2, abs=1e-12)
    assert rho1 == pytest.approx(rho3, abs=1e-12)


def test_spearman_input_validation():
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2])
    with pytest.raises(ValueError):
        spearman([1, 2, 3], [1, 2])
    with pytest.raises(ValueError):
        spearman([1.0, 1.0, 1.0], [1, 2, 3])


def test_proxy_selection_identical_column_tops():
    ids = [f"i{k}" for k in range(20)]
    rng = np.random.default_rng(3)
    metrics = synth_metrics({
        i: {"mean": float(rng.random()), "skew": float(rng.normal())} for i in ids
    })
    scores = {i: metrics[i].mean for i in ids}
    report = proxy_selection(metrics, scores=scores)
    assert report.top_metric() == "mean"
    assert report.entries[0].rho == 1.0


def test_proxy_selection_planted_signal_recovery():
    rng = np.random.default_rng(4)
    ids = [f"i{k}" for k in range(100)]
    cols = {i: {n: float(rng.normal()) for n in MetricVector.names
                if n not in ("euler",)} for i in ids}
    metrics = synth_metrics(cols)
    # scores = skew + small noise (SNR 3)
    scores = {i: cols[i]["skew"] + float(rng.normal()) / 3.0 for i in ids}
    report = proxy_selection(metrics, scores=scores)
    assert report.top_metric() == "skew"


def test_proxy_selection_null_data_low_rho():
    rng = np.random.default_rng(5)
    ids = [f"i{k}" for k in range(200)]
    metrics = synth_metrics({
        i: {n: float(rng.normal()) for n in MetricVector.names if n != "euler"}
        for i in ids
    })
    scores = {i: float(rng.normal()) for i in ids}
    report = proxy_selection(metrics, scores=scores)
    for entry in report.entries:
        assert abs(entry.rho) < 0.2
        assert entry.p_value > 0.01


def test_proxy_selection_agreement_and_missing_ids():
    ids = [f"i{k}" for k in range(10)]
    rng = np.random.default_rng(6)
    metrics = synth_metrics({i: {"mean": float(rng.random())} for i in ids})
    scores = {i: float(k) for k, i in enumerate(ids)}
    ratings = {i: float(k) + 0.1 for k, i in enumerate(ids)}
    ratings["ghost"] = 99.0
    report = proxy_selection(metrics, scores=scores, ratings=ratings)
    assert report.agreement is not None
    assert report.agreement.rho == 1.0
    assert "ghost" in report.missing_ids


def test_proxy_selection_invariant_to_column_rescaling():
    rng = np.random.default_rng(8)
    ids = [f"i{k}" for k in range(50)]
    cols = {i: {"mean": float(rng.random()), "skew": float(rng.normal()),
                "entropy": float(rng.random() * 8)} for i in ids}
    scores = {i: cols[i]["skew"] + float(rng.normal()) * 0.05 for i in ids}
    top_before = proxy_selection(synth_metrics(cols), scores=scores).top_metric()
    rescaled = {
        i: {"mean": v["mean"], "skew": 1000.0 * v["skew"] + 5.0,
            "entropy": v["entropy"]}
        for i, v in cols.items()
    }
    top_after = proxy_selection(synth_metrics(rescaled), scores=scores).top_metric()
    assert top_before == top_after == "skew"


def test_proxy_selection_requires_a_target():
    metrics = synth_metrics({"a": {}, "b": {}, "c": {}})
    with pytest.raises(ValueError):
        proxy_selection(metrics)


def test_proxy_selection_disjoint_ids_error():
    metrics = synth_metrics({"a": {}, "b": {}, "c": {}})
    with pytest.raises(ValueError):
        proxy_selection(metrics, scores={"x": 1.0, "y": 2.0, "z": 3.0})


def test_report_rendering(tmp_path):
    ids = [f"i{k}" for k in range(8)]
    rng = np.random.default_rng(7)
    metrics = synth_metrics({i: {"mean": float(rng.random())} for i in ids})
    scores = {i: metrics[i].mean + float(rng.normal()) * 0.01 for i in ids}
    report = proxy_selection(metrics, scores=scores)
    text = report.to_text()
    assert "mean" in text and "rho" in text
    csv_path = tmp_path / "report.csv"
    report.write_csv(csv_path)
    header = csv_path.read_text().splitlines()[0]
    assert header == "metric,target,rho,p_value,n"
    assert isinstance(report, CorrelationReport)
