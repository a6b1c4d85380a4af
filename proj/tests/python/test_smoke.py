import json
import math

import numpy as np
import pytest

import lacount


def test_gauss_hermite_moments():
    x, w = lacount.gauss_hermite(12)
    assert w.sum() == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert (w * x**2).sum() == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-13)
    assert np.allclose(x, -x[::-1])


def test_pair_weights():
    rect = lacount.pair_weights(4, "rectangular")
    assert rect["window"] == 4
    assert rect["weights"] == pytest.approx([0.25] * 4)
    trap = lacount.pair_weights(3, "trapezoidal")
    assert trap["window"] == 6
    assert len(trap["weights"]) == 5
    assert sum(trap["weights"]) == pytest.approx(1.0)
    assert "lag" in lacount.weights_table(2, "rect")


def test_simulate_is_reproducible():
    a = lacount.simulate([1.0], 0.3, 0.5, n=300, seed=7)
    b = lacount.simulate([1.0], 0.3, 0.5, n=300, seed=7)
    c = lacount.simulate([1.0], 0.3, 0.5, n=300, seed=7, replicate=1)
    assert a == b
    assert a != c
    assert min(a) >= 0


def test_fit_and_predict():
    sc = lacount.scenario(5)
    y = lacount.simulate([sc["beta"]], sc["sigma2"], sc["phi"], n=400, seed=11)
    f = lacount.fit(y, d=2, weights="trapezoidal", nodes=16)
    assert f["converged"]
    assert f["H"].shape == (3, 3)
    assert np.allclose(f["J"], f["J"].T)
    assert abs(f["phi"] - sc["phi"]) < 0.3
    assert f["clic"] == pytest.approx(-2 * f["loglik"] + 2 * f["trace_penalty"])
    assert len(f["se"]) == 4

    X = np.ones((24, 1))
    point, upper = lacount.predict(f["beta"], f["sigma2"], f["phi"], X, n_sim=2000, seed=3)
    assert len(point) == 24
    assert all(u >= 0 for u in upper)
    again = lacount.predict(f["beta"], f["sigma2"], f["phi"], X, n_sim=2000, seed=3)
    assert list(point) == list(again[0])


def test_independence_restriction():
    y = lacount.simulate([0.5], 0.2, 0.3, n=250, seed=2)
    f = lacount.fit(y, restriction="indep")
    assert f["sigma2"] == 0.0 and f["phi"] == 0.0
    assert f["H"].shape == (1, 1)


def test_file_roundtrip(tmp_path):
    sc = lacount.scenario(4)
    y = lacount.simulate([sc["beta"]], sc["sigma2"], sc["phi"], n=180, seed=5)
    csv = tmp_path / "series.csv"
    lines = ["date,count"]
    for t, v in enumerate(y):
        lines.append(f"{2001 + t // 12}-{t % 12 + 1:02d},{v}")
    csv.write_text("\n".join(lines) + "\n")

    report_path = tmp_path / "fit.json"
    text, table = lacount.fit_file(str(csv), d=1, harmonic=12, holdout_months=12,
                                   output=str(report_path))
    report = json.loads(text)
    assert report["schema_version"] == 1
    assert "CLIC" in table
    rows = lacount.predict_file(str(report_path), horizon=15, n_sim=500, seed=1)
    assert len(rows) == 168 + 15
    assert rows[168]["observed"] == y[168]
    assert rows[-1]["observed"] is None
    assert rows[0]["observed"] == y[0]


def test_errors_are_python_exceptions(tmp_path):
    with pytest.raises(ValueError):
        lacount.pair_weights(0, "rect")
    with pytest.raises(Exception):
        lacount.fit_file(str(tmp_path / "missing.csv"))
