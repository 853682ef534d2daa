import json
import os

import numpy as np
import pytest

import mlpsens


def affine():
    return mlpsens.network_from_flat([1, 1], [1.0, 2.0], ["linear"])


def test_affine_sensitivities():
    net = affine()
    assert net.structure == [1, 1]
    x = np.linspace(-1, 1, 5).reshape(-1, 1)
    np.testing.assert_allclose(net.predict(x)[:, 0], 2 * x[:, 0] + 1)
    s = mlpsens.sensitivities(net, x)
    assert s.shape == (5, 1, 1)
    assert np.all(s == 2.0)


def test_model_round_trip():
    net = mlpsens.init_weights([3, 4, 2], ["tanh", "softmax"], seed=3)
    doc = mlpsens.save_model(net)
    assert json.loads(doc)["schema_version"] == "1"
    back = mlpsens.load_model(doc)
    assert back == net
    assert back.to_json() == doc
    assert [w.shape for w in back.weights] == [(4, 4), (5, 2)]


def test_softmax_rows_sum_to_zero():
    net = mlpsens.init_weights([4, 5, 3], ["sigmoid", "softmax"], seed=1, init_scale=3.0)
    x = np.random.default_rng(0).normal(size=(50, 4))
    s = mlpsens.sensitivities(net, x, threads=2)
    assert np.abs(s.sum(axis=2)).max() < 1e-10


def test_simdata_train_and_analyze():
    data = mlpsens.generate_simdata(1500, 1)
    values = data["values"]
    x, y = values[:, :3], values[:, 3:]
    net = mlpsens.init_weights([3, 10, 1], ["sigmoid", "linear"], seed=1,
                               input_names=data["inputs"], output_names=data["outputs"])
    trained, report = mlpsens.train(net, x, y, max_epochs=2000, learning_rate=0.05)
    assert report["epochs_run"] == 2000
    summary = mlpsens.analyze(trained, x)
    rows = summary["outputs"]["Y"]
    assert -0.55 <= rows["X2"]["mean"] <= -0.45
    assert summary["ranking"] == ["X1", "X2", "X3"]


def test_summarize_array():
    t = np.array([1.0, 2.0, 3.0]).reshape(3, 1, 1)
    s = mlpsens.summarize(t, combine=True)
    row = s["outputs"]["Y1"]["X1"]
    assert row["mean"] == 2.0 and row["sd"] == 1.0
    assert row["mean_sq"] == pytest.approx(14 / 3)
    assert s["combined"]["X1"] == row


def test_baselines():
    net = mlpsens.network_from_flat([1, 1, 1], [0.0, 2.0, 0.0, -3.0], ["linear", "linear"])
    assert mlpsens.olden(net)["X1"] == -6.0
    assert mlpsens.garson(net)["X1"] == 1.0
    deep = mlpsens.init_weights([2, 2, 2, 1], ["tanh", "tanh", "linear"])
    with pytest.raises(mlpsens.UnsupportedStructureError):
        mlpsens.olden(deep)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        mlpsens.network_from_flat([2, 2], [0.0] * 5, ["linear"])
    with pytest.raises(ValueError):
        mlpsens.load_model('{"schema_version": "9"}')
    with pytest.raises(mlpsens.Error):
        mlpsens.load_model("not json")
    with pytest.raises(ArithmeticError):
        x = np.linspace(-1, 1, 20).reshape(-1, 1)
        mlpsens.train(affine(), x, -3 * x + 5, learning_rate=1e3)


def test_kde_and_cli(tmp_path):
    xs, dens, h = mlpsens.kde(list(np.random.default_rng(1).normal(size=200)))
    assert len(xs) == 512 and h > 0
    assert np.trapezoid(dens, xs) == pytest.approx(1.0, abs=1e-3)
    out = str(tmp_path / "sim.csv")
    code, _, err = mlpsens.run_cli(["gen-data", "simdata", "--rows", "20", "--out", out])
    assert code == 0, err
    assert os.path.exists(out)
    code, _, _ = mlpsens.run_cli(["analyze", "--model", str(tmp_path / "missing.json"),
                                  "--dataset", out])
    assert code == 3
