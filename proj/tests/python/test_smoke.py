import math

import numpy as np
import pytest

import conslab


def test_grid_and_wente_linear_pair():
    g = conslab.grid(33)
    x, y = np.asarray(g["x"]), np.asarray(g["y"])
    assert len(g["interior"]) == len(x)
    phi, rep = conslab.wente_solve(33, x, y)
    assert phi.shape == x.shape
    assert rep["defined"]
    assert rep["ratio_sup"] == pytest.approx(1 / (4 * math.pi), rel=0.05)
    assert rep["ratio_sup"] <= 1.1 / (2 * math.pi)


def test_wente_rejects_wrong_length():
    with pytest.raises(conslab.Error):
        conslab.wente_solve(33, np.zeros(3), np.zeros(3))


def test_stereo_map_on_sphere():
    u = conslab.stereo_sphere_map(33, 0.3)
    assert u.shape[0] == 3
    assert np.allclose(np.linalg.norm(u, axis=0), 1.0, atol=1e-14)


def test_gauge_and_frames():
    r = conslab.gauge_summary(33, 0.3)
    assert r["verified"]
    assert r["residual_rel"] <= 1e-3
    f = conslab.frame_summary(33, 0.3)
    assert f["ratio_sup"] <= 1.1 / (2 * math.pi)


def test_fit_slope():
    h = [0.1, 0.05, 0.025]
    r = conslab.fit_slope(h, [v * v for v in h], 0.9, 3)
    assert r["slope"] == pytest.approx(2.0, abs=1e-6)
    assert r["passed"]


def test_run_config_in_memory():
    out = conslab.run({"experiment": "wente", "n": [33], "seed": 7})
    assert len(out) == 1
    assert out[0]["passed"]
    rows = out[0]["tables"]["wente.csv"].strip().splitlines()
    assert len(rows) == 21


def test_config_error():
    with pytest.raises(conslab.ConfigError):
        conslab.run({"experiment": "wente", "n": [32]})
