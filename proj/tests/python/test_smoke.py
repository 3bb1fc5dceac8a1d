import math
from pathlib import Path

import numpy as np
import pytest

import magree

FIXTURE = Path(__file__).resolve().parents[1] / "data" / "bp_85x3x3.csv"


def test_mpd_and_rmspd():
    assert magree.mpd([1.0, 4.0, 2.5]) == 3.0
    assert magree.rmspd([0.0, 2.0]) == pytest.approx(2.0)


def test_raucpc_ec_matches_clamped_mean():
    d = np.array([0.0, 2.0, 4.0, 6.0])
    assert magree.raucpc_ec(d, 4.0) == pytest.approx(np.mean(np.maximum(0, 4 - d) / 4))


def test_fixture_distances_and_report():
    ds = magree.load_csv(FIXTURE)
    assert ds.num_subjects == 85
    assert ds.raters == ["J", "R", "S"]
    d = magree.distances(ds)
    assert d.shape == (85, 27)
    assert magree.distances(ds, "pair:J,R").shape == (85, 9)

    report = magree.analyze(ds, scope="all")
    assert len(report["rows"]) == 21
    ocp = report["rows"][0]
    assert ocp["index"] == "OCP"
    assert ocp["beta_hat"] == pytest.approx(np.mean(d < 15.0), abs=1e-6)


def test_pairwise_estimates():
    rng = np.random.default_rng(3)
    values = rng.normal(size=(40, 2))
    ds = magree.dataset_from_values([[[a], [b]] for a, b in values])
    d = magree.distances(ds)[:, 0]
    assert np.allclose(d, np.abs(values[:, 0] - values[:, 1]))
    est = magree.estimate(d, "ocp", delta0=1.0, pi0=0.5)
    assert est["beta_hat"] == pytest.approx(np.mean(d < 1.0), abs=1e-6)
    assert est["n"] == 40 and est["m"] == 1


def test_errors_are_value_errors():
    with pytest.raises(magree.MagreeError):
        magree.load_csv("/nonexistent.csv")
    with pytest.raises(ValueError):
        magree.raucpc_ec([1.0], -1.0)


def test_grading_and_curve():
    assert magree.bhsp_tau("C") == 0.5875
    assert magree.bhsp_tau("A") > magree.bhsp_tau("B") > magree.bhsp_tau("C")
    curve = magree.cp_curve([1.0, 2.0, 30.0], 20.0, steps=4)
    assert [p[1] for p in curve] == pytest.approx([0, 2 / 3, 2 / 3, 2 / 3, 2 / 3])
    assert magree.classify_curve([(0, 0), (5, 0.7), (10, 0.9), (15, 0.97), (20, 1.0)]) == "A"


def test_simulate_is_reproducible():
    assert "normal-high-noshift" in magree.preset_names()
    a = magree.simulate("normal-high-noshift", n=50, replications=20, oracle_n=5000, threads=1)
    b = magree.simulate("normal-high-noshift", n=50, replications=20, oracle_n=5000, threads=2)
    assert a == b
    assert 0.0 < a["true"] < 1.0
    assert math.isfinite(a["se_t"])
