import json
import os
import subprocess

import pytest

import aqnn


def test_version():
    assert aqnn.__version__ == "0.1.0"


def test_kernels():
    assert aqnn.dist([0, 0], [3, 4]) == pytest.approx(5.0)
    assert aqnn.dist([1, 0], [0, 1], metric="cosine") == pytest.approx(1.0)
    assert aqnn.prf1([1, 2, 3, 9], [1, 2, 3, 4, 5, 6]) == pytest.approx((0.75, 0.5, 0.6))
    assert aqnn.speedup(8234, 600, 1000) == pytest.approx(7.49, abs=0.005)
    assert aqnn.aggregate("AVG", [72, 84, 78]) == pytest.approx(78.0)


def test_bounds():
    out = aqnn.min_sizes("AVG", alpha=0.05, rho=0.8, a=50, b=120, omega_s=5)
    assert out["s_min"] == 452
    pct = aqnn.min_sizes("PCT", alpha=0.05, omega_s=0.05, rho=1.0, omega_nn=0.1, omega_c=0.0001)
    assert pct["s_p_min"] in (739, 740)
    with pytest.raises(aqnn.InvalidArgument):
        aqnn.min_sizes("AVG", colour=1)


def test_stats():
    d = aqnn.z_test(0.5, 100, "<=", 0.4)
    assert d["statistic"] == pytest.approx(2.0412414523193148)
    assert d["reject_null"]
    t = aqnn.t_test([1, 2, 3, 4, 5], "!=", 3.0)
    assert t["statistic"] == 0.0
    with pytest.raises(aqnn.DegenerateQuery):
        aqnn.t_test([1.0], "!=", 0.0)
    assert aqnn.ht_accuracy([True, False], [True, True]) == 0.5


def test_query_zero_noise():
    out = aqnn.query("AVG", target=5, radius=6.0, s=600, s_p=300, n=2000)
    assert out["oracle_calls"] == 301
    assert out["proxy_calls"] == 601
    assert len(out["selected"]) > 0


def test_run_experiment_matches_across_calls():
    cfg = {
        "source": {"synthetic": {"n_objects": 2000, "seed": 7}, "proxy_noise": 0.4},
        "queries": "random:2",
        "radius": 6.0,
        "aggs": ["AVG"],
        "algorithms": ["sprint", "brute_force"],
        "sprint": {"s": 500, "s_p": 300},
        "trials": 2,
        "seed": 3,
    }
    a = aqnn.run_experiment(cfg)
    assert a["schema"] == "aqnn.experiment/1"
    assert a == aqnn.run_experiment(cfg)
    assert a["config"]["sprint"]["s"] == 500
    cells = a["points"][0]["metrics"]["cells"]
    assert len(cells) == 2 * 2 * 2
    for cell in cells:
        if cell["algorithm"] == "brute_force" and "re_percent" in cell:
            assert cell["re_percent"] == 0.0


def test_generate_roundtrip_through_cli(tmp_path):
    path = tmp_path / "d.jsonl"
    aqnn.generate(200, dim=4, proxy_noise=0.1, seed=1, path=str(path))
    lines = path.read_text().splitlines()
    assert json.loads(lines[0])["embedding_dim"] == 4
    assert len(lines) == 201
    cli = os.environ.get("AQNN_CLI")
    if not cli:
        pytest.skip("AQNN_CLI not set")
    res = subprocess.run([cli, "query", "--data", str(path), "--target", "0", "--radius", "3",
                          "--agg", "PCT", "--s", "150", "--sp", "100", "--json"],
                         capture_output=True, text=True)
    assert res.returncode in (0, 3), res.stderr
