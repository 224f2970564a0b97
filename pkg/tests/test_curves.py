import numpy as np
import pytest

from probecap import SweepCurve, cutoff_point, parse_grid, solve_thm1, sweep, upper_concave_envelope
from probecap.curves import time_sharing_baseline


def test_parse_grid():
    np.testing.assert_allclose(parse_grid("0:1:5"), [0, 0.25, 0.5, 0.75, 1])
    for bad in ("0:1", "0:1:1", "1:0:3", "a:b:c"):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_shape_flags():
    g = np.linspace(0, 1, 5)
    assert SweepCurve(g, np.sqrt(g)).concave
    assert not SweepCurve(g, g ** 2).concave
    assert not SweepCurve(g, -g).monotone
    assert not SweepCurve(g, g, errors={1: "x"}).monotone


def test_envelope_brute_force(rng):
    g = np.sort(rng.random(9))
    v = rng.random(9)
    env = upper_concave_envelope(SweepCurve(g, v)).values
    assert np.all(env >= v - 1e-12)
    assert SweepCurve(g, env).concave
    # least majorant: every envelope value is a chord value between two points
    for k in range(len(g)):
        chords = [v[k]]
        for i in range(k + 1):
            for j in range(k, len(g)):
                if g[j] > g[i]:
                    lam = (g[j] - g[k]) / (g[j] - g[i])
                    chords.append(lam * v[i] + (1 - lam) * v[j])
        assert env[k] == pytest.approx(max(chords), abs=1e-12)


def test_sweep_records_failures(ex1):
    c = sweep(solve_thm1, ex1, [-1.0, 0.5])
    assert 0 in c.errors and 1 not in c.errors
    rows = list(c.rows())
    assert rows[0][3] == "failed"


def test_sweep_is_ordered_and_deterministic(ex1, monkeypatch):
    g = np.linspace(0, 1, 6)
    monkeypatch.setenv("PROBECAP_THREADS", "3")
    a = sweep(solve_thm1, ex1, g).values
    monkeypatch.setenv("PROBECAP_THREADS", "1")
    b = sweep(solve_thm1, ex1, g).values
    np.testing.assert_array_equal(a, b)


def test_cutoff_flat_curve():
    g = np.linspace(0, 1, 11)
    assert cutoff_point(SweepCurve(g, np.full(11, 0.3))) == 0.0


def test_cutoff_ex1(ex1):
    c = sweep(solve_thm1, ex1, np.linspace(0, 1, 26))
    assert cutoff_point(c) == pytest.approx(0.2, abs=0.02)


def test_time_sharing_baseline():
    c = time_sharing_baseline(1.0, 2.0, [0, 0.5, 1])
    np.testing.assert_allclose(c.values, [1, 1.5, 2])


def test_csv_and_json(tmp_path, ex1):
    c = sweep(solve_thm1, ex1, [0.0, 1.0])
    p = tmp_path / "c.csv"
    c.to_csv(p, {"seed": 3})
    lines = p.read_text().splitlines()
    assert lines[0] == "# seed: 3"
    assert lines[1] == "gamma,value_bits,achieved_cost,status"
    assert len(lines) == 4
    js = c.to_json({"seed": 3})
    assert js["meta"]["seed"] == 3 and len(js["points"]) == 2
