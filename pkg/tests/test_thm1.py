import numpy as np
import pytest

from probecap import InfeasibleBudget, grid_oracle_thm1, joint_thm1, solve_thm1
from probecap.probability import binary_entropy, conditional_mutual_information
from probecap.thm1 import objective, simplex_lattice, thm1_problem


def test_ex1_endpoints(ex1):
    assert solve_thm1(ex1, 0.0).value == pytest.approx(0.311278, abs=2e-3)
    r = solve_thm1(ex1, 1.0)
    assert r.value == pytest.approx(0.321928, abs=2e-3)
    np.testing.assert_allclose(r.argmax["px_given_s"][:, 0], [0.4, 0.6], atol=1e-2)


def test_value_matches_joint(ex1):
    r = solve_thm1(ex1, 0.3)
    j = joint_thm1(ex1, r.argmax["pa"], r.argmax["px"])
    assert conditional_mutual_information(j, "X", "Y", "S") == pytest.approx(r.value, abs=1e-9)
    assert r.achieved_cost <= 0.3 + 1e-9


@pytest.mark.parametrize("gamma", [0.0, 0.2, 0.5, 0.75, 1.0])
def test_ex3_closed_form(ex3, gamma):
    want = 0.5 * binary_entropy((1 + 2 * gamma) / 4) if gamma <= 0.5 else 0.5
    assert solve_thm1(ex3, gamma).value == pytest.approx(want, abs=2e-3)


def test_beats_random_feasible_points(ex1, rng):
    P = thm1_problem(ex1)
    gamma = 0.4
    best = solve_thm1(ex1, gamma).value
    for _ in range(200):
        q = rng.uniform(0, gamma)
        px = rng.dirichlet(np.ones(2), size=(3, 2))
        assert objective(P, np.array([1 - q, q]), px, grad=False) <= best + 1e-9


def test_gradient_finite_differences(ex1, rng):
    P = thm1_problem(ex1)
    pa = np.array([0.3, 0.7])
    px = rng.dirichlet(np.ones(2), size=(3, 2))
    _, g_pa, g_px = objective(P, pa, px)
    h = 1e-6
    d = np.zeros_like(px)
    d[1, 1, 0] = h
    num = (objective(P, pa, px + d, grad=False) - objective(P, pa, px - d, grad=False)) / (2 * h)
    assert num == pytest.approx(g_px[1, 1, 0], abs=1e-6)
    e = np.array([h, 0])
    num = (objective(P, pa + e, px, grad=False) - objective(P, pa - e, px, grad=False)) / (2 * h)
    assert num == pytest.approx(g_pa[0], abs=1e-6)


def test_oracle_agrees(ex1):
    for gamma in (0.1, 0.5):
        o = grid_oracle_thm1(ex1, gamma, resolution=0.02)
        assert abs(o.value - solve_thm1(ex1, gamma).value) <= 5e-3
        assert o.value <= solve_thm1(ex1, gamma).value + 1e-9


def test_simplex_lattice():
    pts = simplex_lattice(3, 0.25)
    assert len(pts) == 15
    np.testing.assert_allclose(pts.sum(axis=1), 1.0)
    with pytest.raises(ValueError):
        simplex_lattice(2, 0.3)


def test_infeasible(ex1):
    with pytest.raises(InfeasibleBudget):
        solve_thm1(ex1, -0.1)


def test_curve_concave_and_nondecreasing(ex1):
    g = np.linspace(0, 1, 11)
    v = np.array([solve_thm1(ex1, x).value for x in g])
    assert np.all(np.diff(v) >= -1e-9)
    assert np.all(v[1:-1] >= 0.5 * (v[:-2] + v[2:]) - 1e-7)
