import numpy as np
import pytest

from probecap import joint_thm1, joint_thm2, joint_thm3, joint_thm4
from probecap.model import (CostTable, StrategyPair, bsc, expected_cost, s_channel,
                            thm2_aux_bound, thm3_aux_bound, z_channel)
from probecap.probability import conditional_mutual_information, mutual_information


def test_component_channels():
    np.testing.assert_allclose(s_channel(0.5), [[0.5, 0.5], [0, 1]])
    np.testing.assert_allclose(z_channel(0.5), [[1, 0], [0.5, 0.5]])
    np.testing.assert_allclose(bsc(0.3), [[0.7, 0.3], [0.3, 0.7]])


def test_example_shapes(ex1, ex2, ex3, ex1_two_sided):
    assert ex1.encoder_only and ex1.decoder_has_csi()
    assert ex2.encoder_only and not ex2.decoder_has_csi()
    assert ex3.input_constraint is not None
    assert not ex1_two_sided.encoder_only
    assert ex1.Se.size == 3


def test_cost_table_rejects_negative():
    with pytest.raises(ValueError):
        CostTable(np.array([[-1.0]]))


def test_aux_bounds(ex1, ex2):
    assert thm3_aux_bound(ex2) == 2
    assert thm2_aux_bound(ex1) >= thm3_aux_bound(ex1)


def test_thm1_markov_and_cost(ex1):
    pa = np.array([0.4, 0.6])
    px = np.full((3, 2, 2), 0.5)
    j = joint_thm1(ex1, pa, px)
    # Y depends on (A, Se) only through (X, S)
    assert conditional_mutual_information(j, ["A", "Se"], "Y", ["X", "S"]) == pytest.approx(0, abs=1e-12)
    assert expected_cost(j, ex1.cost) == pytest.approx(0.6)


def test_thm2_markov(ex2, rng):
    pa = np.array([0.5, 0.5])
    pu = rng.dirichlet(np.ones(3), size=(3, 2))
    f = rng.integers(0, 2, size=(3, 3))
    j = joint_thm2(ex2, pa, pu, f)
    # U is chosen from (Se, A) only
    assert conditional_mutual_information(j, "U", "S", ["Se", "A"]) == pytest.approx(0, abs=1e-12)


def test_thm3_action_independent_of_state(ex1):
    strat = StrategyPair(np.array([0, 1]), np.array([[0, 0, 0], [1, 0, 1]]))
    j = joint_thm3(ex1, np.array([0.5, 0.5]), strat)
    assert mutual_information(j, "A", "S") == pytest.approx(0, abs=1e-12)


def test_thm4_joint(ex1_two_sided):
    g = np.zeros((2, 2), dtype=int)
    f = np.zeros((2, 3, 2), dtype=int)
    f[1] = 1
    j = joint_thm4(ex1_two_sided, np.array([1.0, 0.0]), np.full((2, 2), 0.5), StrategyPair(g, f))
    assert mutual_information(j, ["U", "Ad"], "S") == pytest.approx(0, abs=1e-12)


def test_cardinality_enforced(ex2):
    pu = np.full((3, 2, 50), 1 / 50)
    with pytest.raises(ValueError):
        joint_thm2(ex2, np.array([1.0, 0.0]), pu, np.zeros((50, 3), dtype=int))
