import random
from fractions import Fraction as F

import pytest

from gen import small_theory, walk_signatures
from sitcalc import (
    BeliefError,
    ObservationSignature,
    SituationTree,
    oracle_bel,
    oracle_know,
    parse_formula,
    parse_theory,
)
from sitcalc.engine import apply_action
from sitcalc.oracle import all_ground_actions, successor

SENSE = ObservationSignature("sense-position", (11,))


def test_first_reading(robot):
    assert oracle_bel(robot, [SENSE], parse_formula("position = 10", robot)) == F(4, 7)


def test_depth_zero_is_initial_ratio(robot):
    assert oracle_bel(robot, [], parse_formula("position >= 10", robot)) == F(3, 4)
    assert oracle_bel(robot, [], parse_formula("position = 10", robot)) == F(1, 2)


def test_know_after_reading(robot):
    assert oracle_know(robot, [SENSE], parse_formula("position != 8", robot))
    assert not oracle_know(robot, [SENSE], parse_formula("position = 10", robot))
    assert oracle_know(robot, [SENSE], parse_formula("true", robot))


def test_empty_tree(robot):
    sig = [ObservationSignature("sense-position", (30,))]
    with pytest.raises(BeliefError, match="knowledge undefined"):
        oracle_know(robot, sig, parse_formula("true", robot))
    with pytest.raises(BeliefError, match="belief undefined"):
        oracle_bel(robot, sig, parse_formula("true", robot))


def test_tree_keeps_zero_weight_leaves(robot):
    tree = SituationTree.build(robot, [SENSE])
    # worlds 9..12 are sensing-possible; 9 has likelihood 0 for reading 11
    assert sorted(t.last["position"] for t, _ in tree.leaves) == [9, 10, 11, 12]
    assert [w for t, w in tree.leaves if t.last["position"] == 9] == [0]


def test_ground_action_count(robot):
    n = len(all_ground_actions(robot))
    assert n == 101 * 101 + 21 * 25 + 21


def test_successor_agrees_with_compiled_rules(drop_theory):
    rng = random.Random(5)
    worlds = [t for t, _ in drop_theory.initial_trajectories()]
    for _ in range(50):
        t = rng.choice(worlds)
        for a in all_ground_actions(drop_theory):
            assert successor(drop_theory, a, t) == apply_action(drop_theory, a, t)


def test_oracle_on_generated_theory_runs():
    rng = random.Random(11)
    t = parse_theory(small_theory(rng))
    sigs = walk_signatures(t, rng, 2)
    tree = SituationTree.build(t, sigs)
    assert tree.leaves and all(len(leaf.actions) == len(sigs) for leaf, _ in tree.leaves)
    assert oracle_know(t, sigs, parse_formula("true", t))
