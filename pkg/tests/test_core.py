from fractions import Fraction

import pytest

from sitcalc import (
    BeliefError,
    BeliefState,
    Domain,
    EvaluationError,
    GroundAction,
    Trajectory,
    evaluate,
    parse_formula,
)
from sitcalc.core import INT, Lit, format_value, norm_num


def traj_at(theory, *positions, actions=None):
    t = Trajectory.initial(0, theory.world({"position": positions[0]}))
    for i, p in enumerate(positions[1:]):
        a = actions[i] if actions else GroundAction("exact-advance", (p - positions[i],))
        t = t.extend(a, theory.world({"position": p}))
    return t


def ev(theory, text, traj, **bind):
    kinds = {k: "num" for k in bind}
    return evaluate(parse_formula(text, theory, kinds), traj, bind, theory.compiler)


def test_evaluate_fluent_plus_constant(robot):
    assert ev(robot, "position(now) + 2", traj_at(robot, 10)) == 12


def test_evaluate_parameter_arithmetic(robot):
    assert ev(robot, "abs(x - y) <= 1", traj_at(robot, 10), x=1, y=2) is True


def test_evaluate_prev_after_exact_advance(robot):
    t = traj_at(robot, 12, 10)
    assert ev(robot, "position(now) = position(prev(now)) - 2", t) is True
    assert ev(robot, "position(prev^1(now)) = 12", t) is True


def test_evaluate_is_pure(robot):
    t = traj_at(robot, 9, 11)
    f = parse_formula("position * 2 - position(prev(now))", robot)
    assert {evaluate(f, t, {}, robot.compiler) for _ in range(5)} == {13}


def test_prev_overflow_reports_location(robot):
    f = parse_formula("position(prev^2(now)) = 3", robot)
    with pytest.raises(EvaluationError, match="prev depth 2 exceeds") as e:
        evaluate(f, traj_at(robot, 10, 11), {}, robot.compiler)
    assert e.value.pos is not None and e.value.pos.line == 1


def test_division_by_zero_reports_location(robot):
    f = parse_formula("\n  position / (position - 10) = 1", robot)
    with pytest.raises(EvaluationError, match="division by zero") as e:
        evaluate(f, traj_at(robot, 10), {}, robot.compiler)
    assert e.value.pos.line == 2


def test_runtime_type_mismatch(robot):
    # bindings are unchecked at parse time, so the evaluator must catch this
    f = parse_formula("x + 1 = 2", robot, {"x": "num"})
    with pytest.raises(EvaluationError, match="type mismatch"):
        evaluate(f, traj_at(robot, 10), {"x": "A"}, robot.compiler)


def test_exact_division_stays_rational(robot):
    assert ev(robot, "position / 4", traj_at(robot, 10)) == Fraction(5, 2)
    assert ev(robot, "position / 5", traj_at(robot, 10)) == 2
    assert isinstance(ev(robot, "position / 5", traj_at(robot, 10)), int)


def test_rationals_in_lowest_terms():
    assert norm_num(Fraction(6, 4)) == Fraction(3, 2)
    assert Fraction(6, -4).denominator > 0
    assert format_value(Fraction(-3, 6)) == "-1/2"
    assert norm_num(Fraction(4, 2)) == 2 and isinstance(norm_num(Fraction(4, 2)), int)


def test_domains():
    d = Domain.int_range("D", -2, 2)
    assert list(d) == [-2, -1, 0, 1, 2]
    assert 2 in d and 3 not in d and True not in d
    s = Domain.explicit("Obj", ["A", "B"])
    assert "A" in s and "C" not in s and 1 not in s
    assert 5 in INT and Fraction(1, 2) not in INT
    with pytest.raises(EvaluationError):
        list(INT)
    assert d.spec() == "-2..2" and s.spec() == "{A, B}"


def test_world_state_total_and_in_domain(robot):
    from sitcalc import SitCalcError, WorldState

    with pytest.raises(SitCalcError, match="not total"):
        WorldState.from_mapping(robot.index, {})
    with pytest.raises(EvaluationError, match="outside domain"):
        robot.world({"position": 51})
    w = robot.world({"position": 3})
    assert w["position"] == 3 and w == robot.world({"position": 3})
    assert hash(w) == hash(robot.world({"position": 3}))


def test_belief_state_invariants(robot):
    t = traj_at(robot, 10)
    with pytest.raises(BeliefError, match="negative weight"):
        BeliefState(0, ((t, Fraction(-1)),))
    with pytest.raises(ValueError):
        BeliefState(0, ((t, Fraction(1)),), "decimal")
    b = BeliefState(0, ((t, Fraction(0)), (traj_at(robot, 11), Fraction(2))))
    assert len(b) == 2  # zero-weight member kept
    assert b.marginal("position") == {10: 0, 11: 1}


def test_compact_merges_identical_tails(robot):
    a = traj_at(robot, 8, 10)
    b = traj_at(robot, 9, 10, actions=[GroundAction("exact-advance", (1,))])
    belief = BeliefState(1, ((a, Fraction(1, 3)), (b, Fraction(1, 6))))
    c = belief.compact(0)
    assert len(c) == 1 and c.members[0][1] == Fraction(1, 2)
    assert c.members[0][0].truncated == 1
    assert len(belief.compact(1)) == 2


def test_prune_is_float_only(robot):
    b = BeliefState(0, ((traj_at(robot, 10), Fraction(1)),))
    with pytest.raises(BeliefError, match="float mode"):
        b.prune(0.1)
    fb = BeliefState(0, ((traj_at(robot, 10), 0.999), (traj_at(robot, 11), 0.001)), "float")
    assert len(fb.prune(0.01)) == 1


def test_ground_action_and_signature_print(robot):
    a = GroundAction("sense-position", (11, 10))
    assert str(a) == "sense-position(11, 10)"
    assert str(robot.signature_of(a)) == "sense-position(11)"


def test_literal_nodes_compare_without_position():
    from sitcalc.core import Pos

    assert Lit(3, Pos(1, 1)) == Lit(3, Pos(9, 9))
