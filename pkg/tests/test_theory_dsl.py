from fractions import Fraction

import pytest

from conftest import data_text
from sitcalc import (
    EffectClause,
    ParseError,
    TheoryError,
    compile_effect_axioms,
    parse_formula,
    parse_scenario,
    parse_theory,
    validate_theory,
)
from sitcalc.core import BinOp, FluentRef, Lit, Var
from sitcalc.programs import Prim, ProcCall
from sitcalc.scenario import Exec, Observe, Query
from sitcalc.theory import Pattern


def errors_of(text):
    with pytest.raises(TheoryError) as e:
        parse_theory(text)
    return [d for d in e.value.diagnostics if d.severity == "error"]


# -- parse_theory -----------------------------------------------------------


def test_robot_theory_shape(robot):
    assert set(robot.actions) == {"sense-position", "advance", "exact-advance"}
    assert list(robot.rules) == ["position"]
    assert [p.mode for p in robot.actions["advance"].params] == ["nominal", "actual"]
    assert robot.actions["exact-advance"].observe_key == "exact-advance"
    assert len(robot.init) == 5


def test_frame_only_theory():
    t = parse_theory("domain Col = {red, green}\nfluent Colour : Col\n")
    rule = t.rule("Colour")
    assert rule.cases == ()
    assert rule.axiom_text() == "Colour' ≡ Colour"


def test_negative_likelihood_rejected():
    errs = errors_of("fluent f : bool\naction a()\n  likelihood: -1/4\n")
    assert "likelihood must be nonnegative" in errs[0].message


def test_negative_likelihood_found_by_enumeration():
    text = (
        "domain D = 0..2\nfluent f : D\n"
        "action a(nominal x: D)\n  likelihood: f - 1\n"
        "init { world {f = 0} weight 1 ; }\n"
    )
    assert "likelihood must be nonnegative" in errors_of(text)[0].message


def test_syntax_error_has_position():
    errs = errors_of("domain D = 0..3\nfluent f : D\naction a(nominal x: D)\n  poss: x = \n")
    assert "syntax error" in errs[0].message
    assert errs[0].pos.line == 5


def test_unknown_identifier():
    errs = errors_of("domain D = 0..3\nfluent f : D\naction a(nominal x: D)\n  poss: zz = 1\n")
    assert errs[0].message == "unknown identifier zz"
    assert (errs[0].pos.line, errs[0].pos.col) == (4, 9)


def test_hyphenated_name_hint():
    errs = errors_of("domain D = 0..3\nfluent f : D\naction a(nominal x: D, nominal y: D)\n  poss: x-y = f\n")
    assert "x - y" in errs[0].message


def test_type_mismatch():
    errs = errors_of("domain D = 0..3\nfluent f : D\naction a(nominal x: D)\n  poss: x = true\n")
    assert "type mismatch" in errs[0].message


def test_duplicate_successor_rule():
    text = (
        "domain D = 0..3\nfluent f : D\naction a(nominal x: D)\n"
        "successor f { case a(x) => 1 ; }\nsuccessor f { case a(x) => 2 ; }\n"
    )
    assert "duplicate successor rule" in errors_of(text)[0].message


def test_mixed_kind_domain():
    assert "mixes" in errors_of("domain D = {1, A}\n")[0].message


def test_unicode_aliases(robot):
    a = parse_formula("¬(position ≥ 3) ∧ position ≠ 2 ⊃ ∃ v ∈ Pos . v = position", robot)
    b = parse_formula("not (position >= 3) and position != 2 -> exists v: Pos . v = position", robot)
    assert a == b


def test_rational_and_decimal_literals(robot):
    assert parse_formula("1/4", robot) == Lit(Fraction(1, 4))
    assert parse_formula("0.25", robot) == parse_formula("1/4", robot)


def test_prev_syntax(robot):
    f = parse_formula("position(prev^2(now))", robot)
    assert f == FluentRef("position", (), 2)
    assert parse_formula("position(prev(prev(now)))", robot) == f
    assert parse_formula("position(s_now)", robot) == FluentRef("position", (), 0)


def test_unreachable_case_warning():
    t = parse_theory(
        "domain D = 0..3\nfluent f : D\naction a(nominal x: D)\n"
        "successor f { case a(x) => 1 ; case a(2) => 2 ; }\n"
    )
    assert any("unreachable" in d.message for d in t.warnings)


def test_program_definitions(robot):
    pd = robot.programs["noisy-advance"]
    assert pd.params == (("x", "Cmd"),)
    assert pd.body.var == "y"


def test_fluent_defaults(drop_theory):
    w = drop_theory.world({("Holding", ("A",)): True, ("Holding", ("B",)): False,
                           ("Fragile", ("A",)): True, ("Fragile", ("B",)): False})
    assert w[("Broken", ("A",))] is False


# -- compile_effect_axioms ----------------------------------------------------


def test_broken_effects_compile_to_frame_axiom():
    t = parse_theory(
        """
domain Obj = {A, B}
domain Robot = {R}
fluent Fragile(x: Obj) : bool
fluent NextTo(b: Obj, x: Obj) : bool
fluent Broken(x: Obj) : bool
action drop(nominal r: Robot, nominal x: Obj)
action explode(nominal b: Obj)
action repair(nominal r: Robot, nominal x: Obj)
effects Broken(x) {
  +drop(r, x) when Fragile(x) ;
  +explode(b) when NextTo(b, x) ;
  -repair(r, x) ;
}
"""
    )
    rule = t.rules["Broken"]
    assert [c.value for c in rule.cases] == [Lit(True), Lit(True), Lit(False)]
    text = rule.axiom_text()
    assert text.endswith("(Broken(x) ∧ ¬(∃r. a = repair(r, x)))")
    assert "(∃b. a = explode(b) ∧ NextTo(b, x))" in text


def test_empty_clause_list_is_pure_frame():
    rule = compile_effect_axioms([], "Colour")
    assert rule.fluent == "Colour" and rule.cases == ()


def test_single_functional_clause():
    clause = EffectClause(
        "position",
        Pattern("advance", (Var("x"), Var("y"))),
        value=BinOp("+", FluentRef("position"), Var("y")),
    )
    rule = compile_effect_axioms([clause])
    assert len(rule.cases) == 1
    assert rule.axiom_text() == "position' = if (∃x,y. a = advance(x, y)) then position + y else position"


def test_compile_rejects_mixed_fluents():
    a = EffectClause("F", Pattern("a", ()), "+")
    b = EffectClause("G", Pattern("a", ()), "+")
    with pytest.raises(TheoryError, match="mix target fluents"):
        compile_effect_axioms([a, b])


def test_compile_rejects_mixed_kinds():
    a = EffectClause("F", Pattern("a", ()), "+")
    b = EffectClause("F", Pattern("b", ()), None, Lit(3))
    with pytest.raises(TheoryError, match="relational and functional"):
        compile_effect_axioms([a, b])


# -- validate_theory ------------------------------------------------------------


def test_advance_is_forward_normalized(robot):
    diags = validate_theory(robot)
    assert not [d for d in diags if "advance" in d.message]


def test_sense_position_normalization_warning(robot):
    diags = validate_theory(robot)
    warn = [d for d in diags if d.severity == "warning"]
    assert len(warn) == 1
    assert "sense-position" in warn[0].message


def test_unbounded_actual_domain():
    errs = errors_of("domain D = 0..3\nfluent f : D\naction a(nominal x: D, actual y: int)\n")
    assert errs[0].message.startswith("actual parameter domain must be finite")


def test_validate_is_deterministic(robot):
    assert validate_theory(robot) == validate_theory(robot)


def test_group_shape_mismatch():
    text = (
        "domain D = 0..1\ndomain Obj = {A}\nfluent f : D\n"
        "action a(nominal x: D)\n  observe: (g, x)\n"
        "action b(nominal o: Obj)\n  observe: (g, o)\n"
    )
    assert "disagree on visible arguments" in errors_of(text)[0].message


# -- parse_scenario ---------------------------------------------------------------


def test_two_step_scenario(robot):
    sc = parse_scenario("observe sense-position(11); query bel position = 10", robot)
    assert [type(s) for s in sc.steps] == [Observe, Query]
    assert str(sc.steps[0].signature) == "sense-position(11)"


def test_full_script_has_eight_progressions(robot):
    sc = parse_scenario(data_text("s0to8.scn"), robot)
    moves = [s for s in sc.steps if isinstance(s, (Observe, Exec))]
    assert len(moves) == 8
    assert isinstance(moves[2].program, Prim) and moves[2].program.schema == "exact-advance"
    assert isinstance(moves[5].program, ProcCall)


def test_unknown_schema_in_scenario(robot):
    with pytest.raises(ParseError, match="unknown action schema"):
        parse_scenario("observe teleport(3)", robot)


def test_malformed_step(robot):
    with pytest.raises(ParseError, match="malformed step"):
        parse_scenario("wait 3", robot)


def test_scenario_query_must_be_formula(robot):
    with pytest.raises(ParseError, match="type mismatch"):
        parse_scenario("query bel position + 1", robot)


def test_actual_block(drop_theory):
    sc = parse_scenario(data_text("drop.scn"), drop_theory)
    assert sc.actual[("Fragile", ("A",))] is True
