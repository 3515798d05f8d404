"""Epistemic situation calculus with noisy actions: theories, exact belief progression, queries."""

from .core import (
    BeliefError,
    BeliefState,
    Domain,
    EvaluationError,
    GroundAction,
    ObservationSignature,
    SitCalcError,
    Trajectory,
    WorldState,
    evaluate,
)
from .engine import (
    StepOutcome,
    apply_action,
    bel,
    initial_belief,
    know,
    likelihood,
    oi_class,
    poss,
    progress,
    run_program,
    signature,
    simulate_observation,
    simulate_program,
    simulate_step,
)
from .gaussian import (
    DiscretePMF,
    GaussianBelief,
    discretize_normal,
    kalman_correct,
    kalman_predict,
)
from .oracle import SituationTree, oracle_bel, oracle_know
from .parser import ParseError, parse_formula, parse_program, parse_theory
from .printer import expr_str, program_str, theory_str
from .programs import Choice, Ground, Pi, Prim, ProcCall, Program, Seq
from .scenario import Scenario, Trace, parse_scenario, run_scenario
from .theory import (
    ActionSchema,
    ActionTheory,
    Diagnostic,
    EffectClause,
    SuccessorStateRule,
    TheoryError,
    compile_effect_axioms,
    validate_theory,
)

__version__ = "0.1.0"

__all__ = [
    "BeliefError",
    "BeliefState",
    "Domain",
    "EvaluationError",
    "GroundAction",
    "ObservationSignature",
    "SitCalcError",
    "Trajectory",
    "WorldState",
    "evaluate",
    "StepOutcome",
    "apply_action",
    "bel",
    "initial_belief",
    "know",
    "likelihood",
    "oi_class",
    "poss",
    "progress",
    "run_program",
    "signature",
    "simulate_observation",
    "simulate_program",
    "simulate_step",
    "DiscretePMF",
    "GaussianBelief",
    "discretize_normal",
    "kalman_correct",
    "kalman_predict",
    "SituationTree",
    "oracle_bel",
    "oracle_know",
    "ParseError",
    "parse_formula",
    "parse_program",
    "parse_theory",
    "expr_str",
    "program_str",
    "theory_str",
    "Choice",
    "Ground",
    "Pi",
    "Prim",
    "ProcCall",
    "Program",
    "Seq",
    "Scenario",
    "Trace",
    "parse_scenario",
    "run_scenario",
    "ActionSchema",
    "ActionTheory",
    "Diagnostic",
    "EffectClause",
    "SuccessorStateRule",
    "TheoryError",
    "compile_effect_axioms",
    "validate_theory",
]
