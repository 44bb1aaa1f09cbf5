"""Epistemic action reasoning with postdiction over functional fluents."""

from .aspemit import ProgramText, emit_foundational, emit_lp, emit_world
from .compile import CompiledEffectSet, add_ep, gen_ep
from .domain import (
    Domain,
    EffectProposition,
    ExecutabilityCondition,
    GoalSet,
    KnowledgeProposition,
    StaticCausalLaw,
    ValueProposition,
    ground_schemas,
    parse_domain,
    print_domain,
    validate_domain,
)
from .errors import *  # noqa: F401,F403
from .kernel import (
    HState,
    SignedValue,
    Theory,
    Triple,
    effect_history,
    evaluate,
    eval_once,
    inertial,
    knows,
    knows_not,
    now,
    sense,
    transition,
)
from .oracle import check_soundness, initial_worlds, oracle_project
from .planner import (
    ConditionalPlan,
    PlanSearchConfig,
    TransitionTree,
    parse_plan,
    plan_search,
    print_plan,
    project,
    verify_goals,
)

__version__ = "0.1.0"
