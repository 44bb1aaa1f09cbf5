"""
Planning for a diagnosis, and checking it against possible worlds
==================================================================

Search a plan whose execution may reveal the sitting abnormality, compare
the knowledge the agent gains with brute force over all possible worlds,
and emit the same problem as an answer set program.
"""

from importlib.resources import files

from hpxf import Theory, GoalSet, PlanSearchConfig, plan_search, print_plan, project
from hpxf.aspemit import emit_lp
from hpxf.errors import NoPlan
from hpxf.oracle import check_soundness, oracle_project

th = Theory.from_text(files("hpxf").joinpath("data/wheelchair.hpx").read_text())

# weak goal: in at least one branch the agent knows ab_sit=true
weak = GoalSet(strong=frozenset(), weak=frozenset({("ab_sit", "true")}))
plan = plan_search(th, PlanSearchConfig(max_steps=3, max_branches=2), weak)
print(print_plan(plan))

# as a strong goal it is impossible: when the person sits fine nothing is wrong
strong = GoalSet(strong=frozenset({("ab_sit", "true")}), weak=frozenset())
try:
    plan_search(th, PlanSearchConfig(3, 2), strong)
except NoPlan as err:
    print("strong goal:", err)

# every triple the agent knows holds in all worlds that survive to its node
tree = project(plan, th)
worlds = oracle_project(plan, th, tree)
for key in sorted(worlds.nodes):
    print(key, len(worlds.nodes[key]), "trajectories")
print(check_soundness(tree, worlds).dump())

# answer set program for the same domain; feed it to a grounder/solver
program = emit_lp(th.domain, PlanSearchConfig(3, 2))
print(program.world_part)
