"""
Knowledge gain through indirect postdiction
===========================================

A person sits down on a robotic wheelchair in the bathroom, the wheelchair
drives to the kitchen, and then the person's location is sensed.  If the
person is still in the bathroom they never sat down, so something went
wrong while sitting.  This script walks through that inference step by step.
"""

from importlib.resources import files

from hpxf import ConditionalPlan, Theory, project
from hpxf.kernel import dump_hstate, knows, transition

text = files("hpxf").joinpath("data/wheelchair.hpx").read_text()
th = Theory.from_text(text)

# the static causal law "the person moves with the wheelchair" is compiled
# into extra conditional effects of the actions
for ep in th.compiled.generated:
    conds = ", ".join(f"{f}={v}" for f, v in sorted(ep.conditions))
    print(f"{ep.id}: {ep.action} makes {ep.effect[0]}={ep.effect[1]} if {conds}")

# initial knowledge: value propositions only, ab_sit is unknown
h0 = th.initial_state()
print("\nh0\n" + dump_hstate(h0))

# after sitting down it is unknown whether the person actually sits
(h1,) = transition({"sit"}, h0, th)
print("h1\n" + dump_hstate(h1))

(h2,) = transition({"drv"}, h1, th)
print("h2\n" + dump_hstate(h2))

# sensing splits the state in two; in the bathroom branch the agent learns
# backwards that the person is not sitting and that sitting went wrong
bath, kit = transition({"senseLoc"}, h2, th)
print("h3, person still in the bathroom\n" + dump_hstate(bath))
print("abnormality known:", knows("ab_sit", "true", 3) in bath.kh)
print("abnormality known in the kitchen branch:", knows("ab_sit", "true", 3) in kit.kh)

# the same thing as a transition tree
tree = project(ConditionalPlan.sequence("sit", "drv", "senseLoc"), th)
print("\n" + tree.dump())
