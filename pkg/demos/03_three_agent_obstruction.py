"""
Three-agent consensus is not solvable in one round
==================================================

A guarded positive formula that holds everywhere in the task update but fails
somewhere in the protocol update rules out any solution. The refutation trace
shows why it fails.
"""

from epistemia import (SolvabilityInstance, build_phi, check_obstruction, consensus_task, input_model, mp_full,
                       to_text)
from epistemia.serialize import world_text

i = input_model(3)
inst = SolvabilityInstance(i, mp_full(i), consensus_task(3))
phi = build_phi(3)
print("formula:", to_text(phi))

r = check_obstruction(inst, phi)
print("verdict:", r.verdict)
print("falsified at:", world_text(r.witness))

# one chain of knowledge steps per disjunct
for route in r.trace:
    print("  " + "  ".join(world_text(s.world) if s.agent is None else f"~{s.agent} {world_text(s.world)}"
                           for s in route))

# the same formula against the task itself: no obstruction, as it should be
self_inst = SolvabilityInstance(i, consensus_task(3), consensus_task(3))
print("task against itself:", check_obstruction(self_inst, phi).verdict)
