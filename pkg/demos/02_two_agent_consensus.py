"""
Two-agent consensus is solvable
===============================

A solution is a morphism from the protocol update to the task update whose
images also cover the right inputs. We write one by hand, check it, then let
the search find one on its own.
"""

from epistemia import (FailurePattern, SolvabilityInstance, check_solution, consensus_task, input_model,
                       mp_full, search_solution)
from epistemia.serialize import world_text
from epistemia.update import UpdateWorld

i = input_model(2)
inst = SolvabilityInstance(i, mp_full(i), consensus_task(2))
p, t = inst.protocol_update, inst.task_update

# decide 1 only on all-ones without failures; a survivor adopts what it heard
quiet, zero_dead = FailurePattern(2), FailurePattern.parse(2, "{0<1}")
delta = {}
for w in p.worlds:
    x = w.input_class[0]
    a, b = x[0].value, x[1].value
    if w.action.pattern == quiet:
        delta[w] = t.saturation((0, 1), UpdateWorld((x,), int(a == b == 1)))
    elif w.action.pattern == zero_dead:
        delta[w] = t.saturation((1,), UpdateWorld((x,), b))
    else:
        delta[w] = t.saturation((0,), UpdateWorld((x,), a))

print("hand-written map accepted:", bool(check_solution(inst, delta)))

r = search_solution(inst)
print("search verdict:", r.verdict, "after", r.nodes, "nodes")
for w in p.worlds:
    print("  ", world_text(w), "->", sorted(world_text(u) for u in r.morphism[w]))
