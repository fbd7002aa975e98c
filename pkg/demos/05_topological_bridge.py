"""
Decision maps and morphisms agree
=================================

The same question can be asked of simplicial complexes: is there a
color-preserving vertex map from the protocol complex to the output complex
that respects the task? Both searches run side by side and each witness is
translated to the other side.
"""

from epistemia import equivalence_probe
from epistemia.solvability import consensus_simplicial_task, identity_map, mp_protocol

cases = {
    "message passing vs consensus": (mp_protocol(2), consensus_simplicial_task(2)),
    "no communication vs consensus": (identity_map(2), consensus_simplicial_task(2)),
    "no communication vs identity task": (identity_map(2), identity_map(2, "task")),
}
for name, (proto, task) in cases.items():
    print(name)
    for line in equivalence_probe(proto, task).lines():
        print("  ", line)
