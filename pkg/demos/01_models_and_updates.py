"""
Input models and the partial product update
===========================================

Two agents each hold a binary input. We build the input model, the consensus
task, the single-round message-passing protocol, and update the input model by each.
"""

from epistemia import consensus_task, input_model, mp_full, product_update, world_count_report
from epistemia.serialize import world_text

i = input_model(2)
print("input facets:", [world_text(x) for x in i.worlds])

# the task: every world picks an output value some agent started with
t = product_update(i, consensus_task(2))
print("task update:", len(t), "worlds")
for w in t.worlds:
    print("  ", world_text(w), " alive:", sorted(t.alive(w)))

# the protocol: one round, at most one agent crashing mid-send
mp = mp_full(i)
print("protocol actions:")
for a in mp.actions:
    print("  ", world_text(a))

p = product_update(i, mp)
print("protocol update:", len(p), "worlds")

# larger systems grow fast
for n in (2, 3):
    m = input_model(n)
    print(f"n={n}:", world_count_report(m, mp_full(m)).lines()[0])
