"""
Scaling the obstruction to four agents
======================================

The same shape of formula works for any n >= 3. At n = 4 the protocol update has
over fourteen thousand worlds; evaluation is vectorised so this stays quick.
"""
import time

from epistemia import SolvabilityInstance, build_phi, check_obstruction, consensus_task, input_model, mp_full
from epistemia.serialize import world_text

start = time.perf_counter()
i = input_model(4)
inst = SolvabilityInstance(i, mp_full(i), consensus_task(4))
r = check_obstruction(inst, build_phi(4))
print("protocol worlds:", len(inst.protocol_update))
print("task worlds:", len(inst.task_update))
print("verdict:", r.verdict, "at", world_text(r.witness))
print(f"took {time.perf_counter() - start:.1f}s")
