"""Partial product update of a partial epistemic model by an action model."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .actions import ActionModel
from .formula import truth_vector
from .model import ModelError, PartialEpistemicModel


class UpdateWorld(NamedTuple):
    input_class: tuple
    action: object


class PreconditionError(ValueError):
    pass


def _block_key(m: PartialEpistemicModel, i: int, agents) -> tuple:
    return tuple(int(m.block(b)[i]) for b in agents)


def _admissible(m: PartialEpistemicModel, act: ActionModel, t, memo: dict) -> np.ndarray:
    ok = truth_vector(m, act.pre[t], memo).copy()
    for b in act.alive(t):
        ok &= m.block(b) >= 0
    return ok


def pre_class(m: PartialEpistemicModel, act: ActionModel, t, x) -> tuple:
    """Worlds satisfying ``pre(t)`` that the live agents of ``t`` cannot tell from ``x``."""
    memo: dict = {}
    i = m._idx(x)
    if not truth_vector(m, act.pre[t], memo)[i]:
        raise PreconditionError(f"precondition of {t!r} fails at {x!r}")
    alive_t = sorted(act.alive(t))
    if not set(alive_t) <= m.alive(x):
        raise PreconditionError(f"agents alive in {t!r} are not all alive at {x!r}")
    ok = _admissible(m, act, t, memo)
    key = _block_key(m, i, alive_t)
    return tuple(m.worlds[j] for j in np.flatnonzero(ok) if _block_key(m, j, alive_t) == key)


def update_worlds(m: PartialEpistemicModel, act: ActionModel) -> dict:
    """Map each update world to the index of a representative world of ``m``."""
    memo: dict = {}
    out = {}
    for t in act.actions:
        alive_t = sorted(act.alive(t))
        groups: dict = {}
        for j in np.flatnonzero(_admissible(m, act, t, memo)):
            groups.setdefault(_block_key(m, int(j), alive_t), []).append(int(j))
        for idx in groups.values():
            out[UpdateWorld(tuple(m.worlds[j] for j in idx), t)] = idx[0]
    return out


def product_update(m: PartialEpistemicModel, act: ActionModel) -> PartialEpistemicModel:
    """``M{A}``: worlds ``(class, t)``, relations pairwise, labels intersected over the class."""
    if m.n != act.n:
        raise ModelError("model and action model disagree on the number of agents")
    reps = update_worlds(m, act)
    if not reps:
        raise ModelError("no action is applicable at any world: the update would be empty")
    classes = {}
    for a in range(m.n):
        mb, ab = m.block(a), act.frame.block(a)
        groups: dict = {}
        for w, i in reps.items():
            k1, k2 = int(mb[i]), int(ab[act.frame.index[w.action]])
            if k1 >= 0 and k2 >= 0:
                groups.setdefault((k1, k2), []).append(w)
        classes[a] = list(groups.values())
    labels = {w: frozenset.intersection(*(m.label(y) for y in w.input_class)) for w in reps}
    return PartialEpistemicModel(m.n, reps, classes, labels)


@dataclass
class WorldCountReport:
    total: int
    per_action: dict = field(default_factory=dict)
    alive_histogram: dict = field(default_factory=dict)

    def lines(self) -> list:
        out = [f"total worlds: {self.total}"]
        out += [f"  action {t}: {k}" for t, k in self.per_action.items()]
        out += [f"  alive {sorted(s)}: {k}" for s, k in self.alive_histogram.items()]
        return out


def world_count_report(m: PartialEpistemicModel, act: ActionModel) -> WorldCountReport:
    reps = update_worlds(m, act)
    per = Counter(w.action for w in reps)
    hist = Counter(act.alive(w.action) for w in reps)
    return WorldCountReport(
        total=len(reps),
        per_action={t: per[t] for t in act.actions if per[t]},
        alive_histogram={s: hist[s] for s in sorted(hist, key=lambda s: (-len(s), sorted(s)))},
    )
