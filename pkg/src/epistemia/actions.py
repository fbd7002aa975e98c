"""Action models: generic container plus the consensus, MP0 and MP generators.

A failure pattern records, for each crashed agent, the live agents that did not
receive its round message. Anything not recorded was delivered.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Mapping, NamedTuple

from .complex import Complex
from .formula import TRUE, Atom, disj, label_conj
from .model import ModelError, PartialEpistemicModel


class ActionModel:
    """A proper frame of actions plus a precondition per action."""

    def __init__(self, frame: PartialEpistemicModel, pre: Mapping | None = None):
        self.frame = frame.frame()
        pre = dict(pre or {})
        extra = set(pre) - set(frame.index)
        if extra:
            raise ModelError(f"preconditions for unknown actions: {sorted(extra)[:3]}")
        self.pre = {t: pre.get(t, TRUE) for t in self.frame.worlds}

    @property
    def n(self) -> int:
        return self.frame.n

    @property
    def actions(self) -> tuple:
        return self.frame.worlds

    def alive(self, t) -> frozenset:
        return self.frame.alive(t)

    def related(self, a: int, t, s) -> bool:
        return self.frame.related(a, t, s)

    def __len__(self):
        return len(self.frame)

    def __repr__(self):
        return f"ActionModel(n={self.n}, actions={len(self)})"


# failure patterns

@dataclass(frozen=True, order=True)
class FailurePattern:
    """``fails``: sorted tuple of ``(dead, receivers)`` with ``receivers`` a sorted tuple."""

    n: int
    fails: tuple = ()

    def __post_init__(self):
        fails = tuple(sorted((int(b), tuple(sorted(set(rs)))) for b, rs in dict(self.fails).items()))
        object.__setattr__(self, "fails", fails)
        dead = {b for b, _ in fails}
        if len(dead) >= self.n:
            raise ValueError("a failure pattern must leave some agent alive")
        for b, rs in fails:
            if not 0 <= b < self.n:
                raise ValueError(f"agent {b} out of range")
            if not rs:
                raise ValueError(f"crashed agent {b} must fail to reach some live agent")
            for a in rs:
                if a in dead or not 0 <= a < self.n:
                    raise ValueError(f"receiver {a} of {b} must be a live agent")

    @classmethod
    def from_map(cls, n: int, fails: Mapping) -> "FailurePattern":
        return cls(n, tuple(dict(fails).items()))

    @property
    def dead(self) -> frozenset:
        return frozenset(b for b, _ in self.fails)

    @property
    def alive(self) -> frozenset:
        return frozenset(range(self.n)) - self.dead

    def send_fail(self, b: int, a: int) -> bool:
        return a in dict(self.fails).get(b, ())

    def failed_senders(self, a: int) -> frozenset:
        return frozenset(b for b, rs in self.fails if a in rs)

    def delivered_to(self, a: int) -> tuple:
        """Agents whose message reached ``a`` (``a`` included)."""
        fs = self.failed_senders(a)
        return tuple(b for b in range(self.n) if b not in fs)

    def heard(self) -> tuple:
        """Agents whose message reached at least one live agent."""
        live = self.alive
        return tuple(b for b in range(self.n) if not live <= self.failed_senders_of(b))

    def failed_senders_of(self, b: int) -> frozenset:
        return frozenset(dict(self.fails).get(b, ()))

    def silent(self) -> int:
        """Number of crashed agents that reached no live agent."""
        live = self.alive
        return sum(1 for _, rs in self.fails if set(rs) == live)

    def as_map(self) -> dict:
        return {b: list(rs) for b, rs in self.fails}

    def __str__(self):
        return "{" + ", ".join(f"{b}<{a}" for b, rs in self.fails for a in rs) + "}"

    @classmethod
    def parse(cls, n: int, text: str) -> "FailurePattern":
        body = text.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValueError(f"failure pattern must be written in braces: {text!r}")
        fails: dict = {}
        for item in filter(None, (s.strip() for s in body[1:-1].split(","))):
            m = re.fullmatch(r"(\d+)\s*<\s*(\d+)", item)
            if not m:
                raise ValueError(f"bad failure pattern item {item!r}")
            fails.setdefault(int(m.group(1)), set()).add(int(m.group(2)))
        return cls.from_map(n, fails)


def enumerate_patterns(n: int) -> list:
    """Every failure pattern over ``n`` agents, sorted."""
    out = []
    agents = range(n)
    for k in range(n):
        for dead in combinations(agents, k):
            live = [a for a in agents if a not in dead]
            subsets = [s for r in range(1, len(live) + 1) for s in combinations(live, r)]
            for choice in product(subsets, repeat=k):
                out.append(FailurePattern(n, tuple(zip(dead, choice))))
    return sorted(out)


def mp0_relation_key(t: FailurePattern, a: int):
    """Block key of ``t`` for agent ``a``, or ``None`` when ``a`` crashed."""
    if a in t.dead:
        return None
    return t.failed_senders(a)


def _partition(items, key) -> list:
    groups: dict = {}
    for x in items:
        k = key(x)
        if k is not None:
            groups.setdefault(k, []).append(x)
    return list(groups.values())


def mp0(n: int) -> ActionModel:
    """Inputless synchronous message-passing model; every precondition is ``true``."""
    ts = enumerate_patterns(n)
    classes = {a: _partition(ts, lambda t, a=a: mp0_relation_key(t, a)) for a in range(n)}
    return ActionModel(PartialEpistemicModel(n, ts, classes))


def mp0_complex(n: int) -> Complex:
    """One facet per pattern: each live agent colored by the bitmask of senders it missed."""
    facets = [[(a, sum(1 << b for b in t.failed_senders(a))) for a in sorted(t.alive)]
              for t in enumerate_patterns(n)]
    return Complex(n, range(1 << n), facets)


def consensus_task(n: int) -> ActionModel:
    """Outputs ``0..n-1``; nobody crashes; output ``v`` needs some agent with input ``v``."""
    vs = list(range(n))
    frame = PartialEpistemicModel(n, vs, {a: [[v] for v in vs] for a in range(n)})
    return ActionModel(frame, {v: disj(Atom(a, v) for a in range(n)) for v in vs})


# full message passing

class MPAction(NamedTuple):
    input_class: tuple
    pattern: FailurePattern


def _require_input(m: PartialEpistemicModel):
    for a in range(m.n):
        if (m.block(a) < 0).any():
            raise ModelError("input model must have every agent alive in every facet")


def _agree_key(m: PartialEpistemicModel, i: int, agents: Iterable[int]) -> tuple:
    return tuple(int(m.block(b)[i]) for b in agents)


def class_of(m: PartialEpistemicModel, t: FailurePattern, x) -> tuple:
    """Input facets that every live agent of ``t`` cannot tell from ``x`` after the round."""
    _require_input(m)
    heard = t.heard()
    i = m._idx(x)
    key = _agree_key(m, i, heard)
    return tuple(w for j, w in enumerate(m.worlds) if _agree_key(m, j, heard) == key)


def class_size(t: FailurePattern, num_values: int) -> int:
    """Size of every class of ``t`` over a full input model."""
    return num_values ** t.silent()


def mp_full(m: PartialEpistemicModel) -> ActionModel:
    """Synchronous message passing over input model ``m``: actions ``(class, pattern)``."""
    _require_input(m)
    n = m.n
    actions = []
    reps = {}
    for t in enumerate_patterns(n):
        heard = t.heard()
        groups: dict = {}
        for j, w in enumerate(m.worlds):
            groups.setdefault(_agree_key(m, j, heard), []).append(w)
        for members in groups.values():
            act = MPAction(tuple(members), t)
            actions.append(act)
            reps[act] = m.index[members[0]]
    classes = {}
    for a in range(n):
        def key(act, a=a):
            t = act.pattern
            k = mp0_relation_key(t, a)
            if k is None:
                return None
            return (k, _agree_key(m, reps[act], t.delivered_to(a)))
        classes[a] = _partition(actions, key)
    pre = {act: disj(label_conj(m.label(y)) for y in act.input_class) for act in actions}
    return ActionModel(PartialEpistemicModel(n, actions, classes), pre)
