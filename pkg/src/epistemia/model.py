"""Partial epistemic models: Kripke structures whose per-agent relations are PERs.

A PER over a finite set is the same thing as a partition of a subset of it, so each
agent's relation is kept as a block label per world (``-1`` where the agent is
dead).  ``from_pairs`` accepts explicit edge lists and rejects anything that is not
symmetric-and-transitive after symmetric closure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Mapping

import numpy as np

Atom = tuple  # (agent, value), i.e. input_a(v)


class ModelError(ValueError):
    """Raised for malformed models or unknown worlds."""


class PartialEpistemicModel:
    """Worlds, per-agent partial equivalence relations and atomic labelling.

    Parameters
    ----------
    n : number of agents, agents are ``0..n-1``
    worlds : hashable, mutually comparable keys
    classes : mapping agent -> iterable of equivalence classes (iterables of keys).
        A world in no class of agent ``a`` is one where ``a`` is dead.
    labels : mapping key -> iterable of atoms ``(agent, value)``; missing keys get
        the empty label (frames).
    """

    def __init__(self, n: int, worlds: Iterable[Hashable], classes: Mapping[int, Iterable[Iterable[Hashable]]],
                 labels: Mapping[Hashable, Iterable[Atom]] | None = None):
        if n < 1:
            raise ModelError("need at least one agent")
        ws = sorted(set(worlds))
        if not ws:
            raise ModelError("a partial epistemic model needs a nonempty set of worlds")
        self.n = n
        self.worlds: tuple = tuple(ws)
        self.index: dict = {w: i for i, w in enumerate(ws)}
        blocks = []
        for a in range(n):
            blk = np.full(len(ws), -1, dtype=np.int64)
            canon = []
            for cls in classes.get(a, ()):
                idx = sorted({self._idx(w) for w in cls})
                if not idx:
                    raise ModelError(f"empty class for agent {a}")
                canon.append(idx)
            canon.sort()
            for b, idx in enumerate(canon):
                if (blk[idx] >= 0).any():
                    raise ModelError(f"overlapping classes for agent {a}: relation is not transitive")
                blk[idx] = b
            blk.setflags(write=False)
            blocks.append(blk)
        self._block = blocks
        self._members = [[np.asarray(c, dtype=np.int64) for c in _groups(blk)] for blk in blocks]
        labels = labels or {}
        unknown = set(labels) - set(self.index)
        if unknown:
            raise ModelError(f"labels for unknown worlds: {sorted(unknown)[:3]}")
        self.labels: tuple = tuple(frozenset(tuple(p) for p in labels.get(w, ())) for w in ws)
        self._atom_cache: dict = {}

    # construction helpers

    @classmethod
    def from_pairs(cls, n: int, worlds: Iterable[Hashable], rel: Mapping[int, Iterable[tuple]],
                   labels: Mapping[Hashable, Iterable[Atom]] | None = None) -> "PartialEpistemicModel":
        """Build from explicit edge sets; symmetric closure is applied, transitivity is checked."""
        worlds = list(worlds)
        known = set(worlds)
        classes = {}
        for a in range(n):
            edges = set()
            for u, v in rel.get(a, ()):
                if u not in known or v not in known:
                    raise ModelError(f"edge ({u!r}, {v!r}) mentions an unknown world")
                edges.add((u, v))
                edges.add((v, u))
            comps = _components(edges)
            for comp in comps:
                for u in comp:
                    for v in comp:
                        if (u, v) not in edges:
                            raise ModelError(f"relation of agent {a} is not transitive: missing ({u!r}, {v!r})")
            classes[a] = comps
        return cls(n, worlds, classes, labels)

    def frame(self) -> "PartialEpistemicModel":
        return PartialEpistemicModel(self.n, self.worlds, self.classes())

    def with_labels(self, labels: Mapping[Hashable, Iterable[Atom]]) -> "PartialEpistemicModel":
        return PartialEpistemicModel(self.n, self.worlds, self.classes(), labels)

    # accessors

    def _idx(self, w) -> int:
        try:
            return self.index[w]
        except (KeyError, TypeError):
            raise ModelError(f"unknown world {w!r}") from None

    def __len__(self) -> int:
        return len(self.worlds)

    def __contains__(self, w) -> bool:
        try:
            return w in self.index
        except TypeError:
            return False

    def classes(self) -> dict:
        return {a: [[self.worlds[i] for i in c] for c in self._members[a]] for a in range(self.n)}

    def block(self, a: int) -> np.ndarray:
        """Block label of every world for agent ``a`` (read-only, -1 = dead)."""
        return self._block[a]

    def block_members(self, a: int, b: int) -> np.ndarray:
        return self._members[a][b]

    def num_blocks(self, a: int) -> int:
        return len(self._members[a])

    def label(self, w) -> frozenset:
        return self.labels[self._idx(w)]

    def alive(self, w) -> frozenset:
        i = self._idx(w)
        return frozenset(a for a in range(self.n) if self._block[a][i] >= 0)

    def alive_index(self, i: int) -> frozenset:
        return frozenset(a for a in range(self.n) if self._block[a][i] >= 0)

    def related(self, a: int, u, v) -> bool:
        i, j = self._idx(u), self._idx(v)
        blk = self._block[a]
        return blk[i] >= 0 and blk[i] == blk[j]

    def neighbours(self, a: int, w) -> tuple:
        """All ``w'`` with ``w ~_a w'`` (empty when ``a`` is dead at ``w``)."""
        b = self._block[a][self._idx(w)]
        if b < 0:
            return ()
        return tuple(self.worlds[i] for i in self._members[a][b])

    def edges(self, a: int) -> list:
        """Sorted index pairs of the relation of agent ``a`` (reflexive pairs included)."""
        out = []
        for m in self._members[a]:
            out.extend((int(i), int(j)) for i in m for j in m)
        out.sort()
        return out

    def saturation_index(self, agents: Iterable[int], i: int) -> np.ndarray:
        sel = np.ones(len(self.worlds), dtype=bool)
        for a in agents:
            b = self._block[a][i]
            if b < 0:
                return np.zeros(0, dtype=np.int64)
            sel &= self._block[a] == b
        return np.flatnonzero(sel)

    def saturation(self, agents: Iterable[int], v) -> frozenset:
        return frozenset(self.worlds[i] for i in self.saturation_index(agents, self._idx(v)))

    def atom_vector(self, atom: Atom) -> np.ndarray:
        vec = self._atom_cache.get(atom)
        if vec is None:
            vec = np.fromiter((atom in lab for lab in self.labels), dtype=bool, count=len(self.labels))
            vec.setflags(write=False)
            self._atom_cache[atom] = vec
        return vec

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialEpistemicModel):
            return NotImplemented
        return (self.n == other.n and self.worlds == other.worlds and self.labels == other.labels
                and all(np.array_equal(x, y) for x, y in zip(self._block, other._block)))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"PartialEpistemicModel(n={self.n}, worlds={len(self.worlds)})"


def _groups(blk: np.ndarray) -> list:
    order = np.argsort(blk, kind="stable")
    vals = blk[order]
    out = []
    start = np.searchsorted(vals, 0)
    for b in range(int(vals[-1]) + 1 if len(vals) and vals[-1] >= 0 else 0):
        end = np.searchsorted(vals, b, side="right")
        out.append(np.sort(order[start:end]).tolist())
        start = end
    return out


def _components(edges: set) -> list:
    adj: dict = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
    seen: set = set()
    comps = []
    for s in adj:
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        comps.append(comp)
    return comps


def check_per(rel: "PartialEpistemicModel | Mapping[int, Iterable[tuple]]") -> bool:
    """True iff every per-agent relation is symmetric and transitive.

    Accepts a model (its edge sets are re-derived and checked) or a raw mapping
    ``agent -> iterable of (u, v)`` pairs.
    """
    if isinstance(rel, PartialEpistemicModel):
        rel = {a: rel.edges(a) for a in range(rel.n)}
    for pairs in rel.values():
        s = set(map(tuple, pairs))
        succ: dict = {}
        for u, v in s:
            succ.setdefault(u, set()).add(v)
        for u, v in s:
            if (v, u) not in s:
                return False
            if not succ.get(v, set()) <= succ[u]:
                return False
    return True


def is_proper(m: PartialEpistemicModel) -> bool:
    """Distinct worlds are told apart by some agent (a dead agent counts as telling apart)."""
    full = np.ones(len(m), dtype=bool)
    for a in range(m.n):
        full &= m.block(a) >= 0
    seen = set()
    for i in np.flatnonzero(full):
        sig = tuple(int(m.block(a)[i]) for a in range(m.n))
        if sig in seen:
            return False
        seen.add(sig)
    return True


def alive_set(m: PartialEpistemicModel, w) -> frozenset:
    return m.alive(w)


def saturation(m: PartialEpistemicModel, agents: Iterable[int], v) -> frozenset:
    """``sat_U(v)``: worlds related to ``v`` by every agent of ``U``."""
    return m.saturation(agents, v)


# morphisms

@dataclass(frozen=True)
class Violation:
    law: str  # preservation | saturation | atoms (solvability adds domain, class-inclusion)
    worlds: tuple
    agent: int | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"law": self.law, "worlds": [repr(w) for w in self.worlds], "agent": self.agent,
                "detail": self.detail}


class MorphismError(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(f"{violation.law} law violated: {violation.detail}")
        self.violation = violation


@dataclass(frozen=True)
class Morphism:
    """A verified morphism.  Build it with :func:`verify_morphism`."""
    source: PartialEpistemicModel = field(repr=False)
    target: PartialEpistemicModel = field(repr=False)
    image: Mapping[Any, frozenset]

    def __call__(self, w) -> frozenset:
        return self.image[w]


def _normalise_map(f, src, dst) -> dict:
    out = {}
    for w in src.worlds:
        if w not in f:
            raise ValueError(f"map is not total: no image for {w!r}")
        img = frozenset(f[w])
        if not img:
            raise ValueError(f"empty image for {w!r}")
        for u in img:
            if u not in dst:
                raise ValueError(f"image of {w!r} contains unknown world {u!r}")
        out[w] = img
    return out


def find_violation(f: Mapping, src: PartialEpistemicModel, dst: PartialEpistemicModel) -> Violation | None:
    """First violated morphism law, or ``None``.  Raises ``ValueError`` on partial/empty maps."""
    f = _normalise_map(f, src, dst)
    img_idx = {w: np.array(sorted(dst.index[u] for u in f[w]), dtype=np.int64) for w in src.worlds}
    # preservation of ~ : all images of one source block sit inside one target block
    for a in range(src.n):
        tb = dst.block(a)
        for b in range(src.num_blocks(a)):
            target_block = None
            anchor = None
            for i in src.block_members(a, b):
                w = src.worlds[i]
                labels = np.unique(tb[img_idx[w]])
                if labels[0] < 0 or len(labels) > 1 or (target_block is not None and labels[0] != target_block):
                    return Violation("preservation", (w if anchor is None else anchor, w), a,
                                     f"agent {a} relates the sources but not all of their images")
                target_block = labels[0]
                if anchor is None:
                    anchor = w
    for i, w in enumerate(src.worlds):
        img = img_idx[w]
        live = src.alive_index(i)
        if not any(np.array_equal(dst.saturation_index(live, int(j)), img) for j in img):
            return Violation("saturation", (w,), None,
                             f"image of {w!r} is not sat_{sorted(live)} of any of its members")
        lw = {p for p in src.labels[i] if p[0] in live}
        for j in img:
            lu = {p for p in dst.labels[j] if p[0] in live}
            if lw != lu:
                return Violation("atoms", (w, dst.worlds[j]), None,
                                 f"labels disagree on live agents {sorted(live)}")
    return None


def verify_morphism(f: Mapping, src: PartialEpistemicModel, dst: PartialEpistemicModel) -> Morphism:
    """Check the three morphism laws; return a :class:`Morphism` or raise :class:`MorphismError`."""
    v = find_violation(f, src, dst)
    if v is not None:
        raise MorphismError(v)
    return Morphism(src, dst, {w: frozenset(f[w]) for w in src.worlds})


def saturate_map(m: PartialEpistemicModel, dst: PartialEpistemicModel, choice: Mapping) -> dict:
    """``w -> sat_{Alive(w)}(choice[w])``; the usual way to write a morphism down."""
    return {w: dst.saturation(m.alive(w), choice[w]) for w in m.worlds}


def compose(f: Morphism, g: Morphism) -> dict:
    """Pointwise composite, re-saturated at the source world's alive set."""
    out = {}
    for w in f.source.worlds:
        union = set()
        for v in f.image[w]:
            union |= g.image[v]
        anchor = min(union)
        out[w] = g.target.saturation(f.source.alive(w), anchor)
    return out


# frame isomorphism

def _refine(models: list) -> list:
    """Joint colour refinement over several models; returns colour arrays."""
    colours = []
    for m in models:
        colours.append([tuple(sorted(m.alive_index(i))) for i in range(len(m))])
    palette: dict = {}
    cols = [np.array([palette.setdefault(c, len(palette)) for c in cs]) for cs in colours]
    while True:
        palette = {}
        new = []
        for m, col in zip(models, cols):
            sig = []
            for i in range(len(m)):
                parts = [int(col[i])]
                for a in range(m.n):
                    b = m.block(a)[i]
                    parts.append(tuple(sorted(col[m.block_members(a, b)].tolist())) if b >= 0 else None)
                sig.append(tuple(parts))
            new.append(sig)
        new_cols = [np.array([palette.setdefault(s, len(palette)) for s in sig]) for sig in new]
        if sum(len(set(c.tolist())) for c in new_cols) == sum(len(set(c.tolist())) for c in cols):
            return new_cols
        cols = new_cols


def frame_isomorphic(m1: PartialEpistemicModel, m2: PartialEpistemicModel) -> dict | None:
    """A bijection ``g`` with ``w ~_a w'  <=>  g(w) ~_a g(w')`` for every agent, or ``None``."""
    if m1.n != m2.n or len(m1) != len(m2):
        return None
    for a in range(m1.n):
        if sorted(len(x) for x in m1._members[a]) != sorted(len(x) for x in m2._members[a]):
            return None
    c1, c2 = _refine([m1, m2])
    if sorted(c1.tolist()) != sorted(c2.tolist()):
        return None
    by_colour: dict = {}
    for j, c in enumerate(c2.tolist()):
        by_colour.setdefault(c, []).append(j)

    # BFS order so that relation constraints bite early
    order, seen = [], set()
    for s in range(len(m1)):
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            i = queue.pop(0)
            order.append(i)
            for a in range(m1.n):
                b = m1.block(a)[i]
                if b < 0:
                    continue
                for j in m1.block_members(a, b).tolist():
                    if j not in seen:
                        seen.add(j)
                        queue.append(j)

    n = m1.n
    bmap = [dict() for _ in range(n)]   # source block -> target block
    rmap = [dict() for _ in range(n)]   # target block -> source block
    assign: dict = {}
    used: set = set()

    def candidates(i):
        pool = None
        for a in range(n):
            b = m1.block(a)[i]
            if b >= 0 and b in bmap[a]:
                pool = m2.block_members(a, bmap[a][b]).tolist()
                break
        if pool is None:
            pool = by_colour[int(c1[i])]
        return [j for j in pool if j not in used and c2[j] == c1[i]]

    def fits(i, j):
        for a in range(n):
            b1, b2 = m1.block(a)[i], m2.block(a)[j]
            if (b1 < 0) != (b2 < 0):
                return False
            if b1 < 0:
                continue
            if bmap[a].get(b1, b2) != b2 or rmap[a].get(b2, b1) != b1:
                return False
        return True

    stack = [iter(candidates(order[0]))]
    trail: list = []  # per depth: list of (agent, b1, b2) newly bound
    while stack:
        depth = len(stack) - 1
        i = order[depth]
        if depth < len(trail):  # undo previous choice at this depth
            for a, b1, b2 in trail.pop():
                del bmap[a][b1]
                del rmap[a][b2]
            used.discard(assign.pop(i))
        for j in stack[-1]:
            if fits(i, j):
                bound = []
                for a in range(n):
                    b1 = m1.block(a)[i]
                    if b1 >= 0 and b1 not in bmap[a]:
                        b2 = m2.block(a)[j]
                        bmap[a][b1] = b2
                        rmap[a][b2] = b1
                        bound.append((a, b1, b2))
                trail.append(bound)
                assign[i] = j
                used.add(j)
                break
        else:
            stack.pop()
            continue
        if len(assign) == len(m1):
            g = {m1.worlds[i]: m2.worlds[j] for i, j in assign.items()}
            if _is_frame_iso(g, m1, m2):
                return g
            continue  # pragma: no cover - block bijection already guarantees this
        stack.append(iter(candidates(order[depth + 1])))
    return None


def _is_frame_iso(g: dict, m1: PartialEpistemicModel, m2: PartialEpistemicModel) -> bool:
    if len(set(g.values())) != len(m1) or set(g.values()) != set(m2.worlds):
        return False
    for a in range(m1.n):
        e1 = {(g[m1.worlds[i]], g[m1.worlds[j]]) for i, j in m1.edges(a)}
        e2 = {(m2.worlds[i], m2.worlds[j]) for i, j in m2.edges(a)}
        if e1 != e2:
            return False
    return True
