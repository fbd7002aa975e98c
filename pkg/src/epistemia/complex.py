"""Chromatic simplicial complexes stored by their facets, and the models they induce."""
from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, NamedTuple

from .model import PartialEpistemicModel


class Vertex(NamedTuple):
    agent: int
    value: int


class ComplexError(ValueError):
    pass


def simplex(vertices: Iterable) -> tuple:
    """Canonical simplex key: vertices sorted by agent (then value)."""
    vs = tuple(sorted(Vertex(int(a), int(v)) for a, v in vertices))
    if not vs:
        raise ComplexError("a simplex needs at least one vertex")
    if len({v.agent for v in vs}) != len(vs):
        raise ComplexError(f"simplex {vs} is not properly colored")
    return vs


def chi(s: Iterable) -> frozenset:
    """Colors of a simplex."""
    return frozenset(v[0] for v in s)


def intersect(x: tuple, y: tuple) -> tuple:
    ys = set(y)
    return tuple(v for v in x if v in ys)


class Complex:
    """A chromatic complex given by its facets (maximal simplexes)."""

    def __init__(self, n: int, values: Iterable[int], facets: Iterable[Iterable]):
        self.n = n
        self.values = tuple(sorted(set(values)))
        fs = sorted({simplex(f) for f in facets})
        if not fs:
            raise ComplexError("a complex needs at least one facet")
        vals = set(self.values)
        for f in fs:
            for a, v in f:
                if not 0 <= a < n:
                    raise ComplexError(f"agent {a} out of range in facet {f}")
                if v not in vals:
                    raise ComplexError(f"value {v} of facet {f} not in the value set")
        sets = [frozenset(f) for f in fs]
        for i, x in enumerate(sets):
            for j, y in enumerate(sets):
                if i != j and x <= y:
                    raise ComplexError(f"facet {fs[i]} is contained in facet {fs[j]}")
        self.facets: tuple = tuple(fs)

    def vertices(self) -> list:
        return sorted({v for f in self.facets for v in f})

    def contains_simplex(self, s: Iterable) -> bool:
        s = set(s)
        return any(s <= set(f) for f in self.facets)

    def is_pure(self) -> bool:
        return all(len(f) == self.n for f in self.facets)

    def __eq__(self, other):
        return isinstance(other, Complex) and (self.n, self.values, self.facets) == (other.n, other.values, other.facets)

    def __repr__(self):
        return f"Complex(n={self.n}, facets={len(self.facets)})"


def facets(c: Complex) -> tuple:
    return c.facets


def is_simplicial_map(f: Mapping, src: Complex, dst: Complex) -> bool:
    """Color preserving, and every facet of ``src`` lands inside a facet of ``dst``."""
    f = {Vertex(*k): Vertex(*v) for k, v in f.items()}
    for v in src.vertices():
        if v not in f:
            raise ValueError(f"map undefined on vertex {v}")
        if f[v].agent != v.agent:
            return False
    return all(dst.contains_simplex(f[v] for v in x) for x in src.facets)


class SimplicialModel:
    """A complex together with a facet labelling (atoms ``(agent, value)``).

    Without explicit labels each facet is labelled by its own vertices, which is the
    input-model convention.
    """

    def __init__(self, complex: Complex, labels: Mapping | None = None):
        self.complex = complex
        if labels is None:
            labels = {f: frozenset(f) for f in complex.facets}
        else:
            labels = {simplex(k): frozenset(tuple(p) for p in v) for k, v in labels.items()}
            missing = set(complex.facets) - set(labels)
            extra = set(labels) - set(complex.facets)
            if extra:
                raise ComplexError(f"labels for non-facets: {sorted(extra)[:3]}")
            for k in missing:
                labels[k] = frozenset()
        self.labels = labels
        self._model = None

    @property
    def model(self) -> PartialEpistemicModel:
        if self._model is None:
            self._model = derive_model(self)
        return self._model


def derive_model(sm: SimplicialModel | Complex) -> PartialEpistemicModel:
    """Worlds are facets, ``X ~_a Y`` iff ``a`` colors a vertex of ``X`` and ``Y``."""
    if isinstance(sm, Complex):
        sm = SimplicialModel(sm)
    c = sm.complex
    classes = {}
    for a in range(c.n):
        by_vertex: dict = {}
        for f in c.facets:
            for v in f:
                if v.agent == a:
                    by_vertex.setdefault(v, []).append(f)
        classes[a] = list(by_vertex.values())
    return PartialEpistemicModel(c.n, c.facets, classes, sm.labels)


def input_complex(n: int, values: Iterable[int] | None = None) -> Complex:
    """Pure complex of every assignment of a value to every agent."""
    values = tuple(range(n)) if values is None else tuple(values)
    return Complex(n, values, [tuple(enumerate(vs)) for vs in product(values, repeat=n)])


def input_model(n: int, values: Iterable[int] | None = None) -> PartialEpistemicModel:
    return derive_model(SimplicialModel(input_complex(n, values)))


def input_facet(values: Iterable[int]) -> tuple:
    return simplex(enumerate(values))
