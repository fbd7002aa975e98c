"""Task solvability: morphism checking and search, logical obstructions, and the
facet-map (topological) formulation with its translation into action models."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .actions import ActionModel, enumerate_patterns
from .complex import Complex, SimplicialModel, chi, input_complex, intersect, simplex
from .formula import Formula, disj, is_guarded_positive, label_conj, refutation, truth_vector
from .model import (PartialEpistemicModel, Violation, _normalise_map, find_violation,
                    saturate_map)
from .update import UpdateWorld, product_update


class SolvabilityInstance:
    """An input model with a protocol and a task, both given as action models."""

    def __init__(self, input_model: PartialEpistemicModel | SimplicialModel, protocol: ActionModel,
                 task: ActionModel):
        if isinstance(input_model, SimplicialModel):
            input_model = input_model.model
        self.input_model = input_model
        self.protocol = protocol
        self.task = task

    @cached_property
    def protocol_update(self) -> PartialEpistemicModel:
        return product_update(self.input_model, self.protocol)

    @cached_property
    def task_update(self) -> PartialEpistemicModel:
        return product_update(self.input_model, self.task)


# checking a candidate

@dataclass
class SolutionCheck:
    accepted: bool
    violation: Violation | None = None

    def __bool__(self):
        return self.accepted


def _class_covered(w: UpdateWorld, image: Iterable) -> bool:
    covered = set()
    for u in image:
        covered.update(u.input_class)
    return set(w.input_class) <= covered


def check_solution(inst: SolvabilityInstance, f: Mapping) -> SolutionCheck:
    """Morphism laws, then: each protocol world's input class is covered by its image's classes."""
    src, dst = inst.protocol_update, inst.task_update
    try:
        fmap = _normalise_map(f, src, dst)
    except ValueError as e:
        return SolutionCheck(False, Violation("domain", (), None, str(e)))
    v = find_violation(fmap, src, dst)
    if v is not None:
        return SolutionCheck(False, v)
    for w in src.worlds:
        if not _class_covered(w, fmap[w]):
            return SolutionCheck(False, Violation(
                "class-inclusion", (w,), None,
                f"input class {list(w.input_class)} not covered by the image's classes"))
    return SolutionCheck(True)


# searching

@dataclass
class SearchResult:
    verdict: str  # solvable | unsolvable | budget-exceeded
    morphism: dict | None = None
    nodes: int = 0

    def __bool__(self):
        return self.verdict == "solvable"


def _sat_blocks(m: PartialEpistemicModel, agents: tuple) -> list:
    """Distinct saturation blocks for a set of agents, as sorted index tuples."""
    seen, out = set(), []
    for i in range(len(m)):
        blk = tuple(int(j) for j in m.saturation_index(agents, i))
        if blk and blk not in seen:
            seen.add(blk)
            out.append(blk)
    return out


def search_solution(inst: SolvabilityInstance, budget: int = 1_000_000) -> SearchResult:
    """Backtracking search for a morphism satisfying the class-cover condition.

    Protocol worlds sharing an alive set and a saturation block must share an image,
    so they are assigned together. Candidates are the saturation blocks of the task
    update over the same alive agents that agree on those agents' atoms and cover
    the input classes. Preservation is tracked as a per-agent map from protocol
    blocks to task blocks.
    """
    src, dst = inst.protocol_update, inst.task_update

    groups: dict = {}
    for i in range(len(src)):
        al = tuple(sorted(src.alive_index(i)))
        key = (al, tuple(int(j) for j in src.saturation_index(al, i)))
        groups.setdefault(key, []).append(i)
    order = sorted(groups, key=lambda k: (-len(k[0]), k[1]))

    blocks_by_alive: dict = {}
    domains = []
    for al, _ in order:
        members = groups[(al, _)]
        if al not in blocks_by_alive:
            blocks_by_alive[al] = _sat_blocks(dst, al)
        cands = []
        for blk in blocks_by_alive[al]:
            ok = True
            for i in members:
                lab = {p for p in src.labels[i] if p[0] in al}
                if any({p for p in dst.labels[j] if p[0] in al} != lab for j in blk):
                    ok = False
                    break
                if not _class_covered(src.worlds[i], (dst.worlds[j] for j in blk)):
                    ok = False
                    break
            if ok:
                tgt = tuple(int(dst.block(a)[blk[0]]) for a in al)
                cands.append((blk, tgt))
        if not cands:
            return SearchResult("unsolvable", None, 0)
        domains.append(cands)

    # per group: for each live agent, the protocol block each member sits in
    src_keys = []
    for (al, _) in order:
        keys = set()
        for i in groups[(al, _)]:
            for k, a in enumerate(al):
                keys.add((a, int(src.block(a)[i]), k))
        src_keys.append(sorted(keys))

    bound: dict = {}  # (agent, src block) -> [tgt block, refcount]
    choice = [0] * len(order)
    nodes = 0

    def fits(g, cand) -> bool:
        tgt = cand[1]
        for a, b, k in src_keys[g]:
            hit = bound.get((a, b))
            if hit is not None and hit[0] != tgt[k]:
                return False
        return True

    def push(g, cand):
        tgt = cand[1]
        for a, b, k in src_keys[g]:
            hit = bound.get((a, b))
            if hit is None:
                bound[(a, b)] = [tgt[k], 1]
            else:
                hit[1] += 1

    def pop(g):
        for a, b, _k in src_keys[g]:
            hit = bound[(a, b)]
            hit[1] -= 1
            if hit[1] == 0:
                del bound[(a, b)]

    g = 0
    pos = [0] * len(order)
    while True:
        if g == len(order):
            break
        placed = False
        while pos[g] < len(domains[g]):
            cand = domains[g][pos[g]]
            pos[g] += 1
            nodes += 1
            if nodes > budget:
                return SearchResult("budget-exceeded", None, nodes)
            if fits(g, cand):
                push(g, cand)
                choice[g] = pos[g] - 1
                placed = True
                break
        if placed:
            g += 1
            if g < len(order):
                pos[g] = 0
            continue
        if g == 0:
            return SearchResult("unsolvable", None, nodes)
        g -= 1
        pop(g)

    f = {}
    for gi, key in enumerate(order):
        blk = domains[gi][choice[gi]][0]
        img = frozenset(dst.worlds[j] for j in blk)
        for i in groups[key]:
            f[src.worlds[i]] = img
    assert check_solution(inst, f), "search produced a map that fails re-verification"
    return SearchResult("solvable", f, nodes)


# obstructions

@dataclass
class ObstructionResult:
    verdict: str  # obstruction | not-guarded-positive | not-valid-in-task | not-invalid-in-protocol
    witness: object = None
    trace: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict == "obstruction"


def check_obstruction(inst: SolvabilityInstance, phi: Formula) -> ObstructionResult:
    if not is_guarded_positive(phi):
        return ObstructionResult("not-guarded-positive")
    tv = truth_vector(inst.task_update, phi)
    if not tv.all():
        return ObstructionResult("not-valid-in-task", inst.task_update.worlds[int(np.flatnonzero(~tv)[0])])
    pm = inst.protocol_update
    pv = truth_vector(pm, phi)
    bad = np.flatnonzero(~pv)
    if len(bad) == 0:
        return ObstructionResult("not-invalid-in-protocol")
    i = min((int(j) for j in bad), key=lambda j: (-len(pm.alive_index(j)), j))
    w = pm.worlds[i]
    return ObstructionResult("obstruction", w, refutation(pm, w, phi))


# facet maps and the topological formulation

class FacetMap:
    """Facets of ``src`` to nonempty sets of facets of ``dst``; color-shrinking and onto."""

    def __init__(self, src: Complex, dst: Complex, mapping: Mapping):
        self.src, self.dst = src, dst
        m = {}
        for x, ys in mapping.items():
            x = simplex(x)
            ys = tuple(sorted({simplex(y) for y in ys}))
            m[x] = ys
        if set(m) != set(src.facets):
            raise ValueError("a facet map must be defined on exactly the source facets")
        dst_set = set(dst.facets)
        hit = set()
        for x, ys in m.items():
            if not ys:
                raise ValueError(f"facet {x} has an empty image")
            for y in ys:
                if y not in dst_set:
                    raise ValueError(f"{y} is not a facet of the target complex")
                if not chi(y) <= chi(x):
                    raise ValueError(f"image {y} of {x} uses colors outside {sorted(chi(x))}")
                hit.add(y)
        if hit != dst_set:
            raise ValueError("a facet map must be onto the target facets")
        self.map = m

    def __call__(self, x) -> tuple:
        return self.map[simplex(x)]

    def preimage(self, y) -> list:
        y = simplex(y)
        return [x for x, ys in self.map.items() if y in ys]


@dataclass
class SimplicialTaskOrProtocol:
    input: SimplicialModel
    output: Complex
    map: FacetMap
    kind: str = "task"

    def __post_init__(self):
        if self.kind not in ("task", "protocol"):
            raise ValueError("kind must be 'task' or 'protocol'")
        if self.map.src != self.input.complex or self.map.dst != self.output:
            raise ValueError("facet map does not connect the input and output complexes")
        if self.kind == "protocol":
            bad = carrier_violation(self.map)
            if bad is not None:
                raise ValueError(f"protocol map fails the carrier condition at {bad}")


def carrier_violation(fm: FacetMap):
    """A pair of inputs whose outputs share colors the inputs do not, if any."""
    xs = list(fm.map)
    for i, x in enumerate(xs):
        for x2 in xs[i:]:
            shared = chi(intersect(x, x2)) if x != x2 else chi(x)
            for y in fm.map[x]:
                for y2 in fm.map[x2]:
                    if not chi(intersect(y, y2)) <= shared:
                        return (x, x2, y, y2)
    return None


def consensus_output(n: int) -> Complex:
    return Complex(n, range(n), [[(a, v) for a in range(n)] for v in range(n)])


def consensus_simplicial_task(n: int) -> SimplicialTaskOrProtocol:
    inp = SimplicialModel(input_complex(n))
    out = consensus_output(n)
    fm = FacetMap(inp.complex, out, {x: [out.facets[v] for v in sorted({vx.value for vx in x})]
                                     for x in inp.complex.facets})
    return SimplicialTaskOrProtocol(inp, out, fm, "task")


def identity_map(n: int, kind: str = "protocol") -> SimplicialTaskOrProtocol:
    inp = SimplicialModel(input_complex(n))
    fm = FacetMap(inp.complex, inp.complex, {x: [x] for x in inp.complex.facets})
    return SimplicialTaskOrProtocol(inp, inp.complex, fm, kind)


def encode_view(view: tuple, num_values: int) -> int:
    """Pack a view (value per sender, ``None`` if nothing arrived) into one integer."""
    code = 0
    for v in reversed(view):
        code = code * (num_values + 1) + (num_values if v is None else v)
    return code


def decode_view(code: int, n: int, num_values: int) -> tuple:
    out = []
    for _ in range(n):
        code, d = divmod(code, num_values + 1)
        out.append(None if d == num_values else d)
    return tuple(out)


def mp_facet(x: tuple, t, num_values: int) -> tuple:
    """Local states after one round from input facet ``x`` under failure pattern ``t``."""
    vals = {v.agent: v.value for v in x}
    fails = [t.failed_senders(a) for a in range(t.n)]
    return simplex((a, encode_view(tuple(None if b in fails[a] else vals[b] for b in range(t.n)), num_values))
                   for a in sorted(t.alive))


def mp_protocol(n: int) -> SimplicialTaskOrProtocol:
    """One round of synchronous message passing with crashes, as a facet map."""
    inp = SimplicialModel(input_complex(n))
    k = len(inp.complex.values)
    ts = enumerate_patterns(n)
    psi = {x: [mp_facet(x, t, k) for t in ts] for x in inp.complex.facets}
    out = Complex(n, range((k + 1) ** n), {y for ys in psi.values() for y in ys})
    return SimplicialTaskOrProtocol(inp, out, FacetMap(inp.complex, out, psi), "protocol")


def kappa(tp: SimplicialTaskOrProtocol) -> ActionModel:
    """Action model with the output facets as actions and ``pre(Y)`` true exactly on ``Y``'s preimage."""
    frame = SimplicialModel(tp.output, {y: () for y in tp.output.facets}).model.frame()
    pre = {y: disj(label_conj(tp.input.labels[x]) for x in tp.map.preimage(y)) for y in tp.output.facets}
    return ActionModel(frame, pre)


def _within_some(img: set, targets: Iterable) -> bool:
    return any(img <= set(z) for z in targets)


def check_decision_map(delta: Mapping, protocol: SimplicialTaskOrProtocol, task: SimplicialTaskOrProtocol) -> bool:
    """Color preserving and, for every input ``X``, each facet of ``Psi(X)`` lands inside a facet of ``Delta(X)``."""
    for v in protocol.output.vertices():
        if v not in delta or delta[v][0] != v.agent:
            return False
    for x, ys in protocol.map.map.items():
        for y in ys:
            if not _within_some({tuple(delta[v]) for v in y}, task.map.map[x]):
                return False
    return True


@dataclass
class DecisionSearch:
    found: bool
    mapping: dict | None = None
    nodes: int = 0

    def __bool__(self):
        return self.found


def search_decision_map(protocol: SimplicialTaskOrProtocol, task: SimplicialTaskOrProtocol) -> DecisionSearch:
    """Exhaustive vertex-by-vertex backtracking for a decision map."""
    if protocol.input.complex != task.input.complex:
        raise ValueError("protocol and task must share the input complex")
    verts = protocol.output.vertices()
    by_color: dict = {}
    for v in task.output.vertices():
        by_color.setdefault(v.agent, []).append(v)
    # constraints touching each vertex: (output facet, allowed target facets)
    cons: dict = {v: [] for v in verts}
    for x, ys in protocol.map.map.items():
        targets = [set(z) for z in task.map.map[x]]
        for y in ys:
            for v in y:
                cons[v].append((y, targets))
    delta: dict = {}
    nodes = 0

    def ok(v) -> bool:
        for y, targets in cons[v]:
            img = {delta[u] for u in y if u in delta}
            if not any(img <= z for z in targets):
                return False
        return True

    def go(k) -> bool:
        nonlocal nodes
        if k == len(verts):
            return True
        v = verts[k]
        for c in by_color.get(v.agent, []):
            nodes += 1
            delta[v] = c
            if ok(v) and go(k + 1):
                return True
            del delta[v]
        return False

    if go(0):
        assert check_decision_map(delta, protocol, task)
        return DecisionSearch(True, dict(delta), nodes)
    return DecisionSearch(False, None, nodes)


def bridge_instance(protocol: SimplicialTaskOrProtocol, task: SimplicialTaskOrProtocol) -> SolvabilityInstance:
    return SolvabilityInstance(protocol.input, kappa(protocol), kappa(task))


def krip_from_top(delta: Mapping, protocol: SimplicialTaskOrProtocol, task: SimplicialTaskOrProtocol,
                  inst: SolvabilityInstance | None = None) -> dict:
    """Turn a decision map into a morphism between the translated update models.

    A protocol world ``(C, Y)`` goes to the saturation, over the colors of ``Y``, of the
    task world ``(C', Z)`` with ``X`` in ``C'`` for a member ``X`` of ``C`` and ``Z`` a
    facet of ``Delta(X)`` containing ``delta(Y)``.
    """
    inst = inst or bridge_instance(protocol, task)
    src, dst = inst.protocol_update, inst.task_update
    where = {}
    for u in dst.worlds:
        for x in u.input_class:
            where[(x, u.action)] = u
    choice = {}
    for w in src.worlds:
        x = w.input_class[0]
        img = {tuple(delta[v]) for v in w.action}
        z = next(z for z in task.map.map[x] if img <= set(z))
        choice[w] = where[(x, z)]
    return saturate_map(src, dst, choice)


def top_from_krip(f: Mapping) -> dict:
    """Read a vertex map off a morphism: vertex ``v`` of ``Y`` goes to the same-colored vertex of any image action."""
    delta = {}
    for w, image in f.items():
        u = min(image)
        for v in w.action:
            delta.setdefault(v, next(z for z in u.action if z.agent == v.agent))
    return delta


@dataclass
class EquivalenceReport:
    topological: DecisionSearch
    logical: SearchResult
    agree: bool
    translated_ok: bool
    notes: list = field(default_factory=list)

    def lines(self) -> list:
        return [f"decision map: {'found' if self.topological else 'none'} ({self.topological.nodes} nodes)",
                f"morphism: {self.logical.verdict} ({self.logical.nodes} nodes)",
                f"verdicts agree: {self.agree}",
                f"witnesses translate: {self.translated_ok}"] + self.notes


def equivalence_probe(protocol: SimplicialTaskOrProtocol, task: SimplicialTaskOrProtocol,
                      budget: int = 1_000_000) -> EquivalenceReport:
    """Solve both formulations independently and cross-translate any witnesses."""
    top = search_decision_map(protocol, task)
    inst = bridge_instance(protocol, task)
    log = search_solution(inst, budget)
    notes = []
    agree = log.verdict != "budget-exceeded" and top.found == bool(log)
    translated = True
    if top.found:
        g = krip_from_top(top.mapping, protocol, task, inst)
        chk = check_solution(inst, g)
        if not chk:
            translated = False
            notes.append(f"decision map did not translate: {chk.violation}")
    if log:
        d = top_from_krip(log.morphism)
        if not check_decision_map(d, protocol, task):
            translated = False
            notes.append("morphism did not translate to a decision map")
    return EquivalenceReport(top, log, agree, translated, notes)
