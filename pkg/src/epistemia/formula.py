"""Epistemic formulas: AST, text syntax, evaluation over partial epistemic models.

The core AST has five node types (``Atom``, ``Neg``, ``And``, ``Or``, ``Know``).
``false``, ``true``, ``alive(a)`` and ``p -> q`` are abbreviations built from them;
the printer folds those shapes back into their sugared text.

Text grammar, loosest binding first::

    imp   := or ('->' imp)?
    or    := and ('|' and)*
    and   := unary ('&' unary)*
    unary := '~' unary | 'K' INT unary | prim
    prim  := input(a,v) | alive(a[,b...]) | true | false | '(' imp ')'
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .model import PartialEpistemicModel


class Formula:
    # hashes are cached; formulas are nested deeply and used as memo keys
    def __post_init__(self):
        key = (type(self).__name__,) + tuple(getattr(self, f) for f in self._fields)
        object.__setattr__(self, "_h", hash(key))


def _cached_hash(cls):
    cls.__hash__ = lambda self: self._h
    return cls


@_cached_hash
@dataclass(frozen=True, eq=True)
class Atom(Formula):
    agent: int
    value: int
    _h: int = field(default=0, init=False, repr=False, compare=False)
    _fields = ("agent", "value")


@_cached_hash
@dataclass(frozen=True, eq=True)
class Neg(Formula):
    body: Formula
    _h: int = field(default=0, init=False, repr=False, compare=False)
    _fields = ("body",)


@_cached_hash
@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula
    _h: int = field(default=0, init=False, repr=False, compare=False)
    _fields = ("left", "right")


@_cached_hash
@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula
    _h: int = field(default=0, init=False, repr=False, compare=False)
    _fields = ("left", "right")


@_cached_hash
@dataclass(frozen=True, eq=True)
class Know(Formula):
    agent: int
    body: Formula
    _h: int = field(default=0, init=False, repr=False, compare=False)
    _fields = ("agent", "body")


# abbreviations

FALSE = And(Atom(0, 0), Neg(Atom(0, 0)))
TRUE = Neg(FALSE)


def implies(p: Formula, q: Formula) -> Formula:
    return Or(Neg(p), q)


def alive(a: int) -> Formula:
    return Neg(Know(a, FALSE))


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    out = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``false``."""
    out = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


def alive_all(agents: Iterable[int]) -> Formula:
    return conj(alive(a) for a in sorted(agents))


def label_conj(label: Iterable[tuple]) -> Formula:
    """``/\\ l(X)`` for a set of atoms, in sorted order."""
    return conj(Atom(a, v) for a, v in sorted(label))


# parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(->)|(\d+)|([A-Za-z_]+)|([~&|(),]))")


def _tokenize(text: str) -> list:
    toks, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        toks.append((m.group(m.lastindex), start))
        pos = m.end()
    toks.append(("<end>", len(text)))
    return toks


class _Parser:
    def __init__(self, text, n, values):
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n
        self.values = None if values is None else set(values)

    def peek(self):
        return self.toks[self.i][0]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok, pos

    def integer(self):
        tok, pos = self.take()
        if not tok.isdigit():
            raise FormulaSyntaxError(f"expected an integer, found {tok!r}", pos)
        return int(tok), pos

    def agent(self):
        a, pos = self.integer()
        if self.n is not None and a >= self.n:
            raise FormulaSyntaxError(f"agent {a} out of range 0..{self.n - 1}", pos)
        return a

    def imp(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return implies(left, self.imp())
        return left

    def disj(self):
        out = self.conj()
        while self.peek() == "|":
            self.take()
            out = Or(out, self.conj())
        return out

    def conj(self):
        out = self.unary()
        while self.peek() == "&":
            self.take()
            out = And(out, self.unary())
        return out

    def unary(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            return Neg(self.unary())
        if tok == "K":
            self.take()
            return Know(self.agent(), self.unary())
        return self.prim()

    def prim(self):
        tok, pos = self.take()
        if tok == "(":
            inner = self.imp()
            self.take(")")
            return inner
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if tok == "input":
            self.take("(")
            a = self.agent()
            self.take(",")
            v, vpos = self.integer()
            if self.values is not None and v not in self.values:
                raise FormulaSyntaxError(f"value {v} not in the declared value set", vpos)
            self.take(")")
            return Atom(a, v)
        if tok == "alive":
            self.take("(")
            agents = [self.agent()]
            while self.peek() == ",":
                self.take()
                agents.append(self.agent())
            self.take(")")
            return conj(alive(a) for a in agents)
        raise FormulaSyntaxError(f"unexpected token {tok!r}", pos)


def parse(text: str, n: int | None = None, values: Iterable[int] | None = None) -> Formula:
    """Parse the ASCII syntax; ``n``/``values`` optionally bound agents and input values."""
    p = _Parser(text, n, values)
    f = p.imp()
    tok, pos = p.toks[p.i]
    if tok != "<end>":
        raise FormulaSyntaxError(f"trailing input {tok!r}", pos)
    return f


# printing

_IMP, _OR, _AND, _UNARY = 1, 2, 3, 4


def to_text(f: Formula) -> str:
    return _show(f, 0)


def _wrap(s: str, own: int, ctx: int) -> str:
    return f"({s})" if own < ctx else s


def _show(f: Formula, ctx: int) -> str:
    if f == FALSE:
        return "false"
    if f == TRUE:
        return "true"
    if isinstance(f, Atom):
        return f"input({f.agent},{f.value})"
    if isinstance(f, Neg):
        if isinstance(f.body, Know) and f.body.body == FALSE:
            return f"alive({f.body.agent})"
        return "~" + _show(f.body, _UNARY)
    if isinstance(f, Know):
        return f"K {f.agent} " + _show(f.body, _UNARY)
    if isinstance(f, And):
        return _wrap(f"{_show(f.left, _AND)} & {_show(f.right, _UNARY)}", _AND, ctx)
    if isinstance(f, Or):
        if isinstance(f.left, Neg) and f.left != TRUE:
            return _wrap(f"{_show(f.left.body, _OR)} -> {_show(f.right, _IMP)}", _IMP, ctx)
        return _wrap(f"{_show(f.left, _OR)} | {_show(f.right, _AND)}", _OR, ctx)
    raise TypeError(f"not a formula: {f!r}")


def normalize(text: str) -> str:
    return to_text(parse(text))


# semantics

def truth_vector(m: PartialEpistemicModel, f: Formula, memo: dict | None = None) -> np.ndarray:
    """Boolean array over ``m.worlds``: where ``f`` holds."""
    if memo is None:
        memo = {}
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Atom):
        out = m.atom_vector((f.agent, f.value))
    elif isinstance(f, Neg):
        out = ~truth_vector(m, f.body, memo)
    elif isinstance(f, And):
        out = truth_vector(m, f.left, memo) & truth_vector(m, f.right, memo)
    elif isinstance(f, Or):
        out = truth_vector(m, f.left, memo) | truth_vector(m, f.right, memo)
    elif isinstance(f, Know):
        body = truth_vector(m, f.body, memo)
        if not 0 <= f.agent < m.n:
            raise ValueError(f"agent {f.agent} out of range")
        blk = m.block(f.agent)
        live = blk >= 0
        bad = np.bincount(blk[live], weights=~body[live], minlength=m.num_blocks(f.agent))
        out = np.ones(len(m), dtype=bool)
        out[live] = bad[blk[live]] == 0
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def evaluate(m: PartialEpistemicModel, w, f: Formula) -> bool:
    """``M, w |= f``."""
    i = m._idx(w)
    return bool(truth_vector(m, f)[i])


@dataclass(frozen=True)
class Validity:
    valid: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.valid


def is_valid(m: PartialEpistemicModel, f: Formula) -> Validity:
    """Validity of ``f`` in ``m``; on failure the first falsifying world is the witness."""
    vec = truth_vector(m, f)
    bad = np.flatnonzero(~vec)
    if len(bad) == 0:
        return Validity(True)
    return Validity(False, m.worlds[int(bad[0])])


# guarded positive fragment

def alive_guard_agents(f: Formula) -> frozenset | None:
    """Agents ``B`` if ``f`` is syntactically ``alive(B)``, else ``None``."""
    if f == TRUE:
        return frozenset()
    if isinstance(f, Neg) and isinstance(f.body, Know) and f.body.body == FALSE:
        return frozenset([f.body.agent])
    if isinstance(f, And):
        left, right = alive_guard_agents(f.left), alive_guard_agents(f.right)
        if left is not None and right is not None:
            return left | right
    return None


def _propositional_over(f: Formula, agents: frozenset) -> bool:
    if isinstance(f, Atom):
        return f.agent in agents
    if isinstance(f, Neg):
        return _propositional_over(f.body, agents)
    if isinstance(f, (And, Or)):
        return _propositional_over(f.left, agents) and _propositional_over(f.right, agents)
    return False


def is_guarded_positive(f: Formula) -> bool:
    if isinstance(f, Or) and isinstance(f.left, Neg):
        guard = alive_guard_agents(f.left.body)
        if guard is not None and _propositional_over(f.right, guard):
            return True
    if isinstance(f, (And, Or)):
        return is_guarded_positive(f.left) and is_guarded_positive(f.right)
    if isinstance(f, Know):
        return is_guarded_positive(f.body)
    return False


def agreement_on(n: int, value: int) -> Formula:
    """Some live agent holds input ``value``: ``\\/_a (alive(a) -> input_a(value))``."""
    return disj(implies(alive(a), Atom(a, value)) for a in range(n))


def build_phi(n: int) -> Formula:
    """The consensus obstruction ``\\/_i K_{i+2} K_{i+1} K_{i+2} phi_i`` (indices mod n)."""
    if n < 3:
        raise ValueError("the obstruction formula is defined for n >= 3")
    parts = []
    for i in range(n):
        a, b = (i + 2) % n, (i + 1) % n
        parts.append(Know(a, Know(b, Know(a, agreement_on(n, i)))))
    return disj(parts)


def modal_depth(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Neg):
        return modal_depth(f.body)
    if isinstance(f, (And, Or)):
        return max(modal_depth(f.left), modal_depth(f.right))
    return 1 + modal_depth(f.body)


# refutation traces

def _epistemic(f: Formula) -> bool:
    """Contains a knowledge operator other than the one inside ``alive(a)``."""
    if isinstance(f, Atom):
        return False
    if isinstance(f, Neg):
        if isinstance(f.body, Know) and f.body.body == FALSE:
            return False
        return _epistemic(f.body)
    if isinstance(f, (And, Or)):
        return _epistemic(f.left) or _epistemic(f.right)
    return True


@dataclass(frozen=True)
class Step:
    agent: int | None
    world: object


def refutation(m: PartialEpistemicModel, w, f: Formula) -> list:
    """Explain why ``M, w`` falsifies ``f`` as a list of paths of :class:`Step`.

    Disjunctions contribute one path per refuted disjunct; a false ``K_a g`` extends
    the path to the least ``~_a``-successor (in world order) that falsifies ``g``.
    Paths stop at the first false subformula whose only modalities are ``alive`` guards.
    """
    memo: dict = {}
    if truth_vector(m, f, memo)[m._idx(w)]:
        raise ValueError("formula holds at this world; nothing to refute")

    def go(i: int, g: Formula) -> list:
        if not _epistemic(g):
            return [[]]
        if isinstance(g, Or):
            return go(i, g.left) + go(i, g.right)
        if isinstance(g, And):
            first = g.left if not truth_vector(m, g.left, memo)[i] else g.right
            return go(i, first)
        if isinstance(g, Know):
            body = truth_vector(m, g.body, memo)
            blk = m.block(g.agent)
            succ = [int(j) for j in m.block_members(g.agent, blk[i]) if not body[j]]
            j = succ[0]
            return [[Step(g.agent, m.worlds[j])] + p for p in go(j, g.body)]
        return [[]]

    i = m._idx(w)
    return [[Step(None, w)] + p for p in go(i, f)]
