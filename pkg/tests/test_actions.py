from itertools import product

import pytest

from epistemia import formula as F
from epistemia.actions import (FailurePattern, MPAction, class_of, class_size, consensus_task, enumerate_patterns,
                               mp0, mp_full)
from epistemia.complex import Complex, derive_model, input_facet, input_model
from epistemia.model import ModelError, check_per, is_proper

import oracles

WHITE, RED, BLUE = 0, 1, 2


def fp(n, text):
    return FailurePattern.parse(n, text)


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 13), (4, 87)])
def test_pattern_counts_match_poset_enumeration(n, count):
    ours = {frozenset((b, a) for b, rs in t.fails for a in rs) for t in enumerate_patterns(n)}
    ref = set(oracles.patterns(n))
    assert ours == ref
    assert len(ours) == count


def test_pattern_count_formula():
    # sum over proper dead sets D of prod over D of (2^|live| - 1)
    from itertools import combinations
    for n in range(1, 6):
        total = sum((2 ** (n - k) - 1) ** k for k in range(n) for _ in combinations(range(n), k))
        assert len(enumerate_patterns(n)) == total


def test_pattern_validation():
    with pytest.raises(ValueError):
        FailurePattern.from_map(2, {0: [1], 1: [0]})  # everyone dead / receiver dead
    with pytest.raises(ValueError):
        FailurePattern.from_map(3, {0: []})
    with pytest.raises(ValueError):
        FailurePattern.from_map(3, {0: [1], 1: [2]})
    with pytest.raises(ValueError):
        FailurePattern.parse(3, "0<1")
    with pytest.raises(ValueError):
        FailurePattern.parse(3, "{0-1}")


def test_pattern_text_roundtrip_and_accessors():
    for t in enumerate_patterns(3):
        assert fp(3, str(t)) == t
    t = fp(3, "{2<0, 2<1}")
    assert str(t) == "{2<0, 2<1}" and str(FailurePattern(3)) == "{}"
    assert t.dead == {2} and t.alive == {0, 1}
    assert t.send_fail(2, 0) and not t.send_fail(0, 2)
    assert t.failed_senders(1) == {2} and t.delivered_to(1) == (0, 1)
    assert t.heard() == (0, 1) and t.silent() == 1
    assert FailurePattern.from_map(3, t.as_map()) == t


def test_mp0_n2():
    a = mp0(2)
    assert [str(t) for t in a.actions] == ["{}", "{0<1}", "{1<0}"]
    assert all(a.pre[t] == F.TRUE for t in a.actions)
    assert check_per(a.frame) and is_proper(a.frame)


def test_mp0_n3_red_relation_example():
    a = mp0(3)
    t1, t2, t3 = fp(3, f"{{{BLUE}<{RED}}}"), fp(3, f"{{{BLUE}<{WHITE}, {BLUE}<{RED}}}"), fp(3, f"{{{BLUE}<{WHITE}}}")
    assert a.related(RED, t1, t2)
    assert not a.related(RED, t1, t3)
    assert a.related(WHITE, t2, t3)


def test_mp0_relation_matches_literal_definition():
    for n in (2, 3):
        a = mp0(n)
        for t, s in product(a.actions, repeat=2):
            to = frozenset((b, x) for b, rs in t.fails for x in rs)
            so = frozenset((b, x) for b, rs in s.fails for x in rs)
            for k in range(n):
                lit = (k not in oracles.dead(to) | oracles.dead(so)
                       and {b for b in range(n) if (b, k) in to} == {b for b in range(n) if (b, k) in so})
                assert a.related(k, t, s) == lit


def test_consensus_task():
    t2 = consensus_task(2)
    assert t2.actions == (0, 1)
    assert t2.pre[0] == F.Or(F.Atom(0, 0), F.Atom(1, 0))
    t3 = consensus_task(3)
    assert all(not t3.related(a, u, v) for a in range(3) for u in range(3) for v in range(3) if u != v)
    assert all(t3.alive(v) == {0, 1, 2} for v in range(3))
    t1 = consensus_task(1)
    assert len(t1) == 1 and t1.related(0, 0, 0)


def test_class_of_examples():
    m = input_model(3)
    x = input_facet((0, 1, 2))
    assert class_of(m, FailurePattern(3), x) == (x,)
    silent0 = FailurePattern.from_map(3, {0: [1, 2]})
    assert class_of(m, silent0, x) == tuple(input_facet((v, 1, 2)) for v in range(3))
    half0 = FailurePattern.from_map(3, {0: [1]})
    assert class_of(m, half0, x) == (x,)


def test_class_of_needs_full_input():
    c = Complex(2, [0, 1], [[(0, 0)], [(0, 1), (1, 1)]])
    with pytest.raises(ModelError):
        class_of(derive_model(c), FailurePattern(2), c.facets[0])


@pytest.mark.parametrize("n", [2, 3])
def test_class_size_law_and_literal_classes(n):
    m = input_model(n)
    vals = list(product(range(n), repeat=n))
    for t in enumerate_patterns(n):
        to = frozenset((b, a) for b, rs in t.fails for a in rs)
        for x in vals:
            cls = class_of(m, t, input_facet(x))
            lit = tuple(input_facet(y) for y in vals if oracles.equiv_t(n, to, x, y))
            assert cls == lit
            assert len(cls) == class_size(t, n)


def test_example_two_facet_input():
    c = Complex(3, range(2), [[(0, 0), (1, 0), (2, 0)], [(0, 0), (1, 0), (2, 1)]])
    x, y = c.facets
    a = mp_full(derive_model(c))
    t = fp(3, "{2<0, 2<1}")
    assert [act for act in a.actions if act.pattern == t] == [MPAction((x, y), t)]
    # the second action: blue reaches red but not white
    matches = []
    for s in enumerate_patterns(3):
        ax = next(act for act in a.actions if act.pattern == s and x in act.input_class)
        ay = next(act for act in a.actions if act.pattern == s and y in act.input_class)
        if ax != ay and a.related(WHITE, ax, ay) and not a.related(RED, ax, ay):
            matches.append(s)
    assert matches == [fp(3, "{2<0}")]


def test_mp_full_n2_matches_listing():
    m = input_model(2)
    a = mp_full(m)
    X = lambda i, j: input_facet((i, j))
    te, t0, t1 = FailurePattern(2), fp(2, "{0<1}"), fp(2, "{1<0}")
    expected = ({MPAction((X(i, j),), te) for i in range(2) for j in range(2)}
                | {MPAction((X(0, j), X(1, j)), t0) for j in range(2)}
                | {MPAction((X(i, 0), X(i, 1)), t1) for i in range(2)})
    assert set(a.actions) == expected
    # only reflexive pairs: every action is isolated
    assert all(len(a.frame.neighbours(k, w)) <= 1 for k in range(2) for w in a.actions)
    w = MPAction((X(0, 0), X(1, 0)), t0)
    assert a.alive(w) == {1}
    assert a.pre[w] == F.Or(F.label_conj(m.label(X(0, 0))), F.label_conj(m.label(X(1, 0))))


def test_mp_full_relation_matches_literal_and_is_representative_free():
    for n in (2, 3):
        m = input_model(n)
        a = mp_full(m)
        val = lambda f: tuple(v.value for v in f)
        for t, s in product(a.actions, repeat=2):
            to = frozenset((b, x) for b, rs in t.pattern.fails for x in rs)
            so = frozenset((b, x) for b, rs in s.pattern.fails for x in rs)
            for k in range(n):
                lits = {oracles.mp_relation(n, to, val(x), so, val(y), k)
                        for x in t.input_class for y in s.input_class}
                assert len(lits) == 1
                assert a.related(k, t, s) == lits.pop()
        assert check_per(a.frame)
        assert all(a.alive(w) == w.pattern.alive for w in a.actions)


def test_mp_full_preconditions_pick_out_their_class():
    m = input_model(2)
    a = mp_full(m)
    for act in a.actions:
        holds = {w for w in m.worlds if F.evaluate(m, w, a.pre[act])}
        assert holds == set(act.input_class)
