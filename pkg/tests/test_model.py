import numpy as np
import pytest

from epistemia.actions import FailurePattern, consensus_task, mp0, mp_full
from epistemia.complex import Complex, derive_model, input_facet, input_model, simplex
from epistemia.model import (ModelError, MorphismError, PartialEpistemicModel, alive_set, check_per,
                             compose, find_violation, frame_isomorphic, is_proper, saturate_map,
                             saturation, verify_morphism)
from epistemia.update import product_update

import gen
import oracles

SQUARE_TRIANGLE = Complex(3, range(2), [[(0, 0), (1, 0), (2, 0)], [(0, 0), (1, 1)], [(1, 1), (0, 1)], [(0, 1), (1, 0)]])


def test_check_per_on_raw_relations():
    assert check_per({0: [("w", "v"), ("v", "w"), ("w", "w"), ("v", "v")]})
    assert not check_per({0: [("w", "v")]})
    assert not check_per({0: [(1, 2), (2, 1), (2, 3), (3, 2), (1, 1), (2, 2), (3, 3)]})


def test_check_per_on_models():
    assert check_per(derive_model(SQUARE_TRIANGLE))
    assert check_per(mp0(3).frame)


def test_from_pairs_closes_symmetry_and_rejects_intransitive():
    m = PartialEpistemicModel.from_pairs(1, [0, 1], {0: [(0, 1), (0, 0), (1, 1)]})
    assert m.related(0, 1, 0) and m.alive(0) == {0}
    # symmetric closure of a lone edge needs the reflexive pairs too: not repaired
    with pytest.raises(ModelError):
        PartialEpistemicModel.from_pairs(1, [0, 1], {0: [(0, 1)]})
    with pytest.raises(ModelError):
        PartialEpistemicModel.from_pairs(1, [0, 1, 2], {0: [(0, 1), (1, 2)]})


def test_empty_model_rejected():
    with pytest.raises(ModelError):
        PartialEpistemicModel(2, [], {})


def test_is_proper():
    assert is_proper(input_model(2))
    twins = PartialEpistemicModel(2, ["a", "b"], {0: [["a", "b"]], 1: [["a", "b"]]})
    assert not is_proper(twins)
    i = input_model(2)
    assert is_proper(product_update(i, mp_full(i)))


def test_dead_agent_counts_as_distinguishing():
    # agent 1 is dead in both worlds, so a and b are not 1-related
    m = PartialEpistemicModel(2, ["a", "b"], {0: [["a", "b"]]})
    assert is_proper(m)
    assert oracles.proper(oracles.plain(m))


def test_alive_set_square_triangle():
    m = derive_model(SQUARE_TRIANGLE)
    w0, w1 = simplex([(0, 0), (1, 0), (2, 0)]), simplex([(0, 0), (1, 1)])
    assert alive_set(m, w0) == {0, 1, 2}
    assert alive_set(m, w1) == {0, 1}
    with pytest.raises(ModelError):
        alive_set(m, "nope")


def test_saturation_basics():
    m = input_model(2)
    x = input_facet((0, 1))
    assert saturation(m, {0, 1}, x) == {x}
    assert saturation(m, set(), x) == set(m.worlds)
    assert saturation(m, {0}, x) == {x, input_facet((0, 0))}


def test_saturation_in_mp_action_frame():
    a = mp_full(input_model(2))
    t0 = FailurePattern.from_map(2, {0: [1]})
    w = next(t for t in a.actions if t.pattern == t0 and t.input_class == (input_facet((0, 0)), input_facet((1, 0))))
    assert saturation(a.frame, {1}, w) == {w}


def test_saturation_along_crash_path():
    i = input_model(3)
    p = product_update(i, mp_full(i))
    x, y = input_facet((0, 1, 2)), input_facet((1, 1, 2))
    u1 = FailurePattern.from_map(3, {0: [1]})
    find = lambda f, t: next(w for w in p.worlds if w.input_class == (f,) and w.action.pattern == t)
    t0, t1, t2, t3 = find(x, FailurePattern(3)), find(x, u1), find(y, u1), find(y, FailurePattern(3))
    assert p.related(2, t0, t1) and p.related(1, t1, t2) and p.related(2, t2, t3)
    assert saturation(p, {2}, t1) & {t0, t1, t2, t3} == {t0, t1}


def test_saturation_absorbs():
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = gen.random_per_model(rng)
        for v in m.worlds:
            al = m.alive(v)
            for u in saturation(m, al, v):
                assert saturation(m, al, u) == saturation(m, al, v)
            assert (v in saturation(m, al, v))


def test_identity_saturation_is_a_morphism():
    m = derive_model(SQUARE_TRIANGLE)
    f = saturate_map(m, m, {w: w for w in m.worlds})
    g = verify_morphism(f, m, m)
    assert g(m.worlds[0]) == {m.worlds[0]}


def _hand_delta(inst_p, inst_t):
    te, t0 = FailurePattern(2), FailurePattern.from_map(2, {0: [1]})
    tw = lambda x, v: next(u for u in inst_t.worlds if u.input_class == (x,) and u.action == v)
    f = {}
    for w in inst_p.worlds:
        x = w.input_class[0]
        i, j = x[0].value, x[1].value
        if w.action.pattern == te:
            f[w] = inst_t.saturation((0, 1), tw(x, 1 if (i, j) == (1, 1) else 0))
        elif w.action.pattern == t0:
            f[w] = inst_t.saturation((1,), tw(x, j))
        else:
            f[w] = inst_t.saturation((0,), tw(x, i))
    return f


def test_hand_delta_and_an_atom_violation():
    i = input_model(2)
    p, t = product_update(i, mp_full(i)), product_update(i, consensus_task(2))
    f = _hand_delta(p, t)
    verify_morphism(f, p, t)
    assert oracles.morphism_ok(f, oracles.plain(p), oracles.plain(t))
    # send a failure-free world to an output world over a different input: live atoms disagree
    w = next(w for w in p.worlds if w.action.pattern == FailurePattern(2) and w.input_class == (input_facet((0, 0)),))
    other = next(u for u in t.worlds if u.input_class == (input_facet((0, 1)),) and u.action == 0)
    bad = dict(f)
    bad[w] = frozenset([other])
    v = find_violation(bad, p, t)
    assert v is not None and v.law == "atoms" and v.worlds[0] == w
    with pytest.raises(MorphismError):
        verify_morphism(bad, p, t)


def test_violation_kinds():
    m = input_model(2)
    x00, x01, x10, x11 = (input_facet(v) for v in [(0, 0), (0, 1), (1, 0), (1, 1)])
    ident = {w: {w} for w in m.worlds}
    with pytest.raises(ValueError):
        find_violation({x00: {x00}}, m, m)
    with pytest.raises(ValueError):
        find_violation({**ident, x00: set()}, m, m)
    # swapping two worlds that agent 0 relates to different partners breaks preservation
    swapped = {**ident, x00: {x11}, x11: {x00}}
    assert find_violation(swapped, m, m).law == "preservation"
    # a two-world image on a world with everyone alive is not a saturation
    assert find_violation({**ident, x00: {x00, x01}}, m, m).law in ("saturation", "preservation")


def test_saturation_law_alone():
    # source: one world with agent 0 alive only; target: two worlds related by 0
    src = PartialEpistemicModel(2, ["s"], {0: [["s"]]})
    dst = PartialEpistemicModel(2, ["u", "v"], {0: [["u", "v"]], 1: [["u"], ["v"]]})
    assert find_violation({"s": {"u"}}, src, dst).law == "saturation"
    assert find_violation({"s": {"u", "v"}}, src, dst) is None


def test_frame_isomorphism_small():
    m = derive_model(SQUARE_TRIANGLE)
    g = frame_isomorphic(m, m)
    assert g is not None and sorted(g.values()) == sorted(m.worlds)
    chain = PartialEpistemicModel(3, [0, 1, 2], {0: [[0, 1], [2]], 1: [[1, 2], [0]], 2: [[0], [1], [2]]})
    tri = PartialEpistemicModel(3, [0, 1, 2], {0: [[0, 1], [2]], 1: [[1, 2], [0]], 2: [[0, 2], [1]]})
    assert frame_isomorphic(chain, tri) is None


def test_frame_isomorphism_mp_n2():
    i = input_model(2)
    a = mp_full(i)
    p = product_update(i, a)
    g = frame_isomorphic(a.frame, p)
    assert g is not None
    for w in a.frame.worlds:
        for v in a.frame.worlds:
            for k in range(2):
                assert a.frame.related(k, w, v) == p.related(k, g[w], g[v])


def test_frame_isomorphism_finds_relabelled_copy():
    rng = np.random.default_rng(11)
    for _ in range(30):
        m = gen.random_per_model(rng, max_worlds=8)
        perm = rng.permutation(len(m)).tolist()
        ren = {w: perm[i] for i, w in enumerate(m.worlds)}
        copy = PartialEpistemicModel(m.n, ren.values(), {a: [[ren[w] for w in c] for c in m.classes()[a]]
                                                          for a in range(m.n)})
        g = frame_isomorphic(m, copy)
        assert g is not None
        for a in range(m.n):
            for u in m.worlds:
                for v in m.worlds:
                    assert m.related(a, u, v) == copy.related(a, g[u], g[v])


def _quotient(c, k, label_mod):
    img = {x: frozenset((a, v % k) for a, v in x) for x in c.facets}
    top = [f for f in set(img.values()) if not any(f < g for g in img.values())]
    out = Complex(c.n, range(k), top)
    return img, out


def _labelled(c, mod):
    from epistemia.complex import SimplicialModel
    return derive_model(SimplicialModel(c, {x: {(a, v % mod) for a, v in x} for x in c.facets}))


def test_compose_verified_morphisms():
    rng = np.random.default_rng(5)
    for _ in range(60):
        n = int(rng.integers(2, 4))
        c0 = gen.random_complex(rng, n, tuple(range(8)))
        h1, c1 = _quotient(c0, 4, 2)
        h2, c2 = _quotient(c1, 2, 2)
        m0, m1, m2 = _labelled(c0, 2), _labelled(c1, 2), _labelled(c2, 2)
        f = verify_morphism({x: {y for y in c1.facets if h1[x] <= set(y)} for x in c0.facets}, m0, m1)
        g = verify_morphism({x: {y for y in c2.facets if h2[x] <= set(y)} for x in c1.facets}, m1, m2)
        h = compose(f, g)
        verify_morphism(h, m0, m2)
        assert oracles.morphism_ok(h, oracles.plain(m0), oracles.plain(m2))
