import numpy as np
import pytest

from epistemia.actions import mp0_complex
from epistemia.complex import (Complex, ComplexError, SimplicialModel, Vertex, chi, derive_model, facets,
                               input_complex, input_facet, input_model, intersect, is_simplicial_map, simplex)
from epistemia.model import check_per, is_proper

import gen
import oracles

X0 = [(0, 0), (1, 0), (2, 0)]
X1 = [(0, 0), (1, 1)]
X2 = [(1, 1), (0, 1)]
X3 = [(0, 1), (1, 0)]


@pytest.fixture
def square_with_triangle():
    return Complex(3, range(2), [X0, X1, X2, X3])


def test_input_facets_n2():
    fs = facets(input_complex(2))
    assert fs == tuple(input_facet(v) for v in [(0, 0), (0, 1), (1, 0), (1, 1)])


def test_single_facet_complex():
    c = Complex(2, [5], [[(0, 5), (1, 5)]])
    assert facets(c) == (((0, 5), (1, 5)),)


def test_mp0_complex_has_13_facets():
    c = mp0_complex(3)
    dims = sorted(len(f) - 1 for f in c.facets)
    assert len(c.facets) == 13
    assert dims.count(2) == 1 and dims.count(1) == 9 and dims.count(0) == 3


def test_chi():
    assert chi(simplex([(0, 3), (2, 1)])) == {0, 2}
    assert all(chi(x) == {0, 1, 2} for x in input_complex(3).facets)


def test_chi_of_shared_white_vertex(square_with_triangle):
    a, b = simplex(X0), simplex(X1)
    assert chi(intersect(a, b)) == {0}


def test_rejects_bad_coloring_and_values():
    with pytest.raises(ComplexError):
        simplex([(0, 1), (0, 2)])
    with pytest.raises(ComplexError):
        Complex(2, [0], [[(0, 1)]])
    with pytest.raises(ComplexError):
        Complex(2, [0, 1], [[(0, 0), (1, 0)], [(0, 0)]])
    with pytest.raises(ComplexError):
        Complex(2, [0], [])


def test_zero_dimensional_facets_allowed():
    c = Complex(2, [0, 1], [[(0, 0)], [(1, 1)]])
    m = derive_model(c)
    assert [m.alive(w) for w in m.worlds] == [{0}, {1}]


def test_is_simplicial_map():
    c = input_complex(2)
    ident = {v: v for v in c.vertices()}
    assert is_simplicial_map(ident, c, c)
    bad = dict(ident)
    bad[Vertex(0, 0)] = Vertex(1, 0)
    assert not is_simplicial_map(bad, c, c)
    # collapsing values to 0 lands every facet in the single output facet
    out = Complex(2, [0], [[(0, 0), (1, 0)]])
    assert is_simplicial_map({v: Vertex(v.agent, 0) for v in c.vertices()}, c, out)
    with pytest.raises(ValueError):
        is_simplicial_map({}, c, c)


def test_square_triangle_model(square_with_triangle):
    m = derive_model(square_with_triangle)
    w0, w1, w2, w3 = (simplex(x) for x in (X0, X1, X2, X3))
    assert [w for w in m.worlds if 2 in m.alive(w)] == [w0]
    assert m.related(0, w0, w1) and m.related(1, w0, w3)
    assert m.related(1, w1, w2) and m.related(0, w2, w3)
    assert not any(m.related(a, w0, w2) for a in range(3))
    assert is_proper(m)


def test_one_facet_model():
    m = derive_model(Complex(3, [0], [[(0, 0), (2, 0)]]))
    assert len(m) == 1 and m.alive(m.worlds[0]) == {0, 2}


def test_input_model_n2_relations():
    m = input_model(2)
    x00, x01, x10, x11 = (input_facet(v) for v in [(0, 0), (0, 1), (1, 0), (1, 1)])
    assert m.related(0, x00, x01) and m.related(1, x00, x10)
    assert not any(m.related(a, x00, x11) for a in range(2))
    assert m.label(x01) == {(0, 0), (1, 1)}


def test_explicit_labels():
    c = input_complex(2)
    sm = SimplicialModel(c, {c.facets[0]: [(0, 7)]})
    assert sm.model.label(c.facets[0]) == {(0, 7)}
    assert sm.model.label(c.facets[1]) == frozenset()


@pytest.mark.parametrize("seed", range(40))
def test_derived_models_are_proper_pers(seed):
    rng = np.random.default_rng(seed)
    m = gen.random_model(rng)
    pm = oracles.plain(m)
    assert check_per(m)
    assert all(oracles.is_per(pm["rel"][a]) for a in range(m.n))
    assert is_proper(m) and oracles.proper(pm)
    for w in m.worlds:
        assert m.alive(w) == chi(w)


def test_pure_complex_gives_reflexive_relations():
    m = input_model(3)
    assert all(m.alive(w) == {0, 1, 2} for w in m.worlds)
