from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from opk.address import Address, parse_address
from opk.algebra import PastingDiagram, diagram_of
from opk.ocat import morphism
from opk.opetope import enumerate_opetopes, op_int, parse_opetope, source
from opk.presheaf import S, T, face_shape, relations
from opk.shapes import (
    Cardinal, Diagram, LambdaMorphism, ShapeError, _generator, as_monotone_map,
    check_surjectivity, diagram_of_composite, diagrammatic_witness,
    doth_morphism, doth_object, lambda_compose, lambda_hom, lambda_identity,
    vertex_order,
)

XI = parse_opetope("{[] <- {[] <- ar,[*] <- ar,[**] <- ar}, [[*]] <- {[] <- ar,[*] <- ar},"
                   " [[**]] <- {[] <- ar}}")


def card(m):
    return doth_object(op_int(m), 1, 1)


def homset(m, n):
    return lambda_hom(card(m), card(n))


PAIRS = [(m, n) for m in range(4) for n in range(4)]


def test_hom_counts_small():
    for m, n in PAIRS:
        assert len(homset(m, n)) == comb(m + n + 1, m + 1)


def test_vertex_order():
    assert vertex_order(card(2)) == ["t.s*", "s[].s*", "t.t"]


def test_faces_of_xi():
    def along(text):
        return as_monotone_map(doth_morphism(morphism(XI, (S(parse_address(text, 2)),)), 1, 1))

    assert along("[]") == (0, 1, 3, 4)
    assert along("[[*]]") == (1, 2, 3)
    assert along("[[**]]") == (0, 1)
    assert as_monotone_map(doth_morphism(morphism(XI, (T,)), 1, 1)) == (0, 1, 2, 3, 4)


@given(st.sampled_from(PAIRS), st.data())
def test_identity_and_inverse(mn, data):
    m, n = mn
    f = data.draw(st.sampled_from(homset(m, n)))
    assert lambda_compose(f, lambda_identity(f.dom)) == f
    assert lambda_compose(lambda_identity(f.cod), f) == f
    assert lambda_identity(f.dom).inverse() == lambda_identity(f.dom)


@settings(max_examples=40)
@given(st.tuples(*[st.integers(0, 3)] * 4), st.data())
def test_composition_is_associative(ms, data):
    a, b, c, d = ms
    f = data.draw(st.sampled_from(homset(a, b)))
    g = data.draw(st.sampled_from(homset(b, c)))
    h = data.draw(st.sampled_from(homset(c, d)))
    assert lambda_compose(h, lambda_compose(g, f)) == lambda_compose(lambda_compose(h, g), f)
    fg = tuple(as_monotone_map(g)[i] for i in as_monotone_map(f))
    assert as_monotone_map(lambda_compose(g, f)) == fg


@pytest.mark.parametrize("k,n,size", [(1, 1, 4), (1, 2, 3), (2, 2, 3)])
def test_generators_respect_relations(k, n, size):
    for d in range(max(n - k + 2, 2), n + 3):
        for w in enumerate_opetopes(d, size):
            for (g1, g2), (h1, h2) in relations(w):
                if face_shape(face_shape(w, g1), g2).dim < n - k:
                    continue
                a = lambda_compose(_generator(w, g1, k, n), _generator(face_shape(w, g1), g2, k, n))
                b = lambda_compose(_generator(w, h1, k, n), _generator(face_shape(w, h1), h2, k, n))
                assert a == b


def test_witnesses_reproduce_and_compose():
    found = {}
    for m in range(1, 4):
        for n in range(4):
            for f in homset(m, n):
                d = diagrammatic_witness(f)
                assert d.morphism(1, 1) == f
                found.setdefault((m, n), []).append((f, d))
    for (m, n), first in found.items():
        for f1, d1 in first[:3]:
            for f2, d2 in found.get((n, 2), [])[:3]:
                assert diagram_of_composite(d1, d2).morphism(1, 1) == lambda_compose(f2, f1)


def test_degenerate_domain_has_no_direct_witness():
    f = homset(0, 2)[0]
    with pytest.raises(ShapeError, match="degenerate"):
        diagrammatic_witness(f)


def test_surjectivity_small():
    shapes = [w for d in range(4) for w in enumerate_opetopes(d, 2)]
    for a in shapes:
        for b in shapes:
            assert check_surjectivity(a, b, 1, 1) is None


def test_without_colours_witnesses_fail():
    # with k = 0 a spine map may send an arrow to a path repeating one arrow;
    # images of faces never do, so such a map has no diagram
    a = Cardinal("spine", op_int(1), 0, 1)
    b = Cardinal("spine", op_int(1), 0, 1)
    (cell,) = a.complex.cells(a.complex.shapes()[0])
    (target_cell,) = b.complex.cells(b.complex.shapes()[0])
    doubled = PastingDiagram(op_int(2), (target_cell, target_cell)).name
    f = LambdaMorphism(a, b, {(a.complex.shapes()[0], cell): doubled})
    for xi in enumerate_opetopes(3, 4):
        if xi.kind != "tree":
            continue
        for p in xi.nodes:
            g = doth_morphism(morphism(xi, (S(p),)), 0, 1)
            for v in g.body.values():
                labels = diagram_of(v).labels
                assert len(set(labels)) == len(labels)
    with pytest.raises(ShapeError):
        diagrammatic_witness(f)


def test_diagram_endpoints():
    d = Diagram(XI, parse_address("[[*]]", 2))
    assert d.dom is source(XI, parse_address("[[*]]", 2))
    assert d.cod is op_int(4)
    with pytest.raises(ShapeError):
        diagram_of_composite(d, Diagram(XI, Address.empty(2)))
