from collections import Counter

from hypothesis import given, strategies as st

from opk.address import Address, parse_address, star
from opk.ocat import (
    boundary, check_pushout_lemmas, compose, equal, hom, identity, morphism,
    parse_morphism, representable, spine,
)
from opk.opetope import (
    AR, PT, corolla, degenerate, enumerate_opetopes, leaf_addresses,
    node_addresses, op_int, parse_opetope, readdress, source,
)
from opk.presheaf import S, T

SMALL = [o for d in range(4) for o in enumerate_opetopes(d, 4)]


def shape_counts(cx):
    return Counter({s: len(cx.cells(s)) for s in cx.shapes()})


def test_small_homs():
    assert {str(f) for f in hom(PT, AR)} == {"s*", "t"}
    assert len(hom(PT, op_int(2))) == 3
    for m in range(5):
        assert len(hom(AR, op_int(m))) == m + 1


@given(st.sampled_from(SMALL), st.sampled_from(SMALL))
def test_category_is_direct(w, v):
    fs = hom(w, v)
    if w is v:
        assert [f.path for f in fs] == [()]
    elif w.dim >= v.dim:
        assert fs == []


def test_representable_cell_counts():
    cx = representable(op_int(2))
    by_dim = Counter()
    for s in cx.shapes():
        by_dim[s.dim] += len(cx.cells(s))
    assert by_dim == {2: 1, 1: 3, 0: 3}


def test_boundary_drops_only_the_top_cell():
    for w in SMALL:
        if w.dim:
            assert shape_counts(representable(w)) - shape_counts(boundary(w)) == {w: 1}


@given(st.sampled_from([w for w in SMALL if w.dim >= 1 and not w.is_degenerate]))
def test_spine_has_one_cell_per_node(w):
    sp = spine(w)
    top = sum(len(sp.cells(s)) for s in sp.shapes(w.dim - 1))
    assert top == len(node_addresses(w))


def test_spines_of_corollas_and_degenerates():
    for psi in SMALL:
        if psi.dim >= 1:
            assert shape_counts(spine(corolla(psi))) == shape_counts(representable(psi))
        assert shape_counts(spine(degenerate(psi))) == shape_counts(representable(psi))


def test_relations():
    xi = parse_opetope("{[] <- {[] <- ar, [*] <- ar}, [[*]] <- {[] <- ar}}")
    root = Address.empty(2)
    # Glob1
    assert equal(morphism(xi, (T, T)), morphism(xi, (S(root), T)))
    # Inner: s_[[*]] then t equals s_[] then s_[*]
    assert equal(morphism(xi, (S(parse_address("[[*]]", 2)), T)),
                 morphism(xi, (S(root), S(star(1)))))
    # Degen
    ia = degenerate(AR)
    assert equal(morphism(ia, (T, S(Address.empty(1)))), morphism(ia, (T, T)))
    # two different sources stay apart
    assert not equal(morphism(op_int(2), (S(star(0)),)), morphism(op_int(2), (S(star(1)),)))


def test_glob2_on_xi():
    xi = parse_opetope("{ [] <- {[] <- ar,[*] <- ar,[**] <- ar}, [[*]] <- {[] <- ar,[*] <- ar},"
                       " [[**]] <- {[] <- ar} }")
    r = readdress(xi)
    for leaf in leaf_addresses(xi):
        p = Address(leaf.dim, leaf.key[:-1])
        q = Address(leaf.dim - 1, leaf.key[-1])
        assert equal(morphism(xi, (T, S(r[leaf]))), morphism(xi, (S(p), S(q))))


@given(st.sampled_from([w for w in SMALL if w.dim >= 1]), st.data())
def test_composition(w, data):
    psi = data.draw(st.sampled_from(representable(w).shapes()))
    g = data.draw(st.sampled_from(hom(psi, w)))
    f = data.draw(st.sampled_from(hom(PT, psi)))
    assert equal(compose(identity(psi), g), g)
    assert equal(compose(g, identity(w)), g)
    assert compose(f, g).dom is PT
    # printed paths read back to the same class
    assert equal(parse_morphism(str(g), w), g)


def test_pushout_lemmas_base_cases():
    assert check_pushout_lemmas(corolla(AR)) == (True, "ok")
    for w in enumerate_opetopes(3, 4):
        assert check_pushout_lemmas(w)[0]


def test_sources_are_faces():
    w = op_int(3)
    for p in node_addresses(w):
        f = morphism(w, (S(p),))
        assert f.dom is source(w, p)
