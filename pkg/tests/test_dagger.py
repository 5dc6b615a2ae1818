import pytest
from hypothesis import given, settings, strategies as st

from opk.address import Address
from opk.algebra import (
    FreeBinaryOperad, FreePasting, OpetopicAlgebra, TerminalOperad, check_laws,
    from_category, from_operad, operad_comp, poset_category,
)
from opk.dagger import (
    DaggerError, Flattened, a_omega, dagger_algebra, extend_colours,
    flatten_diagram, flatten_map, flatten_opetope, flatten_presheaf,
    lift_diagram, restrict_colours, spine_flatten, transport_algebra,
)
from opk.opetope import (
    AR, PT, corolla, degenerate, enumerate_opetopes, node_addresses, op_int,
    parse_opetope, source, target, validate,
)
from opk.opset import Extended, Terminal, truncate
from opk.presheaf import PresheafMap

XI = parse_opetope("{[] <- {[] <- ar,[*] <- ar,[**] <- ar}, [[*]] <- {[] <- ar,[*] <- ar},"
                   " [[**]] <- {[] <- ar}}")
BY_DIM = {n: enumerate_opetopes(n, 5) for n in range(1, 5)}


def test_dimension_one():
    assert flatten_opetope(PT, 1) is op_int(0)
    assert flatten_opetope(AR, 1) is corolla(op_int(0))


def test_degenerate_goes_to_degenerate_arrow():
    for phi in enumerate_opetopes(2, 3):
        assert flatten_opetope(degenerate(phi), 4) is degenerate(AR)


def test_lower_dimension_counts_sources():
    for psi in enumerate_opetopes(3, 4):
        assert flatten_opetope(psi, 4) is op_int(len(node_addresses(psi)))


def test_dimension_three_is_fixed():
    for w in BY_DIM[3]:
        assert flatten_opetope(w, 3) is w
    assert a_omega(XI) == {p: p for p in node_addresses(XI)}


def test_out_of_window():
    with pytest.raises(DaggerError):
        flatten_opetope(PT, 3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_faces_commute(n):
    for w in BY_DIM[n]:
        f = flatten_opetope(w, n)
        assert validate(f) is None
        assert target(f) is flatten_opetope(target(w), n)
        if w.is_degenerate:
            continue
        a = a_omega(w, n)
        assert len(f.nodes) == len(w.nodes)
        # increasing for the lex order
        assert [a[p] for p in w.nodes] == sorted(a.values(), key=lambda x: x.key)
        for p in w.nodes:
            assert source(f, a[p]) is flatten_opetope(source(w, p), n)


def test_corolla_address():
    assert a_omega(corolla(op_int(3)), 3) == {Address.empty(2): Address.empty(2)}


@pytest.mark.parametrize("operad", [TerminalOperad(3), FreeBinaryOperad(3)],
                         ids=["terminal", "free-binary"])
def test_presheaf_counts_and_spine_round_trip(operad):
    A = from_operad(operad)
    flat = Flattened(A.carrier, 2)
    X3 = flat.presheaf
    # |X_dagger at g| sums |X at w| over the w flattening to g
    assert len(X3.cells(op_int(1))) == len(A.carrier.cells(AR))
    for m in range(4):
        g = flatten_opetope(op_int(m), 2)
        assert len(X3.cells(g)) == len(A.carrier.cells(op_int(m)))
    for d in FreePasting(A.carrier, 4).diagrams():
        e = flatten_diagram(d, 2)
        assert e.nu.dim == 4
        assert lift_diagram(e, flat) == d


def test_spine_flatten_of_degenerate():
    assert spine_flatten(degenerate(AR), 2) is degenerate(op_int(1))


def test_flatten_map_identity():
    X = truncate(Terminal((0, 3), 3), 2, 3)
    ident = PresheafMap(X, X, {(s, c): c for s, c in X.all_cells()})
    f = flatten_map(ident, 3)
    assert all(k[1] == v for k, v in f.mapping.items())
    assert flatten_presheaf(X).count() == X.count()


@pytest.mark.parametrize("operad", [TerminalOperad(3), FreeBinaryOperad(3)],
                         ids=["terminal", "free-binary"])
def test_transport_round_trip(operad):
    A = from_operad(operad)
    A3, _ = dagger_algebra(A)
    back = transport_algebra(A.carrier, A3.comp, 2)
    for d in FreePasting(A.carrier, 3).diagrams():
        assert back.comp(d) == A.comp(d)


def _mirror(op):
    return op[::-1].translate(str.maketrans("()", ")("))


def test_broken_algebra_stays_broken_after_flattening():
    operad = FreeBinaryOperad(3)

    def comp(d):
        out = operad_comp(operad, d)
        return _mirror(out) if len(d.labels) == 2 else out

    A = OpetopicAlgebra(1, 2, from_operad(operad).carrier, comp)
    A3, _ = dagger_algebra(A)
    assert check_laws(A, 4) is not None
    assert check_laws(A3, 4) is not None


def test_category_flattens_to_lawful_algebra():
    A3, _ = dagger_algebra(from_category(poset_category(3)))
    assert check_laws(A3, 4) is None


def test_colours_restrict_and_extend():
    A = from_operad(TerminalOperad(3))
    X = Extended(A.carrier, "terminal", 0)
    A22 = OpetopicAlgebra(2, 2, X, A.comp)
    B = restrict_colours(A22)
    assert (B.k, B.n) == (1, 2)
    again = extend_colours(X, B)
    for d in FreePasting(X, 4).diagrams():
        assert again.comp(d) == A22.comp(d)
    with pytest.raises(DaggerError):
        extend_colours(X, from_category(poset_category(2)))


@settings(max_examples=25)
@given(st.sampled_from([w for w in BY_DIM[4] if not w.is_degenerate]))
def test_node_and_leaf_counts_survive(w):
    f = flatten_opetope(w, 4)
    assert len(f.nodes) == len(w.nodes)
    assert len(f.leaves) == len(w.leaves)
