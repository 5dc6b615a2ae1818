import pytest
from hypothesis import given, strategies as st

from opk.address import (
    Address, AddressError, concat, lex_compare, parse_address, star,
)


def addresses(dim, width=3):
    if dim == 0:
        return st.just(Address.atom())
    return st.lists(addresses(dim - 1, width), max_size=width).map(
        lambda es: Address.of(dim, es))


def test_printing():
    assert str(Address.atom()) == "*"
    assert str(Address.empty(1)) == "[]"
    assert str(star(3)) == "[***]"
    assert str(Address.of(2, [star(0), star(2)])) == "[[][**]]"


def test_parse_checks_dimension():
    assert parse_address("[[*][]]", 2) == Address(2, (((),), ()))
    with pytest.raises(AddressError):
        parse_address("[*]", 2)
    with pytest.raises(AddressError):
        parse_address("[*", 1)
    with pytest.raises(AddressError, match="position"):
        parse_address("[*] x", 1)


def test_zero_dimension_is_only_the_atom():
    with pytest.raises(AddressError):
        Address(0, ((),))
    with pytest.raises(AddressError):
        Address.empty(0)


def test_concat_needs_equal_dimension():
    with pytest.raises(AddressError):
        concat(star(1), Address.empty(2))
    with pytest.raises(AddressError):
        concat(Address.atom(), Address.atom())


@given(st.integers(1, 3).flatmap(addresses))
def test_print_parse_round_trip(a):
    assert parse_address(str(a), a.dim) == a


@given(st.integers(1, 3).flatmap(lambda d: st.tuples(addresses(d), addresses(d), addresses(d))))
def test_concat_is_associative_with_unit(abc):
    a, b, c = abc
    e = Address.empty(a.dim)
    assert (a + b) + c == a + (b + c)
    assert a + e == a == e + a


@given(st.integers(1, 3).flatmap(lambda d: st.tuples(addresses(d), addresses(d))))
def test_prefix_comes_first(ab):
    a, b = ab
    assert lex_compare(a, a + b) <= 0
    assert lex_compare(a, b) == -lex_compare(b, a)
    assert (lex_compare(a, b) == 0) == (a == b)


@given(st.integers(1, 3).flatmap(lambda d: st.tuples(addresses(d), addresses(d))))
def test_drop_undoes_concat(ab):
    a, b = ab
    assert (a + b).startswith(a)
    assert (a + b).drop(a) == b
