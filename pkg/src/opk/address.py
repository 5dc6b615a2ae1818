"""Higher addresses.

An address of dimension 0 is the atom ``*``. An address of dimension n >= 1
is a finite list of addresses of dimension n-1. Internally an address is a
nested tuple ``key`` (the atom is the empty tuple) together with its
dimension, so comparison and hashing are plain tuple operations.
"""

from __future__ import annotations


class AddressError(ValueError):
    pass


class Address:
    __slots__ = ("dim", "key", "_hash")

    def __init__(self, dim: int, key: tuple = ()):
        if dim < 0:
            raise AddressError("negative dimension")
        if dim == 0 and key != ():
            raise AddressError("a 0-address is the atom *")
        self.dim = dim
        self.key = key
        self._hash = hash((dim, key))

    @classmethod
    def atom(cls) -> Address:
        return cls(0, ())

    @classmethod
    def empty(cls, dim: int) -> Address:
        if dim < 1:
            raise AddressError("the empty address needs dim >= 1")
        return cls(dim, ())

    @classmethod
    def of(cls, dim: int, entries) -> Address:
        """Build an address of dimension ``dim`` from sub-addresses."""
        entries = list(entries)
        for e in entries:
            if not isinstance(e, Address) or e.dim != dim - 1:
                raise AddressError(f"entry {e!r} is not a {dim - 1}-address")
        return cls(dim, tuple(e.key for e in entries))

    @property
    def items(self) -> tuple[Address, ...]:
        if self.dim == 0:
            return ()
        return tuple(Address(self.dim - 1, k) for k in self.key)

    def __len__(self) -> int:
        return len(self.key)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Address)
            and self.dim == other.dim
            and self.key == other.key
        )

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: Address) -> bool:
        _same_dim(self, other)
        return self.key < other.key

    def __le__(self, other: Address) -> bool:
        _same_dim(self, other)
        return self.key <= other.key

    def __gt__(self, other: Address) -> bool:
        return other < self

    def __ge__(self, other: Address) -> bool:
        return other <= self

    def __add__(self, other: Address) -> Address:
        return concat(self, other)

    def extend(self, entry: Address) -> Address:
        """Append one (dim-1)-entry: ``[p]`` becomes ``[p entry]``."""
        if entry.dim != self.dim - 1:
            raise AddressError("entry has the wrong dimension")
        return Address(self.dim, self.key + (entry.key,))

    def startswith(self, prefix: Address) -> bool:
        n = len(prefix.key)
        return self.dim == prefix.dim and self.key[:n] == prefix.key

    def drop(self, prefix: Address) -> Address:
        """The remainder after removing ``prefix``."""
        if not self.startswith(prefix):
            raise AddressError(f"{prefix} is not a prefix of {self}")
        return Address(self.dim, self.key[len(prefix.key):])

    def __str__(self) -> str:
        return _show(self.dim, self.key)

    def __repr__(self) -> str:
        return f"Address({self.dim}, {self})"


def _show(dim: int, key: tuple) -> str:
    if dim == 0:
        return "*"
    return "[" + "".join(_show(dim - 1, k) for k in key) + "]"


def _same_dim(a: Address, b: Address) -> None:
    if a.dim != b.dim:
        raise AddressError(f"dimension mismatch: {a.dim} vs {b.dim}")


def concat(a: Address, b: Address) -> Address:
    _same_dim(a, b)
    if a.dim == 0:
        raise AddressError("cannot concatenate 0-addresses")
    return Address(a.dim, a.key + b.key)


def lex_compare(a: Address, b: Address) -> int:
    """-1, 0 or 1. Prefix-first, entry-wise recursive order."""
    _same_dim(a, b)
    return (a.key > b.key) - (a.key < b.key)


def print_address(a: Address) -> str:
    return str(a)


# Raw parsing: addresses inside opetope literals do not carry their
# dimension, so the parser first builds an untyped tree and the caller
# fixes the dimension afterwards.

ATOM = "*"


def parse_raw(text: str, pos: int = 0) -> tuple[object, int]:
    """Parse one address starting at ``pos``; return (raw, next position).

    ``raw`` is ``ATOM`` or a tuple of raws.
    """
    pos = _skip(text, pos)
    if pos >= len(text):
        raise AddressError(f"expected address at position {pos}")
    c = text[pos]
    if c == "*":
        return ATOM, pos + 1
    if c != "[":
        raise AddressError(f"unexpected {c!r} at position {pos}")
    pos += 1
    entries = []
    while True:
        pos = _skip(text, pos)
        if pos >= len(text):
            raise AddressError(f"unclosed bracket at position {pos}")
        if text[pos] == "]":
            return tuple(entries), pos + 1
        raw, pos = parse_raw(text, pos)
        entries.append(raw)


def _skip(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def from_raw(raw, dim: int) -> Address:
    return Address(dim, _raw_key(raw, dim))


def _raw_key(raw, dim: int) -> tuple:
    if dim == 0:
        if raw is not ATOM:
            raise AddressError("nesting depth inconsistent with dimension")
        return ()
    if raw is ATOM:
        raise AddressError("nesting depth inconsistent with dimension")
    return tuple(_raw_key(r, dim - 1) for r in raw)


def parse_address(text: str, dim: int) -> Address:
    raw, pos = parse_raw(text)
    pos = _skip(text, pos)
    if pos != len(text):
        raise AddressError(f"trailing input at position {pos}")
    return from_raw(raw, dim)


def star(n: int) -> Address:
    """The 1-address ``[*...*]`` with n stars."""
    return Address(1, ((),) * n)
