"""Opetopes as address tables.

An n-opetope (n >= 2) is either degenerate (no nodes, one leaf ``[]``) or a
table mapping node addresses (dimension n-1) to (n-1)-opetopes. Values are
hash-consed, so structural equality is identity and per-value caches
(target, readdressing, validity, size) are computed once.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

from .address import Address, AddressError, from_raw, parse_raw, star


class OpetopeError(ValueError):
    pass


_interned: "weakref.WeakValueDictionary[tuple, Opetope]" = weakref.WeakValueDictionary()


class Opetope:
    __slots__ = (
        "dim", "kind", "of", "table", "_map", "_key",
        "_target", "_readdress", "_valid", "_size", "_text", "_leaves",
        "__weakref__",
    )

    def __new__(cls, dim, kind, of=None, table=()):
        key = (kind, dim, of, table)
        found = _interned.get(key)
        if found is not None:
            return found
        self = object.__new__(cls)
        self.dim = dim
        self.kind = kind
        self.of = of
        self.table = table
        self._map = dict(table)
        self._key = key
        self._target = None
        self._readdress = None
        self._valid = None
        self._size = None
        self._text = None
        self._leaves = None
        _interned[key] = self
        return self

    def __reduce__(self):
        return (parse_opetope, (str(self),))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    # -- structure

    @property
    def is_degenerate(self) -> bool:
        return self.kind == "degen"

    @property
    def nodes(self) -> tuple[Address, ...]:
        return node_addresses(self)

    @property
    def leaves(self) -> tuple[Address, ...]:
        return leaf_addresses(self)

    def __getitem__(self, p: Address) -> Opetope:
        return source(self, p)

    def __len__(self) -> int:
        return len(self.nodes)

    def __str__(self) -> str:
        if self._text is None:
            if self.kind == "pt":
                self._text = "pt"
            elif self.kind == "ar":
                self._text = "ar"
            elif self.kind == "degen":
                self._text = f"degen({self.of})"
            else:
                self._text = "{" + ", ".join(f"{a} <- {d}" for a, d in self.table) + "}"
        return self._text

    def __repr__(self) -> str:
        return f"Opetope({self})"

    def __lt__(self, other: Opetope) -> bool:
        return sort_key(self) < sort_key(other)


PT = Opetope(0, "pt")
AR = Opetope(1, "ar")
point = PT
arrow = AR


def degenerate(phi: Opetope) -> Opetope:
    return Opetope(phi.dim + 2, "degen", of=phi)


def corolla(psi: Opetope) -> Opetope:
    """The one-node tree on psi. The corolla on the point is the arrow."""
    if psi.dim == 0:
        return AR
    return Opetope(psi.dim + 1, "tree", table=((Address.empty(psi.dim), psi),))


def op_int(m: int) -> Opetope:
    """The opetopic integer m: a linear 2-opetope with m nodes."""
    if m < 0:
        raise OpetopeError("negative opetopic integer")
    if m == 0:
        return degenerate(PT)
    return Opetope(2, "tree", table=tuple((star(i), AR) for i in range(m)))


def from_table(entries, check: bool = True) -> Opetope:
    """Build a tree opetope from (address, decoration) pairs.

    With ``check`` the result must satisfy tree closure and inner coherence;
    ``check=False`` is for deliberately corrupted tables.
    """
    pairs = list(entries.items()) if isinstance(entries, dict) else list(entries)
    if not pairs:
        raise OpetopeError("a node table must be nonempty; use degenerate()")
    d = pairs[0][1].dim
    for a, dec in pairs:
        if not isinstance(dec, Opetope) or dec.dim != d:
            raise OpetopeError("decorations must share one dimension")
        if a.dim != d:
            raise OpetopeError(f"address {a} has dim {a.dim}, expected {d}")
    if d == 0:
        raise OpetopeError("1-opetopes have no node table; use arrow")
    pairs.sort(key=lambda kv: kv[0].key)
    for (a, _), (b, _) in zip(pairs, pairs[1:]):
        if a == b:
            raise OpetopeError(f"duplicate node address {a}")
    if pairs[0][0].key != ():
        raise OpetopeError("the root address [] is mandatory")
    omega = Opetope(d + 1, "tree", table=tuple(pairs))
    if check:
        v = _structural_violation(omega)
        if v is not None:
            raise OpetopeError(str(v))
    return omega


# -- addresses of nodes, leaves and edges


def node_addresses(omega: Opetope) -> tuple[Address, ...]:
    if omega.dim == 0:
        raise OpetopeError("the point has no nodes")
    if omega.kind == "ar":
        return (Address.atom(),)
    return tuple(a for a, _ in omega.table)


def leaf_addresses(omega: Opetope) -> tuple[Address, ...]:
    if omega.dim == 0:
        raise OpetopeError("the point has no leaves")
    if omega._leaves is None:
        if omega.kind == "ar":
            out = ()
        elif omega.kind == "degen":
            out = (Address.empty(omega.dim - 1),)
        else:
            found = []
            for p, dec in omega.table:
                for q in node_addresses(dec):
                    e = p.extend(q)
                    if e not in omega._map:
                        found.append(e)
            out = tuple(sorted(found, key=lambda a: a.key))
        omega._leaves = out
    return omega._leaves


def source(omega: Opetope, p: Address) -> Opetope:
    if omega.kind == "ar":
        if p.dim != 0:
            raise OpetopeError(f"{p} is not a node of ar")
        return PT
    dec = omega._map.get(p)
    if dec is None:
        raise OpetopeError(f"{p} is not a node address of {omega}")
    return dec


def edg(omega: Opetope, e: Address) -> Opetope:
    """Decoration of the edge at address e (dim >= 2)."""
    if omega.dim < 2:
        raise OpetopeError("edges exist from dimension 2")
    if e.dim != omega.dim - 1:
        raise OpetopeError(f"edge address {e} has the wrong dimension")
    if omega.kind == "degen":
        if e.key != ():
            raise OpetopeError("a degenerate opetope only has the edge []")
        return omega.of
    if e.key == ():
        return target(source(omega, e))
    p = Address(e.dim, e.key[:-1])
    q = Address(e.dim - 1, e.key[-1])
    if p not in omega._map:
        raise OpetopeError(f"malformed edge address {e}")
    dec = omega._map[p]
    if q not in node_addresses(dec):
        raise OpetopeError(f"malformed edge address {e}")
    return source(dec, q)


def root_edge(omega: Opetope) -> Opetope:
    return edg(omega, Address.empty(omega.dim - 1))


def subtree(omega: Opetope, p: Address) -> Opetope:
    """The part of omega above node p, re-rooted at []."""
    n = len(p.key)
    return Opetope(omega.dim, "tree", table=tuple(
        (Address(a.dim, a.key[n:]), d) for a, d in omega.table if a.key[:n] == p.key
    ))


def size(omega: Opetope) -> int:
    """Nodes counted hereditarily through decorations.

    This is the measure ``enumerate`` bounds: for dimension <= 2 it is the
    node count, above it also bounds every decoration so the set is finite.
    """
    if omega._size is None:
        if omega.kind in ("pt", "ar"):
            s = 0
        elif omega.kind == "degen":
            s = size(omega.of)
        else:
            s = len(omega.table) + sum(size(d) for _, d in omega.table)
        omega._size = s
    return omega._size


# -- grafting and substitution


def graft(s: Opetope, l: Address, t: Opetope) -> Opetope:
    """Attach the root of t to the leaf l of s."""
    if s.dim != t.dim or s.dim < 2:
        raise OpetopeError("grafting needs two opetopes of equal dim >= 2")
    if l not in leaf_addresses(s):
        raise OpetopeError(f"{l} is not a leaf of {s}")
    if edg(s, l) is not root_edge(t):
        raise OpetopeError(
            f"decoration mismatch at {l}: {edg(s, l)} vs root edge {root_edge(t)}")
    if t.kind == "degen":
        return s
    if s.kind == "degen":
        return t
    table = list(s.table) + [(Address(l.dim, l.key + a.key), d) for a, d in t.table]
    table.sort(key=lambda kv: kv[0].key)
    return Opetope(s.dim, "tree", table=tuple(table))


def total_graft(t: Opetope, assignments: dict) -> Opetope:
    """Graft every assigned tree at its leaf of t."""
    leaves = set(leaf_addresses(t))
    for l in assignments:
        if l not in leaves:
            raise OpetopeError(f"{l} is not a leaf of {t}")
    out = t
    # grafting at a leaf of t never moves the other leaves of t
    for l in sorted(assignments, key=lambda a: a.key):
        out = graft(out, l, assignments[l])
    return out


def _substitute(t: Opetope, p: Address, u: Opetope, rewire: dict):
    """Replace node p of t by u. Return (result, node address map).

    rewire maps leaves of u to node addresses of source(t, p). The map sends
    every node address of t other than p to its address in the result.
    """
    inv = {q: lam for lam, q in rewire.items()}
    n = len(p.key)
    dim = p.dim

    def move(x: Address) -> Address:
        if x.key[:n] != p.key or len(x.key) == n:
            return x
        lam = inv[Address(dim - 1, x.key[n])]
        return Address(dim, p.key + lam.key + x.key[n + 1:])

    table = [(move(x), d) for x, d in t.table if x != p]
    if u.kind != "degen":
        table += [(Address(dim, p.key + a.key), d) for a, d in u.table]
    if not table:
        return u, move
    table.sort(key=lambda kv: kv[0].key)
    return Opetope(t.dim, "tree", table=tuple(table)), move


def substitute(t: Opetope, p: Address, u: Opetope, rewire: dict | None = None) -> Opetope:
    """Substitute u for the node p of t.

    ``rewire`` defaults to the readdressing of u, which is the right choice
    whenever target(u) = source(t, p).
    """
    return substitute_with_map(t, p, u, rewire)[0]


def substitute_with_map(t: Opetope, p: Address, u: Opetope, rewire: dict | None = None):
    if t.kind != "tree":
        raise OpetopeError("substitution needs a node")
    if p not in t._map:
        raise OpetopeError(f"{p} is not a node of {t}")
    if u.dim != t.dim:
        raise OpetopeError("dimension mismatch")
    sp = t._map[p]
    if rewire is None:
        rewire = readdress(u)
    rewire = dict(rewire)
    if set(rewire) != set(leaf_addresses(u)):
        raise OpetopeError("rewire must be defined exactly on the leaves of u")
    if sorted(rewire.values(), key=lambda a: a.key) != list(node_addresses(sp)):
        raise OpetopeError("rewire is not a bijection onto the nodes of the source")
    if t.dim >= 3:
        for lam, q in rewire.items():
            if edg(u, lam) is not source(sp, q):
                raise OpetopeError(f"rewire mismatch at leaf {lam}")
        if root_edge(u) is not target(sp):
            raise OpetopeError("root edge mismatch")
    return _substitute(t, p, u, rewire)


# -- target and readdressing


def target(omega: Opetope) -> Opetope:
    if omega.dim == 0:
        raise OpetopeError("the point has no target")
    if omega._target is None:
        _compute_target(omega)
    return omega._target


def readdress(omega: Opetope) -> dict:
    """Bijection from leaves of omega to node addresses of its target."""
    if omega.dim == 0:
        raise OpetopeError("the point has no target")
    if omega._readdress is None:
        _compute_target(omega)
    return dict(omega._readdress)


def _compute_target(omega: Opetope) -> None:
    if omega.dim == 1:
        omega._target, omega._readdress = PT, {}
    elif omega.dim == 2:
        omega._target = AR
        omega._readdress = {leaf_addresses(omega)[0]: Address.atom()}
    elif omega.kind == "degen":
        omega._target = corolla(omega.of)
        omega._readdress = {Address.empty(omega.dim - 1): Address.empty(omega.dim - 2)}
    else:
        omega._target, omega._readdress = target_along(omega, omega.nodes)


def target_along(omega: Opetope, order) -> tuple[Opetope, dict]:
    """Target and readdressing by contracting corollas in the given order.

    ``order`` lists the node addresses of omega so that every node comes
    after its parent; omega is rebuilt as an iterated grafting of corollas
    and each step substitutes the new decoration into the running target.
    """
    order = list(order)
    if omega.kind != "tree" or omega.dim < 3:
        raise OpetopeError("contraction needs a non-degenerate opetope of dim >= 3")
    if sorted(order, key=lambda a: a.key) != list(omega.nodes) or order[0].key != ():
        raise OpetopeError("order must list every node, root first")
    root = omega._map[order[0]]
    T = root
    pw = {order[0].extend(q): q for q in node_addresses(root)}
    present = {order[0]}
    for x in order[1:]:
        parent = Address(x.dim, x.key[:-1])
        if parent not in present:
            raise OpetopeError(f"node {x} comes before its parent")
        present.add(x)
        psi = omega._map[x]
        a = pw.pop(x)
        T, move = _substitute(T, a, psi, readdress(psi))
        for lam in pw:
            pw[lam] = move(pw[lam])
        for q in node_addresses(psi):
            pw[x.extend(q)] = Address(a.dim, a.key + q.key)
    return T, pw


def grafting_orders(omega: Opetope):
    """All orders of the nodes in which each node follows its parent."""
    nodes = list(omega.nodes)
    children: dict = {x: [] for x in nodes}
    for x in nodes[1:]:
        children[Address(x.dim, x.key[:-1])].append(x)

    def walk(avail, done):
        if not avail:
            yield list(done)
            return
        for i, x in enumerate(avail):
            rest = avail[:i] + avail[i + 1:] + children[x]
            done.append(x)
            yield from walk(rest, done)
            done.pop()

    if nodes:
        yield from walk([nodes[0]], [])


def decompose(omega: Opetope) -> tuple[Opetope, list]:
    """Write omega as a corolla followed by corolla graftings.

    Returns (first corolla, [(leaf, corolla), ...]); grafting them in order
    gives omega back. Trivial and degenerate opetopes decompose to themselves.
    """
    if omega.kind != "tree":
        return omega, []
    first = corolla(omega.table[0][1])
    return first, [(a, corolla(d)) for a, d in omega.table[1:]]


def recompose(first: Opetope, steps) -> Opetope:
    out = first
    for l, c in steps:
        out = graft(out, l, c)
    return out


# -- validation


@dataclass(frozen=True)
class Violation:
    identity: str
    addresses: tuple
    detail: str

    def __str__(self) -> str:
        where = ", ".join(str(a) for a in self.addresses)
        return f"{self.identity} violated at {where or '-'}: {self.detail}"


def _structural_violation(omega: Opetope) -> Violation | None:
    """Tree closure and inner coherence of the top-level table."""
    for p, dec in omega.table:
        v = validate(dec)
        if v is not None:
            return Violation(v.identity, (p,) + v.addresses, f"in decoration: {v.detail}")
    for x, dec in omega.table:
        if x.key == ():
            continue
        p = Address(x.dim, x.key[:-1])
        q = Address(x.dim - 1, x.key[-1])
        parent = omega._map.get(p)
        if parent is None or q not in node_addresses(parent):
            return Violation("tree closure", (x,), "parent or input missing")
        if target(dec) is not source(parent, q):
            return Violation("Inner", (x,), f"t({dec}) != s_{q}({parent})")
    return None


def validate(omega: Opetope) -> Violation | None:
    """None when omega satisfies every opetopic identity, else the first failure."""
    if omega._valid is not None:
        return omega._valid or None
    v = _check(omega)
    omega._valid = v if v is not None else False
    return v


def _check(omega: Opetope) -> Violation | None:
    if omega.dim < 2:
        return None
    if omega.kind == "degen":
        v = validate(omega.of)
        if v is not None:
            return v
        t = target(omega)
        if omega.dim >= 3:
            root = Address.empty(omega.dim - 2)
            if source(t, root) is not target(t):
                return Violation("Degen", (), "s_[] t != t t")
        return None
    v = _structural_violation(omega)
    if v is not None:
        return v
    t = target(omega)
    w = readdress(omega)
    if sorted(w.values(), key=lambda a: a.key) != list(node_addresses(t)):
        return Violation("readdressing", (), "not a bijection onto the target's nodes")
    if omega.dim >= 3 and target(source(omega, omega.table[0][0])) is not target(t):
        return Violation("Glob1", (), "t s_[] != t t")
    for l in leaf_addresses(omega):
        if edg(omega, l) is not source(t, w[l]):
            return Violation("Glob2", (l,), "edge decoration differs from target source")
    return validate(t)


# -- enumeration


def enumerate_opetopes(dim: int, max_nodes: int) -> list[Opetope]:
    """All opetopes of dimension dim with size at most max_nodes.

    Size counts nodes hereditarily (see ``size``); ordered by node count,
    then by printed form.
    """
    if dim < 0:
        raise OpetopeError("negative dimension")
    return list(_enum(dim, max_nodes))


def _enum(dim: int, budget: int) -> tuple:
    key = (dim, budget)
    hit = _enum_cache.get(key)
    if hit is not None:
        return hit
    if dim == 0:
        out = [PT]
    elif dim == 1:
        out = [AR]
    elif dim == 2:
        out = [op_int(m) for m in range(budget + 1)]
    else:
        out = [degenerate(phi) for phi in _enum(dim - 2, budget)]
        gen = _TreeGen(dim, budget)
        for relkeys, _used in gen.trees(None, budget):
            out.append(Opetope(dim, "tree", table=tuple(sorted(
                ((Address(dim - 1, k), d) for k, d in relkeys), key=lambda kv: kv[0].key))))
    out = tuple(sorted(out, key=sort_key))
    _enum_cache[key] = out
    return out


_enum_cache: dict = {}


def sort_key(omega: Opetope):
    n = 0 if omega.kind in ("pt", "degen") else len(omega.nodes)
    return (n, str(omega))


class _TreeGen:
    """Trees of decorations with total size under a budget."""

    def __init__(self, dim: int, budget: int):
        self.decs = [d for d in _enum(dim - 1, max(budget - 1, 0))]
        self.by_target: dict = {}
        for d in self.decs:
            self.by_target.setdefault(target(d), []).append(d)
        self.memo: dict = {}

    def trees(self, colour, budget):
        key = (colour, budget)
        if key in self.memo:
            return self.memo[key]
        out = []
        cands = self.decs if colour is None else self.by_target.get(colour, [])
        for psi in cands:
            cost = 1 + size(psi)
            if cost > budget:
                continue
            inputs = node_addresses(psi)
            for rest, _used in self._fill(psi, inputs, 0, budget - cost):
                out.append([((), psi)] + rest)
        # store with the size used so callers can account for the budget
        out = [(t, sum(1 + size(d) for _, d in t)) for t in out]
        self.memo[key] = out
        return out

    def _fill(self, psi, inputs, i, budget):
        if i == len(inputs):
            yield [], 0
            return
        q = inputs[i]
        for rest, used in self._fill(psi, inputs, i + 1, budget):
            yield rest, used
        for sub, s_used in self.trees(source(psi, q), budget):
            for rest, used in self._fill(psi, inputs, i + 1, budget - s_used):
                yield [((q.key,) + k, d) for k, d in sub] + rest, used + s_used


# -- text form


def parse_opetope(text: str, check: bool = True) -> Opetope:
    """Parse the literal form; check=False skips the structural checks on
    node tables so that validate can report them."""
    p = _Parser(text, check)
    omega = p.opetope()
    p.ws()
    if p.pos != len(text):
        raise OpetopeError(f"trailing input at position {p.pos}")
    return omega


class _Parser:
    def __init__(self, text: str, check: bool = True):
        self.text = text
        self.pos = 0
        self.check = check

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eat(self, lit: str) -> bool:
        self.ws()
        if self.text.startswith(lit, self.pos):
            self.pos += len(lit)
            return True
        return False

    def expect(self, lit: str):
        if not self.eat(lit):
            raise OpetopeError(f"expected {lit!r} at position {self.pos}")

    def opetope(self) -> Opetope:
        self.ws()
        start = self.pos
        if self.eat("pt"):
            return PT
        if self.eat("ar"):
            return AR
        if self.eat("degen"):
            self.expect("(")
            inner = self.opetope()
            self.expect(")")
            return degenerate(inner)
        if self.eat("{"):
            pairs = []
            while True:
                self.ws()
                apos = self.pos
                try:
                    raw, self.pos = parse_raw(self.text, self.pos)
                except AddressError as e:
                    raise OpetopeError(str(e)) from None
                self.expect("<-")
                dec = self.opetope()
                try:
                    addr = from_raw(raw, dec.dim)
                except AddressError as e:
                    raise OpetopeError(f"{e} at position {apos}") from None
                pairs.append((addr, dec))
                if self.eat("}"):
                    break
                self.expect(",")
            try:
                return from_table(pairs, self.check)
            except OpetopeError as e:
                raise OpetopeError(f"{e} (literal at position {start})") from None
        raise OpetopeError(f"expected an opetope at position {self.pos}")


def print_opetope(omega: Opetope) -> str:
    return str(omega)


def height(omega: Opetope) -> int:
    if omega.kind != "tree":
        return 0
    return 1 + max(len(a.key) for a, _ in omega.table)


def to_int(omega: Opetope) -> int:
    """m for the opetopic integer m."""
    if omega.dim != 2:
        raise OpetopeError("not a 2-opetope")
    return 0 if omega.kind == "degen" else len(omega.table)


def children_order(omega: Opetope):
    """Node addresses in depth-first preorder, by explicit traversal."""
    if omega.kind != "tree":
        return []
    out = []

    def visit(p):
        out.append(p)
        for q in node_addresses(omega._map[p]):
            c = p.extend(q)
            if c in omega._map:
                visit(c)

    visit(omega.table[0][0])
    return out


__all__ = [
    "Opetope", "OpetopeError", "Violation", "PT", "AR", "point", "arrow",
    "degenerate", "corolla", "op_int", "from_table", "node_addresses",
    "leaf_addresses", "source", "edg", "root_edge", "subtree", "size", "graft",
    "total_graft", "substitute", "substitute_with_map", "target", "readdress",
    "target_along", "grafting_orders", "decompose", "recompose", "validate",
    "enumerate_opetopes", "parse_opetope", "print_opetope", "height", "to_int",
    "children_order", "sort_key",
]
