"""Flattening (n-1, n)-data to (2, 3)-data.

An n-opetope is sent to the 3-opetope with the same underlying tree: a node
decorated by an (n-1)-opetope with m sources becomes a node decorated by the
opetopic integer m, and the i-th input (in lex order) becomes input [*^i].
Presheaves, spine maps and algebra structures follow along; the round trips
here are what shows an algebra on the window n-1..n is the same thing as a
Z^3-algebra on its flattening.
"""

from __future__ import annotations

from .address import Address, star
from .algebra import (
    CapacityError, FreePasting, OpetopicAlgebra, PastingDiagram, params,
)
from .ocat import spine
from .opetope import (
    AR, PT, Opetope, OpetopeError, corolla, degenerate, node_addresses, op_int,
    source, target,
)
from .opset import homs, truncate
from .presheaf import Presheaf, PresheafError, PresheafMap, S, T, face_shape


class DaggerError(ValueError):
    pass


def _relabel(omega: Opetope, decorate, entry) -> Opetope:
    """Rebuild a tree with new decorations and new input names.

    decorate(d) gives the new decoration of a node decorated by d;
    entry(d, q) renames the input q of a node decorated by d.
    """
    rows = []
    for a, d in omega.table:
        key, prefix = [], []
        for q in a.key:
            dec = omega._map[Address(a.dim, tuple(prefix))]
            key.append(entry(dec, Address(a.dim - 1, q)).key)
            prefix.append(q)
        rows.append((tuple(key), decorate(d)))
    dim = rows[0][1].dim + 1
    table = [(Address(dim - 1, k), d) for k, d in rows]
    table.sort(key=lambda kv: kv[0].key)
    return Opetope(dim, "tree", table=tuple(table))


def _input_index(dec: Opetope, q: Address) -> Address:
    return star(node_addresses(dec).index(q))


def flatten_opetope(omega: Opetope, n: int) -> Opetope:
    """omega of dim n-1 or n, flattened into dims 2..3."""
    if omega.dim == n - 1:
        return op_int(len(node_addresses(omega)) if omega.dim > 0 else 0)
    if omega.dim != n:
        raise DaggerError(f"{omega} is not of dimension {n - 1} or {n}")
    if n == 1:
        return corolla(op_int(0))
    if omega.is_degenerate:
        return degenerate(AR)
    return _relabel(omega, lambda d: flatten_opetope(d, n), _input_index)


def a_omega(omega: Opetope, n: int | None = None) -> dict:
    """The increasing bijection from nodes of omega to nodes of its flattening."""
    n = omega.dim if n is None else n
    if omega.dim == 1:
        return {Address.atom(): Address.empty(2)}
    out = {}
    for a in node_addresses(omega):
        key, prefix = [], []
        for q in a.key:
            dec = omega._map[Address(a.dim, tuple(prefix))]
            key.append(_input_index(dec, Address(a.dim - 1, q)).key)
            prefix.append(q)
        out[a] = Address(2, tuple(key))
    return out


def flatten_face(omega: Opetope, g, n: int):
    """The generator into the flattening matching g into omega."""
    if g.addr is None:
        return T
    if omega.dim == n:
        return S(a_omega(omega, n)[g.addr])
    raise DaggerError("faces below the window")


def spine_flatten(nu: Opetope, n: int) -> Opetope:
    """The 4-opetope whose spine is the flattened spine of nu (dim n+1)."""
    if nu.dim != n + 1:
        raise DaggerError(f"{nu} is not of dimension {n + 1}")
    if nu.is_degenerate:
        return degenerate(flatten_opetope(nu.of, n))
    if n == 1:
        # nu is an opetopic integer; every node is an arrow with one input
        return _relabel(nu, lambda d: flatten_opetope(d, 1),
                        lambda d, q: Address.empty(2))
    return _relabel(nu, lambda d: flatten_opetope(d, n),
                    lambda d, q: a_omega(d, n)[q])


# -- presheaves


def _tag(shape: Opetope, x) -> str:
    return f"{shape}:{x}"


def untag(cell: str) -> str:
    return cell.split(":", 1)[1] if ":" in cell else cell


class Flattened:
    """X_dagger, with the bookkeeping needed to go back."""

    def __init__(self, X, n: int):
        if X.window != (n - 1, n):
            raise DaggerError(f"need a presheaf on the window ({n - 1}, {n})")
        self.X, self.n = X, n
        cells, faces, origin = {}, {}, {}
        for shape in X.shapes():
            flat = flatten_opetope(shape, n)
            for x in X.cells(shape):
                c = _tag(shape, x)
                cells.setdefault(flat, []).append(c)
                origin[(flat, c)] = (shape, x)
                if shape.dim == n:
                    acts = {T: _tag(target(shape), X.act(shape, x, T))}
                    for p in node_addresses(shape):
                        acts[flatten_face(shape, S(p), n)] = _tag(source(shape, p), X.act(shape, x, S(p)))
                    faces[(flat, c)] = acts
        self.presheaf = Presheaf((2, 3), cells, faces)
        self.origin = origin


def flatten_presheaf(X, n: int | None = None) -> Presheaf:
    n = X.window[1] if n is None else n
    return Flattened(X, n).presheaf


def flatten_map(f: PresheafMap, n: int) -> PresheafMap:
    """A map X -> Y of presheaves on the window, flattened."""
    dom, cod = flatten_presheaf(f.dom, n), flatten_presheaf(f.cod, n)
    out = {}
    for (s, x), y in f.mapping.items():
        if s.dim in (n - 1, n):
            out[(flatten_opetope(s, n), _tag(s, x))] = _tag(s, y)
    return PresheafMap(dom, cod, out)


# -- spine maps


def flatten_spine_map(nu: Opetope, labels: dict, n: int) -> tuple[Opetope, dict]:
    """labels: spine generator (node p, or the (n-1)-cell of a degenerate nu)
    -> cell of X; returns the 4-opetope and the flattened labels."""
    flat = spine_flatten(nu, n)
    if nu.is_degenerate:
        return flat, {None: _tag(nu.of, labels[None])}
    a = _node_map(nu, n)
    return flat, {a[p]: _tag(source(nu, p), x) for p, x in labels.items()}


def _node_map(nu: Opetope, n: int) -> dict:
    """Nodes of nu to nodes of its spine flattening (same tree, new names)."""
    if n == 1:
        return {p: Address(3, tuple(() for _ in p.key)) for p in nu.nodes}
    out = {}
    for p in nu.nodes:
        key, prefix = [], []
        for q in p.key:
            dec = nu._map[Address(p.dim, tuple(prefix))]
            key.append(a_omega(dec, n)[Address(p.dim - 1, q)].key)
            prefix.append(q)
        out[p] = Address(3, tuple(key))
    return out


def lift_spine_map(nu: Opetope, labels: dict, flat: Flattened):
    """Inverse of flatten_spine_map: nu is a 4-opetope, labels map its nodes
    (or None for a degenerate nu) to cells of X_dagger. Returns (nu', labels')
    with nu' of dim n+1 and labels' keyed by its nodes."""
    n = flat.n
    if nu.is_degenerate:
        shape, x = flat.origin[(nu.of, labels[None])]
        return degenerate(shape), {None: x}
    shapes = {}
    for p in nu.nodes:
        shapes[p] = flat.origin[(source(nu, p), labels[p])]
    if n == 1:
        # every label is an arrow; the tree is an opetopic integer
        m = len(nu.nodes)
        order = sorted(nu.nodes, key=lambda p: len(p.key))
        return op_int(m), {star(i): shapes[p][1] for i, p in enumerate(order)}
    rename = {Address(3, ()): Address(n, ())}
    table = []
    for p in sorted(nu.nodes, key=lambda p: len(p.key)):
        new = rename[p]
        shape = shapes[p][0]
        table.append((new, shape))
        a = a_omega(shape, n)
        back = {v: k for k, v in a.items()}
        for q in node_addresses(source(nu, p)):
            rename[p.extend(q)] = new.extend(back[q])
    table.sort(key=lambda kv: kv[0].key)
    nu2 = Opetope(n + 1, "tree", table=tuple(table))
    out = {rename[p]: shapes[p][1] for p in nu.nodes}
    return nu2, out


def spine_labels(d: PastingDiagram) -> dict:
    if d.nu.is_degenerate:
        return {None: d.labels[0]}
    return dict(zip(d.nu.nodes, d.labels))


def _diagram(nu: Opetope, labels: dict) -> PastingDiagram:
    if nu.is_degenerate:
        return PastingDiagram(nu, (labels[None],))
    return PastingDiagram(nu, tuple(labels[p] for p in nu.nodes))


def flatten_diagram(d: PastingDiagram, n: int) -> PastingDiagram:
    nu, lab = flatten_spine_map(d.nu, spine_labels(d), n)
    return _diagram(nu, lab)


def lift_diagram(d: PastingDiagram, flat: Flattened) -> PastingDiagram:
    nu, lab = lift_spine_map(d.nu, spine_labels(d), flat)
    return _diagram(nu, lab)


# -- algebras


def dagger_algebra(A: OpetopicAlgebra) -> tuple[OpetopicAlgebra, Flattened]:
    """The Z^3-algebra on the flattened carrier of a (1, n)-algebra."""
    if A.k != 1:
        raise DaggerError("restrict the colours first")
    n = A.n
    flat = Flattened(A.carrier, n)

    def comp(d: PastingDiagram):
        lifted = lift_diagram(d, flat)
        return _tag(lifted.shape, A.comp(lifted))

    return OpetopicAlgebra(1, 3, flat.presheaf, comp), flat


def transport_algebra(X, comp3, n: int) -> OpetopicAlgebra:
    """A (1, n)-algebra on X from a composition on its flattening."""

    def comp(d: PastingDiagram):
        return untag(comp3(flatten_diagram(d, n)))

    return OpetopicAlgebra(1, n, X, comp)


def restrict_colours(A: OpetopicAlgebra) -> OpetopicAlgebra:
    """Forget the colours below dimension n-1."""
    n = A.n
    X = truncate(A.carrier, n - 1, n)
    return OpetopicAlgebra(1, n, X, A.comp)


def extend_colours(X, B: OpetopicAlgebra) -> OpetopicAlgebra:
    """The (k, n)-algebra on X whose composition is that of B."""
    k, n = params(X)
    if (B.k, B.n) != (1, n):
        raise DaggerError("B must be a (1, n)-algebra")
    for d in (n - 1, n):
        mine = {s: set(X.cells(s)) for s in X.shapes(d)}
        theirs = {s: set(B.carrier.cells(s)) for s in B.carrier.shapes(d)}
        if {s: c for s, c in mine.items() if c} != {s: c for s, c in theirs.items() if c}:
            raise DaggerError(f"carriers differ in dimension {d}")
    return OpetopicAlgebra(k, n, X, B.comp)


__all__ = [
    "DaggerError", "flatten_opetope", "a_omega", "flatten_face", "spine_flatten",
    "flatten_presheaf", "flatten_map", "Flattened", "flatten_spine_map",
    "lift_spine_map", "flatten_diagram", "lift_diagram", "dagger_algebra",
    "transport_algebra", "restrict_colours", "extend_colours", "untag",
    "CapacityError", "FreePasting",
]
