"""The category of opetopic shapes, the functor from opetopes into it, and
diagrams of its morphisms.

Objects (cardinals) are free algebras on a representable or a spine complex,
restricted to the window n-k..n. A morphism a -> b is a presheaf map from the
complex of a into Z(complex of b); composition is Kleisli composition through
the multiplication of Z. For k >= 1 the complexes are loop-free and Z of them
is finite, so hom-sets are enumerated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .address import Address
from .algebra import (
    CapacityError, FreePasting, PastingDiagram, corolla_diagram, degenerate_diagram,
    diagram_of, flatten, zmap,
)
from .ocat import hom as ohom, morphism, representable, spine
from .opetope import (
    Opetope, OpetopeError, corolla, degenerate, leaf_addresses, node_addresses,
    readdress, source, substitute, subtree, target,
)
from .opset import homs, truncate
from .presheaf import S, T, face_shape, generators


class ShapeError(ValueError):
    pass


class Cardinal:
    """Rep(psi) or Spine(nu), for given (k, n)."""

    _cache: dict = {}

    def __new__(cls, kind: str, shape: Opetope, k: int, n: int):
        key = (kind, shape, k, n)
        hit = cls._cache.get(key)
        if hit is not None:
            return hit
        if kind not in ("rep", "spine"):
            raise ShapeError(f"unknown cardinal kind {kind}")
        if kind == "rep" and not n - k <= shape.dim <= n:
            raise ShapeError(f"{shape} is outside the window {n - k}..{n}")
        if kind == "spine" and shape.dim != n + 1:
            raise ShapeError(f"spine cardinals need a {n + 1}-opetope")
        self = object.__new__(cls)
        self.kind, self.shape, self.k, self.n = kind, shape, k, n
        cx = representable(shape) if kind == "rep" else spine(shape)
        self.cx = cx
        self.complex = truncate(cx, n - k, n)
        self._z = None
        cls._cache[key] = self
        return self

    @property
    def z(self) -> FreePasting:
        if self._z is None:
            self._z = FreePasting(self.complex, None)
        return self._z

    def __repr__(self) -> str:
        name = "O" if self.kind == "rep" else "S"
        return f"Z{name}[{self.shape}]"


def doth_object(omega: Opetope, k: int, n: int) -> Cardinal:
    if omega.dim < n - k or omega.dim > n + 2:
        raise ShapeError(f"{omega} is outside the window {n - k}..{n + 2}")
    if omega.dim <= n:
        return Cardinal("rep", omega, k, n)
    if omega.dim == n + 1:
        return Cardinal("spine", omega, k, n)
    return Cardinal("spine", target(omega), k, n)


class LambdaMorphism:
    """body: (shape, cell of dom complex) -> cell of Z(cod complex)."""

    def __init__(self, dom: Cardinal, cod: Cardinal, body: dict):
        self.dom, self.cod, self.body = dom, cod, dict(body)

    @property
    def n(self) -> int:
        return self.dom.n

    def __eq__(self, other) -> bool:
        return (isinstance(other, LambdaMorphism) and self.dom is other.dom
                and self.cod is other.cod and self.body == other.body)

    def __hash__(self) -> int:
        return hash((id(self.dom), id(self.cod), frozenset(self.body.items())))

    def __repr__(self) -> str:
        return f"LambdaMorphism({self.dom} -> {self.cod})"

    def lines(self) -> list[str]:
        """One line per cell of the domain, top dimension first."""
        out = []
        for (s, c), v in sorted(self.body.items(), key=lambda kv: (-kv[0][0].dim, kv[0][1])):
            shown = str(diagram_of(v)) if s.dim == self.n else v
            out.append(f"{c} -> {shown}")
        return out

    def inverse(self) -> LambdaMorphism:
        """Inverse of a morphism sending cells to cells bijectively."""
        n = self.n
        back = {}
        for (s, c), v in self.body.items():
            if s.dim == n:
                d = diagram_of(v)
                if d.nu.is_degenerate or len(d.labels) != 1:
                    raise ShapeError("not invertible")
                v = d.labels[0]
                c = corolla_diagram(s, c).name
            key = (s, v)
            if key in back:
                raise ShapeError("not invertible")
            back[key] = c
        for s in self.cod.complex.shapes():
            for c in self.cod.complex.cells(s):
                if (s, c) not in back:
                    raise ShapeError("not invertible")
        return LambdaMorphism(self.cod, self.dom, back)


def lambda_identity(a: Cardinal) -> LambdaMorphism:
    body = {}
    for s in a.complex.shapes():
        for c in a.complex.cells(s):
            body[(s, c)] = corolla_diagram(s, c).name if s.dim == a.n else c
    return LambdaMorphism(a, a, body)


def lambda_compose(g: LambdaMorphism, f: LambdaMorphism) -> LambdaMorphism:
    """g after f."""
    if f.cod is not g.dom:
        raise ShapeError("endpoint mismatch")
    n = f.n
    body = {}
    for (s, a), v in f.body.items():
        if s.dim < n:
            body[(s, a)] = g.body[(s, v)]
        else:
            d = zmap(diagram_of(v), lambda sh, x: g.body[(sh, x)])
            body[(s, a)] = flatten(d, g.cod.complex).name
    return LambdaMorphism(f.dom, g.cod, body)


def lambda_hom(a: Cardinal, b: Cardinal) -> list[LambdaMorphism]:
    if (a.k, a.n) != (b.k, b.n):
        raise ShapeError("cardinals for different parameters")
    return [LambdaMorphism(a, b, m.mapping) for m in homs(a.complex, b.z)]


# -- the functor on morphisms


def _wrap(card: Cardinal, shape: Opetope, cell):
    return corolla_diagram(shape, cell).name if shape.dim == card.n else cell


def _generator(cod: Opetope, g, k: int, n: int) -> LambdaMorphism:
    dom = face_shape(cod, g)
    a, b = doth_object(dom, k, n), doth_object(cod, k, n)
    body = {}
    if cod.dim == n + 2:
        if g.addr is None:
            return lambda_identity(b)
        return _source_of_top(cod, g.addr, a, b)
    target_cx = b.cx
    for s in a.complex.shapes():
        for c in a.complex.cells(s):
            path = a.cx.path(c)
            if cod.dim == n + 1 and g.addr is None and path == ():
                body[(s, c)] = _spine_diagram(cod, target_cx, k).name
            else:
                body[(s, c)] = _wrap(b, s, target_cx.cell_of((g,) + path))
    return LambdaMorphism(a, b, body)


def _spine_diagram(omega: Opetope, sp, k: int) -> PastingDiagram:
    """The identity of S[omega], as a pasting diagram in S[omega]."""
    if omega.is_degenerate:
        return degenerate_diagram(omega.of, sp.cell_of((T, T)) if k >= 1 else None)
    return PastingDiagram(omega, tuple(sp.cell_of((S(p),)) for p in omega.nodes))


def _source_of_top(xi: Opetope, p: Address, a: Cardinal, b: Cardinal) -> LambdaMorphism:
    """The map on the source s_p of an (n+2)-opetope xi: the node q of s_p xi
    goes to the part of t xi contracted from the subtree of xi above p[q]."""
    n = a.n
    nu = source(xi, p)
    t_xi = target(xi)
    sp_t = b.cx
    w = readdress(xi)
    rep_xi = representable(xi)
    # lower cells: through the (injective) target embedding
    via_t = {}
    for s in sp_t.shapes():
        if s.dim >= n:
            continue
        for c in sp_t.cells(s):
            via_t.setdefault(rep_xi.cell_of((T,) + sp_t.path(c)), c)
    body = {}
    for s in a.complex.shapes():
        for c in a.complex.cells(s):
            path = a.cx.path(c)
            if s.dim < n:
                key = rep_xi.cell_of((S(p),) + path)
                if key not in via_t:
                    raise ShapeError(f"cell {key} of {xi} is not in its target")
                body[(s, c)] = via_t[key]
                continue
            q = path[0].addr
            at = p.extend(q)
            if at in xi._map:
                zeta = subtree(xi, at)
                t_zeta = target(zeta)
                if t_zeta.is_degenerate:
                    key = rep_xi.cell_of((S(p), S(q), T))
                    d = degenerate_diagram(t_zeta.of, via_t[key]) if a.k >= 1 else \
                        degenerate_diagram(t_zeta.of)
                else:
                    wz = readdress(zeta)
                    inv = {r: l for l, r in wz.items()}
                    labels = tuple(
                        sp_t.cell_of((S(w[Address(at.dim, at.key + inv[r].key)]),))
                        for r in t_zeta.nodes)
                    d = PastingDiagram(t_zeta, labels)
            else:
                d = corolla_diagram(s, sp_t.cell_of((S(w[at]),)))
            body[(s, c)] = d.name
    return LambdaMorphism(a, b, body)


def doth_morphism(f, k: int, n: int) -> LambdaMorphism:
    """The image of an opetope morphism (an OMorphism, or (cod, path))."""
    if isinstance(f, tuple):
        f = morphism(*f)
    out = lambda_identity(doth_object(f.cod, k, n))
    shape = f.cod
    for g in f.path:
        out = lambda_compose(out, _generator(shape, g, k, n))
        shape = face_shape(shape, g)
    return out


# -- diagrams


@dataclass(frozen=True)
class Diagram:
    """xi with a node p: a diagram of the map induced by s_p into xi."""

    xi: Opetope
    p: Address

    @property
    def dom(self) -> Opetope:
        return source(self.xi, self.p)

    @property
    def cod(self) -> Opetope:
        return target(self.xi)

    def morphism(self, k: int, n: int) -> LambdaMorphism:
        return doth_morphism(morphism(self.xi, (S(self.p),)), k, n)

    def __str__(self) -> str:
        return f"{self.xi} at {self.p}"


def diagram_of_composite(d1: Diagram, d2: Diagram) -> Diagram:
    """A diagram of (d2's map) after (d1's map)."""
    if d1.cod is not d2.dom:
        raise ShapeError("endpoint mismatch")
    return Diagram(substitute(d2.xi, d2.p, d1.xi), d2.p + d1.p)


def _tree(dim: int, entries) -> Opetope:
    return Opetope(dim, "tree", table=tuple(sorted(entries, key=lambda kv: kv[0].key)))


def contract(omega: Opetope, e: Address, inner: Opetope) -> Opetope:
    """beta with omega = beta substituted by inner at e, inner embedded at e."""
    d = omega.dim
    if inner.is_degenerate:
        # insert a unary node at the edge e
        table = []
        for a, dec in omega.table:
            if a.key[:len(e.key)] == e.key:
                a = Address(d - 1, e.key + ((),) + a.key[len(e.key):])
            table.append((a, dec))
        table.append((e, corolla(inner.of)))
        return _tree(d, table)
    inside = {Address(d - 1, e.key + r.key) for r in inner.nodes}
    w = readdress(inner)
    leaves = sorted(leaf_addresses(inner), key=lambda l: -len(l.key))
    table = [(e, target(inner))]
    for a, dec in omega.table:
        if a in inside:
            continue
        if a.key[:len(e.key)] == e.key:
            rest = a.key[len(e.key):]
            for l in leaves:
                if rest[:len(l.key)] == l.key:
                    a = Address(d - 1, e.key + (w[l].key,) + rest[len(l.key):])
                    break
            else:
                raise ShapeError("embedded tree does not cover the node")
        table.append((a, dec))
    return _tree(d, table)


def _edges(omega: Opetope, sp):
    """(address, cell) for every edge of omega in its spine."""
    if omega.is_degenerate:
        return [(Address.empty(omega.dim - 1), sp.cell_of((T, T)))]
    out = [(Address.empty(omega.dim - 1), sp.cell_of((S(omega.nodes[0]), T)))]
    for p in omega.nodes:
        for q in node_addresses(source(omega, p)):
            out.append((p.extend(q), sp.cell_of((S(p), S(q)))))
    return out


def diagrammatic_witness(f: LambdaMorphism) -> Diagram:
    """A diagram (xi, p) with Ddoth(s_p) = f, for f between spine cardinals on
    (n+1)-opetopes with non-degenerate domain."""
    k, n = f.dom.k, f.dom.n
    omega, omega2 = f.dom.shape, f.cod.shape
    if f.dom.kind != "spine" or f.cod.kind != "spine":
        raise ShapeError("witnesses exist for maps between (n+1)-opetopes")
    if omega.is_degenerate:
        raise ShapeError("degenerate domain: reduce along t t first")
    if k == 0:
        raise ShapeError("diagrams need k >= 1")
    sp_dom, sp_cod = f.dom.cx, f.cod.cx
    d1 = n + 2
    # step 1: blow each node of omega up into its image diagram
    entries = [(Address.empty(d1 - 1), omega)]
    images = {}
    for p in omega.nodes:
        d = diagram_of(f.body[(source(omega, p), sp_dom.cell_of((S(p),)))])
        images[p] = d
        if d.nu.is_degenerate or len(d.nu.nodes) != 1:
            entries.append((Address(d1 - 1, (p.key,)), d.nu))
    h = _tree(d1, entries)
    mid = target(h)
    # labels of the nodes of mid, as nodes of omega2
    w = readdress(h)
    pos = {}
    cell_to_node = {sp_cod.cell_of((S(a),)): a for a in omega2.nodes}
    for p, d in images.items():
        if d.nu.is_degenerate:
            continue
        if len(d.nu.nodes) == 1:
            pos[w[Address(d1 - 1, (p.key,))]] = cell_to_node[d.labels[0]]
        else:
            for r, x in zip(d.nu.nodes, d.labels):
                pos[w[Address(d1 - 1, (p.key, r.key))]] = cell_to_node[x]
    first = Diagram(h, Address.empty(d1 - 1))
    if mid is omega2 and all(pos[r] == r for r in mid.nodes):
        return _checked(first, f)
    # step 2: mid embeds in omega2 at e
    if mid.is_degenerate:
        cands = [e for e, _cell in _edges(omega2, sp_cod)]
    else:
        root = pos[mid.nodes[0]]
        for r in mid.nodes:
            if pos[r].key != root.key + r.key:
                raise ShapeError("the map is not a tree embedding")
        cands = [root]
    for e in cands:
        try:
            beta = contract(omega2, e, mid)
            if substitute(beta, e, mid) is not omega2:
                continue
            outer = _tree(d1, [(Address.empty(d1 - 1), beta),
                                (Address(d1 - 1, (e.key,)), mid)])
            d = diagram_of_composite(first, Diagram(outer, Address(d1 - 1, (e.key,))))
            if d.morphism(k, n) == f:
                return d
        except (OpetopeError, ShapeError, KeyError):
            continue
    raise ShapeError("no diagram found")


def _checked(d: Diagram, f: LambdaMorphism) -> Diagram:
    k, n = f.dom.k, f.dom.n
    if d.morphism(k, n) != f:
        raise ShapeError(f"diagram {d} does not reproduce the morphism")
    return d


# -- surjectivity


def _lift(omega: Opetope, k: int, n: int):
    """An (n+1)-opetope with an isomorphism Ddoth omega -> Ddoth of it."""
    if omega.dim == n - 1:
        big = degenerate(omega)
        return big, doth_morphism(morphism(big, (T, T)), k, n)
    if omega.dim == n:
        big = corolla(omega)
        return big, doth_morphism(morphism(big, (S(Address.empty(n)),)), k, n)
    if omega.dim == n + 2:
        small = target(omega)
        return small, lambda_identity(doth_object(small, k, n))
    return omega, lambda_identity(doth_object(omega, k, n))


def hits(f: LambdaMorphism, dom: Opetope, cod: Opetope, k: int, n: int):
    """How f arises from opetopes: an OMorphism, a Diagram, or None."""
    lo = n - 1
    if dom.dim < lo:
        for g in ohom(dom, cod):
            if doth_morphism(g, k, n) == f:
                return g
        return None
    if cod.dim < lo:
        return None
    ld, iso_d = _lift(dom, k, n)
    lc, iso_c = _lift(cod, k, n)
    f2 = lambda_compose(lambda_compose(iso_c, f), iso_d.inverse())
    if not ld.is_degenerate:
        try:
            return diagrammatic_witness(f2)
        except ShapeError:
            return None
    phi = ld.of
    f3 = lambda_compose(f2, doth_morphism(morphism(ld, (T, T)), k, n))
    for g in ohom(phi, lc):
        if doth_morphism(g, k, n) == f3:
            return g
    return None


def check_surjectivity(dom: Opetope, cod: Opetope, k: int, n: int):
    """None if every morphism Ddoth dom -> Ddoth cod arises from opetopes,
    else the first one that does not."""
    a, b = doth_object(dom, k, n), doth_object(cod, k, n)
    for f in lambda_hom(a, b):
        if hits(f, dom, cod, k, n) is None:
            return f
    return None


# -- simplices


def vertex_order(card: Cardinal) -> list:
    """For k = n = 1: the points of a cardinal in arrow order."""
    cx = card.complex
    from .opetope import AR, PT
    pts = list(cx.cells(PT))
    succ = {}
    for a in cx.cells(AR):
        s, t = cx.act(AR, a, S(Address.atom())), cx.act(AR, a, T)
        succ.setdefault(s, set()).add(t)
    indeg = {p: 0 for p in pts}
    for s, ts in succ.items():
        for t in ts:
            indeg[t] += 1
    order, ready = [], sorted(p for p in pts if indeg[p] == 0)
    while ready:
        p = ready.pop()
        order.append(p)
        for t in sorted(succ.get(p, ())):
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
    return order


def as_monotone_map(f: LambdaMorphism) -> tuple:
    from .opetope import PT
    src, dst = vertex_order(f.dom), vertex_order(f.cod)
    idx = {p: i for i, p in enumerate(dst)}
    return tuple(idx[f.body[(PT, p)]] for p in src)


__all__ = [
    "Cardinal", "LambdaMorphism", "ShapeError", "Diagram", "doth_object",
    "doth_morphism", "lambda_hom", "lambda_compose", "lambda_identity",
    "diagram_of_composite", "diagrammatic_witness", "contract",
    "check_surjectivity", "hits", "vertex_order", "as_monotone_map",
    "CapacityError",
]
