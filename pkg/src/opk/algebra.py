"""The free pasting-diagram monad Z on windowed presheaves, and its algebras.

For X a presheaf on the window of dimensions n-k..n, (ZX) agrees with X below
dimension n, and its n-cells of shape omega are pasting diagrams: an
(n+1)-opetope nu with target omega whose nodes are labelled by n-cells of X
glued along their faces. The unit sends a cell to its corolla diagram and the
multiplication contracts a diagram of diagrams to a single one.

Cells of ZX are named by a canonical string; ``diagram_of`` decodes it.
Every infinite construction is cut off by a weight bound: the weight of a
diagram is its node count plus the weights of its labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

from .address import Address
from .ocat import representable, spine
from .opetope import (
    AR, PT, Opetope, corolla, degenerate, node_addresses, op_int, readdress,
    source, target,
)
from .opset import homs
from .presheaf import (
    LazyPresheaf, Presheaf, PresheafBase, PresheafError, PresheafMap, S, T,
    face_shape, generators,
)


class CapacityError(RuntimeError):
    """A computation needed diagrams beyond the configured bound."""


@dataclass(frozen=True)
class PastingDiagram:
    """nu with one label per node (lex order); a degenerate nu carries the
    single (n-1)-cell its spine consists of, or nothing when that cell lies
    below the window."""

    nu: Opetope
    labels: tuple

    @property
    def shape(self) -> Opetope:
        return target(self.nu)

    @property
    def name(self) -> str:
        return _name(self)

    def label_at(self, p: Address):
        return self.labels[self.nu.nodes.index(p)]

    def __str__(self) -> str:
        if self.nu.is_degenerate:
            return f"{self.nu} : {list(self.labels)}"
        parts = [f"{p} <- {x}" for p, x in zip(self.nu.nodes, self.labels)]
        return "{" + ", ".join(parts) + "}"


_registry: dict = {}


def _name(d: PastingDiagram) -> str:
    s = json.dumps([str(d.nu), list(d.labels)], separators=(",", ":"))
    _registry.setdefault(s, d)
    return s


def diagram_of(name: str) -> PastingDiagram:
    d = _registry.get(name)
    if d is None:
        from .opetope import parse_opetope
        nu_text, labels = json.loads(name)
        d = PastingDiagram(parse_opetope(nu_text), tuple(labels))
        _registry[name] = d
    return d


def params(X: PresheafBase) -> tuple[int, int]:
    """(k, n) of the window of X."""
    lo, hi = X.window
    return hi - lo, hi


def diagram_face(d: PastingDiagram, g, X: PresheafBase):
    """The face g of the diagram d, a cell of X one dimension down."""
    if d.nu.is_degenerate:
        if not d.labels:
            raise PresheafError("no face below the window")
        return d.labels[0]
    if g.addr is None:
        return X.act(source(d.nu, d.nu.nodes[0]), d.labels[0], T)
    inv = {r: l for l, r in readdress(d.nu).items()}
    l = inv[g.addr]
    p = Address(l.dim, l.key[:-1])
    q = Address(l.dim - 1, l.key[-1])
    return X.act(source(d.nu, p), d.label_at(p), S(q))


def corolla_diagram(shape: Opetope, x) -> PastingDiagram:
    return PastingDiagram(corolla(shape), (x,))


def degenerate_diagram(phi: Opetope, cell=None) -> PastingDiagram:
    return PastingDiagram(degenerate(phi), () if cell is None else (cell,))


class FreePasting(LazyPresheaf):
    """ZX, with n-cells the pasting diagrams in X of weight at most ``bound``.

    With ``bound=None`` the construction is exact: X must be finite and
    loop-free (as the spine and representable complexes are), otherwise a
    CapacityError is raised.
    """

    def __init__(self, X: PresheafBase, bound: int | None = 4):
        self.base = X
        self.window = X.window
        self.k, self.n = params(X)
        self.exact = bound is None
        if self.exact:
            ncells = sum(len(X.cells(s)) for s in X.shapes(self.n))
            bound = ncells + 1
        self.bound = bound
        self._by_shape: dict = {}
        self._weights: dict = {}
        self._grow()

    # -- generation

    def _attach_key(self, shape, x):
        if self.k >= 1:
            return (target(shape), self.base.act(shape, x, T))
        return target(shape)

    def _input_key(self, shape, x, q):
        if self.k >= 1:
            return (source(shape, q), self.base.act(shape, x, S(q)))
        return source(shape, q)

    def _grow(self):
        X, n = self.base, self.n
        index: dict = {}
        self._cells_n = []
        for shape in X.shapes(n):
            for x in X.cells(shape):
                w = 1 + X.weight(shape, x)
                self._cells_n.append((shape, x, w))
                index.setdefault(self._attach_key(shape, x), []).append((shape, x, w))
        self._index = index
        memo: dict = {}

        def trees(key, budget):
            mk = (key, budget)
            if mk in memo:
                return memo[mk]
            out = []
            cands = self._cells_n if key is None else index.get(key, [])
            for shape, x, w in cands:
                if w > budget:
                    continue
                inputs = node_addresses(shape)
                for rest, used in fill(shape, x, inputs, 0, budget - w):
                    out.append(([((), shape, x)] + rest, used + w))
            memo[mk] = out
            return out

        def fill(shape, x, inputs, i, budget):
            if i == len(inputs):
                yield [], 0
                return
            q = inputs[i]
            for rest, used in fill(shape, x, inputs, i + 1, budget):
                yield rest, used
            for sub, s_used in trees(self._input_key(shape, x, q), budget):
                for rest, used in fill(shape, x, inputs, i + 1, budget - s_used):
                    yield [((q.key,) + k, s, y) for k, s, y in sub] + rest, used + s_used

        dim = n + 1
        for nodes, used in trees(None, self.bound):
            if self.exact and used >= self.bound:
                raise CapacityError("pasting diagrams are unbounded (the presheaf has loops)")
            nodes.sort(key=lambda t: t[0])
            nu = Opetope(dim, "tree", table=tuple((Address(n, k), s) for k, s, _ in nodes))
            d = PastingDiagram(nu, tuple(x for _, _, x in nodes))
            self._add(d, used)

    def _add(self, d: PastingDiagram, w: int):
        name = d.name
        self._by_shape.setdefault(d.shape, []).append(name)
        self._weights[name] = w

    def _degenerates(self, shape):
        """Degenerate diagrams of shape Y_phi."""
        if shape.dim != self.n:
            return []
        if shape is AR:
            phi = PT
        elif shape.kind == "tree" and len(shape.table) == 1:
            phi = shape.table[0][1]
        else:
            return []
        if self.k >= 1:
            return [degenerate_diagram(phi, c).name for c in self.base.cells(phi)]
        return [degenerate_diagram(phi).name]

    # -- presheaf interface

    def cells(self, shape):
        if shape.dim < self.n:
            return self.base.cells(shape)
        if shape.dim > self.n or shape.dim < self.window[0]:
            return ()
        return tuple(self._degenerates(shape)) + tuple(self._by_shape.get(shape, ()))

    def act(self, shape, cell, g):
        if shape.dim < self.n:
            return self.base.act(shape, cell, g)
        return diagram_face(diagram_of(cell), g, self.base)

    def shapes(self, dim=None):
        if dim is not None and dim < self.n:
            return self.base.shapes(dim)
        if dim is not None and dim != self.n:
            return []
        top = set(self._by_shape)
        if self.n == 1:
            top.add(AR)
        elif self.k >= 1:
            top |= {corolla(phi) for phi in self.base.shapes(self.n - 1)}
        else:
            for s, _x, _w in self._cells_n:
                top |= {corolla(face_shape(s, g)) for g in generators(s)}
        top = sorted((s for s in top if self.cells(s)), key=str)
        if dim == self.n:
            return top
        return top + [s for s in self.base.shapes() if s.dim < self.n]

    def weight(self, shape, cell):
        if shape.dim < self.n:
            return self.base.weight(shape, cell)
        return self._weights.get(cell, 0)

    def diagrams(self, shape=None):
        shapes = self.shapes(self.n) if shape is None else [shape]
        return [diagram_of(c) for s in shapes for c in self.cells(s)]


def zn_apply(X: PresheafBase, bound: int | None = 4) -> FreePasting:
    return FreePasting(X, bound)


# -- unit and multiplication


def unit_cell(X: PresheafBase, shape: Opetope, x) -> str:
    """The corolla diagram of an n-cell x, as a cell of ZX."""
    k, n = params(X)
    if shape.dim < n:
        return x
    return corolla_diagram(shape, x).name


def flatten(D: PastingDiagram, X: PresheafBase) -> PastingDiagram:
    """Multiplication: D is a diagram whose labels are diagrams in X."""
    if D.nu.is_degenerate:
        return D
    n1 = D.nu.dim
    inner = [diagram_of(l) for l in D.labels]
    table = [(Address.empty(n1), D.nu)]
    for p, d in zip(D.nu.nodes, inner):
        table.append((Address(n1, (p.key,)), d.nu))
    table.sort(key=lambda kv: kv[0].key)
    nubar = Opetope(n1 + 1, "tree", table=tuple(table))
    t = target(nubar)
    if t.is_degenerate:
        if params(X)[0] == 0:
            return PastingDiagram(t, ())
        return PastingDiagram(t, (diagram_face(inner[0], T, X),))
    w = readdress(nubar)
    where = {}
    for p, d in zip(D.nu.nodes, inner):
        for r, x in zip(d.nu.nodes, d.labels):
            leaf = Address(n1, (p.key, r.key))
            where[w[leaf]] = x
    return PastingDiagram(t, tuple(where[r] for r in t.nodes))


def height_two(D: PastingDiagram) -> Opetope:
    """The height-2 opetope of a diagram of diagrams (before contraction)."""
    n1 = D.nu.dim
    table = [(Address.empty(n1), D.nu)]
    for p, l in zip(D.nu.nodes, D.labels):
        table.append((Address(n1, (p.key,)), diagram_of(l).nu))
    table.sort(key=lambda kv: kv[0].key)
    return Opetope(n1 + 1, "tree", table=tuple(table))


def mult_cell(X: PresheafBase, cell: str) -> str:
    return flatten(diagram_of(cell), X).name


def eta(X: PresheafBase, bound: int = 4) -> PresheafMap:
    """The unit X -> ZX on the listed cells of X."""
    ZX = FreePasting(X, bound)
    mapping = {(s, x): unit_cell(X, s, x) for s, x in X.all_cells()}
    return PresheafMap(X, ZX, mapping)


def mu(X: PresheafBase, bound: int = 4) -> PresheafMap:
    """The multiplication ZZX -> ZX, within the bound."""
    k, n = params(X)
    ZX = FreePasting(X, bound)
    ZZX = FreePasting(ZX, bound)
    mapping = {}
    for s, c in ZZX.all_cells():
        mapping[(s, c)] = mult_cell(X, c) if s.dim == n else c
    return PresheafMap(ZZX, ZX, mapping)


def zmap(d: PastingDiagram, f: Callable) -> PastingDiagram:
    """Apply f(shape, cell) to every label of d."""
    if d.nu.is_degenerate:
        phi = d.nu.of
        return PastingDiagram(d.nu, tuple(f(phi, c) for c in d.labels))
    return PastingDiagram(d.nu, tuple(
        f(source(d.nu, p), x) for p, x in zip(d.nu.nodes, d.labels)))


def monad_law_failures(X: PresheafBase, bound: int):
    """Unit and associativity failures of (Z, eta, mu) at X within the bound.

    The bound is on total nodes: associativity is checked at every element
    of ZZZX with at most ``bound`` nodes over all levels, the unit laws at
    every d whose corolla in ZZX has at most ``bound`` nodes. Labels of such
    elements never exceed bound - 1, so the lower levels stop there.
    """
    k, n = params(X)
    ZX = FreePasting(X, bound - 1)
    ZZX = FreePasting(ZX, bound - 1)
    ZZZX = FreePasting(ZZX, bound)
    out = []
    for d in ZX.diagrams():
        name = d.name
        left = flatten(corolla_diagram(d.shape, name), X).name
        if left != name:
            out.append(("left unit", d))
        right = flatten(zmap(d, lambda s, x: unit_cell(X, s, x)), X).name
        if right != name:
            out.append(("right unit", d))
    for D3 in ZZZX.diagrams():
        a = flatten(flatten(D3, ZX), X)
        inner = zmap(D3, lambda s, x: mult_cell(X, x) if s.dim == n else x)
        b = flatten(inner, X)
        if a != b:
            out.append(("associativity", D3))
    return out, (len(ZX.diagrams()), len(ZZZX.diagrams()))


def cartesian_failures(X: PresheafBase, bound: int):
    """Fiberwise check that eta and mu are cartesian over X -> 1."""
    k, n = params(X)
    ZX = FreePasting(X, bound)
    ZZX = FreePasting(ZX, bound)
    fails = []
    # eta: diagrams whose underlying shape is a corolla are exactly units
    for d in ZX.diagrams():
        if not d.nu.is_degenerate and len(d.nu.nodes) == 1:
            if corolla_diagram(d.shape, d.labels[0]) != d:
                fails.append(("eta", d))
    # mu: over each e in ZZ1, D |-> mu(D) is a bijection onto the diagrams of
    # shape mu_1(e)
    fibers: dict = {}
    for D in ZZX.diagrams():
        if D.nu.is_degenerate:
            continue
        fibers.setdefault(_erase(D), []).append(D)
    for e, Ds in fibers.items():
        images = [flatten(D, X) for D in Ds]
        if len(set(images)) != len(images):
            fails.append(("mu not injective on a fiber", e))
            continue
        shape_nu = images[0].nu
        if any(i.nu is not shape_nu for i in images):
            fails.append(("mu changes the contracted shape", e))
            continue
        labelings = list(homs(spine(shape_nu), X)) if not shape_nu.is_degenerate else None
        if labelings is not None and len(labelings) != len(images):
            fails.append(("mu not onto the fiber", e))
    return fails


def _erase(D: PastingDiagram):
    """The image of a diagram of diagrams in ZZ1: its shapes only."""
    return (D.nu, tuple(diagram_of(l).nu for l in D.labels))


# -- algebras


@dataclass
class LawFailure:
    law: str
    xi: Opetope | None
    labeling: object
    detail: str

    def __str__(self) -> str:
        return f"{self.law} fails at {self.xi}: {self.detail}"


class OpetopicAlgebra:
    """A presheaf X on the window n-k..n with a composition of pasting diagrams."""

    def __init__(self, k: int, n: int, carrier: PresheafBase, comp: Callable):
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        if carrier.window != (n - k, n):
            raise PresheafError(f"carrier window {carrier.window} is not ({n - k}, {n})")
        self.k, self.n = k, n
        self.carrier = carrier
        self._comp = comp

    def comp(self, d: PastingDiagram):
        return self._comp(d)


def check_laws(A: OpetopicAlgebra, bound: int = 4):
    """None if A satisfies the unit, face and associativity laws within the
    bound, else the first LawFailure."""
    X, n = A.carrier, A.n
    for shape in X.shapes(n):
        for x in X.cells(shape):
            y = A.comp(corolla_diagram(shape, x))
            if y != x:
                return LawFailure("unit", corolla(shape), x, f"comp gives {y}")
    # a bounded carrier lists finitely many shapes; composites landing
    # outside them are beyond the truncation, not failures
    listed = set(X.shapes(n))
    ZX = FreePasting(X, bound)
    for d in ZX.diagrams():
        if d.shape not in listed:
            continue
        y = A.comp(d)
        if y not in X.cells(d.shape):
            return LawFailure("typing", d.nu, d.labels, f"{y} is not a cell of {d.shape}")
        if A.k >= 1:
            for g in generators(d.shape):
                if X.act(d.shape, y, g) != diagram_face(d, g, X):
                    return LawFailure("boundary", d.nu, d.labels, f"face {g} of {y}")
    ZZX = FreePasting(ZX, bound)
    for D in ZZX.diagrams():
        if D.nu.is_degenerate or D.shape not in listed:
            continue
        if any(diagram_of(l).shape not in listed for l in D.labels):
            continue
        whole = A.comp(flatten(D, X))
        inner = PastingDiagram(D.nu, tuple(A.comp(diagram_of(l)) for l in D.labels))
        stepwise = A.comp(inner)
        if whole != stepwise:
            return LawFailure("associativity", height_two(D), D.labels,
                              f"contracted gives {whole}, inner-first gives {stepwise}")
    return None


# -- categories


@dataclass
class Category:
    objects: list
    arrows: dict  # name -> (domain, codomain)
    identities: dict  # object -> arrow
    compose: dict  # (g, f) -> g after f


def category_carrier(C: Category) -> Presheaf:
    star = Address.atom()
    faces = {(AR, a): {S(star): s, T: t} for a, (s, t) in C.arrows.items()}
    return Presheaf((0, 1), {PT: list(C.objects), AR: list(C.arrows)}, faces)


def from_category(C: Category) -> OpetopicAlgebra:
    """Arrows labelling optInt m compose as labels[0] o labels[1] o ..."""
    X = category_carrier(C)

    def comp(d: PastingDiagram):
        if d.nu.is_degenerate:
            return C.identities[d.labels[0]]
        acc = d.labels[0]
        for f in d.labels[1:]:
            acc = C.compose[(acc, f)]
        return acc

    return OpetopicAlgebra(1, 1, X, comp)


def to_category(A: OpetopicAlgebra) -> Category:
    X = A.carrier
    star = Address.atom()
    objects = list(X.cells(PT))
    arrows = {a: (X.act(AR, a, S(star)), X.act(AR, a, T)) for a in X.cells(AR)}
    identities = {x: A.comp(degenerate_diagram(PT, x)) for x in objects}
    compose = {}
    for g, (gs, _) in arrows.items():
        for f, (_, ft) in arrows.items():
            if ft == gs:
                compose[(g, f)] = A.comp(PastingDiagram(op_int(2), (g, f)))
    return Category(objects, arrows, identities, compose)


def poset_category(n: int) -> Category:
    """The linear order 0 < 1 < ... < n-1 as a category."""
    objs = [str(i) for i in range(n)]
    arrows = {f"{i}{j}": (str(i), str(j)) for i in range(n) for j in range(i, n)}
    ids = {str(i): f"{i}{i}" for i in range(n)}
    comp = {}
    for g, (gs, gt) in arrows.items():
        for f, (fs, ft) in arrows.items():
            if ft == gs:
                comp[(g, f)] = f"{fs}{gt}"
    return Category(objs, arrows, ids, comp)


def walking_arrow() -> Category:
    return poset_category(2)


# -- planar operads


class PlanarOperad:
    """A planar coloured operad given by finite tables.

    operations: name -> (input colours, output colour);
    partial: (f, i, g) -> f with g plugged into input i;
    identities: colour -> unary operation.
    """

    def __init__(self, colours, operations: dict, partial: dict, identities: dict):
        self._colours = list(colours)
        self._ops = dict(operations)
        self._partial = dict(partial)
        self._ids = dict(identities)

    def colours(self):
        return self._colours

    def signature(self, op):
        return self._ops[op]

    def ops_of_arity(self, m: int):
        return [o for o, (ins, _) in self._ops.items() if len(ins) == m]

    def max_arity(self) -> int:
        return max((len(ins) for ins, _ in self._ops.values()), default=0)

    def plug(self, f, i, g):
        return self._partial[(f, i, g)]

    def identity(self, c):
        return self._ids[c]


class TerminalOperad(PlanarOperad):
    """One colour, one operation ``m<k>`` of each arity k."""

    def __init__(self, max_arity: int = 4):
        self._max = max_arity

    def colours(self):
        return ["c"]

    def signature(self, op):
        return (("c",) * int(op[1:]), "c")

    def ops_of_arity(self, m):
        return [f"m{m}"]

    def max_arity(self):
        return self._max

    def plug(self, f, i, g):
        return f"m{int(f[1:]) + int(g[1:]) - 1}"

    def identity(self, c):
        return "m1"


class FreeBinaryOperad(PlanarOperad):
    """The free operad on one binary operation: planar binary trees.

    ``|`` is the identity; ``(ab)`` grafts two trees onto the operation.
    """

    def __init__(self, max_arity: int = 4):
        self._max = max_arity
        self._memo = {1: ["|"]}

    def colours(self):
        return ["c"]

    def signature(self, op):
        return (("c",) * op.count("|"), "c")

    def ops_of_arity(self, m):
        if m < 1:
            return []
        if m not in self._memo:
            out = []
            for a in range(1, m):
                for left in self.ops_of_arity(a):
                    for right in self.ops_of_arity(m - a):
                        out.append(f"({left}{right})")
            self._memo[m] = out
        return self._memo[m]

    def max_arity(self):
        return self._max

    def plug(self, f, i, g):
        count = -1
        out = []
        for ch in f:
            if ch == "|":
                count += 1
                out.append(g if count == i else "|")
            else:
                out.append(ch)
        return "".join(out)

    def identity(self, c):
        return "|"


class OperadCarrier(LazyPresheaf):
    """Colours on arrows, m-ary operations on optInt m; input i is source [*^i]."""

    def __init__(self, operad: PlanarOperad):
        self.operad = operad
        self.window = (1, 2)

    def cells(self, shape):
        if shape is AR:
            return tuple(self.operad.colours())
        if shape.dim == 2:
            m = 0 if shape.is_degenerate else len(shape.table)
            return tuple(self.operad.ops_of_arity(m))
        return ()

    def act(self, shape, cell, g):
        ins, out = self.operad.signature(cell)
        if g.addr is None:
            return out
        return ins[len(g.addr.key)]

    def shapes(self, dim=None):
        out = []
        if dim in (None, 2):
            out += [op_int(m) for m in range(self.operad.max_arity() + 1)
                    if self.cells(op_int(m))]
        if dim in (None, 1):
            out.append(AR)
        return out


def operad_comp(operad: PlanarOperad, d: PastingDiagram):
    if d.nu.is_degenerate:
        return operad.identity(d.labels[0])
    nodes = dict(zip(d.nu.nodes, d.labels))

    def value(p):
        op = nodes[p]
        inputs = node_addresses(source(d.nu, p))
        for i in range(len(inputs) - 1, -1, -1):
            c = p.extend(inputs[i])
            if c in nodes:
                op = operad.plug(op, i, value(c))
        return op

    return value(d.nu.nodes[0])


def from_operad(operad: PlanarOperad) -> OpetopicAlgebra:
    return OpetopicAlgebra(1, 2, OperadCarrier(operad), lambda d: operad_comp(operad, d))


def to_operad(A: OpetopicAlgebra, max_arity: int) -> PlanarOperad:
    """Read off a finite table of operations up to max_arity."""
    X = A.carrier
    colours = list(X.cells(AR))
    ops = {}
    for m in range(max_arity + 1):
        s = op_int(m)
        for o in X.cells(s):
            ins = tuple(X.act(s, o, S(p)) for p in (s.nodes if m else ()))
            ops[o] = (ins, X.act(s, o, T))
    ids = {c: A.comp(degenerate_diagram(AR, c)) for c in colours}
    partial = {}
    for f, (fins, _) in ops.items():
        for g, (gins, gout) in ops.items():
            if len(fins) + len(gins) - 1 > max_arity:
                continue
            for i, c in enumerate(fins):
                if c != gout:
                    continue
                m, k = len(fins), len(gins)
                nu = Opetope(3, "tree", table=tuple(sorted(
                    [(Address.empty(2), op_int(m)), (Address(2, (((),) * i,)), op_int(k))],
                    key=lambda kv: kv[0].key)))
                lab = (f, g)
                partial[(f, i, g)] = A.comp(PastingDiagram(nu, lab))
    return PlanarOperad(colours, ops, partial, ids)


# -- free algebras


def free_algebra(X: PresheafBase, bound: int = 4) -> OpetopicAlgebra:
    """The free algebra ZX, cut off at the bound; composing past it raises."""
    k, n = params(X)
    ZX = FreePasting(X, bound)

    def comp(D: PastingDiagram):
        out = flatten(D, X)
        name = out.name
        if name not in ZX.cells(out.shape):
            raise CapacityError(f"composite of weight above {bound}")
        return name

    return OpetopicAlgebra(k, n, ZX, comp)


# -- nerve


class Nerve(LazyPresheaf):
    """The opetopic nerve of an algebra, up to a dimension.

    Below the window: one cell. In the window: the carrier. Above: a cell of
    shape omega is a map S[omega] -> nerve, named by its values on the
    sources (or on the single cell of a degenerate spine). The target of an
    (n+1)-cell is its composite; higher targets restrict along S[t omega].
    """

    def __init__(self, A: OpetopicAlgebra, up_to_dim: int, max_nodes: int = 3):
        if up_to_dim < A.n:
            raise ValueError("up_to_dim must be at least n")
        self.A = A
        self.window = (0, up_to_dim)
        self.max_nodes = max_nodes
        self._maps: dict = {}
        self._lists: dict = {}

    def _key_cells(self, omega):
        sp = spine(omega)
        if omega.is_degenerate:
            return [(omega.of, sp.cell_of((T, T)))]
        return [(source(omega, p), sp.cell_of((S(p),))) for p in omega.nodes]

    def _level(self, omega):
        hit = self._lists.get(omega)
        if hit is None:
            sp = spine(omega)
            below = _Below(self, omega.dim - 1)
            hit = []
            for f in homs(sp, below):
                m = f.mapping
                name = "(" + ";".join(m[k] for k in self._key_cells(omega)) + ")"
                if omega.is_degenerate:
                    name = "I" + name
                self._maps[(omega, name)] = m
                hit.append(name)
            self._lists[omega] = hit
        return hit

    def cells(self, shape):
        lo = self.A.n - self.A.k
        if shape.dim < lo:
            return ("*",)
        if shape.dim <= self.A.n:
            return self.A.carrier.cells(shape)
        if shape.dim > self.window[1]:
            return ()
        return tuple(self._level(shape))

    def assignment(self, shape, cell) -> dict:
        self._level(shape)
        return self._maps[(shape, cell)]

    def act(self, shape, cell, g):
        lo, n = self.A.n - self.A.k, self.A.n
        fs = face_shape(shape, g)
        if fs.dim < lo:
            return "*"
        if shape.dim <= n:
            return self.A.carrier.act(shape, cell, g)
        m = self.assignment(shape, cell)
        sp = spine(shape)
        if g.addr is not None:
            return m[(fs, sp.cell_of((g,)))]
        if shape.dim == n + 1:
            if shape.is_degenerate:
                labels = (m[(shape.of, sp.cell_of((T, T)))],) \
                    if self.A.k >= 1 else ()
                return self.A.comp(PastingDiagram(shape, labels))
            labels = tuple(m[(source(shape, p), sp.cell_of((S(p),)))] for p in shape.nodes)
            return self.A.comp(PastingDiagram(shape, labels))
        # restrict along the target: S[t omega] -> S[omega]
        rep_t = spine(fs)
        restricted = {}
        for s in rep_t.shapes():
            for c in rep_t.cells(s):
                restricted[(s, c)] = m[(s, sp.cell_of((T,) + rep_t.path(c)))]
        name = "(" + ";".join(restricted[k] for k in self._key_cells(fs)) + ")"
        if fs.is_degenerate:
            name = "I" + name
        return name

    def shapes(self, dim=None):
        from .opetope import enumerate_opetopes
        hi = self.window[1]
        dims = range(0, hi + 1) if dim is None else [dim]
        out = []
        for d in dims:
            if d > hi:
                continue
            if self.A.n - self.A.k <= d <= self.A.n:
                out += self.A.carrier.shapes(d)
            else:
                out += [s for s in enumerate_opetopes(d, self.max_nodes) if self.cells(s)]
        return out


class _Below(LazyPresheaf):
    def __init__(self, N: Nerve, top: int):
        self.N = N
        self.window = (0, top)

    def cells(self, shape):
        return self.N.cells(shape) if shape.dim <= self.window[1] else ()

    def act(self, shape, cell, g):
        return self.N.act(shape, cell, g)

    def shapes(self, dim=None):
        return self.N.shapes(dim)


def nerve(A: OpetopicAlgebra, up_to_dim: int, max_nodes: int = 3) -> Nerve:
    return Nerve(A, up_to_dim, max_nodes)




# -- files


def algebra_from_json(data) -> OpetopicAlgebra:
    """Load an algebra: a presheaf with a ``comp`` table, a ``category``,
    or ``"free": true`` with a ``bound``.

    ``comp`` is a list of {"nu": literal, "labels": [...], "value": cell};
    degenerate diagrams list their single lower cell as labels.
    ``category`` has objects, arrows {name: [dom, cod]}, identities
    {object: arrow} and compose [[g, f, g after f], ...].
    """
    from .opetope import parse_opetope
    if isinstance(data, str):
        data = json.loads(data)
    if "category" in data:
        c = data["category"]
        C = Category(list(c["objects"]), {a: tuple(st) for a, st in c["arrows"].items()},
                     dict(c["identities"]), {(g, f): h for g, f, h in c["compose"]})
        return from_category(C)
    X = Presheaf.from_json(data)
    k, n = params(X)
    if data.get("free"):
        return free_algebra(X, int(data.get("bound", 4)))
    table = {}
    for row in data.get("comp", []):
        d = PastingDiagram(parse_opetope(row["nu"]), tuple(str(x) for x in row["labels"]))
        table[d] = str(row["value"])
    return OpetopicAlgebra(k, n, X, lambda d: table.get(d))


def category_to_json(C: Category) -> dict:
    return {"category": {
        "objects": list(C.objects),
        "arrows": {a: list(st) for a, st in C.arrows.items()},
        "identities": dict(C.identities),
        "compose": [[g, f, h] for (g, f), h in C.compose.items()],
    }}


__all__ = [
    "CapacityError", "PastingDiagram", "FreePasting", "zn_apply", "eta", "mu", "unit_cell", "mult_cell",
    "flatten", "zmap", "diagram_of", "diagram_face", "corolla_diagram",
    "degenerate_diagram", "monad_law_failures", "cartesian_failures",
    "OpetopicAlgebra", "LawFailure", "check_laws", "Category", "from_category",
    "to_category", "poset_category", "walking_arrow", "PlanarOperad",
    "TerminalOperad", "FreeBinaryOperad", "OperadCarrier", "from_operad",
    "to_operad", "operad_comp", "free_algebra", "Nerve", "nerve", "height_two",
    "representable", "PresheafMap", "algebra_from_json", "category_to_json",
]
