"""The category of opetopes: face paths, their equality, and cell complexes.

A morphism psi -> omega is a path of face generators read from omega
inwards. Two paths are equal when they are related by the congruence
generated by the Inner, Glob1, Glob2 and Degen squares; equality is decided
by closing the finite set of all paths out of omega under those squares.
"""

from __future__ import annotations

from dataclasses import dataclass

from .address import Address
from .opetope import Opetope, OpetopeError, source, target
from .presheaf import (
    Face, PresheafBase, S, T, face_shape, generators, parse_path, path_text,
    relations,
)


class UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _path_key(path):
    return tuple(g.sort_key() for g in path)


class _Closure:
    """All face paths out of omega, quotiented by the relations."""

    def __init__(self, omega: Opetope):
        self.omega = omega
        self.end = {(): omega}
        uf = UnionFind()
        uf.add(())
        level = [()]
        while level:
            nxt = []
            for path in level:
                shape = self.end[path]
                for g in generators(shape):
                    p2 = path + (g,)
                    self.end[p2] = face_shape(shape, g)
                    uf.add(p2)
                    nxt.append(p2)
            level = nxt
        for path, shape in self.end.items():
            for i in range(len(path) - 1):
                at = self.end[path[:i]]
                pair = (path[i], path[i + 1])
                for l, r in relations(at):
                    if pair == l:
                        uf.union(path, path[:i] + r + path[i + 2:])
                    elif pair == r:
                        uf.union(path, path[:i] + l + path[i + 2:])
        best = {}
        for path in self.end:
            root = uf.find(path)
            cur = best.get(root)
            if cur is None or _path_key(path) < _path_key(cur):
                best[root] = path
        self.canon = {path: best[uf.find(path)] for path in self.end}
        self.classes = sorted(set(self.canon.values()), key=lambda p: (len(p), _path_key(p)))


_closures: dict = {}


def _closure(omega: Opetope) -> _Closure:
    c = _closures.get(omega)
    if c is None:
        c = _closures[omega] = _Closure(omega)
    return c


@dataclass(frozen=True)
class OMorphism:
    dom: Opetope
    cod: Opetope
    path: tuple  # canonical representative

    def __str__(self) -> str:
        return path_text(self.path)


def morphism(cod: Opetope, path) -> OMorphism:
    """The morphism given by a face path into cod, in canonical form."""
    path = tuple(path)
    c = _closure(cod)
    if path not in c.canon:
        raise OpetopeError(f"{path_text(path)} is not a face path into {cod}")
    return OMorphism(c.end[path], cod, c.canon[path])


def parse_morphism(text: str, cod: Opetope) -> OMorphism:
    return morphism(cod, parse_path(text, cod))


def identity(omega: Opetope) -> OMorphism:
    return OMorphism(omega, omega, ())


def compose(f: OMorphism, g: OMorphism) -> OMorphism:
    """g after f, for f: psi -> omega and g: omega -> xi."""
    if f.cod is not g.dom:
        raise OpetopeError("endpoint mismatch")
    return morphism(g.cod, g.path + f.path)


def equal(f: OMorphism, g: OMorphism) -> bool:
    if f.dom is not g.dom or f.cod is not g.cod:
        raise OpetopeError("morphisms with different endpoints")
    return f.path == g.path


def hom(psi: Opetope, omega: Opetope) -> list[OMorphism]:
    if psi.dim > omega.dim:
        return []
    c = _closure(omega)
    return [OMorphism(psi, omega, p) for p in c.classes if c.end[p] is psi]


class CellComplex(PresheafBase):
    """A subcomplex of the representable presheaf at omega.

    Cells are morphism classes into omega, named by their canonical path.
    """

    def __init__(self, omega: Opetope, role: str, paths):
        self.omega = omega
        self.role = role
        self.window = (0, omega.dim)
        self._c = _closure(omega)
        self._paths = {path_text(p): p for p in paths}
        by_shape: dict = {}
        for p in sorted(paths, key=lambda p: (len(p), _path_key(p))):
            by_shape.setdefault(self._c.end[p], []).append(path_text(p))
        self._by_shape = {s: tuple(v) for s, v in by_shape.items()}

    def cells(self, shape):
        return self._by_shape.get(shape, ())

    def act(self, shape, cell, g):
        return path_text(self._c.canon[self._paths[cell] + (g,)])

    def shapes(self, dim=None):
        out = [s for s in self._by_shape if dim is None or s.dim == dim]
        return sorted(out, key=lambda s: (-s.dim, str(s)))

    def path(self, cell) -> tuple:
        return self._paths[cell]

    def cell_of(self, path) -> str:
        """Name of the cell reached by an arbitrary face path into omega."""
        return path_text(self._c.canon[tuple(path)])

    def __contains__(self, cell) -> bool:
        return cell in self._paths

    def cell_names(self) -> set:
        return set(self._paths)

    def __repr__(self) -> str:
        return f"CellComplex({self.role}, {self.omega}, {len(self._paths)} cells)"


def _generated(omega: Opetope, seeds) -> set:
    return set(_generated_reps(omega, seeds))


def _generated_reps(omega: Opetope, seeds) -> dict:
    """Cells generated by the seed paths, each with a path through a seed."""
    c = _closure(omega)
    out: dict = {}
    stack = [tuple(s) for s in seeds]
    while stack:
        raw = stack.pop()
        p = c.canon[raw]
        if p in out:
            continue
        out[p] = raw
        for g in generators(c.end[p]):
            stack.append(raw + (g,))
    return out


_complexes: dict = {}


def representable(omega: Opetope) -> CellComplex:
    key = ("rep", omega)
    if key not in _complexes:
        _complexes[key] = CellComplex(omega, "representable", _closure(omega).classes)
    return _complexes[key]


def boundary(omega: Opetope) -> CellComplex:
    if omega.dim == 0:
        raise OpetopeError("the point has no boundary")
    key = ("bd", omega)
    if key not in _complexes:
        cells = [p for p in _closure(omega).classes if p != ()]
        _complexes[key] = CellComplex(omega, "boundary", cells)
    return _complexes[key]


def spine(omega: Opetope) -> CellComplex:
    """Cells generated by the source faces (by t t for a degenerate omega)."""
    if omega.dim == 0:
        raise OpetopeError("the point has no spine")
    key = ("sp", omega)
    if key not in _complexes:
        if omega.is_degenerate:
            seeds = [(T, T)]
        else:
            seeds = [(g,) for g in generators(omega)[1:]]
        _complexes[key] = CellComplex(omega, "spine", _generated(omega, seeds))
    return _complexes[key]


def spine_by_definition(omega: Opetope) -> set:
    """All cells except omega and its target: the largest subcomplex without t."""
    c = _closure(omega)
    return {p for p in c.classes if p not in ((), c.canon[(T,)])}


def image(f: OMorphism, cells=None) -> dict:
    """Cell map O[dom f] -> O[cod f] induced by f, on the given cells."""
    src = representable(f.dom)
    dst = representable(f.cod)
    cells = src.cell_names() if cells is None else cells
    return {x: dst.cell_of(f.path + src.path(x)) for x in cells}


# -- pushout lemmas


def _by_dim_shape(cx: CellComplex, names) -> dict:
    out: dict = {}
    for x in names:
        s = cx._c.end[cx.path(x)]
        out[s] = out.get(s, 0) + 1
    return out


def _is_pushout(span_cells, f, g, b_cells, c_cells, to_d_b, to_d_c, d_cells):
    """Check that D is the pushout of B <- A -> C, computed shapewise.

    Cells of B and C are tagged and glued along f(a) ~ g(a); the induced map
    to D must then be a bijection.
    """
    uf = UnionFind()
    for x in b_cells:
        uf.add(("b", x))
    for y in c_cells:
        uf.add(("c", y))
    for a in span_cells:
        uf.union(("b", f[a]), ("c", g[a]))
    image_of = {}
    for key in uf.parent:
        tag, x = key
        d = to_d_b[x] if tag == "b" else to_d_c[x]
        root = uf.find(key)
        if image_of.setdefault(root, d) != d:
            return "the gluing does not factor through the comparison map"
    images = list(image_of.values())
    if len(set(images)) != len(images):
        return "comparison map identifies cells the gluing keeps apart"
    if set(images) != set(d_cells):
        return "comparison map is not onto"
    return None


def check_boundary_pushout(omega: Opetope):
    """The boundary of omega is the pushout of the spine and O[t omega] over
    the boundary of t omega. For non-degenerate omega every map is a
    monomorphism and the square is also a pullback. Returns None or a report."""
    if omega.dim == 0:
        return "dimension 0"
    rep = representable(omega)
    bd = boundary(omega).cell_names()
    sp = spine(omega).cell_names()
    t = morphism(omega, (T,))
    tgt = target(omega)
    t_all = image(t)
    t_bd_cells = boundary(tgt).cell_names() if tgt.dim > 0 else set()
    if not set(image(t, t_bd_cells).values()) <= sp:
        return "boundary of the target does not land in the spine"
    r = _is_pushout(t_bd_cells, t_all, {a: a for a in t_bd_cells}, sp,
                    representable(tgt).cell_names(), {x: x for x in sp}, t_all, bd)
    if r:
        return r
    if spine_by_definition(omega) != {rep.path(x) for x in sp}:
        return "spine differs from the largest subcomplex avoiding the target"
    if omega.is_degenerate:
        return None
    if len(set(t_all.values())) != len(t_all):
        return "target embedding is not injective"
    t_img = set(t_all.values())
    t_bd = set(image(t, t_bd_cells).values())
    if sp & t_img != t_bd:
        return "not a pullback: spine and target meet outside the target's boundary"
    counts = {}
    for names, sign in ((t_img, 1), (sp, 1), (t_bd, -1)):
        for s, k in _by_dim_shape(rep, names).items():
            counts[s] = counts.get(s, 0) + sign * k
    if {s: k for s, k in counts.items() if k} != _by_dim_shape(rep, bd):
        return "cell counts differ"
    return None


def check_spine_pushout(omega: Opetope):
    """Write omega as nu grafted with the corolla on psi at its last node l;
    the spine of omega is the pushout of S[nu] and O[psi] over O[edg_l nu]."""
    if omega.dim < 2 or omega.is_degenerate or len(omega.nodes) < 2:
        return None
    last = omega.nodes[-1]
    psi = omega._map[last]
    nu = Opetope(omega.dim, "tree", table=tuple((a, d) for a, d in omega.table if a != last))
    p = Address(last.dim, last.key[:-1])
    q = Address(last.dim - 1, last.key[-1])
    edge = source(source(nu, p), q)
    rep_nu = representable(nu)
    rep_om = representable(omega)
    span = representable(edge).cell_names()
    f = image(morphism(nu, (S(p), S(q))))
    g = image(morphism(psi, (T,)))
    sp_nu = spine(nu).cell_names()
    if not set(f.values()) <= sp_nu:
        return "edge does not land in the spine of nu"
    reps = _generated_reps(nu, [(S(a),) for a in nu.nodes])
    to_b = {x: rep_om.cell_of(reps[rep_nu.path(x)]) for x in sp_nu}
    to_c = image(morphism(omega, (S(last),)))
    return _is_pushout(span, f, g, sp_nu, representable(psi).cell_names(),
                       to_b, to_c, spine(omega).cell_names())


def spine_stages(omega: Opetope):
    """Attach source cells to the image of S[t omega] one layer at a time.

    Returns the list of stages (each a list of attached source addresses) or
    raises when the staging fails.
    """
    rep = representable(omega)
    tgt = target(omega)
    t = morphism(omega, (T,))
    if tgt.dim == 0:
        have = set()
    else:
        have = {rep.path(x) for x in image(t, spine(tgt).cell_names()).values()}
    goal = {rep.path(x) for x in spine(omega).cell_names()}
    if not have <= goal:
        raise OpetopeError("S[t omega] does not land in S[omega]")
    c = _closure(omega)
    pending = list(omega.nodes) if not omega.is_degenerate else []
    stages = []
    while pending:
        layer = []
        for p in pending:
            cell = c.canon[(S(p),)]
            sub = _generated(omega, [(S(p), g) for g in generators(omega._map[p])[1:]])
            if omega._map[p].is_degenerate:
                sub = _generated(omega, [(S(p), T, T)])
            if sub <= have:
                layer.append(p)
        if not layer:
            raise OpetopeError("staging stuck")
        added = set()
        for p in layer:
            cell = c.canon[(S(p),)]
            tcell = c.canon[(S(p), T)]
            if cell in have or tcell in have or tcell in added:
                raise OpetopeError(f"source {p} attaches along a non-free cell")
            added |= {cell, tcell}
        have |= added
        stages.append(layer)
        pending = [p for p in pending if p not in layer]
    if omega.is_degenerate:
        if have != goal:
            raise OpetopeError("degenerate spine not equal to target spine image")
    elif have != goal:
        raise OpetopeError("staging does not exhaust the spine")
    return stages


def check_pushout_lemmas(omega: Opetope) -> tuple[bool, str]:
    """Boundary pushout, spine pushout and staging of spines for omega."""
    r = check_boundary_pushout(omega)
    if r:
        return False, f"boundary: {r}"
    r = check_spine_pushout(omega)
    if r:
        return False, f"spine: {r}"
    if omega.dim >= 2:
        try:
            spine_stages(omega)
        except OpetopeError as e:
            return False, f"staging: {e}"
    return True, "ok"


__all__ = [
    "Face", "T", "S", "OMorphism", "CellComplex", "UnionFind", "morphism",
    "parse_morphism", "identity", "compose", "equal", "hom", "representable",
    "boundary", "spine", "spine_by_definition", "image", "check_pushout_lemmas",
    "check_boundary_pushout", "check_spine_pushout", "spine_stages",
]
