"""Finite opetopic sets: homs by search, unique lifting, truncation and extension."""

from __future__ import annotations

from .ocat import CellComplex, boundary, representable, spine
from .opetope import PT, Opetope, enumerate_opetopes
from .presheaf import (
    LazyPresheaf, Presheaf, PresheafBase, PresheafError, PresheafMap,
    face_shape, generators, materialize,
)


class Truncated(LazyPresheaf):
    """The restriction of a presheaf to a smaller window."""

    def __init__(self, X: PresheafBase, low: int, high: int):
        lo, hi = X.window
        if low < lo or low > high:
            raise PresheafError(f"cannot truncate window {X.window} to ({low}, {high})")
        self.base = X
        self.window = (low, high)

    def cells(self, shape):
        return self.base.cells(shape) if self.in_window(shape) else ()

    def act(self, shape, cell, g):
        return self.base.act(shape, cell, g)

    def shapes(self, dim=None):
        if dim is not None:
            return self.base.shapes(dim) if self.window[0] <= dim <= self.window[1] else []
        return [s for s in self.base.shapes() if self.in_window(s)]

    def weight(self, shape, cell):
        return self.base.weight(shape, cell)


def truncate(X: PresheafBase, m: int, n: int) -> PresheafBase:
    if (m, n) == X.window:
        return X
    return Truncated(X, m, n)


class _Search:
    """Backtracking enumeration of natural maps A -> X."""

    def __init__(self, A: PresheafBase, X: PresheafBase):
        self.A, self.X = A, X
        self.order = []
        self.faces = {}
        for shape in A.shapes():
            for c in A.cells(shape):
                key = (shape, c)
                self.order.append(key)
                self.faces[key] = [
                    (g, (face_shape(shape, g), A.act(shape, c, g)))
                    for g in A.faces_in_window(shape)
                ]
        self.order.sort(key=lambda k: -k[0].dim)

    def assign(self, asg, trail, key, val) -> bool:
        stack = [(key, val)]
        while stack:
            k, v = stack.pop()
            have = asg.get(k)
            if have is not None:
                if have != v:
                    return False
                continue
            asg[k] = v
            trail.append(k)
            for g, fk in self.faces[k]:
                stack.append((fk, self.X.act(k[0], v, g)))
        return True

    def run(self, fixed=None, limit=None):
        asg: dict = {}
        trail: list = []
        if fixed:
            for k, v in fixed.items():
                if not self.assign(asg, trail, k, v):
                    return
        count = 0

        def rec(i):
            nonlocal count
            while i < len(self.order) and self.order[i] in asg:
                i += 1
            if i == len(self.order):
                count += 1
                yield dict(asg)
                return
            key = self.order[i]
            for v in self.X.cells(key[0]):
                mark = len(trail)
                if self.assign(asg, trail, key, v):
                    yield from rec(i + 1)
                    if limit is not None and count >= limit:
                        return
                for k in trail[mark:]:
                    del asg[k]
                del trail[mark:]

        yield from rec(0)


def _restrict_to(A: PresheafBase, X: PresheafBase) -> PresheafBase:
    lo, hi = X.window
    alo, ahi = A.window
    if alo > lo:
        raise PresheafError(f"window mismatch: {A.window} does not cover {X.window}")
    return truncate(A, lo, min(hi, ahi)) if (lo, min(hi, ahi)) != A.window else A


def homs(A: PresheafBase, X: PresheafBase, fixed=None, limit=None):
    """Iterate over the natural maps A -> X (A finite), as PresheafMaps.

    A is first restricted to the window of X. ``fixed`` prescribes some
    values (shape, cell) -> cell.
    """
    A2 = _restrict_to(A, X)
    fixed = {k: v for k, v in (fixed or {}).items() if X.in_window(k[0])}
    for m in _Search(A2, X).run(fixed, limit):
        yield PresheafMap(A2, X, m)


def presheaf_hom(A: PresheafBase, X: PresheafBase) -> list[PresheafMap]:
    return list(homs(A, X))


def count_extensions(A, B, X, f: PresheafMap, inclusion=None, limit=2) -> int:
    """Number of maps B -> X restricting to f along A -> B (capped at limit)."""
    inclusion = inclusion or {}
    fixed = {}
    for (s, a), v in f.mapping.items():
        fixed[(s, inclusion.get((s, a), a))] = v
    return sum(1 for _ in homs(B, X, fixed, limit))


def lifting_failure(A, B, X, inclusion=None):
    """First map A -> X without a unique extension to B, or None."""
    for f in homs(A, X):
        n = count_extensions(A, B, X, f, inclusion)
        if n != 1:
            return f, n
    return None


def orthogonal(A, B, X, inclusion=None) -> bool:
    """True iff every map A -> X extends uniquely along A -> B.

    By default A is a subcomplex of B with the same cell names.
    """
    return lifting_failure(A, B, X, inclusion) is None


class InclusionFamily:
    """A family of complex inclusions: initial (O), boundary (B), spine (S),
    or the localizing family A_{k,n}, restricted to a range of dimensions."""

    def __init__(self, tag: str, low: int = 0, high: int | None = None,
                 k: int | None = None, n: int | None = None):
        if tag not in ("O", "B", "S", "A"):
            raise ValueError(f"unknown family {tag}")
        self.tag, self.low, self.high, self.k, self.n = tag, low, high, k, n

    def members(self, max_dim: int, max_nodes: int):
        """(shape, A, B) for each member with shape of dim <= max_dim."""
        if self.tag == "A":
            yield from InclusionFamily("O", 0, self.n - self.k - 1).members(max_dim, max_nodes)
            yield from InclusionFamily("S", self.n + 1).members(max_dim, max_nodes)
            return
        hi = max_dim if self.high is None else min(self.high, max_dim)
        for d in range(max(self.low, 0), hi + 1):
            for omega in enumerate_opetopes(d, max_nodes):
                rep = representable(omega)
                if self.tag == "O":
                    yield omega, empty_presheaf((0, d)), rep
                elif d >= 1 and self.tag == "B":
                    yield omega, boundary(omega), rep
                elif d >= 1 and self.tag == "S":
                    yield omega, spine(omega), rep

    def orthogonal_to(self, X, max_dim: int, max_nodes: int):
        """None if every member is orthogonal to X, else the failing shape."""
        for omega, A, B in self.members(max_dim, max_nodes):
            if not X.window[0] <= omega.dim:
                continue
            if lifting_failure(A, B, X) is not None:
                return omega
        return None


def empty_presheaf(window) -> Presheaf:
    return Presheaf(window, {}, {}, check=False)


class Terminal(LazyPresheaf):
    """The terminal presheaf: one cell ``*`` at each shape.

    ``max_nodes`` bounds the shapes listed by ``shapes`` (needed by
    enumerations); ``cells`` answers for every shape in the window.
    """

    def __init__(self, window, max_nodes: int = 4):
        self.window = tuple(window)
        self.max_nodes = max_nodes

    def cells(self, shape):
        return ("*",) if self.in_window(shape) else ()

    def act(self, shape, cell, g):
        return "*"

    def shapes(self, dim=None):
        lo, hi = self.window
        dims = range(lo, hi + 1) if dim is None else ([dim] if lo <= dim <= hi else [])
        out = []
        for d in dims:
            out += enumerate_opetopes(d, self.max_nodes)
        return sorted(out, key=lambda s: (-s.dim, str(s)))


class Extended(LazyPresheaf):
    """A presheaf on a window, extended to a larger window.

    ``mode`` is ``"zero"`` (empty outside), ``"terminal"`` (a single cell
    below the window) or ``"canonical"`` (above the window, cells are the
    maps from the boundary that extend to nothing new: X_omega := hom(dO[omega], X)).
    """

    def __init__(self, X: PresheafBase, mode: str, cap: int, max_nodes: int = 4):
        lo, hi = X.window
        if mode == "terminal":
            if cap > lo:
                raise PresheafError("cap must lie below the window")
            self.window = (cap, hi)
        else:
            if cap < hi:
                raise PresheafError("cap smaller than window")
            self.window = (lo, cap)
        self.base, self.mode, self.cap, self.max_nodes = X, mode, cap, max_nodes
        self._fill: dict = {}

    def cells(self, shape):
        if self.base.in_window(shape):
            return self.base.cells(shape)
        if not self.in_window(shape):
            return ()
        if self.mode == "zero":
            return ()
        if self.mode == "terminal":
            return ("*",)
        return tuple(self._filled(shape))

    def _filled(self, shape):
        hit = self._fill.get(shape)
        if hit is None:
            bd = boundary(shape)
            below = truncate(self, self.window[0], shape.dim - 1)
            hit = {}
            for f in homs(bd, below):
                name = "(" + ",".join(
                    f.mapping[(face_shape(shape, g), bd.cell_of((g,)))] for g in generators(shape)
                ) + ")"
                hit[name] = (f.mapping, bd)
            self._fill[shape] = hit
        return hit

    def act(self, shape, cell, g):
        if self.base.in_window(shape) and self.base.in_window(face_shape(shape, g)):
            return self.base.act(shape, cell, g)
        if self.mode == "terminal":
            return "*"
        if self.base.in_window(shape):
            raise PresheafError("no face below the window")
        mapping, bd = self._filled(shape)[cell]
        return mapping[(face_shape(shape, g), bd.cell_of((g,)))]

    def shapes(self, dim=None):
        lo, hi = self.window
        dims = range(lo, hi + 1) if dim is None else ([dim] if lo <= dim <= hi else [])
        out = []
        for d in dims:
            if self.base.window[0] <= d <= self.base.window[1]:
                out += self.base.shapes(d)
            elif self.mode != "zero":
                out += [s for s in enumerate_opetopes(d, self.max_nodes) if self.cells(s)]
        return sorted(out, key=lambda s: (-s.dim, str(s)))


def extend_zero(X, cap: int) -> PresheafBase:
    return Extended(X, "zero", cap)


def extend_terminal(X, cap: int = 0) -> PresheafBase:
    return Extended(X, "terminal", cap)


def extend_canonical(X, cap: int, max_nodes: int = 4) -> PresheafBase:
    return Extended(X, "canonical", cap, max_nodes)


def from_graph(vertices, edges: dict) -> Presheaf:
    """A presheaf on the (0,1) window: edges maps name -> (source, target)."""
    from .opetope import AR
    from .presheaf import S, T
    from .address import Address

    cells = {PT: list(vertices), AR: list(edges)}
    faces = {(AR, e): {S(Address.atom()): s, T: t} for e, (s, t) in edges.items()}
    return Presheaf((0, 1), cells, faces)


__all__ = [
    "Presheaf", "PresheafMap", "PresheafError", "CellComplex", "Truncated",
    "truncate", "homs", "presheaf_hom", "orthogonal", "lifting_failure",
    "count_extensions", "InclusionFamily", "Terminal", "Extended",
    "extend_zero", "extend_terminal", "extend_canonical", "empty_presheaf",
    "from_graph", "materialize",
]
