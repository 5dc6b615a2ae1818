"""Presheaves on windows of the opetope category, and the maps between them.

A presheaf exposes ``window`` (lowest and highest dimension), ``shapes(dim)``,
``cells(shape)`` and ``act(shape, cell, face)``. ``Presheaf`` stores these as
tables; ``LazyPresheaf`` subclasses compute them on demand, which is how the
infinite objects of the library (terminal presheaves, free algebras, nerves)
are represented up to a bound.
"""

from __future__ import annotations

import json
from typing import NamedTuple

from .address import Address, AddressError, from_raw, parse_raw
from .opetope import (
    Opetope, OpetopeError, leaf_addresses, node_addresses, parse_opetope,
    readdress, source, target,
)


class PresheafError(ValueError):
    pass


class Face(NamedTuple):
    """A face generator: the target (``addr`` None) or the source at ``addr``."""

    addr: Address | None = None

    @property
    def is_target(self) -> bool:
        return self.addr is None

    def sort_key(self):
        return (0,) if self.addr is None else (1, self.addr.key)

    def __str__(self) -> str:
        return "t" if self.addr is None else f"s{self.addr}"

    def __repr__(self) -> str:
        return f"Face({self})"


T = Face()


def S(addr: Address) -> Face:
    return Face(addr)


def face_shape(omega: Opetope, g: Face) -> Opetope:
    return target(omega) if g.addr is None else source(omega, g.addr)


def generators(omega: Opetope) -> list[Face]:
    """All face generators into omega: the target, then sources in lex order."""
    if omega.dim == 0:
        return []
    return [T] + [S(p) for p in node_addresses(omega)]


_rel_cache: dict = {}


def relations(omega: Opetope) -> list[tuple[tuple[Face, Face], tuple[Face, Face]]]:
    """The defining relations between 2-step face paths into omega.

    A path (g1, g2) means: first g1 into omega, then g2 into that face.
    """
    hit = _rel_cache.get(omega)
    if hit is not None:
        return hit
    out = []
    if omega.dim >= 2:
        if omega.is_degenerate:
            root = Address.empty(omega.dim - 2) if omega.dim > 2 else Address.atom()
            out.append(((T, S(root)), (T, T)))
        else:
            out.append(((T, T), (S(omega.nodes[0]), T)))
            for x in omega.nodes[1:]:
                p = Address(x.dim, x.key[:-1])
                q = Address(x.dim - 1, x.key[-1])
                out.append(((S(x), T), (S(p), S(q))))
            w = readdress(omega)
            for l in leaf_addresses(omega):
                p = Address(l.dim, l.key[:-1])
                q = Address(l.dim - 1, l.key[-1])
                out.append(((T, S(w[l])), (S(p), S(q))))
    _rel_cache[omega] = out
    return out


def path_text(path) -> str:
    return ".".join(str(g) for g in path) if path else "id"


def parse_face(text: str, dim: int) -> Face:
    """Parse ``t`` or ``s<addr>``; dim is the dimension of the codomain."""
    text = text.strip()
    if text == "t":
        return T
    if not text.startswith("s"):
        raise PresheafError(f"bad face generator {text!r}")
    try:
        return S(from_raw(parse_raw(text[1:])[0], dim - 1))
    except AddressError as e:
        raise PresheafError(str(e)) from None


def parse_path(text: str, cod: Opetope) -> tuple[Face, ...]:
    """Parse a face path such as ``t.s[[*]]``, outermost generator first."""
    text = text.strip()
    if text in ("", "id"):
        return ()
    out = []
    shape = cod
    for part in _split_path(text):
        g = parse_face(part, shape.dim)
        try:
            shape = face_shape(shape, g)
        except OpetopeError as e:
            raise PresheafError(str(e)) from None
        out.append(g)
    return tuple(out)


def _split_path(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for c in text:
        if c == "[":
            depth += 1
        elif c == "]":
            depth -= 1
        if c == "." and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
    parts.append("".join(cur))
    return parts


class PresheafBase:
    """Common interface; subclasses provide ``cells`` and ``act``."""

    window: tuple[int, int]

    def cells(self, shape: Opetope) -> tuple:
        raise NotImplementedError

    def act(self, shape: Opetope, cell, g: Face):
        raise NotImplementedError

    def shapes(self, dim: int | None = None) -> list[Opetope]:
        raise NotImplementedError

    def weight(self, shape: Opetope, cell) -> int:
        return 0

    def in_window(self, shape: Opetope) -> bool:
        lo, hi = self.window
        return lo <= shape.dim <= hi

    def faces_in_window(self, shape: Opetope) -> list[Face]:
        """Generators into shape whose domain is still in the window."""
        if shape.dim - 1 < self.window[0]:
            return []
        return generators(shape)

    def all_cells(self):
        for shape in self.shapes():
            for c in self.cells(shape):
                yield shape, c

    def count(self) -> int:
        return sum(1 for _ in self.all_cells())

    def counts(self) -> dict:
        return {shape: len(self.cells(shape)) for shape in self.shapes()}

    def path_act(self, shape: Opetope, cell, path):
        for g in path:
            cell = self.act(shape, cell, g)
            shape = face_shape(shape, g)
        return cell

    def functoriality_violation(self):
        """First relation instance acting differently, or None."""
        lo, hi = self.window
        for shape in self.shapes():
            if shape.dim < lo + 2:
                continue
            rels = relations(shape)
            for x in self.cells(shape):
                for (g1, g2), (h1, h2) in rels:
                    a = self.path_act(shape, x, (g1, g2))
                    b = self.path_act(shape, x, (h1, h2))
                    if a != b:
                        return (shape, x, (g1, g2), (h1, h2), a, b)
        return None


class Presheaf(PresheafBase):
    """A finite presheaf stored as tables."""

    def __init__(self, window, cells: dict, faces: dict, check: bool = True):
        lo, hi = window
        if not 0 <= lo <= hi:
            raise PresheafError(f"bad window {window}")
        self.window = (lo, hi)
        self._cells = {s: tuple(v) for s, v in cells.items() if v}
        self._faces = faces
        for s in self._cells:
            if not lo <= s.dim <= hi:
                raise PresheafError(f"shape {s} outside window {window}")
        if check:
            self._check_actions()
            v = self.functoriality_violation()
            if v is not None:
                shape, x, l, r, a, b = v
                raise PresheafError(
                    f"functoriality fails at cell {x} of {shape}: "
                    f"{path_text(l)} gives {a}, {path_text(r)} gives {b}")

    def _check_actions(self):
        for shape, ids in self._cells.items():
            if len(set(ids)) != len(ids):
                raise PresheafError(f"duplicate cell names at {shape}")
            for x in ids:
                for g in self.faces_in_window(shape):
                    y = self._faces.get((shape, x), {}).get(g)
                    fs = face_shape(shape, g)
                    if y is None:
                        raise PresheafError(f"cell {x} of {shape} lacks face {g}")
                    if y not in self._cells.get(fs, ()):
                        raise PresheafError(f"face {g} of {x} is not a cell of {fs}")

    def cells(self, shape):
        return self._cells.get(shape, ())

    def act(self, shape, cell, g):
        try:
            return self._faces[(shape, cell)][g]
        except KeyError:
            raise PresheafError(f"no face {g} for cell {cell} of {shape}") from None

    def shapes(self, dim=None):
        out = [s for s in self._cells if dim is None or s.dim == dim]
        return sorted(out, key=lambda s: (-s.dim, str(s)))

    # -- serialization

    def to_json(self) -> dict:
        cells = {str(s): list(v) for s, v in self._cells.items()}
        faces = {}
        for s, ids in self._cells.items():
            block = {}
            for x in ids:
                entry = {}
                for g, y in self._faces.get((s, x), {}).items():
                    entry["t" if g.is_target else f"s@{g.addr}"] = y
                if entry:
                    block[x] = entry
            if block:
                faces[str(s)] = block
        return {"window": list(self.window), "cells": cells, "faces": faces}

    @classmethod
    def from_json(cls, data) -> Presheaf:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            window = tuple(data["window"])
            cells = {}
            for lit, names in data["cells"].items():
                cells[parse_opetope(lit)] = [str(n) for n in names]
            faces = {}
            for lit, block in data.get("faces", {}).items():
                shape = parse_opetope(lit)
                for x, entry in block.items():
                    acts = {}
                    for k, y in entry.items():
                        if k == "t":
                            acts[T] = str(y)
                        elif k.startswith("s@"):
                            raw, _ = parse_raw(k[2:])
                            acts[S(from_raw(raw, shape.dim - 1))] = str(y)
                        else:
                            raise PresheafError(f"bad face key {k!r}")
                    faces[(shape, str(x))] = acts
        except (KeyError, TypeError, OpetopeError, AddressError) as e:
            raise PresheafError(f"malformed presheaf data: {e}") from None
        return cls(window, cells, faces)


class LazyPresheaf(PresheafBase):
    """Base for presheaves computed on demand."""


def materialize(X: PresheafBase, shapes=None) -> Presheaf:
    """Copy the listed (default: all) shapes of X into a table presheaf."""
    shapes = X.shapes() if shapes is None else shapes
    cells, faces = {}, {}
    for s in shapes:
        cells[s] = list(X.cells(s))
    for s in shapes:
        for x in cells[s]:
            faces[(s, x)] = {g: X.act(s, x, g) for g in X.faces_in_window(s)}
    return Presheaf(X.window, cells, faces, check=False)


class PresheafMap:
    """A natural transformation, stored cellwise as (shape, cell) -> cell."""

    def __init__(self, dom: PresheafBase, cod: PresheafBase, mapping: dict):
        self.dom = dom
        self.cod = cod
        self.mapping = mapping

    def __call__(self, shape, cell):
        return self.mapping[(shape, cell)]

    def __eq__(self, other):
        return isinstance(other, PresheafMap) and self.mapping == other.mapping

    def __hash__(self):
        return hash(frozenset(self.mapping.items()))

    def __repr__(self):
        items = ", ".join(f"{c}@{s}->{v}" for (s, c), v in sorted(
            self.mapping.items(), key=lambda kv: (kv[0][0].dim, str(kv[0][0]), str(kv[0][1]))))
        return f"PresheafMap({items})"

    def naturality_violation(self):
        for (s, x), y in self.mapping.items():
            for g in self.dom.faces_in_window(s):
                fs = face_shape(s, g)
                if not self.cod.in_window(fs):
                    continue
                if self.mapping.get((fs, self.dom.act(s, x, g))) != self.cod.act(s, y, g):
                    return (s, x, g)
        return None


__all__ = [
    "Face", "T", "S", "face_shape", "generators", "relations", "path_text",
    "parse_path", "parse_face", "Presheaf", "PresheafBase", "LazyPresheaf",
    "PresheafMap", "PresheafError", "materialize",
]
