"""The opk command line.

Exit codes: 0 on success, 1 on invalid input, 2 when a check fails.
Every opetope, address and face path printed can be fed back in.
"""

from __future__ import annotations

import argparse
import json
import sys

from .address import AddressError, parse_address
from .algebra import (
    CapacityError, FreeBinaryOperad, TerminalOperad, algebra_from_json,
    check_laws, from_category, from_operad, nerve, poset_category, walking_arrow,
)
from .dagger import DaggerError, a_omega, flatten_opetope
from .ocat import boundary, check_pushout_lemmas, hom, morphism, representable, spine
from .opetope import (
    OpetopeError, enumerate_opetopes, graft, parse_opetope,
    source, substitute, target, validate,
)
from .presheaf import PresheafError, parse_path, path_text
from .shapes import (
    Cardinal, ShapeError, diagrammatic_witness, doth_morphism, doth_object,
    lambda_hom,
)


class Invalid(Exception):
    """Bad input; exit code 1."""


class Failed(Exception):
    """A check did not hold; exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _opetope(text: str, check: bool = True):
    try:
        return parse_opetope(text, check)
    except OpetopeError as e:
        raise Invalid(f"cannot parse opetope: {e}") from None


def _literal(args):
    """The opetope given inline or with -f."""
    if args.file:
        with open(args.file) as fh:
            text = fh.read()
    elif args.opetope is not None:
        text = args.opetope
    else:
        raise Invalid("give an opetope literal or -f FILE")
    return text


def _address(text: str, dim: int):
    try:
        return parse_address(text, dim)
    except AddressError as e:
        raise Invalid(f"cannot parse address {text!r}: {e}") from None


def _params(args, default_n: int):
    n = default_n if args.n_param is None else args.n_param
    k = 1 if args.k is None else args.k
    if not 0 <= k <= n:
        raise Invalid(f"need 0 <= k <= n, got k={k}, n={n}")
    return k, n


# -- subcommands; each returns (lines, json data)


def cmd_validate(args):
    omega = _opetope(_literal(args), check=False)
    v = validate(omega)
    if v is not None:
        raise Failed(str(v))
    return [str(omega)], {"opetope": str(omega), "dim": omega.dim, "valid": True}


def cmd_target(args):
    omega = _opetope(_literal(args))
    if omega.dim < 1:
        raise Invalid("the point has no target")
    t = target(omega)
    return [str(t)], {"target": str(t)}


def cmd_source(args):
    omega = _opetope(_literal(args))
    if omega.dim < 1:
        raise Invalid("the point has no sources")
    if args.address is None:
        raise Invalid("source needs -a ADDRESS")
    p = _address(args.address, omega.dim - 1)
    try:
        s = source(omega, p)
    except (OpetopeError, KeyError):
        raise Invalid(f"{p} is not a node of {omega}") from None
    return [str(s)], {"source": str(s), "address": str(p)}


def cmd_graft(args):
    s, t = _opetope(args.opetope), _opetope(args.other)
    if args.leaf is None:
        raise Invalid("graft needs -l LEAF")
    l = _address(args.leaf, s.dim - 1)
    try:
        out = graft(s, l, t)
    except OpetopeError as e:
        raise Invalid(str(e)) from None
    return [str(out)], {"result": str(out)}


def cmd_subst(args):
    t, u = _opetope(args.opetope), _opetope(args.other)
    if args.node is None:
        raise Invalid("subst needs -p NODE")
    p = _address(args.node, t.dim - 1)
    try:
        out = substitute(t, p, u)
    except OpetopeError as e:
        raise Invalid(str(e)) from None
    return [str(out)], {"result": str(out)}


def cmd_enum(args):
    if args.dim is None:
        raise Invalid("enum needs -d DIM")
    try:
        found = enumerate_opetopes(args.dim, args.max_nodes)
    except OpetopeError as e:
        raise Invalid(str(e)) from None
    lines = [str(o) for o in found]
    return lines, {"opetopes": lines}


def cmd_hom(args):
    psi, omega = _opetope(args.opetope), _opetope(args.other)
    if args.k is None and args.n_param is None:
        fs = hom(psi, omega)
        lines = [path_text(f.path) for f in fs]
        return lines, {"morphisms": lines}
    if args.n_param is None:
        raise Invalid("morphisms in Lambda need --n")
    k, n = _params(args, args.n_param)
    a, b = _cardinal(psi, k, n), _cardinal(omega, k, n)
    lines, data = [], []
    for i, f in enumerate(lambda_hom(a, b)):
        if i:
            lines.append("")
        body = f.lines()
        lines.extend(body)
        data.append(body)
    return lines, {"morphisms": data}


def _cardinal(omega, k, n):
    try:
        return doth_object(omega, k, n)
    except ShapeError as e:
        raise Invalid(str(e)) from None


def _complex_lines(cx):
    lines, data = [], []
    for shape in sorted(cx.shapes(), key=lambda s: (-s.dim, str(s))):
        for c in cx.cells(shape):
            p = path_text(cx.path(c))
            lines.append(f"{p}\t{shape}")
            data.append({"path": p, "shape": str(shape)})
    return lines, {"cells": data}


def cmd_cells(args):
    omega = _opetope(_literal(args))
    if args.boundary:
        if omega.dim < 1:
            raise Invalid("the point has empty boundary")
        return _complex_lines(boundary(omega))
    return _complex_lines(representable(omega))


def cmd_spine(args):
    omega = _opetope(_literal(args))
    return _complex_lines(spine(omega))


def cmd_dagger(args):
    omega = _opetope(_literal(args))
    n = omega.dim if args.n_param is None else args.n_param
    try:
        flat = flatten_opetope(omega, n)
    except DaggerError as e:
        raise Invalid(str(e)) from None
    lines, table = [str(flat)], {}
    if omega.dim == n and n >= 1 and not omega.is_degenerate:
        for p, q in sorted(a_omega(omega, n).items(), key=lambda kv: kv[0].key):
            lines.append(f"{p} -> {q}")
            table[str(p)] = str(q)
    return lines, {"flattened": str(flat), "a_omega": table}


def _face_morphism(args):
    cod = _opetope(_literal(args))
    try:
        path = parse_path(args.path or "id", cod)
        return morphism(cod, path)
    except (PresheafError, OpetopeError) as e:
        raise Invalid(str(e)) from None


def cmd_doth(args):
    f = _face_morphism(args)
    k, n = _params(args, f.cod.dim - 1 if f.cod.dim > 1 else f.cod.dim)
    try:
        g = doth_morphism(f, k, n)
    except ShapeError as e:
        raise Invalid(str(e)) from None
    body = g.lines()
    head = f"{g.dom} -> {g.cod}"
    return [head] + body, {"dom": str(g.dom), "cod": str(g.cod), "body": body}


def cmd_witness(args):
    dom, cod = _opetope(args.opetope), _opetope(args.other)
    k, n = _params(args, dom.dim - 1)
    try:
        a, b = Cardinal("spine", dom, k, n), Cardinal("spine", cod, k, n)
    except ShapeError as e:
        raise Invalid(str(e)) from None
    lines, data = [], []
    for f in lambda_hom(a, b):
        try:
            d = diagrammatic_witness(f)
        except ShapeError as e:
            raise Failed(f"no witness for {f}: {e}") from None
        lines.append(f"{d.xi}\t{d.p}")
        data.append({"xi": str(d.xi), "p": str(d.p)})
    return lines, {"witnesses": data}


def _algebra(args):
    if args.example:
        name = args.example
        if name == "walking-arrow":
            return from_category(walking_arrow())
        if name.startswith("poset:"):
            return from_category(poset_category(int(name.split(":", 1)[1])))
        if name == "terminal-operad":
            return from_operad(TerminalOperad(args.max_nodes))
        if name == "free-binary-operad":
            return from_operad(FreeBinaryOperad(args.max_nodes))
        raise Invalid(f"unknown example {name!r}")
    if not args.file:
        raise Invalid("give -f FILE or --example NAME")
    try:
        with open(args.file) as fh:
            return algebra_from_json(json.load(fh))
    except (ValueError, KeyError, OpetopeError, PresheafError) as e:
        raise Invalid(f"cannot load algebra: {e}") from None


def cmd_nerve(args):
    A = _algebra(args)
    top = A.n + 2 if args.dim is None else args.dim
    N = nerve(A, top, args.max_nodes)
    lines, data = [], []
    for d in range(top + 1):
        for shape in N.shapes(d):
            c = len(N.cells(shape))
            lines.append(f"{shape}\t{c}")
            data.append({"shape": str(shape), "cells": c})
    return lines, {"counts": data}


def cmd_check_laws(args):
    A = _algebra(args)
    try:
        failure = check_laws(A, args.bound)
    except CapacityError as e:
        raise Invalid(str(e)) from None
    if failure is not None:
        raise Failed(str(failure))
    return ["ok"], {"ok": True}


def cmd_check_pushouts(args):
    omega = _opetope(_literal(args))
    ok, report = check_pushout_lemmas(omega)
    if not ok:
        raise Failed(report)
    return ["ok"], {"ok": True}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="opk", description="Opetopes, opetopic sets and their algebras.")
    ap.add_argument("--json", action="store_true", help="print JSON")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help, inputs=1):
        p = sub.add_parser(name, help=help)
        if inputs >= 1:
            p.add_argument("opetope", nargs="?", help="opetope literal")
        if inputs >= 2:
            p.add_argument("other", help="second opetope literal")
        p.add_argument("-f", "--file", help="read the (first) literal or algebra from a file")
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                       help="print JSON")
        p.set_defaults(fn=fn)
        return p

    add("validate", cmd_validate, "check every opetopic identity")
    add("target", cmd_target, "print the target")
    add("source", cmd_source, "print the source at -a").add_argument("-a", "--address")
    add("graft", cmd_graft, "graft the second opetope at leaf -l", 2).add_argument("-l", "--leaf")
    add("subst", cmd_subst, "substitute the second opetope at node -p", 2).add_argument("-p", "--node")
    p = add("enum", cmd_enum, "list opetopes of dim -d with size at most -n", 0)
    p.add_argument("-d", "--dim", type=int)
    p.add_argument("-n", "--max-nodes", type=int, default=4)
    p = add("hom", cmd_hom, "morphisms in O, or in Lambda with -k/--n", 2)
    p.add_argument("-k", type=int)
    p.add_argument("--n", dest="n_param", type=int)
    add("cells", cmd_cells, "cells of the representable").add_argument(
        "--boundary", action="store_true", help="only the boundary")
    add("spine", cmd_spine, "cells of the spine")
    add("dagger", cmd_dagger, "flatten to dims 2..3 and print the node bijection").add_argument(
        "--n", dest="n_param", type=int)
    p = add("doth", cmd_doth, "image of a face path under the shape functor")
    p.add_argument("path", nargs="?", help="face path such as t.s[[*]]")
    p.add_argument("-k", type=int)
    p.add_argument("--n", dest="n_param", type=int)
    p = add("witness", cmd_witness, "diagrammatic witnesses for all spine maps", 2)
    p.add_argument("-k", type=int)
    p.add_argument("--n", dest="n_param", type=int)
    for name, fn, help in (("nerve", cmd_nerve, "cell counts of the nerve"),
                           ("check-laws", cmd_check_laws, "check the algebra laws")):
        p = add(name, fn, help, 0)
        p.add_argument("--example", help="walking-arrow, poset:N, terminal-operad, free-binary-operad")
        p.add_argument("-d", "--dim", type=int)
        p.add_argument("-n", "--max-nodes", type=int, default=3)
        p.add_argument("-b", "--bound", type=int, default=4)
    add("check-pushouts", cmd_check_pushouts, "boundary and spine pushout lemmas")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        lines, data = args.fn(args)
    except Invalid as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Failed as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        for line in lines:
            print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
