"""Acceptance gate: ten criteria, each with its time limit.

Run with pytest (one PASS/FAIL line per criterion is printed even when
output is captured) or directly as a script.
"""

import time
from itertools import product
from math import comb

import pytest

from opk.address import Address
from opk.algebra import (
    FreeBinaryOperad, FreePasting, TerminalOperad, check_laws, from_category,
    from_operad, monad_law_failures, nerve, poset_category, walking_arrow,
)
from opk.dagger import dagger_algebra, transport_algebra
from opk.ocat import check_pushout_lemmas, morphism
from opk.opetope import (
    decompose, enumerate_opetopes, graft, grafting_orders, op_int,
    parse_opetope, size, target, target_along, validate,
)
from opk.opset import InclusionFamily, Terminal
from opk.presheaf import S, T
from opk.shapes import (
    as_monotone_map, check_surjectivity, diagrammatic_witness, doth_morphism,
    doth_object, lambda_hom,
)

XI = ("{ [] <- {[] <- ar,[*] <- ar,[**] <- ar}, [[*]] <- {[] <- ar,[*] <- ar},"
      " [[**]] <- {[] <- ar} }")


# -- independent oracles


def planar_trees(k):
    """Planar rooted trees with k nodes, as nested tuples of children."""
    if k == 1:
        return [()]
    out = []
    # first child subtree takes j nodes, the rest stays with the root
    for j in range(1, k):
        for first in planar_trees(j):
            for rest in planar_trees(k - j):
                out.append((first,) + rest)
    return out


def monotone_maps(m, n):
    return [f for f in product(range(n + 1), repeat=m + 1)
            if all(a <= b for a, b in zip(f, f[1:]))]


def nerve_oracle(C, m):
    """Number of m-simplices of the simplicial nerve of C, by brute force."""
    if m == 0:
        return len(C.objects)
    seqs = [(a,) for a in C.arrows]
    for _ in range(m - 1):
        seqs = [s + (a,) for s in seqs for a in C.arrows
                if C.arrows[s[-1]][1] == C.arrows[a][0]]
    return len(seqs)


# -- criteria


def criterion_1():
    count = 0
    for d in range(5):
        for omega in enumerate_opetopes(d, 5):
            v = validate(omega)
            if v is not None:
                return False, f"{omega}: {v}"
            count += 1
    return True, f"{count} opetopes valid"


def criterion_2():
    # node count read as size, the bound every enumeration uses
    found = [sum(1 for o in enumerate_opetopes(3, k) if not o.is_degenerate
                 and size(o) == k)
             for k in range(1, 8)]
    oracle = [len(planar_trees(k)) for k in range(1, 8)]
    return found == oracle, f"found {found}, planar tree oracle {oracle}"


def criterion_3():
    for m in range(5):
        for n in range(5):
            a, b = doth_object(op_int(m), 1, 1), doth_object(op_int(n), 1, 1)
            got = sorted(as_monotone_map(f) for f in lambda_hom(a, b))
            oracle = monotone_maps(m, n)
            if len(oracle) != comb(m + n + 1, m + 1) or got != oracle:
                return False, f"m={m} n={n}: {len(got)} vs {len(oracle)}"
            f = check_surjectivity(op_int(m), op_int(n), 1, 1)
            if f is not None:
                return False, f"m={m} n={n}: {as_monotone_map(f)} not hit"
    return True, "25 hom-sets match, all hit"


def criterion_4():
    carriers = {(1, 1): Terminal((0, 1), 3), (1, 2): Terminal((1, 2), 3),
                (0, 2): Terminal((2, 2), 3)}
    sizes = []
    for kn, X in carriers.items():
        fails, counted = monad_law_failures(X, 6)
        if fails:
            return False, f"{kn}: {fails[0]}"
        sizes.append(f"{kn}:{counted}")
    return True, "no failures " + " ".join(sizes)


def criterion_5():
    s2, b3 = InclusionFamily("S", 2), InclusionFamily("B", 3)
    for name, C in (("walking arrow", walking_arrow()), ("3-poset", poset_category(3))):
        N = nerve(from_category(C), 4, 3)
        for fam, tag in ((s2, "S>=2"), (b3, "B>=3")):
            bad = fam.orthogonal_to(N, 4, 3)
            if bad is not None:
                return False, f"{name}: {tag} fails at {bad}"
        for m in range(5):
            got = len(N.cells(op_int(m)))
            want = nerve_oracle(C, m)
            if got != want:
                return False, f"{name}: optInt {m} has {got} cells, oracle {want}"
    return True, "orthogonal, counts match"


def criterion_6():
    total = 0
    for m in range(1, 5):
        for n in range(5):
            a, b = doth_object(op_int(m), 1, 1), doth_object(op_int(n), 1, 1)
            for f in lambda_hom(a, b):
                d = diagrammatic_witness(f)
                if d.morphism(1, 1) != f:
                    return False, f"witness {d} does not reproduce {as_monotone_map(f)}"
                total += 1
    return True, f"{total} witnesses verified"


def criterion_7():
    for op in (TerminalOperad(3), FreeBinaryOperad(3)):
        A = from_operad(op)
        A3, _ = dagger_algebra(A)
        back = transport_algebra(A.carrier, A3.comp, 2)
        diagrams = FreePasting(A.carrier, 4).diagrams()
        for d in diagrams:
            if back.comp(d) != A.comp(d):
                return False, f"{type(op).__name__}: round trip differs at {d}"
        ok, ok3 = check_laws(A, 4) is None, check_laws(A3, 4) is None
        if ok != ok3 or not ok:
            return False, f"{type(op).__name__}: laws {ok} vs flattened {ok3}"
    return True, "round trip identity, laws hold on both sides"


def criterion_8():
    count = 0
    for d in range(2, 5):
        for omega in enumerate_opetopes(d, 4):
            ok, report = check_pushout_lemmas(omega)
            if not ok:
                return False, f"{omega}: {report}"
            count += 1
    return True, f"{count} opetopes"


def criterion_9():
    count = 0
    for d in range(3, 5):
        for omega in enumerate_opetopes(d, 5):
            if omega.kind != "tree":
                continue
            first, steps = decompose(omega)
            where = dict(steps)
            t0, r0 = target(omega), None
            for order in grafting_orders(omega):
                out = first
                for x in order[1:]:
                    out = graft(out, x, where[x])
                if out is not omega:
                    return False, f"{omega}: grafting order {order} gives {out}"
                t, r = target_along(omega, order)
                if t is not t0 or (r0 is not None and r != r0):
                    return False, f"{omega}: contraction order {order} disagrees"
                r0 = r
                count += 1
    return True, f"{count} orders agree"


def criterion_10():
    xi = parse_opetope(XI)
    if target(xi) is not op_int(4):
        return False, f"target is {target(xi)}"
    f = doth_morphism(morphism(xi, (S(Address.empty(2)),)), 1, 1)
    g = doth_morphism(morphism(xi, (T,)), 1, 1)
    root = as_monotone_map(f)
    if root != (0, 1, 3, 4) or as_monotone_map(g) != (0, 1, 2, 3, 4):
        return False, f"s_[] gives {root}"
    return True, "target optInt 4, s_[] = (0, 1, 3, 4) skips 2"


CRITERIA = [
    (1, "opetope identities", criterion_1, 30),
    (2, "Catalan counts", criterion_2, 10),
    (3, "simplex reconstruction", criterion_3, 60),
    (4, "monad laws", criterion_4, 60),
    (5, "nerve orthogonality", criterion_5, 60),
    (6, "diagrammatic lemma", criterion_6, 60),
    (7, "trompe-l'oeil", criterion_7, 60),
    (8, "pushout lemmas", criterion_8, 30),
    (9, "grafting laws", criterion_9, 60),
    (10, "target example", criterion_10, 1),
]


def run(fn, limit):
    t = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t
    if ok and dt >= limit:
        ok, detail = False, f"{detail}; took {dt:.1f}s, limit {limit}s"
    return ok, detail, dt


def line(num, name, ok, detail, dt):
    return f"{'PASS' if ok else 'FAIL'} criterion {num} ({name}) {dt:.2f}s: {detail}"


@pytest.mark.parametrize("num,name,fn,limit", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(num, name, fn, limit, capsys):
    ok, detail, dt = run(fn, limit)
    with capsys.disabled():
        print("\n" + line(num, name, ok, detail, dt))
    assert ok, detail


if __name__ == "__main__":
    for num, name, fn, limit in CRITERIA:
        print(line(num, name, *run(fn, limit)), flush=True)
