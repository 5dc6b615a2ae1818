import json
from itertools import product

import pytest

from opk.address import Address
from opk.algebra import from_category, nerve, poset_category
from opk.ocat import boundary, representable, spine
from opk.opetope import AR, PT, enumerate_opetopes, op_int
from opk.opset import (
    Extended, InclusionFamily, Terminal, count_extensions, from_graph, homs,
    orthogonal, truncate,
)
from opk.presheaf import Presheaf, PresheafError, S, T

EDGES = {"f": ("a", "b"), "g": ("b", "c"), "h": ("a", "c"), "l": ("c", "c")}
GRAPH = from_graph(["a", "b", "c"], EDGES)


def paths(edges, vertices, m):
    """Brute-force count of edge paths of length m."""
    if m == 0:
        return len(vertices)
    return sum(1 for seq in product(edges, repeat=m)
               if all(edges[x][1] == edges[y][0] for x, y in zip(seq, seq[1:])))


@pytest.mark.parametrize("m", range(5))
def test_spine_maps_are_paths(m):
    assert sum(1 for _ in homs(spine(op_int(m)), GRAPH)) == paths(EDGES, "abc", m)


def test_maps_from_representables_are_cells():
    assert sum(1 for _ in homs(representable(AR), GRAPH)) == len(EDGES)
    assert sum(1 for _ in homs(representable(PT), GRAPH)) == 3


def test_maps_are_natural():
    for f in homs(spine(op_int(3)), GRAPH):
        assert f.naturality_violation() is None


def test_truncate():
    X = truncate(representable(op_int(2)), 1, 2)
    assert X.window == (1, 2)
    assert X.shapes(0) == []
    assert len(X.cells(AR)) == 3


def test_presheaf_checks_functoriality():
    # an arrow whose source is not a vertex
    with pytest.raises(PresheafError):
        Presheaf((0, 1), {PT: ["a"], AR: ["f"]}, {(AR, "f"): {S(Address.atom()): "z", T: "a"}})
    # a 2-cell whose faces disagree on a vertex
    cells = {PT: ["a", "b"], AR: ["f", "g"], op_int(1): ["u"]}
    faces = {(AR, "f"): {S(Address.atom()): "a", T: "b"},
             (AR, "g"): {S(Address.atom()): "b", T: "a"},
             (op_int(1), "u"): {S(Address.empty(1)): "f", T: "g"}}
    with pytest.raises(PresheafError, match="functoriality"):
        Presheaf((0, 2), cells, faces)


def test_json_round_trip():
    data = GRAPH.to_json()
    again = Presheaf.from_json(json.dumps(data))
    assert again.to_json() == data


def test_spine_inclusions_against_nerve():
    N = nerve(from_category(poset_category(2)), 3, 3)
    assert InclusionFamily("S", 2).orthogonal_to(N, 3, 3) is None
    assert InclusionFamily("B", 3).orthogonal_to(N, 3, 3) is None


def test_no_fillers_means_not_orthogonal():
    X = Extended(GRAPH, "zero", 2)
    assert InclusionFamily("S", 2).orthogonal_to(X, 2, 2) is op_int(0)


def test_terminal_is_orthogonal_to_everything():
    X = Terminal((0, 2), 3)
    for w in enumerate_opetopes(2, 3):
        assert orthogonal(boundary(w), representable(w), X)
        f = next(homs(spine(w), X))
        assert count_extensions(spine(w), representable(w), X, f) == 1


def test_extended_terminal_below():
    X = Extended(truncate(Terminal((0, 2), 2), 1, 2), "terminal", 0)
    assert X.window == (0, 2)
    assert X.cells(PT) == ("*",)
