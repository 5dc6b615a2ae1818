import json

import pytest

from opk.cli import main
from opk.ocat import parse_morphism
from opk.opetope import enumerate_opetopes, op_int, parse_opetope

XI = ("{ [] <- {[] <- ar,[*] <- ar,[**] <- ar}, [[*]] <- {[] <- ar,[*] <- ar},"
      " [[**]] <- {[] <- ar} }")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.splitlines(), err


def test_target_of_xi(capsys):
    code, out, _ = run(capsys, "target", XI)
    assert code == 0
    assert parse_opetope(out[0]) is op_int(4)


def test_validate(capsys):
    assert run(capsys, "validate", "degen(ar)")[0] == 0
    code, _, err = run(capsys, "validate", "{[] <- {[] <- ar}, [[*]] <- {[] <- ar}}")
    assert code == 2 and "tree closure" in err


def test_parse_error_has_position(capsys):
    code, _, err = run(capsys, "target", "{[] <- ar")
    assert code == 1 and "position" in err


def test_bad_usage_exits_one(capsys):
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["enum", "-d", "x"])
    assert e.value.code == 1


def test_enum_lines_reparse(capsys):
    code, out, _ = run(capsys, "enum", "-d", "3", "-n", "4")
    assert code == 0
    assert [parse_opetope(line) for line in out] == enumerate_opetopes(3, 4)
    # eight non-degenerate 3-opetopes of size at most 4, and degen(ar)
    assert len(out) == 9


def test_source_graft_subst(capsys):
    assert run(capsys, "source", XI, "-a", "[[*]]")[1] == [str(op_int(2))]
    assert run(capsys, "graft", "{[] <- ar}", "{[] <- ar}", "-l", "[*]")[1] == [str(op_int(2))]
    code, out, _ = run(capsys, "subst", "{[] <- ar, [*] <- ar}", "{[] <- ar, [*] <- ar}", "-p", "[*]")
    assert parse_opetope(out[0]) is op_int(3)
    assert run(capsys, "source", XI, "-a", "[[***]]")[0] == 1
    assert run(capsys, "source", XI)[0] == 1


def test_hom_paths_reparse(capsys):
    code, out, _ = run(capsys, "hom", "ar", "{[] <- ar, [*] <- ar}")
    assert code == 0 and len(out) == 3
    for line in out:
        parse_morphism(line, op_int(2))


def test_lambda_hom(capsys):
    code, out, _ = run(capsys, "hom", "{[] <- ar}", "{[] <- ar, [*] <- ar}", "-k", "1", "--n", "1")
    assert code == 0
    assert out.count("") == 5  # six morphisms, blank-line separated


def test_cells_and_spine(capsys):
    code, out, _ = run(capsys, "cells", "{[] <- ar, [*] <- ar}")
    assert len(out) == 7
    assert len(run(capsys, "cells", "--boundary", "{[] <- ar, [*] <- ar}")[1]) == 6
    assert len(run(capsys, "spine", "{[] <- ar, [*] <- ar}")[1]) == 5


def test_dagger(capsys):
    code, out, _ = run(capsys, "dagger", XI)
    assert parse_opetope(out[0]) is parse_opetope(XI)
    assert out[1:] == ["[] -> []", "[[*]] -> [[*]]", "[[**]] -> [[**]]"]


def test_doth(capsys):
    code, out, _ = run(capsys, "doth", XI, "s[]", "-k", "1", "--n", "1")
    # header, three arrows, four vertices
    assert code == 0 and len(out) == 1 + 3 + 4


def test_witness(capsys):
    code, out, _ = run(capsys, "witness", "{[] <- ar}", "{[] <- ar, [*] <- ar}", "-k", "1", "--n", "1")
    assert code == 0 and len(out) == 6
    for line in out:
        xi, _ = line.split("\t")
        parse_opetope(xi)


def test_nerve_and_laws(capsys, tmp_path):
    code, out, _ = run(capsys, "nerve", "--example", "walking-arrow", "-d", "2")
    counts = dict(line.split("\t") for line in out)
    assert counts[str(op_int(3))] == "5"
    assert run(capsys, "check-laws", "--example", "poset:3")[0] == 0
    bad = {"category": {"objects": ["o"], "arrows": {"e": ["o", "o"], "a": ["o", "o"], "b": ["o", "o"]},
                        "identities": {"o": "e"},
                        "compose": [["e", "e", "e"], ["e", "a", "a"], ["e", "b", "b"],
                                    ["a", "e", "a"], ["b", "e", "b"], ["a", "a", "b"],
                                    ["a", "b", "a"], ["b", "a", "b"], ["b", "b", "b"]]}}
    path = tmp_path / "magma.json"
    path.write_text(json.dumps(bad))
    code, _, err = run(capsys, "check-laws", "-f", str(path), "-b", "5")
    assert code == 2 and "associativity" in err
    assert run(capsys, "check-laws", "--example", "nope")[0] == 1


def test_json_output(capsys):
    code, out, _ = run(capsys, "--json", "target", XI)
    assert json.loads("\n".join(out)) == {"target": str(op_int(4))}
    code, out, _ = run(capsys, "dagger", "--json", XI)
    assert json.loads("\n".join(out))["a_omega"]["[[*]]"] == "[[*]]"


def test_pushouts(capsys):
    assert run(capsys, "check-pushouts", XI) == (0, ["ok"], "")
