import json

import pytest

from matchtor.cli import (
    EXIT_BUDGET,
    EXIT_INVARIANT,
    EXIT_IO,
    EXIT_OK,
    EXIT_PARSE,
    main,
    parse_blocks,
    parse_degrees,
    parse_primes,
    parse_signature,
)
from matchtor.combinatorics import Charge


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_signature_examples():
    sig = parse_signature("2+,3-,3-,3-,3-")
    assert sig.sizes == (2, 3, 3, 3, 3)
    assert sig.charges == (Charge.POS,) + (Charge.NEG,) * 4
    assert parse_signature("1+").sizes == (1,)
    with pytest.raises(ValueError):
        parse_signature("2+,0-")


@pytest.mark.parametrize("text", ["2+,3-,3-,3-,3-", "1+", "2-,2-,2-,1-", "12+,1-"])
def test_signature_descriptor_round_trip(text):
    assert str(parse_signature(text)) == text


def test_parse_blocks_examples():
    sig = parse_signature("2+,3-,3-,3-,3-")
    assert str(parse_blocks("{1}{2,3,4,5}", sig)) == "{1}{2,3,4,5}"
    assert parse_blocks("{1}{2}{3}", parse_signature("1+,2-,2-")).mu == (1, 1, 1)
    for text, s in [("{1,2}", "2+,3-"), ("{1}{1,2}", "2+,2+"), ("{1}", "2+,2+"),
                    ("{1}{2", "2+,2+"), ("1,2", "2+,2+"), ("{1}{x}", "2+,2+")]:
        with pytest.raises(ValueError):
            parse_blocks(text, parse_signature(s))


def test_small_parsers():
    assert parse_degrees("2..4") == (2, 4)
    assert parse_degrees("3") == (3, 3)
    assert parse_degrees("-1..0") == (-1, 0)
    assert parse_primes("3,5,7") == (3, 5, 7)
    for bad in ["4..2", "a..b"]:
        with pytest.raises(ValueError):
            parse_degrees(bad)
    with pytest.raises(ValueError):
        parse_primes("3,4")


def test_build_homology_verify_flow(tmp_path, capsys):
    path = tmp_path / "c.txt"
    code, _, _ = run(capsys, "build", "--kind", "reduced", "--sig", "2-,2-,2-,1-", "--out", str(path))
    assert code == EXIT_OK and path.read_text().startswith("CHAINCOMPLEX v1")
    code, out, _ = run(capsys, "homology", "--in", str(path), "--ring", "Z")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["homology"]["1"]["text"] == "Z_3"
    assert rep["homology"]["2"]["text"] == "Z"
    code, out, _ = run(capsys, "verify", "--in", str(path))
    assert code == EXIT_OK and "FAIL" not in out


def test_decompose_table(capsys):
    code, out, _ = run(capsys, "decompose", "--n", "7", "--r", "3")
    assert code == EXIT_OK
    factors = [ln.split("|")[-2].strip() for ln in out.splitlines()
               if ln.startswith("| ") and ln[2] in "+-"]
    assert factors == ["1", "3", "3", "1"]
    assert "| total | Z_3 | Z^20 | |" in out


def test_report_and_modular_homology(capsys):
    code, out, _ = run(capsys, "report", "--kind", "matching", "--n", "7")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["consistent"]
    assert rep["modular"]["1"]["mod_p_ranks"]["3"] == 1
    code, out, _ = run(capsys, "homology", "--kind", "matching", "--n", "7", "--primes", "3,5",
                       "--format", "markdown")
    assert code == EXIT_OK and "| 1 | 0 | 1 | 0 |" in out


def test_wreath_and_lie_kinds(capsys):
    code, out, _ = run(capsys, "homology", "--kind", "wreath", "--sig", "2+,3-,3-,3-,3-",
                       "--blocks", "{1}{2,3,4,5}")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["homology"]["4"]["text"] == "Z_5"
    assert rep["group_order"] == 62208
    assert rep["homology"]["4"]["torsion"][0]["ambient_order_bound"] == 5
    code, out, _ = run(capsys, "build", "--kind", "lie", "--sig", "1,2,2,2", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["chain_ranks"]


@pytest.mark.parametrize("cmd", [
    ["build", "--kind", "wreath", "--sig", "2+,3-,3-,3-,3-", "--blocks", "{1}{2,3,4,5}"],
    ["homology", "--kind", "reduced", "--sig", "2-,2-,2-,2-,1-"],
    ["decompose", "--n", "8", "--r", "2", "--format", "json"],
    ["report", "--kind", "matching", "--n", "6", "--format", "markdown"],
])
def test_outputs_are_byte_identical(tmp_path, capsys, cmd):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(cmd + ["--out", str(a)]) == EXIT_OK
    assert main(cmd + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_emitted_files_reimport_and_verify(tmp_path, capsys):
    for sig in ["2+,2-,1+", "1-,2-,2-,2-", "2+,3-,3-"]:
        path = tmp_path / "x.txt"
        assert main(["build", "--kind", "delta", "--sig", sig, "--out", str(path)]) == EXIT_OK
        again = tmp_path / "y.txt"
        assert main(["build", "--in", str(path), "--out", str(again)]) == EXIT_OK
        assert path.read_bytes() == again.read_bytes()
        assert main(["verify", "--in", str(path)]) == EXIT_OK


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "build", "--kind", "reduced", "--sig", "2+,0-")[0] == EXIT_PARSE
    assert run(capsys, "build", "--kind", "reduced")[0] == EXIT_PARSE
    assert run(capsys, "homology", "--kind", "matching", "--n", "8", "--max-generators", "10")[0] == EXIT_BUDGET
    assert run(capsys, "homology", "--kind", "matching", "--n", "8", "--max-memory-gib", "1e-9")[0] == EXIT_BUDGET
    assert run(capsys, "decompose", "--n", "7", "--r", "3", "--max-generators", "3")[0] == EXIT_BUDGET
    assert run(capsys, "homology", "--in", str(tmp_path / "missing.txt"))[0] == EXIT_IO

    good = tmp_path / "m.txt"
    main(["build", "--kind", "matching", "--n", "5", "--out", str(good)])
    capsys.readouterr()
    lines = good.read_text().splitlines()
    k = next(i for i, ln in enumerate(lines) if ln.startswith("entry 1 "))
    parts = lines[k].split()
    parts[-1] = str(int(parts[-1]) + 2)
    lines[k] = " ".join(parts)
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "verify", "--in", str(bad))
    assert code == EXIT_INVARIANT and "FAIL d_squared_zero" in out
    assert run(capsys, "homology", "--in", str(bad))[0] == EXIT_INVARIANT
    assert len({EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_INVARIANT, EXIT_IO}) == 5
