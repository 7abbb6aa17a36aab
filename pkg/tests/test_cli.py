import json

import pytest

from ncomplex import cli
from ncomplex.fields import QQ
from ncomplex.ndiff import block_module


@pytest.fixture()
def module_file(tmp_path):
    E = block_module(QQ, 3, [3, 1])
    path = tmp_path / "mod.json"
    path.write_text(json.dumps(E.to_json()))
    return str(path)


def test_homology_command(module_file, capsys):
    assert cli.main(["homology", module_file]) == 0
    out = capsys.readouterr().out
    assert "dim_H" in out


def test_json_output_roundtrips(module_file, capsys):
    assert cli.main(["homology", module_file, "--format", "json"]) == 0
    out = capsys.readouterr().out
    obj = json.loads(out)
    assert obj["schema_version"] == 1
    # parse -> re-emit identical
    assert json.dumps(obj, sort_keys=True, default=str) + "\n" == out


def test_multiplicities_command(module_file, capsys):
    assert cli.main(["multiplicities", module_file]) == 0
    assert "multiplicities" in capsys.readouterr().out


def test_hexagon_command(module_file):
    assert cli.main(["hexagon", module_file]) == 0
    assert cli.main(["hexagon", module_file, "--ell", "1", "--m", "1"]) == 0


def test_poincare_csv(capsys):
    assert cli.main(
        ["poincare", "--N", "3", "--D", "2", "--k", "1", "--wmax", "3",
         "--format", "csv"]
    ) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "w,p,dim_H"


def test_spin_example(capsys):
    assert cli.main(["spin-example", "--spin", "1"]) == 0
    assert cli.main(
        ["spin-example", "--spin", "2", "--two-particle", "1,0,1,0"]
    ) == 0


def test_brs_example():
    assert cli.main(["brs", "--example", "abelian", "--deg-max", "4"]) == 0


def test_selftest_single(capsys):
    assert cli.main(["selftest", "--only", "13"]) == 0
    assert "criterion 13 [PASS]" in capsys.readouterr().out


def test_usage_error_bad_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["homology", str(bad)]) == 2
    assert "ncx:" in capsys.readouterr().err


def test_usage_error_invalid_module(tmp_path):
    # identity is not nilpotent: input validation failure, exit 2
    bad = tmp_path / "bad_mod.json"
    bad.write_text(json.dumps({
        "N": 3,
        "field": {"kind": "rationals"},
        "d": {"rows": 2, "cols": 2, "field": {"kind": "rationals"},
              "entries": [[0, 0, "1"], [1, 1, "1"]]},
    }))
    assert cli.main(["homology", str(bad)]) == 2


def test_usage_error_unknown_command():
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2


def test_math_failure_exit_code(monkeypatch, tmp_path, capsys):
    # force the math-failure path to check exit code 1 + witness artifact
    monkeypatch.chdir(tmp_path)

    def boom(args):
        raise cli.MathFailure({"command": "homology", "ok": False},
                              witness={"bad": 1})

    monkeypatch.setattr(cli, "cmd_homology", boom)
    parser_patch = cli.build_parser  # the parser binds cmd_homology at build

    def patched_parser():
        ap = parser_patch()
        return ap

    # rebuild with the patched handler wired in
    mod = tmp_path / "m.json"
    from ncomplex.fields import QQ
    from ncomplex.ndiff import block_module

    mod.write_text(json.dumps(block_module(QQ, 2, [2]).to_json()))
    rc = cli.main(["homology", str(mod)])
    assert rc == 1
    assert (tmp_path / "ncx-failure-homology.json").exists()
    art = json.loads((tmp_path / "ncx-failure-homology.json").read_text())
    assert art["witness"] == {"bad": 1}
