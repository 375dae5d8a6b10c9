import json

import pytest

from sturmlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_ok(capsys):
    code, out, _ = run(capsys, "--family", "roy", "--abc", "2,1,2",
                       "verify", "--up-to", "6")
    assert code == 0
    assert "instances  ok" in out
    assert "FAIL" not in out


def test_verify_json_deterministic(capsys, tmp_path):
    args = ["--family", "bl", "--ab", "1,2", "--out-dir", str(tmp_path),
            "--json", "verify", "--up-to", "5"]
    assert main(list(args)) == 0
    first = (tmp_path / "verify.json").read_text()
    assert main(list(args)) == 0
    assert (tmp_path / "verify.json").read_text() == first
    doc = json.loads(first)
    assert doc["schema"] == "sturmlab/1"
    assert doc["data"]["identities_ok"] is True
    capsys.readouterr()


def test_three_system_valid_and_invalid(capsys, tmp_path):
    code, out, _ = run(capsys, "--family", "bl", "--ab", "1,2",
                       "three-system", "--k", "3:8")
    assert code == 0 and "valid 3-system" in out
    code, out, _ = run(capsys, "--family", "bl", "--ab", "1,2",
                       "three-system", "--k", "3:8", "--force-delta", "0.5")
    assert code == 1 and "not a 3-system" in out


def test_three_system_outputs(capsys, tmp_path):
    code, _, _ = run(capsys, "--family", "bl", "--ab", "1,2",
                     "--out-dir", str(tmp_path), "--json", "--csv", "--svg",
                     "three-system", "--k", "3:8", "--samples", "3")
    assert code == 0
    csv = (tmp_path / "three_system.csv").read_text()
    assert csv.splitlines()[1] == "q,L1,L2,L3,P1,P2,P3,gray_flag"
    assert len(csv.splitlines()) == 2 + 3
    svg = (tmp_path / "three_system.svg").read_text()
    assert svg.startswith("<svg")
    doc = json.loads((tmp_path / "three_system.json").read_text())
    assert doc["data"]["valid"] is True


def test_exponents_table(capsys):
    code, out, _ = run(capsys, "--family", "bl", "--ab", "1,2", "exponents")
    assert code == 0
    assert "omega2_hat" in out and "2.618" in out


def test_xi_cross_check(capsys):
    code, out, _ = run(capsys, "--family", "bl", "--ab", "1,2",
                       "xi", "--digits", "30")
    assert code == 0
    assert "0.720484667632" in out
    assert "-> ok" in out


def test_gray(capsys):
    code, out, _ = run(capsys, "--family", "roy", "--abc", "2,1,2",
                       "gray", "--i", "4")
    assert code == 0
    assert "endpoints_ok=True" in out


def test_gray_non_fibonacci_program(capsys):
    code, out, err = run(capsys, "--family", "roy", "--abc", "2,1,2",
                         "--program", "prefix=[-1,1];period=[2]",
                         "gray", "--i", "4")
    assert code == 1


def test_spectrum_endpoints(capsys):
    code, out, _ = run(capsys, "spectrum", "--endpoints")
    assert code == 0
    assert "3.23606797749979" in out
    assert out.count("interval_") == 3


def test_spectrum_sweep(capsys):
    code, out, _ = run(capsys, "spectrum")
    assert code == 0
    assert "45 triples" in out


def test_usage_errors(capsys):
    code, _, err = run(capsys, "verify")
    assert code == 2 and "usage error" in err
    code, _, err = run(capsys, "--family", "roy", "--abc", "2,1", "verify")
    assert code == 2
    code, _, err = run(capsys, "--family", "bl", "--ab", "1,2",
                       "three-system", "--k", "3:4")
    assert code == 2 and "too narrow" in err


def test_seed_file_overridden_by_flags(capsys, tmp_path):
    seed = tmp_path / "seed.cfg"
    seed.write_text("family=roy\nabc=3,1,3\n# comment\n")
    code, out, _ = run(capsys, "--seed-file", str(seed), "verify", "--up-to", "5")
    assert code == 0
    # CLI flag wins over the file value
    code, out, _ = run(capsys, "--seed-file", str(seed),
                       "--family", "bl", "--ab", "1,2", "xi", "--digits", "20")
    assert code == 0 and "0.7204846676" in out
