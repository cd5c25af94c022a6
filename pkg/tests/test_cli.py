import json
import os
import subprocess
import sys

import pytest

from fgmsc.cli import TRACE_HEADER, main


def test_run_manifest(tmp_path):
    d = tmp_path / "d"
    assert main(["synth", "blobs:10x2x2", "--seed", "42", "--out", str(d)]) == 0
    out = tmp_path / "r.json"
    rc = main(["run", "--manifest", str(d / "manifest.json"), "--alpha", "0.01",
               "--lambda", "1", "--eta", "10", "--m", "10", "--iters", "10",
               "--seed", "42", "--out", str(out)])
    assert rc == 0
    rec = json.loads(out.read_text())
    assert set(rec["metrics"]) == {"acc", "nmi", "ari"}
    assert rec["params"]["lam"] == 1.0 and rec["seed"] == 42
    assert "version" in rec and rec["nmi_normalization"] == "max"
    assert "timing" not in rec
    assert set(json.loads((tmp_path / "r.json.timing.json").read_text())) >= {"total"}


def test_trace_file(tmp_path):
    trace = tmp_path / "t.csv"
    assert main(["run", "--synth", "blobs:30x2x2", "--seed", "7",
                 "--trace", str(trace)]) == 0
    lines = trace.read_text().splitlines()
    assert lines[0] == "iter,total,recon,graph_reg,l1,fusion,spectral"
    assert lines[0].split(",") == list(TRACE_HEADER)
    assert 1 <= len(lines) - 1 <= 10
    totals = [float(x.split(",")[1]) for x in lines[1:]]
    assert all(b <= a * (1 + 1e-6) for a, b in zip(totals, totals[1:]))


def test_exports(tmp_path):
    g, f = tmp_path / "g.csv", tmp_path / "f.csv"
    lab = tmp_path / "y.txt"
    assert main(["run", "--synth", "toy7", "--export-graph", str(g),
                 "--export-embedding", str(f), "--labels-out", str(lab)]) == 0
    assert g.read_text().startswith("i,j,w\n")
    assert len(f.read_text().splitlines()) == 7
    assert len(lab.read_text().split()) == 7


def test_missing_source(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["synth", "foo", "--out", "x"],
    ["run", "--synth", "blobs:3x2"],
    ["run", "--synth", "toy7", "--alpha", "-1"],
])
def test_bad_flags(argv, tmp_path):
    argv = [a if a != "x" else str(tmp_path / "x") for a in argv]
    assert main(argv) == 2


def test_bad_variant():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--synth", "toy7", "--variant", "bogus"])
    assert exc.value.code == 2


def test_data_errors(tmp_path):
    assert main(["run", "--manifest", str(tmp_path / "nope.json")]) == 3
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["synth", "toy7", "--out", str(blocker / "sub")]) == 3


def test_synth_toy7(tmp_path):
    assert main(["synth", "toy7", "--out", str(tmp_path)]) == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert len(man["views"]) == 4
    for v in man["views"]:
        assert len((tmp_path / v["path"]).read_text().splitlines()) == 7


def test_synth_deterministic(tmp_path):
    args = ["blobs:30x2x2", "--sep", "10", "--noise", "1", "--seed", "42"]
    main(["synth", *args, "--out", str(tmp_path / "a")])
    main(["synth", *args, "--out", str(tmp_path / "b")])
    for name in os.listdir(tmp_path / "a"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def _labels(path, values):
    path.write_text("".join(f"{v}\n" for v in values))
    return str(path)


def test_eval(tmp_path, capsys):
    t = _labels(tmp_path / "t.txt", [0, 0, 1, 1])
    assert main(["eval", t, t]) == 0
    assert json.loads(capsys.readouterr().out) == {"acc": 1.0, "nmi": 1.0, "ari": 1.0}
    p = _labels(tmp_path / "p.txt", [1, 1, 0, 0])
    main(["eval", t, p])
    assert json.loads(capsys.readouterr().out)["acc"] == 1.0
    q = _labels(tmp_path / "q.txt", [0, 1, 0, 1])
    main(["eval", t, q])
    assert json.loads(capsys.readouterr().out)["acc"] == 0.5
    short = _labels(tmp_path / "s.txt", [0, 1])
    assert main(["eval", t, short]) == 3


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fgmsc", "run", "--synth", "toy7"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert set(json.loads(proc.stdout)["metrics"]) == {"acc", "nmi", "ari"}
