import csv
import json

import pytest

from imforge.cli import main


def test_gen_and_spectral(tmp_path):
    gpath = tmp_path / "g.txt"
    rpath = tmp_path / "r.json"
    assert main(["gen", "--kind", "paley", "--q", "13", "--out", str(gpath)]) == 0
    assert main(["spectral", "--graph", str(gpath), "--out", str(rpath)]) == 0
    report = json.loads(rpath.read_text())
    assert report["n"] == 13 and report["d"] == 6
    assert abs(report["lambda"] - 2.302776) < 1e-5


def test_immerse_dense_end_to_end(tmp_path):
    cert = tmp_path / "c.json"
    rep = tmp_path / "v.json"
    metrics = tmp_path / "m.csv"
    code = main(["immerse-dense", "--q", "101", "--eta", "0.45",
                 "--seed", "7", "--out", str(cert), "--report", str(rep),
                 "--metrics", str(metrics)])
    assert code == 0
    assert json.loads(rep.read_text())["valid"]
    rows = list(csv.DictReader(metrics.open()))
    assert len(rows) == 1
    assert rows[0]["command"] == "immerse-dense"
    assert int(rows[0]["achieved_order"]) > 0


def test_verify_command_exit_codes(tmp_path):
    gpath = tmp_path / "g.txt"
    cpath = tmp_path / "c.json"
    main(["gen", "--kind", "paley", "--q", "13", "--out", str(gpath)])
    cert = {"kind": "immersion", "branch": [0, 1],
            "pairs": [{"i": 0, "j": 1, "path": [0, 1]}], "ell": None}
    cpath.write_text(json.dumps(cert))
    assert main(["verify", "--graph", str(gpath), "--cert", str(cpath)]) == 0
    broken = dict(cert, pairs=[{"i": 0, "j": 1, "path": [0, 0]}])
    cpath.write_text(json.dumps(broken))
    assert main(["verify", "--graph", str(gpath), "--cert", str(cpath)]) == 1


def test_cli_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["immerse-dense"])  # missing --eta
    assert exc.value.code == 2


def test_cli_config_error_exit_2(tmp_path):
    assert main(["spectral"]) == 2  # no graph source given


def test_subdivide_and_k3(tmp_path):
    cert = tmp_path / "s.json"
    code = main(["subdivide", "--n", "400", "--d", "12", "--eta", "0.5",
                 "--seed", "3", "--out", str(cert)])
    assert code == 0
    obj = json.loads(cert.read_text())
    assert obj["kind"] == "subdivision"

    k3cert = tmp_path / "k3.json"
    code = main(["k3-bipartite", "--n1", "64", "--n2", "384", "--p", "2",
                 "--seed", "1", "--out", str(k3cert)])
    assert code == 0
    obj = json.loads(k3cert.read_text())
    assert obj["ell"] == 3


def test_nibble_command(tmp_path):
    gpath = tmp_path / "g.txt"
    gpath.write_text("6 12\n0 2\n0 3\n0 4\n0 5\n1 2\n1 3\n1 4\n1 5\n2 4\n2 5\n3 4\n3 5\n")
    out = tmp_path / "tri.json"
    dump = tmp_path / "h.txt"
    code = main(["nibble", "--graph", str(gpath), "--parts", "2,2,2",
                 "--seed", "0", "--out", str(out), "--dump", str(dump)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert len(payload["triangles"]) == 4
    head = dump.read_text().splitlines()[0]
    assert head == "12 8"


def test_sweep_rows_and_determinism(tmp_path):
    m1 = tmp_path / "a.csv"
    m2 = tmp_path / "b.csv"
    argv = ["sweep", "--command-name", "immerse-dense", "--q", "101",
            "--eta-grid", "0.4,0.45", "--seed", "5"]
    assert main(argv + ["--metrics", str(m1)]) == 0
    assert main(argv + ["--metrics", str(m2)]) == 0
    rows1 = list(csv.DictReader(m1.open()))
    rows2 = list(csv.DictReader(m2.open()))
    assert len(rows1) == 2
    strip = lambda rows: [{k: v for k, v in r.items() if k != "seconds"} for r in rows]
    assert strip(rows1) == strip(rows2)


def test_gen_deterministic_bytes(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    main(["gen", "--kind", "random-regular", "--n", "60", "--d", "5",
          "--seed", "9", "--out", str(a)])
    main(["gen", "--kind", "random-regular", "--n", "60", "--d", "5",
          "--seed", "9", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_threads_env_validation(monkeypatch, tmp_path):
    monkeypatch.setenv("IMFORGE_THREADS", "zero")
    assert main(["spectral", "--q", "13"]) == 2
    monkeypatch.setenv("IMFORGE_THREADS", "2")
    assert main(["spectral", "--q", "13"]) == 0
