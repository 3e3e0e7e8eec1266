import csv
import json
import math

from prc.certify import WERMER_F
from prc.cli import main


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _wermer_manifest(r=0.3, options=None):
    m = {
        "kind": "graph",
        "n": 1,
        "functions": [WERMER_F],
        "compact": {"region": [{"shape": "disc", "center": [0, 0], "radius": r}]},
    }
    if options:
        m["options"] = options
    return m


def _pluriharmonic_manifest():
    return {
        "kind": "graph",
        "n": 1,
        "functions": ["z1 + conj(z1)"],
        "compact": {"region": [{"shape": "disc", "center": [0, 0], "radius": 1.0}]},
    }


def _holomorphic_manifest():
    return {
        "kind": "graph",
        "n": 1,
        "functions": ["z1^2"],
        "compact": {"region": [{"shape": "box", "re": [-1, 1], "im": [-1, 1]}]},
    }


# ---------------------------------------------------------------------------
# totally-real
# ---------------------------------------------------------------------------

def test_totally_real_wermer_grid(tmp_path, capsys):
    path = _write(tmp_path, "w.json", _wermer_manifest(1.0))
    out = tmp_path / "report.json"
    code = main(["totally-real", path, "--grid", "41", "--out", str(out),
                 "--threads", "1"])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["all_totally_real"] is True
    assert rep["points"] == 41 * 41


def test_totally_real_holomorphic_fails(tmp_path):
    path = _write(tmp_path, "h.json", _holomorphic_manifest())
    out = tmp_path / "report.json"
    code = main(["totally-real", path, "--grid", "5", "--out", str(out),
                 "--threads", "1"])
    assert code == 3
    rep = json.loads(out.read_text())
    assert rep["all_totally_real"] is False
    assert "witness" in rep


def test_totally_real_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["totally-real", str(p), "--threads", "1"]) == 2


def test_unknown_manifest_key_exit_2(tmp_path):
    m = _wermer_manifest()
    m["surprise"] = 1
    path = _write(tmp_path, "w.json", m)
    assert main(["certify", path, "--threads", "1"]) == 2


# ---------------------------------------------------------------------------
# tube-profile
# ---------------------------------------------------------------------------

def test_tube_profile_wermer(tmp_path):
    path = _write(tmp_path, "w.json", _wermer_manifest(1.0))
    out = tmp_path / "profile.csv"
    code = main(["tube-profile", path, "--ray-from", "0,0", "--ray-to", "1,0",
                 "--steps", "101", "--out", str(out), "--threads", "1"])
    assert code == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 101
    last = rows[-1]
    assert abs(float(last["m"]) - 5.0) <= 1e-9
    assert abs(float(last["L"]) - 2 * math.sqrt(10)) <= 1e-9
    assert abs(float(last["radius"]) - 5 / (4 * math.sqrt(10))) <= 1e-9
    assert rows[0]["radius"] == "inf"  # L(0) = 0


def test_tube_profile_pluriharmonic_all_inf(tmp_path):
    path = _write(tmp_path, "p.json", _pluriharmonic_manifest())
    out = tmp_path / "profile.csv"
    assert main(["tube-profile", path, "--ray-from", "0,0", "--ray-to", "1,1",
                 "--steps", "11", "--out", str(out), "--threads", "1"]) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert all(r["radius"] == "inf" for r in rows)


def test_tube_profile_bad_ray(tmp_path):
    path = _write(tmp_path, "w.json", _wermer_manifest())
    assert main(["tube-profile", path, "--ray-from", "0", "--ray-to", "1,0",
                 "--threads", "1"]) == 2


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------

def test_certify_wermer_03_exit_0(tmp_path):
    path = _write(tmp_path, "w.json",
                  _wermer_manifest(0.3, options={"max_depth": 30}))
    out = tmp_path / "cert.json"
    code = main(["certify", path, "--out", str(out), "--threads", "1"])
    assert code == 0
    cert = json.loads(out.read_text())
    assert cert["verdict"] == "PASS"
    assert cert["problem_hash"]
    assert cert["options"]["max_depth"] == 30


def test_certify_wermer_10_exit_3(tmp_path):
    path = _write(tmp_path, "w.json",
                  _wermer_manifest(1.0, options={"max_depth": 30}))
    out = tmp_path / "cert.json"
    code = main(["certify", path, "--out", str(out), "--threads", "1"])
    assert code == 3
    cert = json.loads(out.read_text())
    assert cert["verdict"] == "FAIL"
    assert cert["witness"] is not None


def test_certify_depth_zero_inconclusive_exit_4(tmp_path):
    path = _write(tmp_path, "w.json", _wermer_manifest(0.3))
    code = main(["certify", path, "--max-depth", "0", "--out",
                 str(tmp_path / "c.json"), "--threads", "1"])
    assert code == 4


def test_certify_example2_exit_0(tmp_path):
    m = {
        "kind": "submersion", "n": 2, "k": 2,
        "functions": ["Im(z1) - 0.05*(Re(z1)^2 + Re(z2)^3)",
                      "Im(z2) - 0.05*(Re(z2)^2 + Re(z1)^3)"],
        "compact": {"cap": {"center": [[0, 0], [0, 0]], "radii": [1, 1]}},
        "options": {"max_depth": 30, "inflation": 0.04},
    }
    path = _write(tmp_path, "e2.json", m)
    out = tmp_path / "cert.json"
    assert main(["certify", path, "--out", str(out), "--threads", "1"]) == 0
    cert = json.loads(out.read_text())
    assert cert["verdict"] == "PASS"


# ---------------------------------------------------------------------------
# hull-probe
# ---------------------------------------------------------------------------

def test_hull_probe_circle_not_separated(tmp_path):
    m = {
        "kind": "submersion", "n": 1, "k": 1,
        "functions": ["z1*conj(z1) - 1"],
        "compact": {"cap": {"center": [[0, 0]], "radii": [1.2]}},
    }
    path = _write(tmp_path, "circ.json", m)
    out = tmp_path / "probe.json"
    code = main(["hull-probe", path, "--q", "0,0", "--degree", "4",
                 "--density", "24", "--out", str(out), "--threads", "1"])
    assert code == 0
    rep = json.loads(out.read_text())["hull_probe"]
    assert rep["separated"] is False
    assert rep["evidence_only"] is True


def test_hull_probe_wermer_far_point(tmp_path):
    path = _write(tmp_path, "w.json", _wermer_manifest(1.0))
    out = tmp_path / "probe.json"
    code = main(["hull-probe", path, "--q", "0,0,0,2", "--degree", "2",
                 "--density", "24", "--out", str(out), "--threads", "1"])
    assert code == 0
    rep = json.loads(out.read_text())["hull_probe"]
    assert rep["separated"] is True
    assert rep["ratio"] >= 1.5
    assert rep["fragile"] is False


# ---------------------------------------------------------------------------
# reproduce
# ---------------------------------------------------------------------------

def test_reproduce_graph_over_r2_cli(tmp_path):
    out = tmp_path / "rep.json"
    code = main(["reproduce", "graph_over_r2", "--out", str(out),
                 "--threads", "1"])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["certification"]["verdict"] == "PASS"


def test_stdout_default(tmp_path, capsys):
    path = _write(tmp_path, "w.json", _wermer_manifest(1.0))
    code = main(["tube-profile", path, "--ray-from", "0,0", "--ray-to", "0.5,0",
                 "--steps", "3", "--threads", "1"])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("re_z1,im_z1,m,L,radius")


def test_certify_output_independent_of_threads(tmp_path):
    m = {
        "kind": "submersion", "n": 2, "k": 2,
        "functions": ["Im(z1) - 0.05*(Re(z1)^2 + Re(z2)^3)",
                      "Im(z2) - 0.05*(Re(z2)^2 + Re(z1)^3)"],
        "compact": {"cap": {"center": [[0, 0], [0, 0]], "radii": [1, 1]}},
        "options": {"max_depth": 30, "inflation": 0.04},
    }
    path = _write(tmp_path, "e2.json", m)
    out1, out4 = tmp_path / "c1.json", tmp_path / "c4.json"
    assert main(["certify", path, "--out", str(out1), "--threads", "1"]) == 0
    assert main(["certify", path, "--out", str(out4), "--threads", "4"]) == 0
    assert out1.read_bytes() == out4.read_bytes()


def test_certify_byte_identical_reruns(tmp_path):
    path = _write(tmp_path, "w.json", _wermer_manifest(1.0))
    out1, out2 = tmp_path / "c1.json", tmp_path / "c2.json"
    assert main(["certify", path, "--out", str(out1), "--seed", "7",
                 "--threads", "1"]) == 3
    assert main(["certify", path, "--out", str(out2), "--seed", "7",
                 "--threads", "1"]) == 3
    assert out1.read_bytes() == out2.read_bytes()


def test_prc_log_env(tmp_path, monkeypatch):
    monkeypatch.setenv("PRC_LOG", "debug")
    path = _write(tmp_path, "w.json", _wermer_manifest(1.0))
    assert main(["tube-profile", path, "--ray-from", "0,0", "--ray-to", "1,0",
                 "--steps", "2", "--out", str(tmp_path / "p.csv"),
                 "--threads", "1"]) == 0
