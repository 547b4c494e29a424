import json

import pytest

from ncsym import cache as cache_mod
from ncsym import harness
from ncsym.cli import main
from ncsym.instances import ConfigError, config_from_dict, parse_config, preset


def test_presets():
    k3 = preset("kronecker 3")
    assert k3.dims == (3, 3) and k3.mn == 9 and not k3.degenerate and k3.wild
    fe = preset("field-extension p=2 d=4")
    assert fe.dims == (1, 4) and fe.mn == 4 and not fe.degenerate
    k1 = preset("kronecker1")
    assert k1.degenerate and k1.mn == 1
    assert preset("kronecker2 p=0").bimodule.k.p == 0
    assert preset("field-extension p=3 poly=1,2,0,1").dims == (1, 3)


def test_content_hash():
    a, b = preset("kronecker2"), preset("kronecker 2")
    assert a.content_hash == b.content_hash
    assert a.content_hash != preset("kronecker3").content_hash
    c = preset("kronecker2")
    c.seed = 99
    assert c.content_hash == a.content_hash


@pytest.mark.parametrize("data,msg", [
    ({"preset": "frobnicate"}, "unknown preset"),
    ({"preset": "field-extension p=2 poly=1,0,1"}, "reducible"),
    ({"D0": {"char": 7}, "bimodule": {}}, "missing key 'D1'"),
    ({"version": 9, "preset": "kronecker2"}, "unsupported config version"),
    ({"D0": {"char": 7}, "D1": {"char": 7},
      "bimodule": {"dim": 2, "left_action": [[1, 0], [0, 1]], "right_action": [[0, 0], [0, 0]]}},
     "action axioms fail"),
    ({"D0": {"char": 2, "poly": [1, 1, 1]}, "D1": {"char": 2, "poly": [1, 1, 0, 1]},
      "bimodule": {"dim": 6, "left_action": [[0] * 6] * 6, "right_action": [[0] * 6] * 6}, "case": 2},
     "action axioms fail"),
    ({"D0": {"char": 7}, "D1": {"char": 5}, "bimodule": {}}, "same characteristic"),
    ([1, 2], "JSON object"),
])
def test_config_errors(data, msg):
    with pytest.raises(ConfigError, match=msg):
        config_from_dict(data)


def test_config_file_roundtrip(tmp_path):
    fe = preset("field-extension p=2 d=4")
    path = tmp_path / "fe.json"
    path.write_text(json.dumps({"case": 2, "bimodule": fe.bimodule.to_dict(), "seed": 4}))
    cfg = parse_config(path)
    assert cfg.content_hash == fe.content_hash and cfg.seed == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError, match="malformed JSON"):
        parse_config(bad)
    with pytest.raises(ConfigError, match="does not exist"):
        parse_config(tmp_path / "missing.json")


def test_dims_verb(capsys, tmp_path):
    assert main(["dims", "--preset", "kronecker2", "--jmax", "10", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.strip() == "1,2,3,4,5,6,7,8,9,10,11"
    assert (tmp_path / "dims-kronecker2.csv").read_text() == out


def test_dims_verb_fe(capsys):
    assert main(["dims", "--preset", "field-extension p=2 d=4", "--jmax", "6", "--rows", "2"]) == 0
    assert capsys.readouterr().out.splitlines() == ["4,4,12,8,20,12,28", "1,4,3,8,5,12,7"]


def test_usage_errors(capsys):
    assert main(["dims"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["dims", "--preset", "kronecker0"]) == 2
    assert main(["hilbert", "Q3", "--preset", "kronecker2"]) == 2
    assert main(["verify", "euler", "--config", "/nonexistent.json"]) == 2


def test_degenerate_expected_failure(capsys):
    assert main(["verify", "euler", "--preset", "kronecker1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "expected-failure"
    assert report["instance"]["degenerate"] is True
    assert report["checks"][0]["status"] == "expected-failure"


def test_module_and_hilbert_verbs(capsys):
    assert main(["module", "apply-omega", "L0", "--preset", "kronecker2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["output"] == [{"degree": 1, "kdims": [1, 0]}]
    assert main(["module", "apply-omega", "L0", "--power", "-1", "--preset", "kronecker2"]) == 0
    assert json.loads(capsys.readouterr().out)["output"] == [{"degree": 0, "kdims": [3, 4]}]
    assert main(["hilbert", "R0", "--preset", "kronecker2", "--window", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["h"] == {str(i): 1 for i in range(-2, 3)}


def _verify_all(cache_dir, seed=0):
    ses = harness.Session(preset("kronecker2"), seed=seed, cache_dir=cache_dir)
    return ses.cache_status, harness.verify(ses, "all")


def test_verify_all_reproducible_and_cache_neutral(tmp_path):
    s1, cold1 = _verify_all(tmp_path / "a")
    s2, cold2 = _verify_all(tmp_path / "b")
    s3, warm = _verify_all(tmp_path / "a")
    assert (s1, s2, s3) == ("miss", "miss", "hit")
    assert cold1["status"] == "pass"
    strip = [harness.dumps(harness.strip_timing(r)) for r in (cold1, cold2, warm)]
    assert strip[0] == strip[1] == strip[2]


def _flip(entry):
    step = entry["step"]
    step[0][0] = (int(step[0][0]) + 1) % 7


def test_corrupt_cache_is_detected(tmp_path):
    cfg = preset("kronecker2")
    _verify_all(tmp_path)
    path = cache_mod.cache_path(cfg.content_hash, tmp_path)
    pristine = path.read_text()

    # any altered basis trips the checksum
    data = json.loads(pristine)
    _flip(data["pieces"][sorted(data["pieces"])[-1]])
    path.write_text(json.dumps(data))
    status, rep = _verify_all(tmp_path)
    assert status == "corrupt" and rep["status"] == "pass"

    # wrong data under a recomputed checksum: the re-verification rebuilds
    # the lowest loaded piece and compares
    data = json.loads(pristine)
    low = min(data["pieces"], key=lambda k: (lambda i, j: (j - i, i))(*map(int, k.split(","))))
    _flip(data["pieces"][low])
    data["checksum"] = cache_mod._checksum(data["pieces"])
    path.write_text(json.dumps(data))
    assert _verify_all(tmp_path)[0] == "corrupt"

    path.write_text("not json")
    assert _verify_all(tmp_path)[0] == "corrupt"
    assert _verify_all(tmp_path)[0] == "hit"


def test_cache_dir_resolution(tmp_path, monkeypatch):
    monkeypatch.setenv("NCSYM_CACHE", str(tmp_path / "env"))
    assert cache_mod.cache_dir() == tmp_path / "env"
    assert cache_mod.cache_dir(tmp_path / "flag") == tmp_path / "flag"
    monkeypatch.delenv("NCSYM_CACHE")
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "xdg"))
    assert cache_mod.cache_dir() == tmp_path / "xdg" / "ncsym"


def test_cache_purge(tmp_path, capsys):
    _verify_all(tmp_path)
    assert list(tmp_path.glob("*.json"))
    assert main(["cache", "purge", "--cache", str(tmp_path)]) == 0
    assert not list(tmp_path.glob("*.json"))


def test_verify_cli_writes_report(tmp_path, capsys):
    assert main(["verify", "beilinson", "--preset", "kronecker2", "--out", str(tmp_path), "--seed", "3"]) == 0
    rep = json.loads((tmp_path / "verify-beilinson-kronecker2.json").read_text())
    assert rep["seed"] == 3 and rep["library"] and rep["instance"]["hash"]
    assert rep["checks"][0]["status"] == "pass"
