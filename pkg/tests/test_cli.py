import io
import json

import pytest

from nodal.cli import main
from nodal.nodepoly import NodePolynomial


def run(argv, **kw):
    out = io.StringIO()
    code = main(argv, out=out, **kw)
    return code, out.getvalue()


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch, tmp_path):
    for var in ("NODAL_MAX_DELTA", "NODAL_SAMPLE_COUNT", "NODAL_RNG_SEED", "NODAL_CACHE_PATH",
                "NODAL_THREAD_COUNT"):
        monkeypatch.delenv(var, raising=False)
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "xdg"))


def test_polys_pretty():
    code, out = run(["polys", "--delta", "1", "--no-cache"])
    assert code == 0
    assert out.splitlines() == ["N_0 = 1", "N_1 = 3*x + 2*y + t"]


def test_polys_json_round_trip():
    code, out = run(["polys", "--delta", "2", "--format", "json", "--no-cache"])
    assert code == 0
    data = json.loads(out)
    polys = [NodePolynomial.from_json(p) for p in data["polynomials"]]
    assert [p.delta for p in polys] == [0, 1, 2]
    assert json.loads(json.dumps({"polynomials": [p.to_json() for p in polys]})) == data


def test_count_chern():
    assert run(["count", "--chern", "9,-9,9,3", "--delta", "1", "--no-cache"]) == (0, "12\n")
    assert run(["count", "--chern", "0,0,0,0", "--delta", "1", "--no-cache"]) == (0, "0\n")


def test_count_surface_file(tmp_path, capsys):
    path = tmp_path / "p2.json"
    path.write_text(json.dumps({"name": "cubic", "polygon": [[0, 0], [3, 0], [0, 3]]}))
    code, out = run(["count", "--surface", str(path), "--delta", "1", "--no-cache"])
    assert (code, out) == (0, "12\n")
    assert "warning" not in capsys.readouterr().err


def test_count_advisory_warning(tmp_path, capsys):
    path = tmp_path / "conic.json"
    path.write_text(json.dumps({"polygon": [[0, 0], [2, 0], [0, 2]]}))
    code, out = run(["count", "--surface", str(path), "--delta", "3", "--no-cache"])
    assert code == 0
    assert "warning" in capsys.readouterr().err


def test_malformed_surface_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"polygon": [[0, 0], [3, 0], [0, 3.5]]}')
    code, _ = run(["count", "--surface", str(path), "--delta", "1", "--no-cache"])
    assert code == 2
    assert "bad.json" in capsys.readouterr().err


def test_usage_errors():
    assert run(["count", "--chern", "1,2,3", "--delta", "1", "--no-cache"])[0] == 2
    assert run(["count", "--chern", "a,b,c,d", "--delta", "1", "--no-cache"])[0] == 2
    assert run(["polys", "--delta", "5", "--no-cache"])[0] == 2
    assert run(["frobnicate"])[0] == 2
    assert run(["count", "--surface", "/nonexistent.json", "--delta", "1", "--no-cache"])[0] == 2


def test_force_beyond_max_delta():
    with pytest.warns(UserWarning, match="beyond"):
        code, out = run(["polys", "--delta", "2", "--max-delta", "1", "--force", "--no-cache"])
    assert code == 0
    assert out.splitlines()[-1].startswith("N_2 = ")


def test_check_quick_deterministic():
    code, first = run(["check", "--level", "quick", "--no-cache"])
    assert code == 0
    assert first.splitlines()[-1] == "4/4 checks passed"
    _, second = run(["check", "--level", "quick", "--no-cache", "--threads", "1"])
    assert first == second


def test_env_overrides(monkeypatch):
    monkeypatch.setenv("NODAL_MAX_DELTA", "1")
    assert run(["polys", "--delta", "2", "--no-cache"])[0] == 2
    assert run(["polys", "--delta", "2", "--max-delta", "2", "--no-cache"])[0] == 0
    monkeypatch.setenv("NODAL_SAMPLE_COUNT", "x")
    assert run(["polys", "--delta", "0", "--no-cache"])[0] == 2


def test_cache_inspect_and_clear(tmp_path):
    cache = str(tmp_path / "fits.json")
    assert run(["polys", "--delta", "1", "--cache", cache])[0] == 0
    code, out = run(["cache", "inspect", "--cache", cache])
    assert code == 0
    assert out.startswith(f"{cache}: 3 entries")
    assert run(["cache", "clear", "--cache", cache]) == (0, "removed 3 entries\n")
    assert run(["cache", "inspect", "--cache", cache])[1] == f"{cache}: 0 entries\n"


def test_cache_env_path(tmp_path, monkeypatch):
    cache = tmp_path / "env.json"
    monkeypatch.setenv("NODAL_CACHE_PATH", str(cache))
    run(["polys", "--delta", "1"])
    assert cache.exists()


def test_fit_report():
    code, out = run(["fit-report", "--i", "1", "--delta", "1", "--no-cache"])
    assert code == 0
    report = json.loads(out)
    assert report["rank"] == 5 and report["polynomial"] == "x + t"
    code, out = run(["fit-report", "--i", "2", "--delta", "2", "--variant", "1", "--no-cache"])
    assert code == 0 and json.loads(out)["full_rank"]
