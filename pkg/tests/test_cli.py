import json

import pytest

from ordtower.cli import SCHEMA, ConfigError, load_config, main, plan

SMALL = {
    "pairs": [[7, 4]],
    "r_max": 1,
    "curves": [{"kind": "elliptic", "p": 5, "ainvs": [0, 0, 0, 1, 1]},
               {"kind": "artin-schreier", "p": 3, "poles": [[0, 1], ["inf", 1]]}],
    "residue_samples": 5,
    "towers": {"count": 3, "primes": [3], "d_max": 2},
    "fiber": {"primes": [3], "d": 1, "modular_pairs": [], "dump": [[5, 2]]},
}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(tmp_path, args, doc=None, name="out.json"):
    out = tmp_path / name
    argv = list(args) + ["--out", str(out)]
    if doc is not None:
        argv += ["--config", write(tmp_path, doc)]
    code = main(argv)
    return code, (json.loads(out.read_text()) if out.exists() else None), out


# -- configuration ---------------------------------------------------------------------------

@pytest.mark.parametrize("doc", [
    {"pairs": [[5, 5]]},
    {"pairs": [[4, 7]]},
    {"pairs": [[3, 1]]},
    {"pairs": [[5]]},
    {"curves": [{"kind": "hyperelliptic", "p": 5}]},
    {"curves": [{"kind": "elliptic", "p": 5, "ainvs": [0, 0, 0, 0, 0]}]},
    {"colour": "blue"},
    {"towers": {"size": 3}},
    {"identity_form": "approximate"},
    {"seed": -1},
    {"r_max": 0},
])
def test_bad_configs_exit_2(tmp_path, doc, capsys):
    code, report, _ = run(tmp_path, ["verify-identity"], doc)
    assert code == 2 and report is None
    assert "configuration error" in capsys.readouterr().err


def test_unreadable_config_exits_2(tmp_path):
    assert main(["tower", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert main(["tower", "--config", str(bad)]) == 2


def test_load_config_defaults():
    cfg = load_config(None)
    assert len(cfg["pairs"]) == 6 and cfg["identity_form"] == "literal"
    with pytest.raises(ConfigError):
        load_config({"pairs": "5,7"})


def test_plan_sizes():
    cfg = load_config(SMALL)
    assert len(plan("verify-identity", cfg)) == 1
    # hasse-witt for both curves, nakajima for the cover, residues for both
    assert len(plan("cartier", cfg)) == 5
    with pytest.raises(ConfigError):
        plan("nope", cfg)


# -- reports -----------------------------------------------------------------------------------

def test_empty_pairs_give_an_empty_passing_report(tmp_path):
    code, report, _ = run(tmp_path, ["verify-identity"], {"pairs": []})
    assert code == 0
    assert report["schema"] == SCHEMA and report["pass"]
    assert report["suites"]["verify-identity"]["results"] == []


def test_literal_identity_fails_and_corrected_passes(tmp_path):
    code, report, _ = run(tmp_path, ["verify-identity"], {"pairs": [[7, 4]]})
    assert code == 1 and not report["pass"]
    row = report["suites"]["verify-identity"]["results"][0]
    assert row["d"] == 2 and row["sum_d_k"] == 5
    code, report, _ = run(tmp_path, ["verify-identity"],
                          {"pairs": [[7, 4]], "identity_form": "corrected"})
    assert code == 0 and report["pass"]


def test_fiber_dump_lists_components(tmp_path):
    code, report, _ = run(tmp_path, ["fiber"], SMALL)
    assert code == 0, report
    dump = [r for r in report["suites"]["fiber"]["results"] if r["name"].startswith("table dump")]
    assert len(dump[0]["components"]) == 6
    assert set(dump[0]["maps_into_level"]) == {"sigma", "rho", "pi1", "pi2"}


def test_tower_suite_small(tmp_path):
    code, report, _ = run(tmp_path, ["tower"], SMALL)
    assert code == 0 and report["suites"]["tower"]["pass"]
    assert report["command"] == "tower"


def test_seed_determinism_and_parallelism(tmp_path):
    doc = dict(SMALL, pairs=[])
    _, _, a = run(tmp_path, ["all", "--seed", "17"], doc, "a.json")
    _, _, b = run(tmp_path, ["all", "--seed", "17", "--jobs", "2"], doc, "b.json")
    assert a.read_bytes() == b.read_bytes()
    _, report, _ = run(tmp_path, ["cartier", "--seed", "18"], doc, "c.json")
    assert report["config"]["seed"] == 18
    assert "timing_seconds" not in report


def test_timing_flag(tmp_path):
    _, report, _ = run(tmp_path, ["verify-identity", "--timing"], {"pairs": []})
    assert report["timing_seconds"] >= 0


def test_empty_config_file_exits_2():
    assert main(["verify-identity", "--config", "/dev/null"]) == 2


def test_report_goes_to_stdout_without_out(tmp_path, capsys):
    assert main(["verify-identity", "--config", write(tmp_path, {"pairs": []})]) == 0
    assert json.loads(capsys.readouterr().out)["schema"] == SCHEMA
