import json
from pathlib import Path

import pytest

from circleifs.cli import main
from circleifs.config import ConfigError, load_config, parse_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def base(**over):
    doc = {"system": {"name": "two_rotations"}, "experiment": "stability",
           "parameters": {"n": 16, "n_particles": 200}, "seed": 1}
    doc.update(over)
    return doc


def test_missing_seed_names_seed():
    doc = base()
    del doc["seed"]
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    assert exc.value.field == "seed"


@pytest.mark.parametrize("doc, field", [
    (base(seed=-1), "seed"),
    (base(seed=True), "seed"),
    (base(experiment="dance"), "experiment"),
    (base(system={"name": "nope"}), "system.name"),
    (base(system={"generators": [{"type": "rotation", "angle": 0.1}], "probs": [0.5]}), "system.probs"),
    (base(system={"generators": [{"type": "sine", "b": 2.0}]}), "system.generators"),
    (base(parameters={"n": 0}), "parameters.n"),
    (base(parameters={"n": 2.5}), "parameters.n"),
    (base(parameters={"bogus": 1}), "parameters.bogus"),
    (base(parameters={"inits": ["uniform"]}), "parameters.inits"),
])
def test_invalid_fields_are_named(doc, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    assert exc.value.field == field


def test_defaults_and_custom_system():
    cfg = parse_config(base(system={"generators": [{"type": "rotation", "angle": 0.3}, {"type": "sine", "a": 0, "b": 0.5}]}))
    assert cfg.system.k == 2 and cfg.parameters["threads"] == 1


def test_every_shipped_config_parses():
    files = sorted(CONFIGS.glob("*.json"))
    assert files
    for p in files:
        load_config(p)


def test_cli_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(base()))
    assert main(["stability", "--config", str(good), "--output", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "summary.json").exists() and (tmp_path / "out" / "series.csv").exists()
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["seed"] == 1 and "version" in summary

    bad = tmp_path / "bad.json"
    doc = base()
    del doc["seed"]
    bad.write_text(json.dumps(doc))
    assert main(["stability", "--config", str(bad), "--output", str(tmp_path / "x")]) == 2
    assert "seed" in capsys.readouterr().err
    assert main(["stability", "--config", str(bad), "--seed", "5", "--output", str(tmp_path / "y")]) == 0

    assert main(["classify", "--config", str(good), "--output", str(tmp_path / "z")]) == 2
    assert main(["validate", "--config", str(good)]) == 0
    (tmp_path / "broken.json").write_text("{nope")
    assert main(["validate", "--config", str(tmp_path / "broken.json")]) == 2
    assert main(["validate", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_capacity_and_inconclusive(tmp_path, monkeypatch):
    import circleifs.runner as runner
    from circleifs.transfer_ops import CapacityError

    good = tmp_path / "good.json"
    good.write_text(json.dumps(base()))

    def boom(*a, **k):
        raise CapacityError("exact step would create too many atoms; use a Resample policy")

    monkeypatch.setitem(runner.DISPATCH, "stability", boom)
    assert main(["stability", "--config", str(good), "--output", str(tmp_path / "o")]) == 3

    inc = tmp_path / "inc.json"
    inc.write_text(json.dumps({"system": {"generators": [{"type": "rotation", "angle": 0.25}, {"type": "sine", "a": 0, "b": 0.5}]},
                               "experiment": "classify", "parameters": {"shrink_budget": 100}, "seed": 3}))
    assert main(["classify", "--config", str(inc), "--output", str(tmp_path / "c")]) == 4


def test_classify_writes_replayable_witness(tmp_path):
    from circleifs.circle_geom import Arc
    from circleifs.homeo import word_image_arc
    from circleifs.systems import demo_contractive

    assert main(["classify", "--config", str(CONFIGS / "classify_demo.json"), "--output", str(tmp_path)]) == 0
    w = json.loads((tmp_path / "witness.json").read_text())
    arc = Arc(w["J"]["start"], w["J"]["length"])
    assert abs(word_image_arc(demo_contractive().generators, w["word"], arc).length - w["final_length"]) <= 1e-12


def test_rerun_gives_identical_csv(tmp_path):
    cfg = CONFIGS / "custom_sine.json"
    for d in ("a", "b"):
        assert main(["stability", "--config", str(cfg), "--output", str(tmp_path / d), "--threads", "2"]) == 0
    assert (tmp_path / "a" / "series.csv").read_bytes() == (tmp_path / "b" / "series.csv").read_bytes()
