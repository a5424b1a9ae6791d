import pytest
import yaml

from eit_nsim.errors import ConfigError
from eit_nsim.pipeline.run_config import (
    apply_override, config_hash, deep_merge, load_run, load_tree, parse_override, parse_tree, read_tree,
)
from eit_nsim.spectrum.scan import ScanAxis


def write(tmp_path, tree, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(tree), encoding="utf-8")
    return path


def test_override_equivalence_gives_same_hash():
    a = load_run(scenario="fig2a", overrides=["modulation.ratio=0.1"])
    b = load_run(scenario="fig2b")
    assert a.config_hash == b.config_hash
    assert a.model.model_dump(exclude={"scenario", "output", "seed"}) == \
        b.model.model_dump(exclude={"scenario", "output", "seed"})


def test_hash_ignores_output_and_labels():
    a = parse_tree({"output": {"csv": "a.csv"}, "seed": 1})
    b = parse_tree({"output": {"csv": "b.csv"}, "seed": 2})
    assert config_hash(a) == config_hash(b)
    c = parse_tree({"laser1": {"intensity": 5.0}})
    assert config_hash(a) != config_hash(c)
    assert len(config_hash(a)) == 12


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError) as err:
        parse_tree({"laser1": {"intensty": 5.0}})
    assert err.value.key == "laser1.intensty"


def test_invalid_value_names_key():
    with pytest.raises(ConfigError, match="laser2.intensity"):
        parse_tree({"laser2": {"intensity": -1.0}})
    with pytest.raises(ConfigError, match="scheme.mode"):
        parse_tree({"scheme": {"mode": "Scalar"}})


def test_missing_file_names_path(tmp_path):
    missing = tmp_path / "nope.yaml"
    with pytest.raises(ConfigError, match="nope.yaml"):
        read_tree(missing)


def test_file_must_hold_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="mapping"):
        read_tree(path)
    empty = tmp_path / "empty.yaml"
    empty.write_text("", encoding="utf-8")
    assert read_tree(empty) == {}


def test_layers_merge_in_order(tmp_path):
    path = write(tmp_path, {"scenario": "fig2a", "laser1": {"intensity": 7.0}})
    tree = load_tree(path, overrides=["laser1.linewidth=0.5"])
    assert tree["scenario"] == "fig2a"
    assert tree["laser1"]["intensity"] == 7.0
    assert tree["laser1"]["linewidth"] == 0.5
    assert tree["laser1"]["carrier_detuning"] == "group_center"
    # --scenario wins over the file's scenario key
    assert load_tree(path, scenario="fig2b")["modulation"]["ratio"] == pytest.approx(0.1)


def test_parse_override_values_are_yaml():
    assert parse_override("a.b=0.25") == (["a", "b"], 0.25)
    assert parse_override("a=[1, 2, 3]") == (["a"], [1, 2, 3])
    assert parse_override("flag=true") == (["flag"], True)
    assert parse_override("name=x") == (["name"], "x")
    with pytest.raises(ConfigError, match="key=value"):
        parse_override("laser1.intensity")
    with pytest.raises(ConfigError, match="empty key"):
        parse_override("=3")


def test_override_into_list():
    tree = {"scan": {"windows": [{"start": 0.0, "stop": 1.0, "step": 0.5}]}}
    out = apply_override(tree, "scan.windows.0.step=0.25")
    assert out["scan"]["windows"][0]["step"] == 0.25
    assert tree["scan"]["windows"][0]["step"] == 0.5
    with pytest.raises(ConfigError, match="no element 3"):
        apply_override(tree, "scan.windows.3.step=1")
    with pytest.raises(ConfigError, match="not a section"):
        apply_override({"a": 1.0}, "a.b=2")


def test_deep_merge_keeps_siblings():
    merged = deep_merge({"a": {"x": 1, "y": 2}, "b": 1}, {"a": {"y": 3}})
    assert merged == {"a": {"x": 1, "y": 3}, "b": 1}


def test_group_center_and_raman_windows():
    run = load_run(scenario="fig2c")
    assert run.scan.laser1.carrier_detuning == pytest.approx(-78.45)
    assert run.scan.values()[0] == pytest.approx(-78.45 + 156.9 - 250.0)


def test_raman_window_needs_detuning_axis():
    with pytest.raises(ConfigError, match="Laser2Detuning"):
        load_run(scenario="fig2c", overrides=["scan.axis=MagneticField"])


def test_overlapping_windows_rejected():
    tree_override = "scan.windows=[{start: 0, stop: 10, step: 1}, {start: 5, stop: 20, step: 1}]"
    with pytest.raises(ConfigError, match="overlap"):
        load_run(overrides=[tree_override])


def test_outer_loop_needs_values():
    with pytest.raises(ConfigError, match="outer"):
        load_run(overrides=["outer={axis: MagneticField}"])
    run = load_run(overrides=["outer={axis: MagneticField, values: [0, 1]}"])
    assert run.scan.outer.axis is ScanAxis.MAGNETIC_FIELD
    assert run.scan.outer.values == (0.0, 1.0)


def test_threads_and_verbose_reach_scan_config():
    run = load_run(scenario="fig2a", threads=3, verbose=True)
    assert run.scan.threads == 3 and run.scan.verbose


def test_polarization_vector_and_scheme_section(tmp_path):
    path = write(tmp_path, {
        "scheme": {"mode": "FullZeeman24", "hyperfine": {"excited_1_2": 157.0}},
        "laser2": {"polarization": [0.0, 1.0, 0.0]},
    })
    run = load_run(path)
    assert run.scan.laser2.polarization == (0.0, 1.0, 0.0)
    assert run.scheme.mode.value == "FullZeeman24"
