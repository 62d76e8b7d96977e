import json

import pytest

from alt_topology import AltTopology
from alt_topology.errors import SchemeParseError, TheoremPreconditionError, TopologyError, UsageError
from alt_topology.field import FieldSpec
from alt_topology.schemes import build_ic2_joint_abc, load_scheme


@pytest.fixture
def config_path(tmp_path, example1_path):
    path = tmp_path / "alt_topology.conf"
    path.write_text(
        "field: 3\n"
        "seed: 0\n"
        "example_pairs:\n"
        f"  - id: ex1\n    name: First example\n    path: {example1_path}\n"
    )
    return str(path)


def run_json(capsys, config_path, *argv):
    code = AltTopology().run(["-q", "--json", "--config", config_path, *argv])
    return code, json.loads(capsys.readouterr().out)


# ---------------------------------------------------------
# capacity
# ---------------------------------------------------------

def test_capacity_json(capsys, config_path):
    code, data = run_json(capsys, config_path, "capacity", "--lambda", "1/3,1/3,1/3,0")
    assert code == 0
    assert data["capacity"] == {"value": "4/3", "decimal": "1.(3)"}
    assert data["gain"]["value"] == "1/3"
    assert data["bounds"]["Z-bound"]["value"] == "4/3"
    assert data["flags"] == []


def test_capacity_table(capsys, config_path):
    assert AltTopology().run(["-q", "--config", config_path, "capacity", "--lambda", "1/4,1/4,1/4,1/4"]) == 0
    out = capsys.readouterr().out
    assert "Capacity:  3/2 (1.5)" in out
    assert "MAC-bound-1" in out


def test_bc2_capacity_over_gf2_is_flagged(capsys, config_path):
    code, data = run_json(capsys, config_path, "capacity", "--scenario", "bc2", "--lambda", "1/2,1/2,0,0",
                          "--p", "2")
    assert code == 0
    assert data["capacity"]["value"] == "3/2"
    assert data["flags"] == ["theorem-preconditions-unmet"]
    assert data["csit_mapping"]["A"] == "(N,P)"


def test_capacity_precondition_error(config_path):
    with pytest.raises(TheoremPreconditionError) as err:
        AltTopology().run(["-q", "--config", config_path, "capacity", "--scenario", "x2",
                           "--lambda", "1/2,1/4,1/4,0"])
    assert err.value.exit_code == 2
    assert "theorem2_sum_capacity: requires lambda_A = lambda_B" in str(err.value)


def test_capacity_needs_fractions(config_path):
    with pytest.raises(TopologyError):
        AltTopology().run(["-q", "--config", config_path, "capacity"])


def test_capacity_of_registered_pair(capsys, config_path):
    code, data = run_json(capsys, config_path, "capacity", "--scenario", "ic3-example", "--pair", "ex1",
                          "--lambda", "1/2,1/2")
    assert code == 0
    assert data["capacity"]["value"] == "3/2"
    assert data["fractions"] == {"S1": "1/2", "S2": "1/2"}


def test_sweep_csv(tmp_path, config_path):
    out = tmp_path / "sweep.csv"
    assert AltTopology().run(["-q", "--config", config_path, "--out", str(out), "capacity", "--sweep", "2"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 11
    assert lines[0].startswith("lambda_A,lambda_B,lambda_C,lambda_D,capacity")


# ---------------------------------------------------------
# simulate, search
# ---------------------------------------------------------

def test_simulate_json(capsys, config_path):
    code, data = run_json(capsys, config_path, "simulate", "--lambda", "1/3,1/3,1/3,0", "--n", "300")
    assert code == 0
    assert data["achieved"]["value"] == "4/3"
    assert data["gap"]["value"] == "0"
    assert data["empirical_gap"]["value"] == "0"
    assert data["provenance"]["seed"] == 0
    assert "runtime_seconds" in data["timing"]


def test_search_json(capsys, config_path, tmp_path):
    witness = tmp_path / "d.scheme"
    code, data = run_json(capsys, config_path, "search", "--sequence", "D", "--witness-out", str(witness))
    assert code == 0
    assert data["best_rate"]["value"] == "2"
    assert data["spec"]["sequence"] == ["D"]
    assert load_scheme(str(witness)).rate == 2


def test_search_checks_user_count(config_path):
    with pytest.raises(TopologyError):
        AltTopology().run(["-q", "--config", config_path, "search", "--users", "3", "--sequence", "A"])


# ---------------------------------------------------------
# verify, export-scheme
# ---------------------------------------------------------

def test_verify_builtin_passes(capsys, config_path):
    code, data = run_json(capsys, config_path, "verify", "--builtin", "ic2-joint-abc")
    assert code == 0
    assert data["verdict"] == "pass"
    assert data["realizations"] == 1024
    assert data["field"] == 3


def test_verify_failing_scheme_exits_one(capsys, config_path, tmp_path):
    path = tmp_path / "collide.scheme"
    path.write_text(
        "field 3\nusers 2\nmode ic\nslot 1 C\n"
        "symbol a1 owner=1 receiver=1\nsymbol b1 owner=2 receiver=2\n"
        "tx 1 1: 1 0\ntx 2 1: 0 1\n"
    )
    code, data = run_json(capsys, config_path, "verify", str(path), "--mode", "exact")
    assert code == 1
    assert data["failure_fraction"]["value"] == "1"


@pytest.mark.parametrize("flags", [
    ["--mode", "sampled", "--trials", "0"],
    ["--shards", "0"],
])
def test_verify_usage_errors_exit_two(config_path, flags):
    with pytest.raises(UsageError) as err:
        AltTopology().run(["-q", "--config", config_path, "verify", "--builtin", "ic2-joint-abc", *flags])
    assert err.value.exit_code == 2


def test_verify_rejects_bad_scheme_file(config_path, tmp_path):
    path = tmp_path / "bad.scheme"
    path.write_text("field 3\nusers 2\nmode ic\nslot 1 C\nsymbol a1 owner=1 receiver=1\n")
    with pytest.raises(SchemeParseError):
        AltTopology().run(["-q", "--config", config_path, "verify", str(path)])


def test_export_scheme(tmp_path, config_path):
    out = tmp_path / "ic2.scheme"
    assert AltTopology().run(["-q", "--config", config_path, "--out", str(out),
                              "export-scheme", "ic2-joint-abc", "--p", "5"]) == 0
    assert load_scheme(str(out)) == build_ic2_joint_abc(FieldSpec(5))


# ---------------------------------------------------------
# configuration
# ---------------------------------------------------------

def test_output_directory_from_config(tmp_path, capsys):
    config = tmp_path / "alt_topology.conf"
    config.write_text("output: results\n")
    assert AltTopology().run(["-q", "--config", str(config), "capacity", "--lambda", "0,0,0,1"]) == 0
    assert "Capacity:  2 (2)" in capsys.readouterr().out
    report = json.loads((tmp_path / "results" / "capacity.json").read_text())
    assert report["capacity"]["value"] == "2"
