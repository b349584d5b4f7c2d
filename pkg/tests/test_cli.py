from __future__ import annotations

import json

import pytest

from bikeguide.cli import main
from bikeguide.dialogue.agents import AgentConfig
from bikeguide.service.export import episode_log
from bikeguide.sim.batch import _EpisodeRunner
from bikeguide.sim.report import rows_from_csv
from bikeguide.sim.user import UserConfig
from bikeguide.world.generate import generate_map
from bikeguide.world.mapdoc import parse_map, serialize_map

from .test_dialogue import DUO_MAP


@pytest.fixture()
def duo_file(tmp_path):
    path = tmp_path / "duo.map"
    path.write_text(DUO_MAP)
    return str(path)


@pytest.fixture()
def log_file(tmp_path):
    spec = parse_map(DUO_MAP)
    config = AgentConfig(kind="responsive")
    runner = _EpisodeRunner(spec, config, UserConfig(gamma=1.0))
    text = episode_log(spec, config, runner.run(0, master_seed=11))
    path = tmp_path / "session.ndjson"
    path.write_text(text)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- exit codes ---


def test_unknown_command_is_a_usage_error(capsys):
    code, _, err = run(capsys, "conjure")
    assert code == 1
    assert "usage error" in err


def test_bad_flag_is_a_usage_error(capsys):
    code, _, err = run(capsys, "plan", "--no-such-flag")
    assert code == 1


def test_unknown_map_is_a_validation_error(capsys):
    code, _, err = run(capsys, "plan", "--map", "atlantis")
    assert code == 2
    assert "validation error" in err
    assert "riverside" in err  # the message lists what would work


def test_bad_delta_is_a_validation_error(capsys):
    code, _, err = run(capsys, "plan", "--map", "riverside",
                       "--delta", "zero")
    assert code == 2
    code, _, err = run(capsys, "plan", "--map", "riverside",
                       "--delta", "-2")
    assert code == 2


# --- plan ---


def test_plan_prints_route_and_u_score(capsys, duo_file):
    code, out, _ = run(capsys, "plan", "--map", duo_file)
    assert code == 0
    assert "map: duo (5 landmarks, 1 bikes, base L1)" in out
    assert "U=" in out
    assert "move(L1," in out
    assert "local inefficiency: none" in out


def test_plan_audit_lists_similar_sets(capsys, duo_file):
    code, out, _ = run(capsys, "plan", "--map", duo_file, "--audit")
    assert code == 0
    assert "similar-set audit:" in out
    assert "move(L1,L2)" in out and "move(L1,L3)" in out


def test_plan_on_an_empty_task(capsys, tmp_path):
    spec = generate_map(seed=1, landmarks=6, bikes=0, ambiguity_quota=1,
                        visibility_quota=0, districts=2)
    path = tmp_path / "empty.map"
    path.write_text(serialize_map(spec))
    code, out, _ = run(capsys, "plan", "--map", str(path))
    assert code == 0
    assert "plan: 0 steps, base cost 0, U=0" in out


def test_predictive_plan_reports_delta(capsys, duo_file):
    code, out, _ = run(capsys, "plan", "--map", duo_file,
                       "--agent", "predictive", "--delta", "3/2")
    assert code == 0
    assert "agent: predictive  delta: 3/2" in out


# --- genmap ---


def test_genmap_writes_deterministic_documents(capsys, tmp_path):
    a = tmp_path / "a.map"
    b = tmp_path / "b.map"
    for path in (a, b):
        code, out, _ = run(capsys, "genmap", "--seed", "9",
                           "--out", str(path))
        assert code == 0
        assert f"wrote {path}" in out
    assert a.read_bytes() == b.read_bytes()
    parse_map(a.read_text())  # and it is a loadable document


def test_genmap_stdout_matches_the_library(capsys):
    code, out, _ = run(capsys, "genmap", "--seed", "9")
    assert code == 0
    assert out == serialize_map(generate_map(seed=9))


def test_genmap_rejects_nonsense(capsys):
    code, _, err = run(capsys, "genmap", "--seed", "1", "--landmarks", "0")
    assert code == 2
    code, _, err = run(capsys, "genmap", "--seed", "1", "--bikes", "19",
                       "--landmarks", "6")
    assert code == 2


def test_genmap_refuses_missing_directories(capsys, tmp_path):
    code, _, err = run(capsys, "genmap", "--seed", "1",
                       "--out", str(tmp_path / "nowhere" / "x.map"))
    assert code == 2
    assert "does not exist" in err


def test_failed_runs_leave_no_partial_files(capsys, tmp_path):
    # valid directory, impossible map: nothing may be written
    out = tmp_path / "x.map"
    code, _, _ = run(capsys, "genmap", "--seed", "1", "--bikes", "2",
                     "--visibility-quota", "3", "--out", str(out))
    assert code == 2
    assert list(tmp_path.iterdir()) == []


# --- simulate ---


def test_simulate_writes_reports(capsys, duo_file, tmp_path):
    summary = tmp_path / "summary.csv"
    rows = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "simulate", "--map", duo_file,
                       "--agent", "responsive", "--n", "4",
                       "--gamma", "0.8", "--seed", "17",
                       "--max-replans", "200",
                       "--out", str(summary), "--rows-out", str(rows))
    assert code == 0
    assert "responsive@duo" in out
    assert "|similars|" in out
    assert summary.read_text().startswith("map,agent,metric,")
    parsed = rows_from_csv(rows.read_text())
    assert len(parsed) == 4


def test_simulate_is_deterministic_per_seed(capsys, duo_file, tmp_path):
    outputs = []
    for name in ("one.csv", "two.csv"):
        path = tmp_path / name
        code, _, _ = run(capsys, "simulate", "--map", duo_file,
                         "--agent", "responsive", "--n", "4",
                         "--gamma", "0.8", "--seed", "17",
                         "--max-replans", "200", "--out", str(path))
        assert code == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_rows_out_needs_a_single_run(capsys, duo_file, tmp_path):
    code, _, err = run(capsys, "simulate", "--map", duo_file,
                       "--agent", "both", "--n", "2",
                       "--rows-out", str(tmp_path / "rows.csv"))
    assert code == 2
    assert "--rows-out" in err


def test_simulate_validates_probabilities(capsys, duo_file):
    code, _, err = run(capsys, "simulate", "--map", duo_file,
                       "--gamma", "1.5", "--n", "2")
    assert code == 2
    assert "gamma" in err


# --- config preloading ---


def test_config_file_preloads_defaults(capsys, duo_file, tmp_path):
    rows = tmp_path / "rows.csv"
    config = tmp_path / "defaults.yaml"
    config.write_text(
        "simulate:\n"
        "  n: 2\n"
        "  gamma: 0.8\n"
        "  seed: 17\n"
        "  max_replans: 200\n")
    code, _, _ = run(capsys, "--config", str(config), "simulate",
                     "--map", duo_file, "--agent", "responsive",
                     "--rows-out", str(rows))
    assert code == 0
    assert len(rows_from_csv(rows.read_text())) == 2
    # explicit flags beat the config file
    code, _, _ = run(capsys, "--config", str(config), "simulate",
                     "--map", duo_file, "--agent", "responsive",
                     "--n", "3", "--rows-out", str(rows))
    assert code == 0
    assert len(rows_from_csv(rows.read_text())) == 3


def test_config_values_are_validated_like_flags(capsys, duo_file, tmp_path):
    config = tmp_path / "defaults.yaml"
    config.write_text("simulate:\n  gamma: 2.5\n")
    code, _, err = run(capsys, "--config", str(config), "simulate",
                       "--map", duo_file, "--n", "2")
    assert code == 2
    assert "gamma" in err


def test_missing_config_file(capsys):
    code, _, err = run(capsys, "--config", "/no/such/file.yaml",
                       "plan", "--map", "riverside")
    assert code == 2
    assert "config file not found" in err


# --- flag inventory ---


def test_dump_flags_matches_the_command_set(capsys):
    code, out, _ = run(capsys, "--dump-flags")
    assert code == 0
    dump = json.loads(out)
    assert set(dump) == {"plan", "genmap", "simulate", "serve", "replay"}
    assert "--delta" in dump["plan"]
    assert "--max-replans" in dump["simulate"]


def test_every_flag_appears_in_help(capsys):
    code, out, _ = run(capsys, "--dump-flags")
    dump = json.loads(out)
    for command, flags in dump.items():
        code, help_text, _ = run(capsys, command, "--help")
        assert code == 0
        for flag in flags:
            if flag.startswith("--"):
                assert flag in help_text, (command, flag)


# --- serve validation (the server itself is exercised elsewhere) ---


def test_serve_checks_its_inputs(capsys, tmp_path):
    code, _, err = run(capsys, "serve", "--maps-dir",
                       str(tmp_path / "missing"))
    assert code == 2
    code, _, err = run(capsys, "serve", "--agent-config",
                       str(tmp_path / "missing.yaml"))
    assert code == 2


def test_serve_rejects_broken_map_files(capsys, tmp_path):
    (tmp_path / "bad.map").write_text("not a map\n")
    code, _, err = run(capsys, "serve", "--maps-dir", str(tmp_path))
    assert code == 2
    assert "bad.map" in err


# --- replay ---


def test_replay_confirms_a_faithful_log(capsys, log_file):
    code, out, _ = run(capsys, "replay", log_file)
    assert code == 0
    assert "replay matched" in out


def test_replay_diffs_a_tampered_log(capsys, log_file, tmp_path):
    from pathlib import Path
    text = Path(log_file).read_text().replace("Go to the", "Run to the", 1)
    tampered = tmp_path / "tampered.ndjson"
    tampered.write_text(text)
    code, out, _ = run(capsys, "replay", str(tampered))
    assert code == 3
    assert "mismatch" in out


def test_replay_rejects_garbage(capsys, tmp_path):
    code, _, err = run(capsys, "replay", str(tmp_path / "missing.ndjson"))
    assert code == 2
    garbage = tmp_path / "garbage.ndjson"
    garbage.write_text("definitely not ndjson\n")
    code, _, err = run(capsys, "replay", str(garbage))
    assert code == 2
