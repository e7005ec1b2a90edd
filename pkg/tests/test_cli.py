import io
import subprocess
import sys

import pytest

from stackconflict import __version__
from stackconflict.cli import COMMANDS, dispatch
from stackconflict.game import LANE_CHANGE_GAME, format_game
from stackconflict.io import read_pgm


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def lane_file(tmp_path):
    path = tmp_path / "lanechange.game"
    path.write_text(format_game(LANE_CHANGE_GAME))
    return path


def test_aoc_aug():
    assert run("aoc", "--model", "aug", "--A", "1", "--B", "1") == (0, "0.386294\n", "")


def test_aoc_with_oracle():
    code, out, _ = run("aoc", "--model", "altruism", "--A", "1", "--B", "1", "--oracle", "101")
    assert code == 0
    first, second = out.splitlines()
    assert first == "0.500000"
    assert second.startswith("oracle: 0.5")
    assert "boundary cells: 201" in second


@pytest.mark.parametrize("argv,flag", [
    (("aoc", "--model", "aug", "--A", "0", "--B", "1"), "--A"),
    (("aoc", "--model", "aug", "--A", "1", "--B", "-2"), "--B"),
    (("aoc", "--model", "aug", "--A", "x", "--B", "1"), "--A"),
    (("aoc", "--model", "aug", "--A", "1", "--B", "1", "--oracle", "5"), "--oracle"),
    (("aoc", "--model", "duty", "--A", "1", "--B", "1"), "--model"),
    (("region", "--model", "aug", "--A", "1", "--B", "1", "--res", "0", "--out", "x.pgm"), "--res"),
])
def test_bad_values_exit_2_naming_flag(argv, flag):
    code, out, err = run(*argv)
    assert code == 2
    assert flag in err
    assert out == ""


def test_unknown_flag_and_command():
    assert run("aoc", "--model", "aug", "--A", "1", "--B", "1", "--bogus")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run()[0] == 2


def test_game_conflict_output(lane_file):
    code, out, _ = run("game-conflict", "--file", str(lane_file), "--model", "baseline")
    assert code == 0
    assert out == "conflict: true\nrow-led: (LCA,GW)\ncol-led: (LCB,C)\n"


def test_game_conflict_with_altruism(lane_file):
    code, out, _ = run("game-conflict", "--file", str(lane_file), "--model", "altruism", "--alpha1", "0.9",
                       "--alpha2", "0.9")
    assert code == 0 and out.startswith("conflict: true")


def test_game_solve(lane_file):
    code, out, _ = run("game-solve", "--file", str(lane_file), "--leader", "col")
    assert code == 0
    assert out.splitlines() == ["leader: col", "equilibrium: (LCB,C)", "leader value: 1.000000",
                                "follower value: 0.000000"]


def test_game_alpha_range(lane_file):
    code, _, err = run("game-solve", "--file", str(lane_file), "--model", "altruism", "--alpha1", "1.5")
    assert code == 2 and "--alpha1" in err
    code, _, err = run("game-solve", "--file", str(lane_file), "--model", "aug", "--alpha1", "1", "--alpha2", "1")
    assert code == 2 and "--alpha1" in err


def test_missing_and_malformed_game_file(tmp_path):
    assert run("game-solve", "--file", str(tmp_path / "none.game"))[0] == 1
    bad = tmp_path / "bad.game"
    bad.write_text("2 2\n1,2\n")
    assert run("game-conflict", "--file", str(bad))[0] == 1


def test_region_outputs(tmp_path):
    pgm, csv = tmp_path / "r.pgm", tmp_path / "r.csv"
    code, out, _ = run("region", "--model", "altruism", "--A", "1", "--B", "1", "--res", "2", "--out", str(pgm),
                       "--csv", str(csv))
    assert code == 0 and out == "fraction: 0.500000\n"
    assert read_pgm(pgm).tolist() == [[True, False], [False, True]]
    assert csv.read_text().splitlines() == ["alpha1,alpha2,conflict", "0.250000,0.250000,true",
                                            "0.750000,0.250000,false", "0.250000,0.750000,false",
                                            "0.750000,0.750000,true"]
    assert sorted(p.name for p in tmp_path.iterdir()) == ["r.csv", "r.pgm"]


def test_region_missing_directory(tmp_path):
    code, _, err = run("region", "--model", "svo", "--A", "1", "--B", "1", "--out", str(tmp_path / "no" / "r.pgm"))
    assert code == 2 and "--out" in err


def test_curve(tmp_path):
    out = tmp_path / "c.csv"
    code, _, _ = run("curve", "--model", "aug", "--B", "1", "--a-min", "1", "--a-max", "2", "--samples", "3",
                     "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "A,aoc" and lines[1] == "1.000000,0.386294" and len(lines) == 4
    code, _, err = run("curve", "--model", "aug", "--B", "1", "--a-min", "2", "--a-max", "1", "--out", str(out))
    assert code == 2 and "--a-max" in err


def test_simulate_single_point(tmp_path):
    out = tmp_path / "sim.csv"
    code, text, _ = run("simulate", "--scenario", "lane", "--condition", "agree-col", "--grid", "1",
                        "--out", str(out))
    assert code == 0 and text.startswith("lane agree-col: average ")
    header, row = out.read_text().splitlines()
    assert header == "offset_row,offset_col,time_row,time_col,collided"
    assert row.startswith("0.000000,0.000000,") and row.endswith(",false")


def test_config_file(tmp_path):
    cfg = tmp_path / "planner.cfg"
    cfg.write_text("no_such_key = 1\n")
    code, _, err = run("--config", str(cfg), "simulate", "--scenario", "lane", "--condition", "agree-col",
                       "--grid", "1", "--out", str(tmp_path / "x.csv"))
    assert code == 2 and "--config" in err
    code, _, err = run("--config", str(tmp_path / "missing.cfg"), "simulate", "--scenario", "lane",
                       "--condition", "agree-col", "--grid", "1", "--out", str(tmp_path / "x.csv"))
    assert code == 2 and "--config" in err


def test_sweep_all_out_dir_checked(tmp_path):
    code, _, err = run("sweep-all", "--out-dir", str(tmp_path / "missing"))
    assert code == 2 and "--out-dir" in err


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_help_for_every_command(command, capsys):
    with pytest.raises(SystemExit) as info:
        dispatch([command, "--help"])
    assert info.value.code == 0
    assert "usage:" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "stackconflict", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
