import csv
import json

import pytest

from leaguerate.cli import main
from leaguerate.params import read_params


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(["synth", "--out", str(root / "corpus"), "--seed", "2", "--countries", "1",
                 "--seasons", "6"]) == 0
    return root


def data_args(ws):
    return ["--data", str(ws / "corpus" / "matches.csv"), "--tiers", str(ws / "corpus" / "tiers.csv")]


@pytest.fixture(scope="module")
def fitted(workspace):
    ws = workspace
    assert main(["fit", *data_args(ws), "--params", str(ws / "mod.params"), "--budget", "120"]) == 0
    assert main(["fit", *data_args(ws), "--params", str(ws / "abl.params"), "--budget", "60",
                 "--ablate", "original-glicko"]) == 0
    return ws


def test_validate_clean(workspace, capsys):
    assert main(["validate", *data_args(workspace)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("kept ") and "dropped 0" in out


def test_validate_forfeit_and_malformed(tmp_path, workspace, capsys):
    lines = (workspace / "corpus" / "matches.csv").read_text().splitlines()
    forfeit = lines[1].split(",")
    forfeit[9] = "true"
    forfeit[-1] += "-forfeit"
    path = tmp_path / "m.csv"
    path.write_text("\n".join([lines[0], lines[1], ",".join(forfeit)]) + "\n")
    assert main(["validate", "--data", str(path), "--tiers", str(workspace / "corpus" / "tiers.csv")]) == 0
    assert "dropped 1 (forfeit: 1)" in capsys.readouterr().out
    bad = lines[2].split(",")
    bad[5] = "many"
    path.write_text("\n".join([lines[0], lines[1], ",".join(bad)]) + "\n")
    assert main(["validate", "--data", str(path), "--tiers", str(workspace / "corpus" / "tiers.csv")]) == 1
    assert "line 3" in capsys.readouterr().err


def test_missing_file_is_exit_2(workspace):
    assert main(["validate", "--data", "/nonexistent.csv", "--tiers", str(workspace / "corpus" / "tiers.csv")]) == 2
    assert main(["rate", *data_args(workspace), "--params", "/nonexistent.params", "--out", "/tmp/x"]) == 2


def test_fit_output(fitted, capsys):
    params = read_params(fitted / "mod.params")
    assert params.leagues == ["Land00.First", "Land00.Second"]
    assert read_params(fitted / "abl.params").globals.original_glicko


def test_fit_descends(workspace, tmp_path, capsys):
    assert main(["fit", *data_args(workspace), "--params", str(tmp_path / "p"), "--budget", "40"]) == 0
    out = capsys.readouterr().out.splitlines()
    initial, final = float(out[0].split()[-1]), float(out[1].split()[-1])
    assert final < initial


def test_fit_budget_one_echoes_projection(workspace, tmp_path, capsys):
    init = tmp_path / "init.params"
    init.write_text("global.tau = 40\n")
    out = tmp_path / "out.params"
    assert main(["fit", *data_args(workspace), "--init", str(init), "--params", str(out), "--budget", "1"]) == 0
    assert read_params(out).globals.tau == 2.0


def test_evaluate_orders_models(fitted, capsys):
    assert main(["evaluate", *data_args(fitted), "--params", str(fitted / "abl.params"),
                 "--params", str(fitted / "mod.params"), "--out", str(fitted / "eval")]) == 0
    rows = list(csv.reader((fitted / "eval" / "comparison.csv").open()))
    assert rows[0] == ["model", "log_loss"] and [r[0] for r in rows[1:]] == ["mod", "abl"]


def test_evaluate_empty_test_is_exit_1(fitted, capsys):
    assert main(["evaluate", *data_args(fitted), "--params", str(fitted / "mod.params"),
                 "--test", "1999/2000"]) == 1


def test_rate_outputs(fitted, capsys):
    out = fitted / "rate"
    assert main(["rate", *data_args(fitted), "--params", str(fitted / "mod.params"), "--out", str(out)]) == 0
    leagues = list(csv.reader((out / "leagues_europe.csv").open()))
    clubs = list(csv.reader((out / "clubs_europe.csv").open()))
    assert leagues[0] == ["rank", "league", "rating"] and len(leagues) == 3
    assert clubs[0] == ["rank", "team", "rating", "league"] and len(clubs) == 51
    assert (out / "interpretation.csv").read_text().startswith("diff,win,draw,loss\n")


def test_predict(fitted, tmp_path, capsys):
    out = fitted / "rate-for-predict"
    assert main(["rate", *data_args(fitted), "--params", str(fitted / "mod.params"), "--out", str(out)]) == 0
    ratings = list(csv.DictReader((out / "ratings.csv").open()))
    a, b = ratings[0]["team"], ratings[1]["team"]
    fixtures = tmp_path / "fx.csv"
    fixtures.write_text("date,home_team,away_team,is_neutral,is_pandemic\n"
                        f"2023-08-01,{a},{b},false,false\n2023-08-02,{b},{a},false,false\n"
                        f"2023-08-03,{b},{a},true,false\n")
    assert main(["predict", *data_args(fitted), "--params", str(fitted / "mod.params"),
                 "--fixtures", str(fixtures), "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "predictions.csv").open()))
    assert list(rows[0]) == ["home", "away", "p_home_win", "p_draw", "p_away_win"]
    for r in rows:
        assert abs(sum(float(r[k]) for k in ("p_home_win", "p_draw", "p_away_win")) - 1) < 1e-9
    # home advantage helps the home side relative to the neutral venue
    assert float(rows[1]["p_home_win"]) > float(rows[2]["p_home_win"])


def test_predict_symmetric_for_equal_ratings(tmp_path):
    # C and D only meet once, a neutral draw between newcomers, so they end with equal ratings
    (tmp_path / "tiers.csv").write_text("league,country,tier\nL.First,L,1\nL.Second,L,2\n")
    (tmp_path / "m.csv").write_text(
        "date,season,competition,home_team,away_team,home_goals,away_goals,is_pandemic,"
        "is_neutral,is_forfeit,home_league,away_league\n"
        "2021-08-01,2021/2022,L.First,A,B,2,0,false,false,false,L.First,L.First\n"
        "2021-08-02,2021/2022,L.First,C,D,1,1,false,true,false,L.First,L.First\n")
    (tmp_path / "p.params").write_text("L.First.h = 0.4\nL.First.h_p = 0.1\n")
    (tmp_path / "fx.csv").write_text("date,home_team,away_team,is_neutral,is_pandemic\n"
                                     "2021-09-01,C,D,true,false\n2021-09-01,C,D,false,false\n")
    args = ["predict", "--data", str(tmp_path / "m.csv"), "--tiers", str(tmp_path / "tiers.csv"),
            "--params", str(tmp_path / "p.params"), "--fixtures", str(tmp_path / "fx.csv"),
            "--out", str(tmp_path)]
    assert main(args) == 0
    neutral, home = list(csv.DictReader((tmp_path / "predictions.csv").open()))
    assert float(neutral["p_home_win"]) == float(neutral["p_away_win"])
    assert float(home["p_home_win"]) > float(home["p_away_win"])


def test_predict_unknown_team(fitted, tmp_path, capsys):
    fixtures = tmp_path / "fx.csv"
    fixtures.write_text("date,home_team,away_team,is_neutral,is_pandemic\n2023-08-01,Ghost FC,Other,false,false\n")
    assert main(["predict", *data_args(fitted), "--params", str(fitted / "mod.params"),
                 "--fixtures", str(fixtures), "--out", str(tmp_path)]) == 1
    assert "Ghost FC" in capsys.readouterr().err


def test_config_file(fitted, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"data": str(fitted / "corpus" / "matches.csv"),
                               "tiers": str(fitted / "corpus" / "tiers.csv")}))
    assert main(["validate", "--config", str(cfg)]) == 0
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["validate", "--config", str(cfg)]) == 2


def test_missing_required_flag():
    assert main(["validate"]) == 2
