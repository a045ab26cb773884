import csv
import math

import pytest

import _shootout as sh


def test_prob_triple():
    t = sh.ProbTriple(0.7, 0.2, 0.1)
    assert t.as_tuple() == (0.7, 0.2, 0.1)
    assert t.p_event() == pytest.approx(0.3)
    with pytest.raises(sh.HarnessError):
        sh.ProbTriple(0.5, 0.5, 0.5)


def test_classify_report():
    assert sh.classify_report("1989-06-01", sh.Zone.Z1, 1200, "hail", 0.8) == 2
    assert sh.classify_report("1989-06-01", sh.Zone.Z1, 1200, "wind", 40) == 1
    assert sh.classify_report("1989-06-01", sh.Zone.Z1, 1200, "hail", 0.1) == 0


def test_rules_round_trip():
    text = "HYPOTHESIS h1 FOR 2 WHEN cape > 2000 AND shear > 30 CONFIDENCE 0.8\n"
    rules = sh.parse_rules(text)
    assert rules.size == 1
    assert sh.parse_rules(rules.render()).render() == rules.render()
    with pytest.raises(sh.RuleSyntaxError):
        sh.parse_rules("HYPOTHESIS bad FOR 5 WHEN x > 0 CONFIDENCE 0.5")


def test_backward_chain():
    rules = sh.parse_rules(
        "HYPOTHESIS a FOR 2 WHEN cape > 2000 CONFIDENCE 0.6\n"
        "HYPOTHESIS b FOR 0 WHEN cape < 500 CONFIDENCE 0.4\n"
    )
    prior = sh.ProbTriple(0.7, 0.2, 0.1)
    triple, report = sh.backward_chain(rules, {"cape": 2500.0}, prior)
    assert triple.p2 == pytest.approx(1.0)
    assert "a" in report
    # nothing fires: the prior comes back
    quiet, _ = sh.backward_chain(rules, {"cape": 1000.0}, prior)
    assert quiet.as_tuple() == (0.7, 0.2, 0.1)


def test_staged_pipeline():
    rules = sh.parse_rules(
        "NECESSARY n WHEN humidity >= 30\n"
        "SUFFICIENT s WHEN cape > 2000\n"
        "MODIFIER m WHEN shear > 30 SCALE 2 BY 1.5\n"
    )
    hot = sh.staged_pipeline(
        rules,
        {"humidity": 60.0, "cape": 2500.0, "shear": 35.0},
        0.5,
        sh.ProbTriple(0.2, 0.3, 0.5),
        sh.ProbTriple(0.85, 0.12, 0.03),
    )
    assert hot.p2 > 0.5
    gated = sh.staged_pipeline(
        rules,
        {"humidity": 10.0, "cape": 2500.0, "shear": 35.0},
        0.5,
        sh.ProbTriple(0.2, 0.3, 0.5),
        sh.ProbTriple(0.85, 0.12, 0.03),
    )
    assert gated.p0 > 0.5


def test_scoring():
    bs = sh.brier_binary([(0.8, 1), (0.2, 0), (0.6, 1), (0.4, 0)])
    assert bs == pytest.approx(0.10, abs=1e-12)
    assert sh.skill_score(bs, 0.25) == pytest.approx(0.6, abs=1e-12)
    assert sh.skill_score(0.0, 0.0) == 0.0


def test_updraft():
    heights = [float(z) for z in range(0, 1001)]
    buoyancy = [0.01] * len(heights)
    w_max, profile = sh.integrate_updraft(heights, buoyancy, 0.0, 1.0)
    assert w_max == pytest.approx(math.sqrt(2 * 0.01 * 1000), rel=1e-3)
    assert len(profile) == len(heights)


def test_entropy():
    assert sh.entropy({"yes": 1, "no": 1}) == pytest.approx(1.0)
    assert sh.entropy({"yes": 4}) == 0.0


def test_season_round_trip(tmp_path):
    season = tmp_path / "season"
    sh.generate_season(str(season), 6, 7)
    out = sh.run_experiment(str(season / "config.json"))
    with open(f"{out}/skill_report.csv") as f:
        rows = list(csv.DictReader(f))
    assert rows
    assert {r["forecaster"] for r in rows} >= {"alps", "swap", "kasspr"}
