import math
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from holegreen import study
from holegreen.cli import main
from holegreen.geometry import read_config
from holegreen.hole_kernel import AnalyticBallHole

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
EPS = (0.2, 0.1, 0.05, 0.025)


def test_fit_order_recovers_power_law():
    eps = np.array(EPS)
    fit = study.fit_order(eps, 3 * eps**2)
    assert_allclose(fit.order, 2.0, atol=1e-12)
    assert_allclose(fit.intercept, math.log(3), atol=1e-12)
    assert fit.residual < 1e-12
    with pytest.raises(ValueError):
        study.fit_order([0.1], [1.0])
    with pytest.raises(ValueError):
        study.fit_order([0.1, 0.05], [1.0, 0.0])


def test_pooled_slope_shares_slope_across_rows():
    radii = np.array([2.0, 4.0, 8.0, 16.0])
    errors = radii[:, None] ** -2.0 * np.array([5.0, 0.2])[None, :]
    slope, sup_slope = study.pooled_slope(radii, errors)
    assert_allclose(slope, -2.0, atol=1e-12)
    assert_allclose(sup_slope, -2.0, atol=1e-12)


def test_check_line_format():
    assert study.Check("a", True, 1.0, "ok").line() == "[PASS] a: ok"
    assert study.Check("b", False).line() == "[FAIL] b"


@pytest.mark.parametrize("bad", [(0.2, 0.1, 0.05), (0.2, 0.1, 0.1, 0.05), (0.4, 0.2, 0.1, 0.05)])
def test_sweep_rejects_bad_eps_lists(scenes, bad):
    with pytest.raises(ValueError):
        study.sweep(scenes("ball3"), bad, pairs=2)


@pytest.fixture(scope="module")
def small_sweep():
    scene = study.build_scene(study.PRESETS["ball3-offcenter"]())
    return study.sweep(scene, EPS, pairs=10, seed=11)


def test_sweep_report_shapes(small_sweep):
    rep = small_sweep
    assert rep.eps == list(EPS)
    assert len(rep.rows) == 4 * 4 * 10
    assert rep.weighted_ratio() >= 1
    assert "sup raw order" in rep.summary()
    assert all(np.isfinite(rep.sup_weighted()))


def test_csv_header_and_byte_identical_reruns(small_sweep, tmp_path):
    assert study.csv_header(3) == ["scene_id", "n", "eps", "stratum", "x0", "x1", "x2", "y0", "y1", "y2",
                                   "asym_value", "oracle_value", "abs_err", "weight", "weighted_err"]
    scene = study.build_scene(study.PRESETS["ball3-offcenter"]())
    again = study.sweep(scene, EPS, pairs=10, seed=11, workers=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    study.write_csv(small_sweep, a)
    study.write_csv(again, b)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == ",".join(study.csv_header(3))


def test_merge_and_summarize(small_sweep, tmp_path):
    a, out = tmp_path / "a.csv", tmp_path / "m.csv"
    study.write_csv(small_sweep, a)
    assert study.merge_csv([a, a], out) == 2 * len(small_sweep.rows)
    summary = study.summarize_csv(out)
    assert set(summary) == {("ball3-offcenter", e) for e in EPS}
    for e in EPS:
        assert_allclose(summary[("ball3-offcenter", e)], max(s.max_raw for s in small_sweep.stats[e].values()))
    other = tmp_path / "other.csv"
    other.write_text("different,header\n1,2\n")
    with pytest.raises(ValueError):
        study.merge_csv([a, other], tmp_path / "x.csv")


def test_lemma_checks_on_analytic_ball():
    ball = AnalyticBallHole(3)
    assert study.potential_bound(ball).passed
    assert study.far_field_slope(ball).passed
    disk = AnalyticBallHole(2)
    assert study.planar_far_field_slope(disk).passed


def test_exterior_probes_are_outside_the_hole():
    hole = AnalyticBallHole(3)
    pts = study.exterior_probes(hole, 200, 1)
    r = np.linalg.norm(pts, axis=-1)
    assert np.all((r > 1) & (r < 10))


@pytest.mark.parametrize("name", sorted(CONFIGS.glob("*.cfg")), ids=lambda p: p.stem)
def test_shipped_configs_parse(name):
    cfg, eps = read_config(name)
    assert cfg.scene_id
    assert len(eps) >= 4


def test_config_eps_override_and_normalization():
    cfg, eps = read_config(CONFIGS / "egg2_scaled.cfg", [0.2, 0.1])
    # the override is in file units and is rescaled along with the geometry
    assert_allclose(eps, [0.1, 0.05])
    assert_allclose(cfg.outer_radius, 1.3)


# --- command line ------------------------------------------------------------------

def test_cli_eval_prints_terms(capsys):
    assert main(["eval", "--preset", "ball3", "--eps", "0.1", "--x", "0.4,0,0", "--y", "0,0.4,0"]) == 0
    out = capsys.readouterr().out
    for name in ("outer_G", "capacity_cross", "value", "abs_err"):
        assert name in out


def test_cli_eval_without_oracle_and_negative_coordinates(capsys):
    assert main(["eval", "--preset", "disk2", "--oracle", "none", "--x=-0.3,0.1", "--y", "0.2,0.2"]) == 0
    assert "abs_err" not in capsys.readouterr().out


def test_cli_sweep_writes_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code = main(["sweep", "--preset", "ball3", "--pairs", "5", "--out", str(out), "--workers", "2"])
    assert code == 0
    assert out.read_text().startswith("scene_id,n,eps,stratum")
    assert "[PASS] weighted error" in capsys.readouterr().out


def test_cli_report_merges(tmp_path, capsys):
    out = tmp_path / "s.csv"
    main(["sweep", "--preset", "disk2", "--pairs", "3", "--stratum", "bulk", "--out", str(out)])
    merged = tmp_path / "m.csv"
    assert main(["report", str(out), str(out), "--out", str(merged)]) == 0
    assert "merged 24 rows" in capsys.readouterr().out


def test_cli_verify_lemmas_and_compare_naive(capsys):
    assert main(["verify-lemmas", "--preset", "ball3"]) == 0
    assert main(["compare-naive", "--preset", "ball3", "--pairs", "20"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "plain G" in out


def test_cli_errors_exit_with_two(capsys):
    assert main(["sweep", "--preset", "ball3", "--eps", "0.2,0.1"]) == 2
    assert main(["eval", "--preset", "ball3", "--x", "0.01,0,0", "--y", "0.3,0,0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_accept_single_criterion(capsys):
    assert main(["accept", "--criteria", "7"]) == 0
    assert "[PASS] criterion 7" in capsys.readouterr().out
