"""End-to-end CLI behaviour: artifacts, headers, reproducibility, exit codes."""

from pathlib import Path

import pytest

from archsim.cli import main

RUN_CFG = "c = 5\nw = 3\nseed = 4\nmax_steps = 500\n"

MEASUREMENTS_HEADER = "c,w,W,seed,replicate,arch_detected,T,M,m,cluster_size"

# two crowd sizes, T exactly linear in w, shapes varying but far from the
# wall-to-wall regime
PERFECT_LINE_CSV = MEASUREMENTS_HEADER + "\n" + "\n".join(
    f"{c},{w},19,5,0,1,{T},{w + 2},{w + 4},{3 * w}"
    for c, slope, icpt in ((200, -1, 30), (400, -2, 50))
    for w, T in ((w, slope * w + icpt) for w in (1, 3, 5))
) + "\n"


@pytest.fixture
def run_dir(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(RUN_CFG)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    return out


def test_run_writes_exactly_four_files(run_dir):
    names = sorted(p.name for p in run_dir.iterdir())
    assert names == [
        "effective_config.txt", "measurement.csv", "summary.csv", "trace.csv",
    ]


def test_artifact_headers(run_dir):
    first = lambda name: (run_dir / name).read_text().splitlines()[0]
    assert first("trace.csv") == "t,agent_id,transverse,longitudinal,exited"
    assert first("summary.csv") == "t,exits_this_step,stationary_count"
    assert first("measurement.csv") == MEASUREMENTS_HEADER


def test_run_missing_config(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "no.cfg"),
                 "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and "no.cfg" in err


def test_run_rejects_oversized_crowd(tmp_path, capsys):
    cfg = tmp_path / "big.cfg"
    cfg.write_text("c = 2000\nw = 3\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "exceeds" in capsys.readouterr().err


def test_run_seed_flag_overrides_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(RUN_CFG)
    out = tmp_path / "o"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--seed", "9"]) == 0
    assert "seed = 9" in (out / "effective_config.txt").read_text()
    assert (out / "measurement.csv").read_text().splitlines()[1].startswith("5,3,19,9,0,")


def test_rerun_is_byte_identical(run_dir, tmp_path):
    cfg = tmp_path / "again.cfg"
    cfg.write_text(RUN_CFG)
    out2 = tmp_path / "out2"
    assert main(["run", "--config", str(cfg), "--out", str(out2)]) == 0
    assert (out2 / "trace.csv").read_bytes() == (run_dir / "trace.csv").read_bytes()


def test_sidecar_reproduces_run(run_dir, tmp_path):
    out2 = tmp_path / "replay"
    assert main(["run", "--config", str(run_dir / "effective_config.txt"),
                 "--out", str(out2)]) == 0
    assert (out2 / "trace.csv").read_bytes() == (run_dir / "trace.csv").read_bytes()


def test_run_frame_matches_render(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(RUN_CFG)
    out = tmp_path / "o"
    assert main(["run", "--config", str(cfg), "--out", str(out),
                 "--format", "ascii", "--step", "0"]) == 0
    capsys.readouterr()  # drop the run banner

    frame = (out / "frame_0.txt").read_text()
    assert main(["render", str(out / "trace.csv"),
                 "--config", str(out / "effective_config.txt"), "--step", "0"]) == 0
    stdout = capsys.readouterr().out
    assert stdout == frame
    # t=0: all five agents present and nobody has moved yet
    assert stdout.count("x") == 5 and stdout.count("o") == 0
    assert stdout.startswith("#")


def test_render_svg_to_file(run_dir, tmp_path):
    target = tmp_path / "frame.svg"
    assert main(["render", str(run_dir / "trace.csv"),
                 "--config", str(run_dir / "effective_config.txt"),
                 "--format", "svg", "--out", str(target)]) == 0
    assert target.read_text().startswith("<svg")


def test_render_step_out_of_range(run_dir, capsys):
    assert main(["render", str(run_dir / "trace.csv"),
                 "--config", str(run_dir / "effective_config.txt"),
                 "--step", "999999"]) == 1
    assert "outside trace" in capsys.readouterr().err


def _sweep(tmp_path, text, name="sweep.cfg", extra=()):
    cfg = tmp_path / name
    cfg.write_text(text)
    out = tmp_path / (name + ".out")
    status = main(["sweep", "--config", str(cfg), "--out", str(out), *extra])
    return status, out


def test_sweep_artifacts_and_sidecar(tmp_path):
    status, out = _sweep(
        tmp_path,
        "c_levels = 20,40\nw_levels = 3,5\nreplicates = 2\n"
        "base_seed = 1\nmax_steps = 400\n",
    )
    assert status == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["effective_config.txt", "measurements.csv", "sweep_table.csv"]
    measurements = (out / "measurements.csv").read_text().splitlines()
    assert measurements[0] == MEASUREMENTS_HEADER
    assert len(measurements) == 9  # 2c x 2w x 2 replicates
    table = (out / "sweep_table.csv").read_text().splitlines()
    assert table[0] == ("c,w,W,n_replicates,n_detected,arch_rate,"
                        "T_mean,T_sd,M_mean,M_sd,m_mean,m_sd")
    assert len(table) == 5  # one row per (c, w) cell
    sidecar = (out / "effective_config.txt").read_text()
    assert sidecar.splitlines()[-1] == (
        "# per-run seed = first 8 bytes of sha256('base_seed:c:w:replicate')"
    )


def test_sweep_parallelism_does_not_change_bytes(tmp_path):
    text = ("c_levels = 15,25\nw_levels = 3\nreplicates = 2\n"
            "base_seed = 7\nmax_steps = 300\n")
    _, serial = _sweep(tmp_path, text, name="serial.cfg", extra=["--parallelism", "1"])
    _, wide = _sweep(tmp_path, text, name="wide.cfg", extra=["--parallelism", "8"])
    assert (serial / "measurements.csv").read_bytes() == \
        (wide / "measurements.csv").read_bytes()


def test_sweep_partial_failure(tmp_path, capsys):
    status, out = _sweep(
        tmp_path,
        "c_levels = 10,1100\nw_levels = 3\nreplicates = 1\nmax_steps = 200\n",
    )
    assert status == 1
    assert "errors.csv" in capsys.readouterr().err
    assert (out / "errors.csv").read_text().splitlines()[1].startswith("1100,3,0,")
    # the healthy cell is still measured
    assert (out / "measurements.csv").read_text().splitlines()[1].startswith("10,3,")


def test_sweep_verbose_progress(tmp_path, capsys):
    status, _ = _sweep(
        tmp_path,
        "c_levels = 15\nw_levels = 3\nreplicates = 1\nmax_steps = 300\n",
        extra=["--verbose"],
    )
    assert status == 0
    assert "[1/1] c=15 w=3 replicate=0" in capsys.readouterr().out


def _analyze(csv_text, tmp_path, *extra):
    tmp_path.mkdir(parents=True, exist_ok=True)
    src = tmp_path / "measurements.csv"
    src.write_text(csv_text)
    out = tmp_path / "analysis"
    status = main(["analyze", str(src), "--out", str(out), *extra])
    return status, out


def test_analyze_perfect_lines(tmp_path):
    status, out = _analyze(PERFECT_LINE_CSV, tmp_path)
    assert status == 0
    assert (out / "regression.csv").read_text() == (
        "c,slope,intercept,r_squared,t_stat,n\n"
        "200,-1.0,30.0,1.0,,3\n"     # zero residual: no finite t statistic
        "400,-2.0,50.0,1.0,,3\n"
    )
    table = (out / "sweep_table.csv").read_text().splitlines()
    assert table[1] == "200,1,19,1,1,1.0,29.0,0.0,3.0,0.0,5.0,0.0"
    trends = (out / "trends.csv").read_text().splitlines()
    assert [line.split(",")[0] for line in trends] == [
        "trend", "T_vs_inverse_cw", "M_vs_c_over_w", "m_vs_cw",
    ]
    for line in trends[1:]:
        _, r, n_cells, excluded = line.split(",")
        assert -1.0 <= float(r) <= 1.0
        assert (n_cells, excluded) == ("6", "0")
    assert sorted(p.name for p in out.glob("*.svg")) == [
        "T_vs_w_c200.svg", "T_vs_w_c400.svg",
    ]


def test_analyze_per_replicate_changes_sample_size(tmp_path):
    doubled = PERFECT_LINE_CSV + "".join(
        line.replace(",0,1,", ",1,1,", 1) + "\n"
        for line in PERFECT_LINE_CSV.splitlines()[1:]
    )
    _, means_out = _analyze(PERFECT_LINE_CSV, tmp_path)
    status, raw_out = _analyze(doubled, tmp_path / "raw", "--per-replicate")
    assert status == 0
    means = (means_out / "regression.csv").read_text().splitlines()
    raw = (raw_out / "regression.csv").read_text().splitlines()
    assert means[1].split(",")[1] == raw[1].split(",")[1] == "-1.0"  # same slope
    assert means[1].split(",")[-1] == "3" and raw[1].split(",")[-1] == "6"


def test_analyze_few_cells_leaves_trends_empty(tmp_path):
    two_cells = MEASUREMENTS_HEADER + "\n" \
        "400,1,19,5,0,1,48,3,5,3\n" \
        "400,3,19,5,0,1,44,5,7,9\n"
    status, out = _analyze(two_cells, tmp_path)
    assert status == 0
    assert (out / "trends.csv").read_text() == \
        "trend,pearson_r,n_cells,n_saturated_excluded\n"
    regression = (out / "regression.csv").read_text().splitlines()
    assert len(regression) == 2 and regression[1].startswith("400,-2.0,")


def test_analyze_survives_sweep_without_detections(tmp_path):
    # small crowds never jam; every pipeline stage must still succeed
    status, out = _sweep(
        tmp_path,
        "c_levels = 10,20\nw_levels = 5,7\nreplicates = 1\nmax_steps = 300\n",
    )
    assert status == 0
    out2 = tmp_path / "analysis"
    assert main(["analyze", str(out / "measurements.csv"), "--out", str(out2)]) == 0
    assert (out2 / "sweep_table.csv").read_text().count("\n") == 5


def test_analyze_empty_measurements(tmp_path, capsys):
    status, _ = _analyze(MEASUREMENTS_HEADER + "\n", tmp_path)
    assert status == 1
    assert "no measurement rows" in capsys.readouterr().err


def test_analyze_missing_file(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "o")]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_analyze_default_sweep(default_sweep, tmp_path):
    out = tmp_path / "analysis"
    assert main(["analyze", str(default_sweep.out / "measurements.csv"),
                 "--out", str(out)]) == 0
    table = (out / "sweep_table.csv").read_text().splitlines()
    assert len(table) == 36  # header + one row per factorial cell
    fits = (out / "regression.csv").read_text().splitlines()[1:]
    assert len(list(out.glob("T_vs_w_c*.svg"))) == len(fits)


def test_default_sweep_shape(default_sweep):
    rows = default_sweep.rows
    assert len(rows) == 105
    assert [(r.c, r.w, r.replicate) for r in rows] == sorted(
        (c, w, rep)
        for c in (200, 300, 350, 400, 450)
        for w in (1, 3, 5, 7, 9, 11, 13)
        for rep in range(3)
    )
