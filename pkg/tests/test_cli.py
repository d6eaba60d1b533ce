import numpy as np

from fdbeam.cli import main
from fdbeam.codebook import read_codebook_csv


def run(args):
    return main([str(a) for a in args])


def test_codebook_cbf_file(tmp_path):
    out = tmp_path / "cbf.csv"
    rc = run([
        "codebook", "--kind", "cbf", "--rows", 8, "--cols", 8,
        "--grid=-60:15:60,-30:15:30", "--bits", "8,8",
        "--atten-step", 0.5, "--out", out,
    ])
    assert rc == 0
    cb = read_codebook_csv(out)
    assert cb.matrix.shape == (64, 45)
    assert cb.spec is not None and cb.spec.phase_bits == 8


def test_codebook_taylor_file(tmp_path):
    out = tmp_path / "tay.csv"
    rc = run([
        "codebook", "--kind", "taylor", "--sll", 25, "--rows", 8, "--cols", 8,
        "--grid=-60:15:60,-30:15:30", "--out", out,
    ])
    assert rc == 0
    cb = read_codebook_csv(out)
    assert cb.matrix.shape == (64, 45)


def test_missing_required_key_names_it(tmp_path, capsys):
    rc = run(["codebook", "--kind", "cbf", "--rows", 8, "--cols", 8, "--out", tmp_path / "x.csv"])
    assert rc == 2
    assert "grid" in capsys.readouterr().err


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("kind = cbf\nbogus_key = 1\n")
    rc = run(["codebook", "--config", cfgfile, "--rows", 8, "--cols", 8,
              "--grid=-60:15:60,-30:15:30", "--out", tmp_path / "x.csv"])
    assert rc == 2
    assert "bogus_key" in capsys.readouterr().err


def test_config_file_with_cli_override(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text(
        "kind = cbf\nrows = 4\ncols = 4\ngrid = -30:30:30,0:15:0\n"
        "out = " + str(tmp_path / "a.csv") + "\n"
    )
    rc = run(["codebook", "--config", cfgfile])
    assert rc == 0
    assert read_codebook_csv(tmp_path / "a.csv").matrix.shape == (16, 3)

    rc = run(["codebook", "--config", cfgfile, "--rows", 2, "--out", tmp_path / "b.csv"])
    assert rc == 0
    assert read_codebook_csv(tmp_path / "b.csv").matrix.shape == (8, 3)


def test_eval_interference_free_gamma_one(tmp_path):
    out = tmp_path / "eval.csv"
    rc = run(["eval", "--inrbar=-inf", "--codebook", "cbf", "--trials", 8,
              "--seed", 1, "--out", out])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].endswith("gamma_sum")
    for line in lines[1:]:
        assert float(line.split(",")[-1]) == 1.0


def test_eval_from_codebook_files(tmp_path):
    f_path = tmp_path / "f.csv"
    run(["codebook", "--kind", "taylor", "--rows", 8, "--cols", 8,
         "--grid=-60:15:60,-30:15:30", "--out", f_path])
    out = tmp_path / "eval.csv"
    rc = run(["eval", "--inrbar=-inf", "--codebook", "file",
              "--tx-file", f_path, "--rx-file", f_path,
              "--trials", 5, "--seed", 1, "--out", out])
    assert rc == 0
    for line in out.read_text().splitlines()[1:]:
        assert float(line.split(",")[-1]) < 1.0


def test_sweep_shape_and_monotone(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = run(["sweep", "--inrbar", "30:10:110", "--codebook", "cbf",
              "--trials", 50, "--seed", 2, "--out", out])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "inrbar_db,mean_gamma,median_gamma,mean_inr_db,n_trials"
    assert len(lines) == 10
    gammas = [float(l.split(",")[1]) for l in lines[1:]]
    for a, b in zip(gammas, gammas[1:]):
        assert b <= a + 0.02


def test_sweep_requires_a_range(tmp_path, capsys):
    rc = run(["sweep", "--codebook", "cbf", "--trials", 5, "--out", tmp_path / "s.csv"])
    assert rc == 2


def test_design_emits_pair_and_report(tmp_path):
    rc = run(["design", "--rows", 4, "--cols", 4, "--grid=-45:45:45,0:15:0",
              "--sigma-sq-db=-15", "--out-tx", tmp_path / "F.csv",
              "--out-rx", tmp_path / "W.csv", "--report", tmp_path / "rep.csv"])
    assert rc == 0
    f_cb = read_codebook_csv(tmp_path / "F.csv")
    assert f_cb.matrix.shape == (16, 3)
    rep = (tmp_path / "rep.csv").read_text().splitlines()
    assert rep[0].startswith("step,objective")
    objs = [float(l.split(",")[1]) for l in rep[1:]]
    assert objs[-1] < objs[0]


def test_design_beamwise_same_schema(tmp_path):
    rc = run(["design", "--rows", 4, "--cols", 4, "--grid=-45:45:45,0:15:0",
              "--sigma-sq-db=-15", "--mode", "beamwise",
              "--out-tx", tmp_path / "F.csv", "--out-rx", tmp_path / "W.csv",
              "--report", tmp_path / "rep.csv"])
    assert rc == 0
    assert read_codebook_csv(tmp_path / "F.csv").matrix.shape == (16, 3)


def test_design_zero_channel_short_trace(tmp_path):
    # a zero channel estimate round-trips through the channel CSV format
    from fdbeam.channel import write_channel_csv

    h0 = np.zeros((16, 16), dtype=complex)
    hpath = tmp_path / "h0.csv"
    write_channel_csv(hpath, h0)
    rc = run(["design", "--rows", 4, "--cols", 4, "--grid=-45:45:45,0:15:0",
              "--sigma-sq-db=-15", "--channel-file", hpath,
              "--out-tx", tmp_path / "F.csv", "--out-rx", tmp_path / "W.csv",
              "--report", tmp_path / "rep.csv"])
    assert rc == 0
    rep = (tmp_path / "rep.csv").read_text().splitlines()
    assert len(rep) == 2  # header + the single early-exit trace entry


def test_simodel_trace_within_bounds(tmp_path):
    out = tmp_path / "trace.csv"
    rc = run(["simodel", "--preset", "default", "--draws", 200,
              "--tx", "0,0", "--rx", "0,0", "--seed", 5, "--out", out])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,inr_db"
    vals = [float(l.split(",")[1]) for l in lines[1:]]
    assert len(vals) == 200
    assert all(-44.57 - 1e-9 <= v <= 46.99 + 1e-9 for v in vals)


def test_simodel_vertical_preset_dump(tmp_path):
    out = tmp_path / "params.cfg"
    rc = run(["simodel", "--preset", "vertical", "--dump-params", "true", "--out", out])
    assert rc == 0
    text = out.read_text()
    assert "g_bar_sq_db = -142.83" in text


def test_simodel_matrix(tmp_path):
    out = tmp_path / "mat.csv"
    rc = run(["simodel", "--matrix", "true", "--beams", 6, "--seed", 7, "--out", out])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "i,j,inr_db"
    assert len(lines) == 1 + 36


def test_pattern_cbf_peak(tmp_path):
    out = tmp_path / "pat.csv"
    rc = run(["pattern", "--kind", "cbf", "--rows", 8, "--cols", 8,
              "--az", 0, "--el", 0, "--step", 1, "--out", out])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "angle_deg,gain_db"
    rows = [(float(l.split(",")[0]), float(l.split(",")[1])) for l in lines[1:]]
    peak = max(rows, key=lambda t: t[1])
    assert peak[0] == 0.0
    assert abs(peak[1] - 10 * np.log10(64.0**2)) < 0.01


def test_pattern_taylor_sidelobes(tmp_path):
    out = tmp_path / "pat.csv"
    rc = run(["pattern", "--kind", "taylor", "--sll", 25, "--rows", 8, "--cols", 8,
              "--az", 0, "--el", 0, "--step", 0.25, "--out", out])
    assert rc == 0
    rows = [
        (float(l.split(",")[0]), float(l.split(",")[1]))
        for l in out.read_text().splitlines()[1:]
    ]
    gains = np.array([g for _, g in rows])
    rel = gains - gains.max()
    peaks = [
        rel[i] for i in range(1, len(rel) - 1)
        if rel[i] >= rel[i - 1] and rel[i] >= rel[i + 1] and rel[i] < 0.0
    ]
    assert max(peaks) <= -23.0


def test_pattern_step_doubles_rows(tmp_path):
    out1 = tmp_path / "p1.csv"
    out2 = tmp_path / "p2.csv"
    run(["pattern", "--kind", "cbf", "--rows", 4, "--cols", 4, "--step", 1, "--out", out1])
    run(["pattern", "--kind", "cbf", "--rows", 4, "--cols", 4, "--step", 0.5, "--out", out2])
    n1 = len(out1.read_text().splitlines()) - 1
    n2 = len(out2.read_text().splitlines()) - 1
    assert n2 == 2 * n1 - 1


def test_io_error_exit_code(tmp_path):
    rc = run(["codebook", "--kind", "cbf", "--rows", 4, "--cols", 4,
              "--grid=-30:30:30,0:15:0", "--out", tmp_path / "nodir" / "x.csv"])
    assert rc == 3
