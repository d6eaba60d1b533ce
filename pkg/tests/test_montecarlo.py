import dataclasses

import numpy as np
import pytest

from fdbeam.codebook import cbf_codebook
from fdbeam.geometry import Direction, upa_array_response
from fdbeam.montecarlo import (
    ScenarioConfig,
    beam_align,
    draw_scenario_channel,
    drop_user_pair,
    reference_codebooks,
    run_trial,
    run_trials,
    sweep,
    trial_rng,
    write_sweep_csv,
    write_trials_csv,
)


@pytest.fixture(scope="module")
def base_cfg():
    return ScenarioConfig(seed=123, n_trials=20)


def test_drop_user_pair_reproducible(base_cfg):
    a = drop_user_pair(base_cfg, trial_rng(base_cfg.seed, 0))
    b = drop_user_pair(base_cfg, trial_rng(base_cfg.seed, 0))
    assert a == b
    c = drop_user_pair(base_cfg, trial_rng(base_cfg.seed, 1))
    assert a != c


def test_drop_user_pair_uniform_moments(base_cfg):
    n = 100_000
    rng = trial_rng(7, 0)
    azs = np.array([drop_user_pair(base_cfg, rng)[0].azimuth_deg for _ in range(n)])
    lo, hi = base_cfg.user_az_range
    sigma = (hi - lo) / np.sqrt(12)
    assert abs(np.mean(azs) - (lo + hi) / 2) < 3 * sigma / np.sqrt(n)


def test_drop_degenerate_range():
    cfg = ScenarioConfig(seed=0, n_trials=1, user_az_range=(5.0, 5.0), user_el_range=(-3.0, -3.0))
    dl, ul = drop_user_pair(cfg, trial_rng(0, 0))
    assert dl == Direction(5.0, -3.0)
    assert ul == Direction(5.0, -3.0)


def test_beam_align_matched_direction(base_cfg):
    geom = base_cfg.geometry()
    region = base_cfg.region()
    cb = cbf_codebook(geom, region, None)
    for i in (0, 17, 44):
        h = upa_array_response(geom, region[i])
        assert beam_align(cb, h, "tx") == i
        assert beam_align(cb, h, "rx") == i


def test_beam_align_single_beam(base_cfg):
    geom = base_cfg.geometry()
    from fdbeam.geometry import CoverageRegion

    cb = cbf_codebook(geom, CoverageRegion((Direction(10, 10),)), None)
    h = upa_array_response(geom, Direction(-50, 0))
    assert beam_align(cb, h, "tx") == 0


def test_beam_align_midpoint_matches_exhaustive(base_cfg):
    geom = base_cfg.geometry()
    region = base_cfg.region()
    cb = cbf_codebook(geom, region, None)
    h = upa_array_response(geom, Direction(-52.5, 0.0))  # midpoint between grid azimuths
    got = beam_align(cb, h, "tx")
    gains = [abs(np.vdot(h, cb.beam(i))) ** 2 for i in range(cb.num_beams)]
    assert got == int(np.argmax(gains))
    assert region[got].azimuth_deg in (-60.0, -45.0)


def test_trial_gamma_one_for_cbf_no_interference():
    cfg = ScenarioConfig(seed=5, n_trials=10, inrbar_db=float("-inf"))
    for r in run_trials(cfg):
        assert r.gamma_sum == 1.0
        assert r.inr_rx == 0.0
        assert r.sinr_rx == r.snr_rx


def test_trial_taylor_below_one_without_interference():
    cfg = ScenarioConfig(
        seed=5, n_trials=10, inrbar_db=float("-inf"),
        tx_codebook="taylor", rx_codebook="taylor",
    )
    for r in run_trials(cfg):
        assert r.gamma_sum < 1.0


def test_trial_bit_reproducible(base_cfg):
    f_cb, w_cb = reference_codebooks(base_cfg)
    rng1 = trial_rng(base_cfg.seed, 4)
    h1 = draw_scenario_channel(base_cfg, rng1)
    r1 = run_trial(base_cfg, f_cb, w_cb, h1, rng1)
    rng2 = trial_rng(base_cfg.seed, 4)
    h2 = draw_scenario_channel(base_cfg, rng2)
    r2 = run_trial(base_cfg, f_cb, w_cb, h2, rng2)
    assert r1 == r2


def test_mixture_and_error_channels_vary_per_trial():
    cfg = ScenarioConfig(seed=9, n_trials=2, channel_kind="mixture", zeta_sq_db=0.0)
    h0 = draw_scenario_channel(cfg, trial_rng(9, 0))
    h1 = draw_scenario_channel(cfg, trial_rng(9, 1))
    assert not np.array_equal(h0, h1)
    n = cfg.rows * cfg.cols
    assert np.isclose(np.linalg.norm(h0, "fro") ** 2, n * n)

    cfg_e = dataclasses.replace(cfg, channel_kind="error", eps_sq_db=-20.0)
    he = draw_scenario_channel(cfg_e, trial_rng(9, 0))
    assert not np.array_equal(he, draw_scenario_channel(cfg_e, trial_rng(9, 1)))


def test_sweep_single_point_matches_run_trials(base_cfg):
    rows = sweep(base_cfg, {"inrbar_db": [40.0]})
    assert len(rows) == 1
    cfg = dataclasses.replace(base_cfg, inrbar_db=40.0)
    reports = run_trials(cfg)
    assert np.isclose(rows[0].mean_gamma, np.mean([r.gamma_sum for r in reports]))
    assert rows[0].n_trials == base_cfg.n_trials


def test_sweep_monotone_in_interference(base_cfg):
    cfg = dataclasses.replace(base_cfg, n_trials=100)
    rows = sweep(cfg, {"inrbar_db": [30.0, 60.0, 90.0]})
    gammas = [r.mean_gamma for r in rows]
    assert gammas[0] > gammas[-1]
    for a, b in zip(gammas, gammas[1:]):
        assert b <= a + 0.02


def test_csv_emission(tmp_path, base_cfg):
    reports = run_trials(base_cfg)
    trial_path = tmp_path / "trials.csv"
    write_trials_csv(trial_path, reports)
    lines = trial_path.read_text().splitlines()
    assert lines[0] == "trial,snr_tx_db,snr_rx_db,inr_rx_db,inr_tx_db,r_tx,r_rx,gamma_sum"
    assert len(lines) == 1 + base_cfg.n_trials
    # parseable floats, including -inf
    for tok in lines[1].split(",")[1:]:
        float(tok)

    rows = sweep(base_cfg, {"inrbar_db": [30.0, 50.0]})
    sweep_path = tmp_path / "sweep.csv"
    write_sweep_csv(sweep_path, rows)
    lines = sweep_path.read_text().splitlines()
    assert lines[0] == "inrbar_db,mean_gamma,median_gamma,mean_inr_db,n_trials"
    assert len(lines) == 3
