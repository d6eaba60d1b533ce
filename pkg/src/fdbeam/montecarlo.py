"""Monte Carlo link-level harness: user drops, beam alignment, trials, sweeps.

Reproducibility contract: trial ``t`` consumes only the counter-derived
stream ``default_rng([seed, t])``, so results do not depend on
execution order and a (seed, config) pair determines every output bit.
Users see LOS channels equal to the array response of their direction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from fdbeam.channel import ChannelEstimate, draw_true_channel, rayleigh_mixture_channel, spherical_wave_channel
from fdbeam.codebook import Codebook, cbf_codebook, taylor_codebook
from fdbeam.design import DesignConfig, design_codebooks
from fdbeam.geometry import CoverageRegion, Direction, UpaGeometry, coverage_region_grid, upa_array_response
from fdbeam.metrics import LinkBudget, LinkReport, gamma_sum, inr_rx, lin_to_db, sinr_and_rates, snr_rx, snr_tx
from fdbeam.quant import QuantizationSpec

SPEED_OF_LIGHT = 299792458.0
DEFAULT_CARRIER_HZ = 30e9


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one Monte Carlo experiment."""

    seed: int = 0
    n_trials: int = 500
    user_az_range: tuple[float, float] = (-67.5, 67.5)
    user_el_range: tuple[float, float] = (-37.5, 37.5)
    snrbar_tx_db: float = 10.0
    snrbar_rx_db: float = 10.0
    inrbar_db: float = 90.0
    inr_tx_db: float = float("-inf")
    channel_kind: str = "spherical"  # spherical | mixture | error
    zeta_sq_db: float = 0.0
    eps_sq_db: float = float("-inf")
    tx_codebook: str = "cbf"  # cbf | taylor | designed | file
    rx_codebook: str = "cbf"
    taylor_sll_db: float = 25.0
    taylor_nbar: int = 4
    sigma_sq_db: float = -15.0
    outer_iters: int = 4
    solver_tol: float = 1e-4
    rows: int = 8
    cols: int = 8
    spacing_wavelengths: float = 0.5
    carrier_hz: float = DEFAULT_CARRIER_HZ
    grid: tuple[float, float, float, float, float, float] = (-60, 60, 15, -30, 30, 15)
    phase_bits: int = 8
    amp_bits: int = 8
    atten_step_db: float = 0.5
    rx_offset_wavelengths: tuple[float, float, float] = (0.0, 0.0, 10.0)
    tx_codebook_file: str = ""
    rx_codebook_file: str = ""

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if self.user_az_range[0] > self.user_az_range[1] or self.user_el_range[0] > self.user_el_range[1]:
            raise ValueError("user ranges must be nonempty")
        if self.channel_kind not in ("spherical", "mixture", "error"):
            raise ValueError(f"unknown channel kind {self.channel_kind!r}")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    def geometry(self) -> UpaGeometry:
        return UpaGeometry(self.rows, self.cols, self.spacing_wavelengths, self.wavelength_m)

    def region(self) -> CoverageRegion:
        return coverage_region_grid(*self.grid)

    def quant_spec(self) -> QuantizationSpec:
        return QuantizationSpec(self.phase_bits, self.amp_bits, self.atten_step_db)

    def budget(self) -> LinkBudget:
        n = self.rows * self.cols
        return LinkBudget.from_targets(
            self.snrbar_tx_db, self.snrbar_rx_db, self.inrbar_db, self.inr_tx_db, n, n
        )


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-derived per-trial stream; independent of execution order."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFF, int(trial)])


def drop_user_pair(cfg: ScenarioConfig, rng: np.random.Generator) -> tuple[Direction, Direction]:
    """Independent uniform downlink/uplink directions over the user rectangle."""
    lo_a, hi_a = cfg.user_az_range
    lo_e, hi_e = cfg.user_el_range
    dl = Direction(rng.uniform(lo_a, hi_a), rng.uniform(lo_e, hi_e))
    ul = Direction(rng.uniform(lo_a, hi_a), rng.uniform(lo_e, hi_e))
    return dl, ul


def beam_align(cb: Codebook, h: np.ndarray, side: str) -> int:
    """Index of the codebook beam maximizing the side-appropriate SNR.

    Transmit alignment maximizes ``|h* f|^2``; receive alignment
    maximizes ``|w* h|^2 / ||w||^2``.  Ties break to the lowest index.
    """
    if cb.num_beams == 0:
        raise ValueError("codebook is empty")
    m = cb.matrix
    if side == "tx":
        metric = np.abs(h.conj() @ m) ** 2
    elif side == "rx":
        norms = np.sum(np.abs(m) ** 2, axis=0)
        metric = np.abs(m.conj().T @ h) ** 2 / norms
    else:
        raise ValueError("side must be 'tx' or 'rx'")
    return int(np.argmax(metric))


@lru_cache(maxsize=8)
def _reference_codebooks(key) -> tuple[Codebook, Codebook]:
    (rows, cols, spacing, wl, grid, pb, ab, step) = key
    geom = UpaGeometry(rows, cols, spacing, wl)
    region = coverage_region_grid(*grid)
    spec = QuantizationSpec(pb, ab, step)
    cb = cbf_codebook(geom, region, spec)
    return cb, cb


def reference_codebooks(cfg: ScenarioConfig) -> tuple[Codebook, Codebook]:
    """Matched-filter codebooks whose interference-free SNRs normalize gamma."""
    key = (
        cfg.rows, cfg.cols, cfg.spacing_wavelengths, cfg.wavelength_m,
        cfg.grid, cfg.phase_bits, cfg.amp_bits, cfg.atten_step_db,
    )
    return _reference_codebooks(key)


def scenario_channel_estimate(cfg: ScenarioConfig) -> ChannelEstimate:
    """The channel estimate the design stage would see for this scenario."""
    geom = cfg.geometry()
    offset = np.asarray(cfg.rx_offset_wavelengths) * cfg.wavelength_m
    h_sw = spherical_wave_channel(geom, geom, offset, cfg.wavelength_m)
    eps_sq = 10.0 ** (cfg.eps_sq_db / 10.0) if np.isfinite(cfg.eps_sq_db) else 0.0
    return ChannelEstimate(h_sw, eps_sq if cfg.channel_kind == "error" else 0.0)


def draw_scenario_channel(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Realize the self-interference channel for one trial."""
    est = scenario_channel_estimate(cfg)
    if cfg.channel_kind == "spherical":
        return est.h_bar
    if cfg.channel_kind == "mixture":
        zeta_sq = 10.0 ** (cfg.zeta_sq_db / 10.0) if np.isfinite(cfg.zeta_sq_db) else 0.0
        return rayleigh_mixture_channel(est.h_bar, zeta_sq, rng)
    return draw_true_channel(est, rng)


def build_codebook(cfg: ScenarioConfig, side: str) -> Codebook:
    """Construct the configured codebook for one link direction."""
    kind = cfg.tx_codebook if side == "tx" else cfg.rx_codebook
    geom = cfg.geometry()
    region = cfg.region()
    spec = cfg.quant_spec()
    if kind == "cbf":
        return cbf_codebook(geom, region, spec)
    if kind == "taylor":
        return taylor_codebook(geom, region, spec, cfg.taylor_sll_db, cfg.taylor_nbar)
    if kind == "designed":
        res = _designed_pair(cfg)
        return res[0] if side == "tx" else res[1]
    if kind == "file":
        from fdbeam.codebook import read_codebook_csv

        path = cfg.tx_codebook_file if side == "tx" else cfg.rx_codebook_file
        if not path:
            raise ValueError(f"{side} codebook kind is 'file' but no path was given")
        return read_codebook_csv(path)
    raise ValueError(f"unknown codebook kind {kind!r}")


_designed_cache: dict = {}


def _designed_pair(cfg: ScenarioConfig) -> tuple[Codebook, Codebook]:
    key = (
        cfg.rows, cfg.cols, cfg.spacing_wavelengths, cfg.carrier_hz, cfg.grid,
        cfg.phase_bits, cfg.amp_bits, cfg.atten_step_db,
        cfg.sigma_sq_db, cfg.eps_sq_db, cfg.channel_kind,
        cfg.outer_iters, cfg.solver_tol, cfg.rx_offset_wavelengths,
    )
    if key not in _designed_cache:
        from fdbeam.geometry import array_response_matrix

        geom = cfg.geometry()
        region = cfg.region()
        a = array_response_matrix(geom, region)
        est = scenario_channel_estimate(cfg)
        dcfg = DesignConfig.tied(
            10.0 ** (cfg.sigma_sq_db / 10.0) if np.isfinite(cfg.sigma_sq_db) else 0.0,
            eps_sq=est.eps_sq,
            outer_iters=cfg.outer_iters,
            solver_tol=cfg.solver_tol,
            spec=cfg.quant_spec(),
        )
        res = design_codebooks(dcfg, est, a, a, region, region)
        _designed_cache[key] = (res.f_cb, res.w_cb)
    return _designed_cache[key]


def run_trial(
    cfg: ScenarioConfig,
    f_cb: Codebook,
    w_cb: Codebook,
    h: np.ndarray,
    rng: np.random.Generator,
    ref: tuple[Codebook, Codebook] | None = None,
) -> LinkReport:
    """Drop a user pair, align each link independently, report all metrics.

    Normalization uses the matched-filter reference codebooks' best
    interference-free SNRs for the same user pair.
    """
    if ref is None:
        ref = reference_codebooks(cfg)
    geom = cfg.geometry()
    budget = cfg.budget()
    dl_dir, ul_dir = drop_user_pair(cfg, rng)
    h_tx = upa_array_response(geom, dl_dir)
    h_rx = upa_array_response(geom, ul_dir)

    i_tx = beam_align(f_cb, h_tx, "tx")
    j_rx = beam_align(w_cb, h_rx, "rx")
    f = f_cb.beam(i_tx)
    w = w_cb.beam(j_rx)

    s_tx = snr_tx(f, h_tx, budget)
    s_rx = snr_rx(w, h_rx, budget)
    i_rx = inr_rx(f, w, h, budget)
    i_txl = budget.inr_tx
    sinr_t, sinr_r, r_tx, r_rx = sinr_and_rates(s_tx, s_rx, i_rx, i_txl)

    ref_f, ref_w = ref
    f_ref = ref_f.beam(beam_align(ref_f, h_tx, "tx"))
    w_ref = ref_w.beam(beam_align(ref_w, h_rx, "rx"))
    g = gamma_sum(r_tx, r_rx, snr_tx(f_ref, h_tx, budget), snr_rx(w_ref, h_rx, budget))

    return LinkReport(
        snr_tx=s_tx, snr_rx=s_rx, inr_rx=i_rx, inr_tx=i_txl,
        sinr_tx=sinr_t, sinr_rx=sinr_r, r_tx=r_tx, r_rx=r_rx, gamma_sum=g,
    )


def run_trials(cfg: ScenarioConfig) -> list[LinkReport]:
    """Run the configured number of trials with counter-derived streams."""
    f_cb = build_codebook(cfg, "tx")
    w_cb = build_codebook(cfg, "rx")
    ref = reference_codebooks(cfg)
    reports = []
    for t in range(cfg.n_trials):
        rng = trial_rng(cfg.seed, t)
        h = draw_scenario_channel(cfg, rng)
        reports.append(run_trial(cfg, f_cb, w_cb, h, rng, ref=ref))
    return reports


@dataclass(frozen=True)
class SweepRow:
    params: tuple[tuple[str, float], ...]
    mean_gamma: float
    median_gamma: float
    mean_inr_db: float
    n_trials: int


def sweep(base: ScenarioConfig, grid: dict[str, list]) -> list[SweepRow]:
    """Cartesian sweep over config fields; one aggregated row per point.

    ``mean_inr_db`` is the dB value of the mean linear receive-link INR.
    """
    names = list(grid.keys())
    rows = []
    for values in itertools.product(*(grid[n] for n in names)):
        cfg = replace(base, **dict(zip(names, values)))
        reports = run_trials(cfg)
        gammas = np.array([r.gamma_sum for r in reports])
        inrs = np.array([r.inr_rx for r in reports])
        rows.append(
            SweepRow(
                params=tuple(zip(names, (float(v) for v in values))),
                mean_gamma=float(np.mean(gammas)),
                median_gamma=float(np.median(gammas)),
                mean_inr_db=lin_to_db(float(np.mean(inrs))),
                n_trials=cfg.n_trials,
            )
        )
    return rows


# ----------------------------------------------------------------------
# CSV emission
# ----------------------------------------------------------------------

TRIAL_HEADER = "trial,snr_tx_db,snr_rx_db,inr_rx_db,inr_tx_db,r_tx,r_rx,gamma_sum"


def write_trials_csv(path, reports: list[LinkReport]) -> None:
    lines = [TRIAL_HEADER]
    for t, r in enumerate(reports):
        lines.append(
            f"{t},{lin_to_db(r.snr_tx)!r},{lin_to_db(r.snr_rx)!r},"
            f"{lin_to_db(r.inr_rx)!r},{lin_to_db(r.inr_tx)!r},"
            f"{r.r_tx!r},{r.r_rx!r},{r.gamma_sum!r}"
        )
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def write_sweep_csv(path, rows: list[SweepRow]) -> None:
    if not rows:
        raise ValueError("sweep produced no rows")
    names = [n for n, _ in rows[0].params]
    header = ",".join(names + ["mean_gamma", "median_gamma", "mean_inr_db", "n_trials"])
    lines = [header]
    for r in rows:
        vals = [repr(v) for _, v in r.params]
        vals += [repr(r.mean_gamma), repr(r.median_gamma), repr(r.mean_inr_db), str(r.n_trials)]
        lines.append(",".join(vals))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
