"""Command-line front end.

Subcommands: ``codebook``, ``design``, ``eval``, ``sweep``, ``simodel``,
``pattern``.  Every flag can also be given as a ``key = value`` line in
a config file (``--config``); explicit flags win.  Exit codes: 0 on
success (including solver warnings), 2 on configuration errors, 3 on
I/O errors.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from fdbeam import channel as channel_mod
from fdbeam import codebook as cb_mod
from fdbeam import montecarlo as mc
from fdbeam import simodel as si
from fdbeam.config import (
    ConfigError,
    Key,
    parse_bool,
    parse_float,
    parse_float_pair,
    parse_float_triple,
    parse_grid,
    parse_int,
    parse_int_pair,
    parse_scalar_or_range,
    parse_str,
    read_config_file,
    resolve,
)
from fdbeam.design import DesignConfig, design_codebooks, design_codebooks_beamwise
from fdbeam.geometry import Direction, UpaGeometry, array_response_matrix, coverage_region_grid, upa_array_response
from fdbeam.metrics import lin_to_db
from fdbeam.quant import QuantizationSpec

_GEOM_KEYS = {
    "rows": Key(parse_int),
    "cols": Key(parse_int),
    "spacing": Key(parse_float, 0.5),
    "carrier_ghz": Key(parse_float, 30.0),
}

_QUANT_KEYS = {
    "bits": Key(parse_int_pair, (8, 8), "phase,amplitude bits"),
    "atten_step": Key(parse_float, 0.5),
}

_SCHEMAS: dict[str, dict[str, Key]] = {
    "codebook": {
        **_GEOM_KEYS,
        **_QUANT_KEYS,
        "kind": Key(parse_str),
        "grid": Key(parse_grid),
        "sll": Key(parse_float, 25.0),
        "nbar": Key(parse_int, 4),
        "unquantized": Key(parse_bool, False),
        "out": Key(parse_str),
    },
    "design": {
        **_GEOM_KEYS,
        **_QUANT_KEYS,
        "grid": Key(parse_grid),
        "sigma_sq_db": Key(parse_float),
        "sigma_rx_sq_db": Key(parse_float, None),
        "eps_sq_db": Key(parse_float, float("-inf")),
        "outer_iters": Key(parse_int, 4),
        "tol": Key(parse_float, 1e-4),
        "mode": Key(parse_str, "full"),
        "channel_file": Key(parse_str, ""),
        "sep_wavelengths": Key(parse_float_triple, (0.0, 0.0, 10.0)),
        "out_tx": Key(parse_str),
        "out_rx": Key(parse_str),
        "report": Key(parse_str),
    },
    "eval": {
        **_GEOM_KEYS,
        "rows": Key(parse_int, 8),
        "cols": Key(parse_int, 8),
        **_QUANT_KEYS,
        "grid": Key(parse_grid, (-60, 60, 15, -30, 30, 15)),
        "seed": Key(parse_int, 0),
        "trials": Key(parse_int, 500),
        "snrbar_tx_db": Key(parse_float, 10.0),
        "snrbar_rx_db": Key(parse_float, 10.0),
        "inrbar": Key(parse_float, 90.0),
        "inr_tx_db": Key(parse_float, float("-inf")),
        "channel": Key(parse_str, "spherical"),
        "zeta_sq_db": Key(parse_float, 0.0),
        "eps_sq_db": Key(parse_float, float("-inf")),
        "codebook": Key(parse_str, "cbf"),
        "tx_file": Key(parse_str, ""),
        "rx_file": Key(parse_str, ""),
        "sll": Key(parse_float, 25.0),
        "sigma_sq_db": Key(parse_float, -15.0),
        "user_az": Key(parse_float_pair, (-67.5, 67.5)),
        "user_el": Key(parse_float_pair, (-37.5, 37.5)),
        "sep_wavelengths": Key(parse_float_triple, (0.0, 0.0, 10.0)),
        "out": Key(parse_str),
    },
    "simodel": {
        "preset": Key(parse_str, "default"),
        "rows": Key(parse_int, 16),
        "cols": Key(parse_int, 16),
        "spacing": Key(parse_float, 0.5),
        "carrier_ghz": Key(parse_float, 28.0),
        "seed": Key(parse_int, 0),
        "draws": Key(parse_int, 0),
        "tx": Key(parse_float_pair, (0.0, 0.0)),
        "rx": Key(parse_float_pair, (0.0, 0.0)),
        "matrix": Key(parse_bool, False),
        "beams": Key(parse_int, 40),
        "dump_params": Key(parse_bool, False),
        "out": Key(parse_str),
    },
    "pattern": {
        **_GEOM_KEYS,
        **_QUANT_KEYS,
        "kind": Key(parse_str),
        "file": Key(parse_str, ""),
        "beam": Key(parse_int, 0),
        "az": Key(parse_float, 0.0),
        "el": Key(parse_float, 0.0),
        "sll": Key(parse_float, 25.0),
        "nbar": Key(parse_int, 4),
        "unquantized": Key(parse_bool, False),
        "cut": Key(parse_str, "azimuth"),
        "fixed": Key(parse_float, 0.0),
        "step": Key(parse_float, 1.0),
        "span": Key(parse_float_pair, (-90.0, 90.0)),
        "out": Key(parse_str),
    },
}
# sweep shares the eval schema; the swept flag carries a start:step:stop range
_SCHEMAS["sweep"] = {**_SCHEMAS["eval"]}
for _k in ("inrbar", "snrbar_tx_db", "snrbar_rx_db", "sigma_sq_db", "eps_sq_db", "inr_tx_db"):
    _SCHEMAS["sweep"][_k] = Key(parse_str, _SCHEMAS["eval"][_k].default)


def _geom_from(vals) -> UpaGeometry:
    wl = mc.SPEED_OF_LIGHT / (vals["carrier_ghz"] * 1e9)
    return UpaGeometry(vals["rows"], vals["cols"], vals["spacing"], wl)


def _spec_from(vals) -> QuantizationSpec:
    pb, ab = vals["bits"]
    return QuantizationSpec(pb, ab, vals["atten_step"])


def _cmd_codebook(vals) -> int:
    geom = _geom_from(vals)
    region = coverage_region_grid(*vals["grid"])
    spec = None if vals["unquantized"] else _spec_from(vals)
    if vals["kind"] == "cbf":
        cb = cb_mod.cbf_codebook(geom, region, spec)
    elif vals["kind"] == "taylor":
        cb = cb_mod.taylor_codebook(geom, region, spec, vals["sll"], vals["nbar"])
    else:
        raise ConfigError(f"unknown codebook kind: {vals['kind']}")
    cb_mod.write_codebook_csv(vals["out"], cb, geom)
    return 0


def _cmd_design(vals) -> int:
    geom = _geom_from(vals)
    region = coverage_region_grid(*vals["grid"])
    spec = _spec_from(vals)
    a = array_response_matrix(geom, region)
    wl = geom.carrier_wavelength_m

    if vals["channel_file"]:
        h_bar = channel_mod.read_channel_csv(vals["channel_file"])
        if h_bar.shape != (geom.num_elements, geom.num_elements):
            raise ConfigError("channel file dimensions do not match the array")
    else:
        offset = np.asarray(vals["sep_wavelengths"]) * wl
        h_bar = channel_mod.spherical_wave_channel(geom, geom, offset, wl)
    eps_db = vals["eps_sq_db"]
    eps_sq = 10.0 ** (eps_db / 10.0) if np.isfinite(eps_db) else 0.0
    est = channel_mod.ChannelEstimate(h_bar, eps_sq)

    sigma_tx = 10.0 ** (vals["sigma_sq_db"] / 10.0) if np.isfinite(vals["sigma_sq_db"]) else 0.0
    sigma_rx = sigma_tx
    if vals["sigma_rx_sq_db"] is not None:
        sigma_rx = 10.0 ** (vals["sigma_rx_sq_db"] / 10.0)
    cfg = DesignConfig(
        sigma_tx_sq=sigma_tx,
        sigma_rx_sq=sigma_rx,
        eps_sq=eps_sq,
        outer_iters=vals["outer_iters"],
        solver_tol=vals["tol"],
        spec=spec,
    )
    if vals["mode"] == "full":
        runner = design_codebooks
    elif vals["mode"] == "beamwise":
        runner = design_codebooks_beamwise
    else:
        raise ConfigError(f"unknown design mode: {vals['mode']}")
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        res = runner(cfg, est, a, a, region, region)

    cb_mod.write_codebook_csv(vals["out_tx"], res.f_cb, geom)
    cb_mod.write_codebook_csv(vals["out_rx"], res.w_cb, geom)
    lines = ["step,objective,cov_residual_tx,cov_residual_rx,warning"]
    rtx, rrx = res.constraint_residuals
    for k, obj in enumerate(res.objective_trace):
        note = res.warnings[k] if k < len(res.warnings) else ""
        lines.append(f"{k},{obj!r},{rtx!r},{rrx!r},{note}")
    with open(vals["report"], "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    return 0


def _scenario_from(vals, n_trials=None, **overrides) -> mc.ScenarioConfig:
    pb, ab = vals["bits"]
    kw = dict(
        seed=vals["seed"],
        n_trials=n_trials if n_trials is not None else vals["trials"],
        user_az_range=vals["user_az"],
        user_el_range=vals["user_el"],
        snrbar_tx_db=vals["snrbar_tx_db"],
        snrbar_rx_db=vals["snrbar_rx_db"],
        inrbar_db=vals["inrbar"],
        inr_tx_db=vals["inr_tx_db"],
        channel_kind=vals["channel"],
        zeta_sq_db=vals["zeta_sq_db"],
        eps_sq_db=vals["eps_sq_db"],
        tx_codebook=vals["codebook"],
        rx_codebook=vals["codebook"],
        taylor_sll_db=vals["sll"],
        sigma_sq_db=vals["sigma_sq_db"],
        rows=vals["rows"],
        cols=vals["cols"],
        spacing_wavelengths=vals["spacing"],
        carrier_hz=vals["carrier_ghz"] * 1e9,
        grid=vals["grid"],
        phase_bits=pb,
        amp_bits=ab,
        atten_step_db=vals["atten_step"],
        rx_offset_wavelengths=vals["sep_wavelengths"],
        tx_codebook_file=vals["tx_file"],
        rx_codebook_file=vals["rx_file"],
    )
    kw.update(overrides)
    return mc.ScenarioConfig(**kw)


def _cmd_eval(vals) -> int:
    cfg = _scenario_from(vals)
    reports = mc.run_trials(cfg)
    mc.write_trials_csv(vals["out"], reports)
    return 0


_SWEEPABLE = {
    "inrbar": "inrbar_db",
    "snrbar_tx_db": "snrbar_tx_db",
    "snrbar_rx_db": "snrbar_rx_db",
    "sigma_sq_db": "sigma_sq_db",
    "eps_sq_db": "eps_sq_db",
    "inr_tx_db": "inr_tx_db",
}


def _cmd_sweep(vals) -> int:
    ranges = {}
    scalars = dict(vals)
    for flag, field in _SWEEPABLE.items():
        text = vals[flag]
        values = parse_scalar_or_range(str(text))
        if len(values) > 1:
            ranges[field] = values
        scalars[flag] = values[0]
    if not ranges:
        raise ConfigError("sweep needs one start:step:stop range among the swept keys")
    if len(ranges) > 1:
        raise ConfigError("sweep supports exactly one swept key at a time")
    base = _scenario_from(scalars)
    rows = mc.sweep(base, ranges)
    mc.write_sweep_csv(vals["out"], rows)
    return 0


def _cmd_simodel(vals) -> int:
    preset = vals["preset"]
    if preset not in si.PRESETS:
        raise ConfigError(f"unknown preset: {preset}")
    params = si.PRESETS[preset]()
    wl = mc.SPEED_OF_LIGHT / (vals["carrier_ghz"] * 1e9)
    geom = UpaGeometry(vals["rows"], vals["cols"], vals["spacing"], wl)

    if vals["dump_params"]:
        lines = [
            f"preset = {preset}",
            f"eirp_dbm = {params.eirp_dbm!r}",
            f"p_noise_dbm = {params.p_noise_dbm!r}",
            f"g_bar_sq_db = {params.g_bar_sq_db!r}",
            f"xi = {params.xi!r}",
            f"alpha = {params.alpha!r}",
            f"beta = {params.beta!r}",
            f"nu_sq = {params.nu_sq!r}",
            f"inr_min_db = {params.inr_min_db!r}",
            f"inr_max_db = {params.inr_max_db!r}",
            f"spread = {params.spread_az_deg},{params.spread_el_deg}",
        ]
        for k, cl in enumerate(params.clusters):
            lines.append(
                f"cluster_{k} = {cl.aod.azimuth_deg!r}:{cl.aod.elevation_deg!r}"
                f";{cl.aoa.azimuth_deg!r}:{cl.aoa.elevation_deg!r}"
            )
        with open(vals["out"], "w", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
        return 0

    h_bar = si.cluster_channel(params, geom, geom)

    if vals["matrix"]:
        k = vals["beams"]
        rng = np.random.default_rng([vals["seed"] & 0xFFFFFFFFFFFF, 0xBEA3])
        azs = rng.choice(np.arange(-60.0, 61.0), size=2 * k)
        els = rng.choice(np.arange(-10.0, 11.0), size=2 * k)
        tx_dirs = [Direction(azs[i], els[i]) for i in range(k)]
        rx_dirs = [Direction(azs[k + i], els[k + i]) for i in range(k)]
        lines = ["i,j,inr_db"]
        for i, td in enumerate(tx_dirs):
            for j, rd in enumerate(rx_dirs):
                inr_db = si.draw_inr_db_for_pair(
                    td, rd, params, geom, geom, vals["seed"], h_bar=h_bar
                )
                lines.append(f"{i},{j},{inr_db!r}")
        with open(vals["out"], "w", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
        return 0

    if vals["draws"] < 1:
        raise ConfigError("missing required key: draws")
    tx = Direction(*vals["tx"])
    rx = Direction(*vals["rx"])
    f_beam = upa_array_response(geom, tx)
    w_beam = upa_array_response(geom, rx)
    rng = np.random.default_rng([vals["seed"] & 0xFFFFFFFFFFFF, 0xD0A])
    lines = ["n,inr_db"]
    for n in range(vals["draws"]):
        inr = si.draw_inr(f_beam, w_beam, h_bar, params, rng)
        lines.append(f"{n},{lin_to_db(inr)!r}")
    with open(vals["out"], "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    return 0


def _cmd_pattern(vals) -> int:
    geom = _geom_from(vals)
    spec = None if vals["unquantized"] else _spec_from(vals)
    steer = Direction(vals["az"], vals["el"])
    if vals["kind"] == "cbf":
        from fdbeam.geometry import CoverageRegion

        region = CoverageRegion((steer,))
        beam = cb_mod.cbf_codebook(geom, region, spec).beam(0)
    elif vals["kind"] == "taylor":
        from fdbeam.geometry import CoverageRegion

        region = CoverageRegion((steer,))
        beam = cb_mod.taylor_codebook(geom, region, spec, vals["sll"], vals["nbar"]).beam(0)
    elif vals["kind"] == "file":
        if not vals["file"]:
            raise ConfigError("missing required key: file")
        cb = cb_mod.read_codebook_csv(vals["file"])
        if not 0 <= vals["beam"] < cb.num_beams:
            raise ConfigError(f"beam index {vals['beam']} out of range")
        beam = cb.beam(vals["beam"])
    else:
        raise ConfigError(f"unknown pattern kind: {vals['kind']}")

    cut = vals["cut"]
    if cut not in ("azimuth", "elevation"):
        raise ConfigError(f"cut must be azimuth or elevation, got {cut!r}")
    samples = cb_mod.beam_pattern_cut(
        geom, beam, cut, vals["fixed"], vals["step"], vals["span"]
    )
    lines = ["angle_deg,gain_db"]
    for ang, gain in samples:
        lines.append(f"{ang!r},{lin_to_db(gain)!r}")
    with open(vals["out"], "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    return 0


_RUNNERS = {
    "codebook": _cmd_codebook,
    "design": _cmd_design,
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "simodel": _cmd_simodel,
    "pattern": _cmd_pattern,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdbeam",
        description="Self-interference-aware beamforming codebook toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in _SCHEMAS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key = value config file")
        for key, spec in schema.items():
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, default=None, help=spec.help or None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    schema = _SCHEMAS[args.command]
    try:
        config_values = read_config_file(args.config) if args.config else {}
        cli_values = {
            k: v for k, v in vars(args).items()
            if k in schema and v is not None
        }
        vals = resolve(schema, config_values, cli_values)
        return _RUNNERS[args.command](vals)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
