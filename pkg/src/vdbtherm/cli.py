"""Experiment orchestration and CSV emission.

Configs are INI-style key=value files; every output CSV embeds the fully
resolved config as `#` comment lines, so each file is self-describing.
Grid sweeps may run on a thread pool, but results are always gathered and
written in grid order, so output bytes are independent of scheduling.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, VdbThermError, NoRootError
from .model import SystemSpec, boltzmann_vector, build_system
from .rates import compute_rate_set, cycle_affinity
from .spectral import (
    build_rate_matrix,
    find_T_EP,
    high_T_bound,
    low_T_diagnostics,
    gamma_at_temperature,
    regime_report,
)
from .dynamics import decompose, observables, propagate

MODES = ("single", "trajectory", "freq_curve", "phase_diagram",
         "tep_scan", "lowT_scan", "bound_scan")


@dataclass
class ExperimentConfig:
    spec: SystemSpec
    mode: str
    out: str
    tol: float = 1e-9
    threads: int = 1
    seed: int = 0
    # mode-specific sweep settings
    temperature: float = 3.0
    t_min: float = 1.0
    t_max: float = 100.0
    n_t: int = 40
    v1_min: float = 0.0
    v1_max: float = 8.0
    n_v1: int = 41
    v2_min: float = 0.5
    v2_max: float = 6.0
    v3_min: float = 0.5
    v3_max: float = 6.0
    n_v23: int = 8
    p0: tuple = (0.893, 0.04, 0.067)
    time_span: float = 10.0          # trajectory length in units of t_slow
    n_times: int = 400
    beta_list: tuple = (1.0, 2.0, 4.0, 6.0)
    raw: dict = field(default_factory=dict)


def _get(section, key, cast, default, errors_at):
    if key not in section:
        if default is None:
            raise ConfigError(f"{errors_at}: missing required key '{key}'")
        return default
    try:
        if cast is bool:
            return section.getboolean(key)
        return cast(section[key])
    except ValueError as exc:
        raise ConfigError(f"{errors_at}: key '{key}' = {section[key]!r}: {exc}")


def _float_list(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except configparser.Error as exc:
        # configparser errors carry line numbers in their message
        raise ConfigError(f"{path}: {exc}")

    sys_sec = parser["system"] if parser.has_section("system") else {}
    loc = f"{path} [system]"
    potentials = _float_list(sys_sec.get("potentials", "6, 1.5, 4")) \
        if hasattr(sys_sec, "get") else (6.0, 1.5, 4.0)
    if len(potentials) != 3:
        raise ConfigError(f"{loc}: potentials needs exactly 3 values")
    try:
        spec = SystemSpec(
            tau=_get(sys_sec, "tau", float, 1.85, loc) if sys_sec else 1.85,
            phi=_get(sys_sec, "phi", float, 0.575, loc) if sys_sec else 0.575,
            potentials=potentials,
            mass=_get(sys_sec, "mass", float, 1.0, loc) if sys_sec else 1.0,
            hbar=_get(sys_sec, "hbar", float, 1.0, loc) if sys_sec else 1.0,
            gas_density=_get(sys_sec, "gas_density", float, 1.0, loc) if sys_sec else 1.0,
        )
    except VdbThermError as exc:
        raise ConfigError(f"{loc}: {exc}")

    if not parser.has_section("run"):
        raise ConfigError(f"{path}: missing [run] section")
    run = parser["run"]
    loc = f"{path} [run]"
    mode = _get(run, "mode", str, None, loc)
    if mode not in MODES:
        raise ConfigError(f"{loc}: mode must be one of {MODES}, got {mode!r}")

    grid = parser["grid"] if parser.has_section("grid") else {}
    gloc = f"{path} [grid]"

    def g(key, cast, default):
        if not grid:
            return default
        return _get(grid, key, cast, default, gloc)

    cfg = ExperimentConfig(
        spec=spec,
        mode=mode,
        out=_get(run, "out", str, "out.csv", loc),
        tol=_get(run, "tol", float, 1e-9, loc),
        threads=_get(run, "threads", int, 1, loc),
        seed=_get(run, "seed", int, 0, loc),
        temperature=_get(run, "temperature", float, 3.0, loc),
        t_min=g("t_min", float, 1.0),
        t_max=g("t_max", float, 100.0),
        n_t=g("n_t", int, 40),
        v1_min=g("v1_min", float, 0.0),
        v1_max=g("v1_max", float, 8.0),
        n_v1=g("n_v1", int, 41),
        v2_min=g("v2_min", float, 0.5),
        v2_max=g("v2_max", float, 6.0),
        v3_min=g("v3_min", float, 0.5),
        v3_max=g("v3_max", float, 6.0),
        n_v23=g("n_v23", int, 8),
        p0=_float_list(run.get("p0", "0.893, 0.04, 0.067")),
        time_span=_get(run, "time_span", float, 10.0, loc),
        n_times=_get(run, "n_times", int, 400, loc),
        beta_list=_float_list(run.get("beta_list", "1, 2, 4, 6")),
    )
    if cfg.mode in ("freq_curve", "phase_diagram", "tep_scan", "bound_scan"):
        counts = {"freq_curve": (cfg.n_t,), "phase_diagram": (cfg.n_t, cfg.n_v1),
                  "tep_scan": (cfg.n_v1,), "bound_scan": (cfg.n_v23,)}[cfg.mode]
        if any(c < 2 for c in counts):
            raise ConfigError(f"{gloc}: sweep modes need grid counts >= 2")
    if cfg.t_min <= 0 or cfg.t_max <= cfg.t_min:
        raise ConfigError(f"{gloc}: need 0 < t_min < t_max")
    cfg.raw = {s: dict(parser[s]) for s in parser.sections()}
    return cfg


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def emit_csv(records, columns, path, config: ExperimentConfig | None = None):
    """Write records (dicts) with the given column order; the resolved config
    is embedded as comment lines."""
    lines = []
    if config is not None:
        for sec in sorted(config.raw):
            for key in sorted(config.raw[sec]):
                lines.append(f"# {sec}.{key} = {config.raw[sec][key]}")
        lines.append(f"# resolved.mode = {config.mode}")
        lines.append(f"# resolved.tol = {repr(config.tol)}")
        lines.append(f"# resolved.potentials = "
                     + " ".join(repr(v) for v in config.spec.potentials))
    lines.append(",".join(columns))
    for rec in records:
        lines.append(",".join(_fmt(rec[c]) for c in columns))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _map_grid(func, cells, threads):
    """Evaluate func over cells, preserving order; threads > 1 uses a pool."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, cells))
    return [func(c) for c in cells]


# ---------------------------------------------------------------------------
# modes


def _regime_row(system, temperature, tol):
    rs = compute_rate_set(1.0 / temperature, system, tol=tol)
    rep = regime_report(rs, 1.0 / temperature, system)
    lam = rep.eigenvalues[1]
    return rs, rep, lam


def run_single(cfg: ExperimentConfig):
    system = build_system(cfg.spec)
    rs, rep, lam = _regime_row(system, cfg.temperature, cfg.tol)
    if rep.omega_dis == 0.0:
        print("warning: all transition rates vanish; no dynamics", file=sys.stderr)
    a = rs.rates
    rec = {
        "T": cfg.temperature,
        "a_mz": a[0, 1], "a_mp": a[0, 2], "a_zm": a[1, 0],
        "a_zp": a[1, 2], "a_pm": a[2, 0], "a_pz": a[2, 1],
        "omega_dis": rep.omega_dis, "gamma": rep.gamma,
        "regime": rep.regime.value, "osc_count": rep.oscillation_count,
        "c": cycle_affinity(rs), "onset_rhs": rep.onset_condition["rhs"],
        "resid_max": float(np.max(np.abs(rep.thermalization_residuals)))
        if rep.omega_dis else 0.0,
    }
    emit_csv([rec], list(rec.keys()), cfg.out, cfg)


def run_trajectory(cfg: ExperimentConfig):
    system = build_system(cfg.spec)
    beta = 1.0 / cfg.temperature
    rs = compute_rate_set(beta, system, tol=cfg.tol)
    dec = decompose(build_rate_matrix(rs).entries)
    p_th = boltzmann_vector(system.spectrum.energies, beta)
    p0 = np.asarray(cfg.p0)
    from .dynamics import slowest_timescale

    t_slow = slowest_timescale(dec)
    times = np.linspace(0.0, cfg.time_span * t_slow, cfg.n_times)
    traj = propagate(dec, p0, times)
    obs = observables(traj, p_th, dec)
    recs = [
        {"t": float(t), "P_minus": float(p[0]), "P_zero": float(p[1]),
         "P_plus": float(p[2]), "dP_plus_rescaled": float(obs["rescaled"][i])}
        for i, (t, p) in enumerate(zip(traj.times, traj.populations))
    ]
    emit_csv(recs, ["t", "P_minus", "P_zero", "P_plus", "dP_plus_rescaled"],
             cfg.out, cfg)


def run_freq_curve(cfg: ExperimentConfig):
    system = build_system(cfg.spec)
    temps = np.geomspace(cfg.t_min, cfg.t_max, cfg.n_t)

    def cell(t):
        rs, rep, lam = _regime_row(system, float(t), cfg.tol)
        return {
            "T": float(t), "gamma": rep.gamma, "omega_dis": rep.omega_dis,
            "regime": rep.regime.value, "osc_count": rep.oscillation_count,
            "im_lambda": abs(float(lam.imag)), "re_lambda": float(lam.real),
            "c": cycle_affinity(rs), "onset_rhs": rep.onset_condition["rhs"],
        }

    recs = _map_grid(cell, temps, cfg.threads)
    emit_csv(recs, ["T", "gamma", "omega_dis", "regime", "osc_count",
                    "im_lambda", "re_lambda", "c", "onset_rhs"], cfg.out, cfg)


def run_phase_diagram(cfg: ExperimentConfig):
    v1s = np.linspace(cfg.v1_min, cfg.v1_max, cfg.n_v1)
    temps = np.geomspace(cfg.t_min, cfg.t_max, cfg.n_t)
    cells = [(float(v1), float(t)) for v1 in v1s for t in temps]

    def cell(vt):
        v1, t = vt
        pots = (v1,) + tuple(cfg.spec.potentials[1:])
        system = build_system(SystemSpec(
            tau=cfg.spec.tau, phi=cfg.spec.phi, potentials=pots,
            mass=cfg.spec.mass, hbar=cfg.spec.hbar,
            gas_density=cfg.spec.gas_density))
        rs, rep, _ = _regime_row(system, t, cfg.tol)
        return {
            "V1": v1, "T": t, "gamma": rep.gamma, "regime": rep.regime.value,
            "osc_count": rep.oscillation_count, "c": cycle_affinity(rs),
            "onset_rhs": rep.onset_condition["rhs"],
        }

    recs = _map_grid(cell, cells, cfg.threads)
    emit_csv(recs, ["V1", "T", "gamma", "regime", "osc_count", "c", "onset_rhs"],
             cfg.out, cfg)


def run_tep_scan(cfg: ExperimentConfig):
    v1s = np.linspace(cfg.v1_min, cfg.v1_max, cfg.n_v1)

    def cell(v1):
        pots = (float(v1),) + tuple(cfg.spec.potentials[1:])
        spec = SystemSpec(tau=cfg.spec.tau, phi=cfg.spec.phi, potentials=pots,
                          mass=cfg.spec.mass, hbar=cfg.spec.hbar,
                          gas_density=cfg.spec.gas_density)
        try:
            tep = find_T_EP(spec, (cfg.t_min, cfg.t_max), rate_tol=cfg.tol)
        except (NoRootError, VdbThermError):
            tep = float("nan")
        return {"V1": float(v1), "T_EP": tep}

    recs = _map_grid(cell, v1s, cfg.threads)
    emit_csv(recs, ["V1", "T_EP"], cfg.out, cfg)


def run_lowT_scan(cfg: ExperimentConfig):
    rows = low_T_diagnostics(cfg.spec, list(cfg.beta_list), rate_tol=cfg.tol)
    recs = [
        {"beta": r["beta"],
         "ratio_zero_minus": r["ratios"]["zero_minus"],
         "ratio_plus_minus": r["ratios"]["plus_minus"],
         "ratio_plus_zero": r["ratios"]["plus_zero"],
         "tri_distance": r["triangular_distance"],
         "gamma_sign": r["gamma_sign"]}
        for r in rows
    ]
    emit_csv(recs, ["beta", "ratio_zero_minus", "ratio_plus_minus",
                    "ratio_plus_zero", "tri_distance", "gamma_sign"], cfg.out, cfg)


def run_bound_scan(cfg: ExperimentConfig):
    v2s = np.linspace(cfg.v2_min, cfg.v2_max, cfg.n_v23)
    v3s = np.linspace(cfg.v3_min, cfg.v3_max, cfg.n_v23)
    t_probe = 1000.0
    cells = [(float(v2), float(v3)) for v2 in v2s for v3 in v3s]

    def cell(vv):
        v2, v3 = vv
        spec = SystemSpec(tau=cfg.spec.tau, phi=cfg.spec.phi,
                          potentials=(cfg.spec.potentials[0], v2, v3),
                          mass=cfg.spec.mass, hbar=cfg.spec.hbar,
                          gas_density=cfg.spec.gas_density)
        system = build_system(spec)
        try:
            rep = high_T_bound(system)
            e_vdb, gap, e_low, sat = (rep.e_vdb, rep.gap_term,
                                      rep.e_low_energy, rep.satisfied)
        except VdbThermError:
            e_vdb, gap, e_low, sat = 0.0, float("nan"), float("nan"), False
        try:
            gam = gamma_at_temperature(t_probe, system, tol=cfg.tol)
        except VdbThermError:
            gam = float("nan")
        return {"V2": v2, "V3": v3, "e_vdb": e_vdb, "gap_term": gap,
                "e_low_energy": e_low, "satisfied": sat, "gamma_high_T": gam}

    recs = _map_grid(cell, cells, cfg.threads)
    emit_csv(recs, ["V2", "V3", "e_vdb", "gap_term", "e_low_energy",
                    "satisfied", "gamma_high_T"], cfg.out, cfg)


RUNNERS = {
    "single": run_single,
    "trajectory": run_trajectory,
    "freq_curve": run_freq_curve,
    "phase_diagram": run_phase_diagram,
    "tep_scan": run_tep_scan,
    "lowT_scan": run_lowT_scan,
    "bound_scan": run_bound_scan,
}


def run(cfg: ExperimentConfig) -> int:
    RUNNERS[cfg.mode](cfg)
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="vdbtherm",
        description="Thermalization analysis of a three-level ring in a 1D gas",
    )
    ap.add_argument("--config", required=True, help="INI config file")
    ap.add_argument("--mode", choices=MODES, help="override config mode")
    ap.add_argument("--out", help="override output path")
    ap.add_argument("--threads", type=int, default=None,
                    help="grid worker threads (0 = auto)")
    ap.add_argument("--tol", type=float, help="override quadrature tolerance")
    ap.add_argument("--seed", type=int, help="override rng seed")
    args = ap.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.mode:
            cfg.mode = args.mode
        if args.out:
            cfg.out = args.out
        if args.tol is not None:
            cfg.tol = args.tol
        if args.seed is not None:
            cfg.seed = args.seed
        threads = args.threads
        if threads is None:
            threads = int(os.environ.get("VDBTHERM_THREADS", cfg.threads))
        if threads == 0:
            threads = os.cpu_count() or 1
        cfg.threads = threads
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except VdbThermError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
