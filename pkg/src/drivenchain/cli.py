"""Command-line front end.

Subcommands cover the five pipelines: single-shot dynamics, the disorder
ensemble, pooled quasienergy statistics, the semiclassical stability grid,
and the undriven potential contours, plus a device-table checker.  Every
run writes CSV data files and a JSON manifest (config, seeds, output
hashes); data files are byte-identical for identical config and seed, and
independent of the worker count.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ResolvedRun, RunConfig, load_config, resolve
from .device import bundled_table_path, consistency_report, load_device_table
from .ensemble import (realization_seed, run_dynamics_ensemble,
                       run_spectrum_ensemble)
from .errors import ConfigError, NumericalError
from .model import sample_disorder
from .basis import fock_state
from .observables import observable_series
from .propagate import evolve_state
from .semiclassical import default_grid_axes, potential_contours, stability_grid
from .spectrum import (coe_cdf, coe_density, coe_mean, ks_distance,
                       poisson_cdf, poisson_density, poisson_mean)
from .units import mhz_from_rad_ns

_FLOAT_FMT = "%.12g"


def _format_row(values) -> str:
    parts = []
    for v in values:
        if isinstance(v, (bool, np.bool_)):
            parts.append("1" if v else "0")
        elif isinstance(v, (int, np.integer)):
            parts.append(str(int(v)))
        else:
            parts.append(_FLOAT_FMT % float(v))
    return ",".join(parts)


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(_format_row(row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class ManifestWriter:
    """Collects run metadata and guarantees a manifest on every exit path."""

    def __init__(self, out_dir: Path, command: str, config: RunConfig | None):
        self.out_dir = out_dir
        self.started = time.monotonic()
        self.data = {
            "tool": "drivenchain",
            "version": __version__,
            "command": command,
            "config": config.to_dict() if config else None,
            "outputs": [],
            "status": "running",
        }

    def record_output(self, path: Path) -> None:
        self.data["outputs"].append(
            {"path": path.name, "sha256": _sha256(path)})

    def extra(self, **kwargs) -> None:
        self.data.update(kwargs)

    def finish(self, status: str, error: str = "") -> Path:
        self.data["status"] = status
        if error:
            self.data["error"] = error
        self.data["wall_clock_s"] = round(time.monotonic() - self.started, 6)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n")
        return path


def _dynamics_series(run: ResolvedRun, initial_site: int, disorder_index: int = 0):
    """One trajectory (optionally with a single disorder realization)."""
    cfg = run.config
    potential = run.potential
    if cfg.disorder_w_over_j > 0:
        potential = potential.with_overlay(sample_disorder(run.disorder,
                                                           disorder_index))
    model = run.model.with_potential(potential)
    psi0 = fock_state(run.basis, initial_site)
    trajectory = evolve_state(model, psi0, run.sample_times(), run.step_ns)
    ref = cfg.czz_reference_site
    pairs = [(l, ref) for l in range(1, cfg.n_sites + 1) if l != ref]
    return observable_series(trajectory, run.basis, pairs)


def _write_population_csv(path: Path, series) -> None:
    n = series.n_sites
    header = ["time_ns"] + [f"n_{l}" for l in range(1, n + 1)]
    rows = [[t] + list(series.populations[k])
            for k, t in enumerate(series.times)]
    write_csv(path, header, rows)


def cmd_dynamics(run: ResolvedRun, out: Path, manifest: ManifestWriter) -> None:
    series = _dynamics_series(run, run.config.init_site)
    pop_path = out / "populations.csv"
    _write_population_csv(pop_path, series)
    manifest.record_output(pop_path)

    czz_path = out / "czz.csv"
    rows = []
    for (i, j), values in sorted(series.correlations.items()):
        for k, t in enumerate(series.times):
            rows.append([t, i, j, values[k]])
    write_csv(czz_path, ["time_ns", "i", "j", "value"], rows)
    manifest.record_output(czz_path)
    manifest.extra(steps_per_period=run.config.steps_per_period,
                   drive_frequency_mhz=run.drive_frequency_mhz)


def cmd_ensemble(run: ResolvedRun, out: Path, manifest: ManifestWriter) -> None:
    cfg = run.config
    result = run_dynamics_ensemble(
        run.model, run.disorder, cfg.init_site, run.sample_times(),
        run.step_ns, keep_realizations=cfg.keep_realizations)
    mean_path = out / "ensemble_populations.csv"
    header = ["time_ns"] + [f"n_{l}" for l in range(1, result.n_sites + 1)]
    rows = [[t] + list(result.mean_populations[k])
            for k, t in enumerate(result.times)]
    write_csv(mean_path, header, rows)
    manifest.record_output(mean_path)

    if cfg.keep_realizations:
        raw_dir = out / "realizations"
        raw_dir.mkdir(parents=True, exist_ok=True)
        for idx, pops in enumerate(result.per_realization):
            raw_path = raw_dir / f"realization_{idx:04d}.csv"
            raw_rows = [[t] + list(pops[k]) for k, t in enumerate(result.times)]
            write_csv(raw_path, header, raw_rows)
            manifest.record_output(raw_path)

    manifest.extra(steps_per_period=cfg.steps_per_period,
                   master_seed=cfg.master_seed,
                   realization_seeds=list(result.realization_seeds),
                   drive_frequency_mhz=run.drive_frequency_mhz)


def cmd_spectrum(run: ResolvedRun, out: Path, manifest: ManifestWriter) -> None:
    cfg = run.config
    sample = run_spectrum_ensemble(run.model, run.disorder,
                                   steps_per_period=cfg.steps_per_period)
    edges = np.linspace(0.0, 1.0, cfg.histogram_bins + 1)
    counts, _ = np.histogram(sample.ratios, bins=edges)
    widths = np.diff(edges)
    density = counts / (max(sample.count, 1) * widths)
    centers = 0.5 * (edges[:-1] + edges[1:])

    hist_path = out / "ratio_histogram.csv"
    rows = [[edges[k], edges[k + 1], density[k],
             float(poisson_density(centers[k])), float(coe_density(centers[k]))]
            for k in range(cfg.histogram_bins)]
    write_csv(hist_path, ["r_bin_lo", "r_bin_hi", "empirical_density",
                          "poisson_density", "coe_density"], rows)
    manifest.record_output(hist_path)

    summary = {
        "realizations": cfg.realizations,
        "pooled_ratio_count": sample.count,
        "discarded_degenerate": sample.discarded_degenerate,
        "mean_r": sample.mean(),
        "ks_poisson": ks_distance(sample, poisson_cdf),
        "ks_coe": ks_distance(sample, coe_cdf),
        "poisson_mean": poisson_mean(),
        "coe_mean_closed_form": coe_mean(),
        "drive_frequency_mhz": run.drive_frequency_mhz,
        "sector": cfg.sector,
        "disorder_w_over_j": cfg.disorder_w_over_j,
    }
    summary_path = out / "spectrum_summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    manifest.record_output(summary_path)
    manifest.extra(master_seed=cfg.master_seed,
                   realization_seeds=[realization_seed(cfg.master_seed, i)
                                      for i in range(cfg.realizations)],
                   steps_per_period=cfg.steps_per_period)


def cmd_stability(run: ResolvedRun, out: Path, manifest: ManifestWriter) -> None:
    params = run.semiclassical_params()
    omega_values, delta1_values = default_grid_axes(
        params, run.config.stability_resolution)
    grid = stability_grid(omega_values, delta1_values, params)
    path = out / "stability_grid.csv"
    write_csv(path, ["omega", "delta1", "abs_trace", "stable"],
              grid.iter_rows())
    manifest.record_output(path)
    manifest.extra(small_oscillation_frequency_mhz=mhz_from_rad_ns(
        params.small_oscillation_frequency))


def cmd_contours(run: ResolvedRun, out: Path, manifest: ManifestWriter) -> None:
    params = run.semiclassical_params()
    res = run.config.contour_resolution
    q_values = np.linspace(0.0, 2.0 * np.pi, res)
    p_values = np.linspace(-np.pi, np.pi, res)
    field = potential_contours(q_values, p_values, params)
    rows = []
    for i, q in enumerate(q_values):
        for j, p in enumerate(p_values):
            rows.append([q, p, field[i, j]])
    path = out / "contours.csv"
    write_csv(path, ["q", "p", "value"], rows)
    manifest.record_output(path)


def cmd_device_check(table_path, out: Path, manifest: ManifestWriter) -> None:
    path = table_path or bundled_table_path()
    table = load_device_table(path)
    warnings = consistency_report(table)
    report = {
        "table": str(path),
        "n_sites": table.n_sites,
        "rotating_frame_ghz": table.rotating_frame_ghz("cosine"),
        "dc_amplitude_mhz": table.dc_amplitude_mhz("cosine"),
        "couplings_mhz": list(table.couplings_mhz),
        "mean_coupling_mhz": float(np.mean(table.couplings_mhz)),
        "eta_mhz": list(table.eta_mhz),
        "t1_us": list(table.t1_us),
        "t2s_us": list(table.t2s_us),
        "warnings": warnings,
    }
    report_path = out / "device_report.json"
    out.mkdir(parents=True, exist_ok=True)
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    manifest.record_output(report_path)
    print(f"device table: {path}")
    print(f"  rotating frame {report['rotating_frame_ghz']:.4f} GHz, "
          f"cosine amplitude {report['dc_amplitude_mhz']:.2f} MHz, "
          f"mean coupling {report['mean_coupling_mhz']:.2f} MHz")
    for w in warnings:
        print(f"  warning: {w}")
    if not warnings:
        print("  no inconsistencies found")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drivenchain",
        description="Driven-chain simulator: dynamics, disorder ensembles, "
                    "quasienergy statistics, and semiclassical stability.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, help="key=value config file")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--realizations", type=int, help="ensemble size override")
        p.add_argument("--steps-per-period", type=int,
                       help="propagator steps per drive period")
        p.add_argument("--profile", choices=("cosine", "flat", "table"),
                       help="potential profile override")
        p.add_argument("--disorder-w", type=float, metavar="W_OVER_J",
                       help="disorder strength in units of the mean coupling")
        p.add_argument("--init-site", type=int, help="initial excitation site")
        p.add_argument("--sector", type=int, help="total excitation number")
        p.add_argument("--out", type=Path, default=Path("out"),
                       help="output directory (default: ./out)")
        p.add_argument("--keep-realizations", action="store_true",
                       help="also dump per-realization data")

    for name, doc in (("dynamics", "single-run populations and ZZ correlations"),
                      ("ensemble", "disorder-averaged population dynamics"),
                      ("spectrum", "pooled quasienergy gap-ratio statistics"),
                      ("stability", "semiclassical stability grid"),
                      ("contours", "undriven semiclassical energy contours")):
        add_common(sub.add_parser(name, help=doc))

    check = sub.add_parser("device-check", help="validate a device table")
    check.add_argument("--table", type=Path, help="device table JSON "
                       "(default: bundled table)")
    check.add_argument("--out", type=Path, default=Path("out"))
    return parser


def _config_from_args(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.realizations is not None:
        overrides["realizations"] = args.realizations
    if args.steps_per_period is not None:
        overrides["steps_per_period"] = args.steps_per_period
    if args.profile is not None:
        overrides["profile"] = args.profile
    if args.disorder_w is not None:
        overrides["disorder_w_over_j"] = args.disorder_w
    if args.init_site is not None:
        overrides["init_site"] = args.init_site
    if args.sector is not None:
        overrides["sector"] = args.sector
    if args.keep_realizations:
        overrides["keep_realizations"] = True
    return replace(config, **overrides)


_COMMANDS = {
    "dynamics": cmd_dynamics,
    "ensemble": cmd_ensemble,
    "spectrum": cmd_spectrum,
    "stability": cmd_stability,
    "contours": cmd_contours,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out: Path = args.out

    if args.command == "device-check":
        manifest = ManifestWriter(out, args.command, None)
        try:
            cmd_device_check(args.table, out, manifest)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            manifest.finish("failed", str(exc))
            return 2
        manifest.finish("success")
        return 0

    try:
        config = _config_from_args(args)
        run = resolve(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        ManifestWriter(out, args.command, None).finish("failed", str(exc))
        return 2

    manifest = ManifestWriter(out, args.command, config)
    try:
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](run, out, manifest)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        manifest.finish("failed", str(exc))
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        manifest.finish("failed", str(exc))
        return 3
    manifest.finish("success")
    return 0


if __name__ == "__main__":
    sys.exit(main())
