"""Command-line front end.

Subcommands: gen (scenario generators), analyze (moments -> tau -> per-cell
Gaussian -> lognormal fit), simulate (Monte Carlo), compare (KS distances
between analytic and simulated distributions).

Machine-readable "key=value" summary lines go to stdout, diagnostics to
stderr.  Exit code 0 covers runs where some tau certificates fail their
threshold (that is an analysis result, flagged in the report); nonzero means
the tool itself failed.
"""

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import channel as channel_mod
from . import gaussian_approx, lognormal_sum, scenario_io, simulator
from .distribution import GaussianDb, LognormalDist, ks_distance
from .errors import UlikError, ValidationError
from .streams import substream


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _cdf_grid(lo_dbm, hi_dbm, n=1000):
    return np.linspace(lo_dbm, hi_dbm, n)


def _emit(key, value):
    if isinstance(value, float):
        value = f"{value:.10g}"
    sys.stdout.write(f"{key}={value}\n")


def cmd_analyze(args) -> int:
    scenario = scenario_io.load_scenario(args.scenario, lenient=args.lenient)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    s_stats = channel_mod.combined_shadow_stats(scenario.channel, scenario.power)
    g = gaussian_approx.lognormal_exp_gaussian(s_stats)
    rule = lognormal_sum.gh_rule(args.m0)

    rows = []
    components = []
    for idx, cell in enumerate(scenario.interfering_cells()):
        rng = substream(args.seed, idx)
        moments = gaussian_approx.region_moments(
            scenario.ue_region(cell.id), cell.bs, scenario.victim_cell().bs,
            scenario.channel, scenario.power, args.samples, rng,
        )
        cert = gaussian_approx.tau(moments, g, threshold=args.tau_threshold)
        qb = gaussian_approx.interferer_gaussian(scenario.power.p0_dbm, moments, g)
        components.append(qb)
        rows.append([cell.id, moments.mu_l, moments.var_l, moments.abs3_l,
                     cert.tau, cert.passes, qb.mean, qb.variance])

    fit = lognormal_sum.fit_sum(components, s1=args.s1, s2=args.s2, rule=rule,
                                ref_dbm=scenario.power.p0_dbm)

    _write_csv(out / "report.csv",
               ["cell_id", "mu_l", "var_l", "abs3_l", "tau", "passes",
                "mu_qb", "var_qb"],
               rows)
    scenario_id = scenario.metadata.get("generator", Path(str(args.scenario)).stem)
    _write_csv(out / "fit.csv",
               ["scenario_id", "s1", "s2", "m0", "mu_q", "var_q",
                "residual1", "residual2", "iterations", "converged"],
               [[scenario_id, args.s1, args.s2, args.m0, fit.mu_q, fit.var_q,
                 fit.residuals[0], fit.residuals[1], fit.iterations, fit.converged]])

    if fit.var_q > 0:
        dist = LognormalDist(fit.mu_q, fit.var_q).db_gaussian()
        grid = _cdf_grid(dist.quantile(0.001), dist.quantile(0.999))
        _write_csv(out / "analytic_cdf.csv", ["value_dbm", "analytic_cdf"],
                   zip(grid, dist.cdf(grid)))

    _emit("cells", len(rows))
    _emit("tau_max", max(row[4] for row in rows))
    _emit("tau_all_pass", str(all(row[5] for row in rows)).lower())
    _emit("mu_q", fit.mu_q)
    _emit("var_q", fit.var_q)
    _emit("converged", str(fit.converged).lower())
    _emit("elapsed_s", time.monotonic() - t0)
    return 0


def cmd_simulate(args) -> int:
    if args.samples < 1:
        raise ValidationError(f"need a positive sample count, got {args.samples}")
    scenario = scenario_io.load_scenario(args.scenario, lenient=args.lenient)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    cfg = simulator.SimConfig(
        n_samples=args.samples, seed=args.seed,
        record_per_cell=args.per_cell, threads=args.threads,
    )
    result = simulator.simulate(scenario, cfg)

    agg = result.aggregate_dbm
    grid = _cdf_grid(agg.quantile(0.001), agg.quantile(0.999))
    _write_csv(out / "empirical_cdf.csv", ["value_dbm", "empirical_cdf"],
               zip(grid, agg.cdf(grid)))
    if args.raw:
        simulator.write_samples(out / "samples.bin", agg)
    if result.per_cell_db is not None:
        for cid, dist in result.per_cell_db.items():
            simulator.write_samples(out / f"cell_{cid}.bin", dist)

    _emit("n", agg.count)
    _emit("aggregate_mean_dbm", float(agg.samples.mean()))
    _emit("aggregate_median_dbm", agg.quantile(0.5))
    _emit("elapsed_s", time.monotonic() - t0)
    return 0


def _read_report(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def cmd_compare(args) -> int:
    fit_rows = _read_report(args.fit)
    if len(fit_rows) != 1:
        raise ValidationError(f"{args.fit}: expected exactly one fit row")
    fit = fit_rows[0]
    agg = simulator.read_samples(args.samples)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    ks_percell_max = None
    if args.report and args.per_cell_dir:
        per_cell_dir = Path(args.per_cell_dir)
        for row in _read_report(args.report):
            dump = per_cell_dir / f"cell_{row['cell_id']}.bin"
            if not dump.exists():
                continue
            cell_samples = simulator.read_samples(dump)
            ks = ks_distance(
                cell_samples,
                GaussianDb(float(row["mu_qb"]), float(row["var_qb"])),
            )
            rows.append([row["cell_id"], ks])
            ks_percell_max = ks if ks_percell_max is None else max(ks_percell_max, ks)

    ks_agg = ks_distance(agg, GaussianDb(float(fit["mu_q"]), float(fit["var_q"])))
    rows.append(["aggregate", ks_agg])
    _write_csv(out / "comparison.csv", ["cell_id", "ks"], rows)

    if ks_percell_max is not None:
        _emit("KS_percell_max", ks_percell_max)
    _emit("KS_aggregate", ks_agg)
    return 0


def cmd_gen(args) -> int:
    if args.kind == "single":
        scenario = scenario_io.gen_single_interferer(args.r, shape=args.shape,
                                                     seed=args.seed)
    elif args.kind == "hotspot":
        spec = scenario_io.HotspotDropSpec(
            n_cells=args.cells, radius_r=args.r,
            area_km=(args.area, args.area),
            min_bs_bs_distance=args.min_spacing, seed=args.seed,
        )
        scenario = scenario_io.gen_hotspot(spec)
    else:
        scenario = scenario_io.gen_hex_grid(args.rings, args.pitch, args.r)
    scenario_io.save_scenario(scenario, args.out)
    _emit("cells", len(scenario.cells))
    _emit("victim", scenario.victim_cell_id)
    _emit("path", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ulik",
        description="Uplink inter-cell interference lognormal approximation kit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a scenario file")
    gsub = p.add_subparsers(dest="kind", required=True)
    g1 = gsub.add_parser("single", help="single-interferer scenario")
    g1.add_argument("--r", type=float, required=True, help="reference radius, km")
    g1.add_argument("--shape", choices=["disk", "paper_irregular"], default="disk")
    g1.add_argument("--seed", type=int, default=0)
    g1.add_argument("-o", "--out", required=True)
    g2 = gsub.add_parser("hotspot", help="random multi-cell hotspot drop")
    g2.add_argument("--cells", type=int, default=84)
    g2.add_argument("--r", type=float, default=0.02)
    g2.add_argument("--area", type=float, default=0.5, help="square side, km")
    g2.add_argument("--min-spacing", type=float, default=None)
    g2.add_argument("--seed", type=int, default=0)
    g2.add_argument("-o", "--out", required=True)
    g3 = gsub.add_parser("hex", help="hexagonal lattice scenario")
    g3.add_argument("--rings", type=int, required=True)
    g3.add_argument("--pitch", type=float, required=True)
    g3.add_argument("--r", type=float, required=True)
    g3.add_argument("-o", "--out", required=True)
    for g in (g1, g2, g3):
        g.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="run the approximation chain")
    p.add_argument("scenario")
    p.add_argument("--samples", type=int, default=1_000_000,
                   help="integration points per cell")
    p.add_argument("--m0", type=int, default=12, help="Gauss-Hermite order")
    p.add_argument("--s1", type=float, default=1.0)
    p.add_argument("--s2", type=float, default=0.1)
    p.add_argument("--tau-threshold", type=float,
                   default=gaussian_approx.DEFAULT_TAU_THRESHOLD)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo simulation")
    p.add_argument("scenario")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-cell", action="store_true")
    p.add_argument("--raw", action="store_true", help="dump raw aggregate samples")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="KS distances analytic vs simulated")
    p.add_argument("--fit", required=True, help="fit.csv from analyze")
    p.add_argument("--report", default=None, help="report.csv from analyze")
    p.add_argument("--samples", required=True, help="raw dump from simulate")
    p.add_argument("--per-cell-dir", default=None,
                   help="directory with per-cell raw dumps")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UlikError as exc:
        sys.stderr.write(f"ulik: error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"ulik: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
