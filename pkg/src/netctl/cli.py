"""Command-line front end: ``netctl <subcommand> [options]``.

Exit status is 0 on success, 1 for bad arguments or input, 2 when a
numerical computation fails.
"""
from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .augment import place_redundant, strategy_ratios, table_row
from .chains import control_profile, topological_diameter
from .circuit import circuit_report
from .errors import NetctlError, NumericOverflowError, ParameterError, ParseError
from .graph import DirectedNetwork, generate_ba, generate_er, load_edge_list
from .linctrl import (
    C_BAR_DEFAULT,
    EX_THRESHOLD_DEFAULT,
    ControlProblem,
    chain_energy,
    minimum_energy,
    simulate_control,
)
from .matching import control_matrix, maximum_matching
from .models import (
    EnsembleConfig,
    fit_exponential,
    fit_power_law,
    lcc_samples,
    log_bins,
    random_unit_states,
    read_records_csv,
    run_ensemble,
    write_records_csv,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _threads(value):
    if value is not None:
        return value
    env = os.environ.get("NETCTL_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise ParameterError(f"NETCTL_THREADS must be an integer, got {env!r}") from None


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "no_timestamp")}
    cfg["version"] = __version__
    if not args.no_timestamp:
        cfg["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return cfg


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    return obj


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _emit_json(payload, args):
    _emit(json.dumps(_json_safe(payload), indent=2) + "\n", args.output)


def _emit_table(header, rows, args, name=None):
    """CSV with the header first and the resolved configuration trailing as comments."""
    if args.format == "json":
        body = {"config": _config(args), "rows": [dict(zip(header, r)) for r in rows]}
        text = json.dumps(_json_safe(body), indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        buf.write("# config: " + json.dumps(_json_safe(_config(args)), sort_keys=True) + "\n")
        text = buf.getvalue()
    if name is None:
        _emit(text, args.output)
    else:
        os.makedirs(args.output, exist_ok=True)
        with open(os.path.join(args.output, name), "w", newline="") as fh:
            fh.write(text)


def _read_network(path):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParameterError(f"cannot read {path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        return DirectedNetwork.from_json(text)
    return load_edge_list(text)


def _generate(model, n, k, pb, seed):
    if model == "er":
        return generate_er(n, k, pb, seed)
    return generate_ba(n, max(1, int(round(k / 2))), pb, seed)


# subcommands ---------------------------------------------------------------

def cmd_gen(args):
    net = _generate(args.model, args.n, args.k, args.pb, args.seed)
    if args.format == "edges":
        text = "# config: " + json.dumps(_json_safe(_config(args)), sort_keys=True) + "\n"
        text += "".join(f"{s} {d}\n" for s, d in net.edges)
    else:
        doc = net.to_dict()
        doc["meta"] = {**doc["meta"], "config": _config(args)}
        text = json.dumps(_json_safe(doc)) + "\n"
    _emit(text, args.output)


def cmd_analyze(args):
    net = _read_network(args.input)
    match = maximum_matching(net)
    prof = control_profile(net, match.drivers)
    result = {
        "n": net.n,
        "edges": net.n_edges,
        "n_drivers": match.n_drivers,
        "n_d": match.driver_density,
        **match.to_dict(),
        **prof.to_dict(),
        "lcc_paths": [list(p) for p in prof.lcc_paths],
        "topo_diameter": topological_diameter(net),
    }
    _emit_json({"config": _config(args), "result": result}, args)


def cmd_control(args):
    net = _read_network(args.input)
    match = maximum_matching(net)
    b = control_matrix(match)
    rng = np.random.default_rng([args.seed, 1])
    x0, xf = random_unit_states(rng, net.n)
    prob = ControlProblem(net.adjacency(), b, x0, xf, args.tf)
    out = minimum_energy(prob, steps=args.steps, c_bar=args.cbar)
    simulate_control(prob, out)
    result = out.to_dict()
    result.update({"drivers": list(match.drivers), "quad_energy": out.quad_energy,
                   "converged": out.e_x < args.ex, "solver": out.solver})
    _emit_json({"config": _config(args), "result": result}, args)


def cmd_ensemble(args):
    cfg = EnsembleConfig(model=args.model, n=args.n, avg_k=args.k, pb=args.pb, t_f=args.tf,
                         trials=args.trials, seed=args.seed, c_bar=args.cbar,
                         simulate=not args.no_simulate)
    records = run_ensemble(cfg, threads=_threads(args.threads))
    buf = io.StringIO()
    write_records_csv(records, buf)
    buf.write("# config: " + json.dumps(_json_safe(_config(args)), sort_keys=True) + "\n")
    _emit(buf.getvalue(), args.output)
    frac = sum(r.controllable for r in records) / len(records)
    print(f"controllable fraction {frac:.4f} over {len(records)} trials", file=sys.stderr)


def cmd_fit(args):
    try:
        with open(args.input) as fh:
            records = read_records_csv(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read {args.input}: {exc.strerror}") from None
    if args.kind == "energy":
        samples = [r.energy for r in records
                   if r.controllable and r.energy is not None and r.c_w < args.cbar]
        fit = fit_power_law(samples)
    else:
        fit = fit_exponential(lcc_samples(records, args.kind), kind=args.kind)
    _emit_json({"config": _config(args), "result": fit.to_dict()}, args)


def cmd_augment(args):
    net = _read_network(args.input)
    name = args.name or os.path.splitext(os.path.basename(args.input))[0]
    row = table_row(net, name=name, t_f=args.tf, c_bar=args.cbar, seed=args.seed)
    _emit_json({"config": _config(args), "result": row}, args)


def cmd_chain(args):
    if args.lmax < 2:
        raise ParameterError("--lmax must be >= 2")
    rows = []
    for l in range(2, args.lmax + 1):
        c = chain_energy(l, args.tf, args.directed)
        rows.append([l, c.e_l, c.lambda_h_min, 1.0 / c.lambda_h_min, c.c_w, c.bound])
    _emit_table(["l", "E", "lambda_H_min", "inv_lambda_H_min", "c_w", "bound"], rows, args)


def cmd_circuit(args):
    rep = circuit_report(args.l, args.r, args.c, injections=args.inject, t_f=args.tf,
                         seed=args.seed, steps=args.steps)
    _emit_json({"config": _config(args), "result": rep}, args)


def _fig1(args):
    rows = []
    for k in args.k:
        for pb in np.round(np.arange(0.0, 1.0001, 0.1), 1):
            cfg = EnsembleConfig(n=args.n, avg_k=k, pb=float(pb), t_f=args.tf,
                                 trials=args.trials, seed=args.seed, c_bar=args.cbar,
                                 simulate=False)
            recs = run_ensemble(cfg, threads=_threads(args.threads))
            nd = [r.n_d for r in recs]
            rows.append([k, float(pb), float(np.mean(nd)), float(np.std(nd)),
                         sum(r.controllable for r in recs) / len(recs), len(recs)])
    _emit_table(["avg_k", "p_b", "n_d_mean", "n_d_std", "p_cbar", "trials"], rows, args,
                "fig1.csv")


def _fig2(args):
    cfg = EnsembleConfig(n=args.n, avg_k=args.k[0], pb=args.pb, t_f=args.tf,
                         trials=args.trials, seed=args.seed, c_bar=max(args.cbar_sweep),
                         simulate=False)
    recs = run_ensemble(cfg, threads=_threads(args.threads))
    samples, hist = [], []
    for cb in args.cbar_sweep:
        energies = [r.energy for r in recs if r.controllable and r.c_w < cb]
        samples.extend([cb, e] for e in energies)
        centres, dens = log_bins(energies)
        hist.extend([cb, float(c), float(d)] for c, d in zip(centres, dens))
    _emit_table(["c_bar", "energy"], samples, args, "fig2_samples.csv")
    _emit_table(["c_bar", "energy_bin", "density"], hist, args, "fig2_hist.csv")


def _fig3(args):
    rows = []
    chains = {}
    for l in range(2, 10):
        c = chain_energy(l, args.tf)
        chains[l] = c.e_l
        rows.append([l, c.e_l, 1.0 / c.lambda_h_min])
    _emit_table(["l", "E_l", "inv_lambda_H_min"], rows, args, "fig3a.csv")
    cfg = EnsembleConfig(n=args.n, avg_k=args.k[0], pb=args.pb, t_f=args.tf,
                         trials=args.trials, seed=args.seed, c_bar=args.cbar, simulate=False)
    recs = [r for r in run_ensemble(cfg, threads=_threads(args.threads)) if r.controllable]
    rows = []
    for dc in sorted({r.d_c for r in recs}):
        e = [r.energy for r in recs if r.d_c == dc]
        if dc in chains:
            rows.append([dc, len(e), float(np.mean(e)), chains[dc]])
    _emit_table(["d_c", "count", "mean_energy", "E_L"], rows, args, "fig3b.csv")


def _figA7(args):
    cfg = EnsembleConfig(n=args.n, avg_k=args.k[0], pb=args.pb, t_f=args.tf,
                         trials=args.trials, seed=args.seed, c_bar=args.cbar, simulate=False)
    rows = []
    for i in range(cfg.trials):
        seed = cfg.seed ^ i
        net = cfg.network(seed)
        match = maximum_matching(net)
        prof = control_profile(net, match.drivers)
        rng = np.random.default_rng([seed, 1])
        x0, xf = random_unit_states(rng, net.n)
        try:
            r = strategy_ratios(net, match.drivers, prof, args.tf, x0, xf, seed=seed)
        except NetctlError:
            continue
        if math.isnan(r["mid"]):
            continue
        rows.append([seed, prof.d_c, r["mid"], r["end"], r["random_mid"], r["random_end"]])
    _emit_table(["seed", "d_c", "mid", "end", "random_mid", "random_end"], rows, args,
                "figA7.csv")


def cmd_figures(args):
    {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "figA7": _figA7}[args.recipe](args)


# parser ---------------------------------------------------------------------

def _common(p, seed=True):
    p.add_argument("-o", "--output", default=None, help="output path (default: stdout)")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the run timestamp so repeated runs are byte-identical")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="master seed (default: %(default)s)")


def _thresholds(p):
    p.add_argument("--tf", type=float, default=1.0, help="control horizon (default: %(default)s)")
    p.add_argument("--cbar", type=float, default=C_BAR_DEFAULT,
                   help="condition-number threshold (default: %(default)g)")
    p.add_argument("--ex", type=float, default=EX_THRESHOLD_DEFAULT,
                   help="final-state error threshold (default: %(default)g)")


def _generator(p):
    p.add_argument("--model", choices=("er", "ba"), default="er", help="(default: %(default)s)")
    p.add_argument("--n", type=int, default=100, help="node count (default: %(default)s)")
    p.add_argument("--k", type=float, default=6.0, help="mean degree (default: %(default)s)")
    p.add_argument("--pb", type=float, default=0.1,
                   help="probability an edge points from high to low degree (default: %(default)s)")


def build_parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="netctl", description="Control energy of complex networks.",
                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a network", allow_abbrev=False)
    _generator(p)
    p.add_argument("--format", choices=("json", "edges"), default="json", help="(default: %(default)s)")
    _common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="drivers, CSPs, control diameter", allow_abbrev=False)
    p.add_argument("input", help="graph JSON or edge list ('-' for stdin)")
    _common(p, seed=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("control", help="minimum-energy control of one network", allow_abbrev=False)
    p.add_argument("input")
    _thresholds(p)
    p.add_argument("--steps", type=int, default=1000, help="(default: %(default)s)")
    _common(p)
    p.set_defaults(func=cmd_control)

    p = sub.add_parser("ensemble", help="trial records as CSV", allow_abbrev=False)
    _generator(p)
    _thresholds(p)
    p.add_argument("--trials", type=int, default=10000, help="(default: %(default)s)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $NETCTL_THREADS or 1)")
    p.add_argument("--no-simulate", action="store_true", help="skip the e_x simulation")
    _common(p)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("fit", help="fit a distribution to ensemble CSV", allow_abbrev=False)
    p.add_argument("input")
    p.add_argument("--kind", choices=("energy", "d_c", "m"), default="energy",
                   help="(default: %(default)s)")
    p.add_argument("--cbar", type=float, default=C_BAR_DEFAULT, help="(default: %(default)g)")
    _common(p, seed=False)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("augment", help="augmented drivers and redundant inputs", allow_abbrev=False)
    p.add_argument("input")
    p.add_argument("--name", default=None, help="row name (default: input file stem)")
    _thresholds(p)
    _common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("chain", help="energy of one-dimensional chains", allow_abbrev=False)
    p.add_argument("--lmax", type=int, default=9, help="(default: %(default)s)")
    p.add_argument("--tf", type=float, default=1.0, help="(default: %(default)s)")
    p.add_argument("--directed", choices=("uni", "bi"), default="uni", help="(default: %(default)s)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="(default: %(default)s)")
    _common(p, seed=False)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("circuit", help="R-C ladder control and dissipation", allow_abbrev=False)
    p.add_argument("--l", type=int, default=7, help="(default: %(default)s)")
    p.add_argument("--r", type=float, default=1.0, help="(default: %(default)s)")
    p.add_argument("--c", type=float, default=1.0, help="(default: %(default)s)")
    p.add_argument("--inject", type=int, nargs="*", default=None,
                   help="1-based stages for current injection (default: middle stage)")
    p.add_argument("--tf", type=float, default=1.0, help="(default: %(default)s)")
    p.add_argument("--steps", type=int, default=1000, help="(default: %(default)s)")
    _common(p)
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("figures", help="plot-ready CSV for canned experiments", allow_abbrev=False)
    p.add_argument("recipe", choices=("fig1", "fig2", "fig3", "figA7"))
    p.add_argument("--n", type=int, default=100, help="(default: %(default)s)")
    p.add_argument("--k", type=float, nargs="+", default=[4.0, 6.0, 8.0],
                   help="mean degrees; single-degree recipes use the first (default: %(default)s)")
    p.add_argument("--pb", type=float, default=0.1, help="(default: %(default)s)")
    p.add_argument("--trials", type=int, default=2000, help="(default: %(default)s)")
    p.add_argument("--cbar-sweep", type=float, nargs="+", default=[1e10, 1e12, 1e14],
                   help="(default: %(default)s)")
    _thresholds(p)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="(default: %(default)s)")
    _common(p)
    p.set_defaults(func=cmd_figures, output="figures")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "output", None) is None and args.command == "figures":
            args.output = "figures"
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ParameterError, ParseError) as exc:
        print(f"netctl: error: {exc}", file=sys.stderr)
        return 1
    except (NumericOverflowError, ArithmeticError, NetctlError, np.linalg.LinAlgError) as exc:
        print(f"netctl: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
