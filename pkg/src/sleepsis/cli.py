"""
Command-line entry point.

    sleepsis <command> [--config FILE] [--out DIR] [--jobs N] [overrides...]

Exit status: 0 on success, 1 on invalid input, 2 on runtime or convergence
failure.
"""
import argparse
import logging
import math
import os
import sys

from . import __version__
from .config import COMMANDS, ConfigError, ExperimentSpec, parse_config
from .exceptions import ConvergenceError, ValidationError
from .experiments import (GAMMA_COLUMNS, RATIO_COLUMNS, SWEEP_COLUMNS, TEMPORAL_COLUMNS, detect_threshold,
                          sweep_beta, sweep_gamma, sweep_ratio, sweep_rows, temporal_experiment, temporal_rows,
                          threshold_grid, write_metadata, write_table)
from .graph import degree_stats, generate_price, largest_real_eigenvalue, read_edge_list, write_edge_list
from .mmc import epidemic_threshold, initial_state, run_mmc
from .montecarlo import RunConfig, run_ensemble

logger = logging.getLogger("sleepsis")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

OUTPUT_FILES = {
    "generate-graph": "graph.edges",
    "run-mmc": "mmc_series.csv",
    "run-mc": "mc_ensemble.csv",
    "temporal": "fig2_temporal.csv",
    "sweep-beta": "fig3_sweep.csv",
    "sweep-gamma": "fig4_gamma.csv",
    "sweep-ratio": "fig5_ratio.csv",
    "threshold": "threshold.csv",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int, help="parallel workers for ensembles")
    common.add_argument("--graph-seed", type=int, dest="graph_seed")
    common.add_argument("--sim-seed", type=int, dest="sim_seed")
    common.add_argument("--edges", help="read the network from an edge-list file")
    for name in ("beta", "gamma", "u", "v"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--n", type=int, help="node count of the generated graph")
    common.add_argument("--m", type=int, help="links per arriving node")
    common.add_argument("--runs", type=int)
    common.add_argument("--steps", type=int)
    common.add_argument("--seeds", type=int, help="initially infected nodes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="sleepsis", description="SIS spreading with node sleep scheduling")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        sub.add_parser(cmd, parents=[common])
    return parser


OVERRIDE_KINDS = {"out": "str", "jobs": "jobs", "graph_seed": "nonneg_int", "sim_seed": "nonneg_int",
                  "edges": "path", "beta": "prob", "gamma": "prob", "u": "prob", "v": "prob", "n": "pos_int",
                  "m": "pos_int", "runs": "pos_int", "steps": "nonneg_int", "seeds": "nonneg_int"}


def spec_from_args(args):
    from .config import convert

    overrides = {"command": args.command}
    for fld, kind in OVERRIDE_KINDS.items():
        value = getattr(args, fld)
        if value is not None:
            try:
                overrides[fld] = convert(fld, kind, str(value))
            except ValueError as exc:
                raise ConfigError(f"--{fld.replace('_', '-')}: {exc}") from None
    text, source = "", "<cli>"
    if args.config:
        if not os.path.isfile(args.config):
            raise ConfigError(f"config file not found: {args.config}")
        with open(args.config) as fh:
            text, source = fh.read(), args.config
    return parse_config(text, overrides, source=source)


def load_graph(spec):
    if spec.edges:
        return read_edge_list(spec.edges)
    return generate_price(spec.n, spec.m, spec.graph_seed)


def _graph_meta(spec, g):
    meta = {"command": spec.command}
    if spec.edges:
        meta["graph_edges"] = spec.edges
    else:
        meta.update(graph_model="price", graph_n=spec.n, graph_m=spec.m, graph_seed=spec.graph_seed)
    meta.update(nodes=g.n, edges=g.n_edges)
    return meta


def _run_meta(spec):
    return {"beta": spec.beta, "gamma": spec.gamma, "u": spec.u, "v": spec.v, "steps": spec.steps,
            "seed_count": spec.seeds, "runs": spec.runs, "sim_seed": spec.sim_seed,
            "init_active": spec.init_active}


def execute(spec: ExperimentSpec):
    """Run one command and write its CSV plus ``.meta`` sidecar into
    ``spec.out``. Returns the path of the main output file."""
    os.makedirs(spec.out, exist_ok=True)
    target = os.path.join(spec.out, OUTPUT_FILES[spec.command])
    g = load_graph(spec)
    meta = _graph_meta(spec, g)
    params = spec.params
    cfg = RunConfig(params, spec.steps, spec.seeds, spec.sim_seed, spec.init_active)
    cmd = spec.command

    if cmd == "generate-graph":
        write_edge_list(g, target)
        st = degree_stats(g)
        meta.update(mean_degree=st.mean, max_degree=st.max, components=st.n_components)
        print(f"wrote {g.n} nodes, {g.n_edges} edges to {target}")
    elif cmd == "threshold":
        spectral = largest_real_eigenvalue(g)
        beta_c = epidemic_threshold(spectral.lambda_max, spec.gamma, spec.u, spec.v)
        row = {"lambda_max": spectral.lambda_max, "gamma": spec.gamma, "u": spec.u, "v": spec.v,
               "beta_c_theory": beta_c}
        write_table([row], list(row), target)
        meta.update(row)
        print(f"lambda_max = {spectral.lambda_max:.6f}")
        print(f"beta_c_theory = {beta_c:.6f}")
    elif cmd == "run-mmc":
        init = initial_state(g.n, params, spec.seeds / g.n,
                             active=None if spec.init_active == "stationary" else 1.0)
        series = run_mmc(g, params, init, max_steps=spec.max_steps, settle_tol=spec.settle_tol)
        series.to_csv(target)
        meta.update(_run_meta(spec))
        meta.update(max_steps=spec.max_steps, settle_tol=spec.settle_tol, settled=series.settled)
    elif cmd == "run-mc":
        series = run_ensemble(g, cfg, spec.runs, spec.sim_seed, n_jobs=spec.jobs)
        series.to_csv(target)
        meta.update(_run_meta(spec))
    elif cmd == "temporal":
        mmc_series, mc_series = temporal_experiment(g, params, cfg, spec.runs, spec.sim_seed, n_jobs=spec.jobs)
        write_table(temporal_rows(mmc_series, mc_series), TEMPORAL_COLUMNS, target)
        meta.update(_run_meta(spec))
    elif cmd == "sweep-beta":
        lam = largest_real_eigenvalue(g).lambda_max
        theory = epidemic_threshold(lam, spec.gamma, spec.u, spec.v)
        betas = spec.betas or tuple(threshold_grid(theory, coarse_step=0.01, hi=0.30))
        points = sweep_beta(g, spec.gamma, spec.u, spec.v, betas, cfg, spec.runs, spec.sim_seed,
                            tail_fraction=spec.tail_fraction, n_jobs=spec.jobs)
        write_table(sweep_rows(points), SWEEP_COLUMNS, target)
        est = detect_threshold(points, spec.detection_eps, lam, source="mc")
        est_mmc = detect_threshold(points, spec.detection_eps, lam, source="mmc")
        meta.update(_run_meta(spec))
        meta.update(lambda_max=lam, beta_c_theory=theory, beta_c_sim=est.beta_c_sim,
                    beta_c_mmc=est_mmc.beta_c_sim, detection_eps=spec.detection_eps,
                    tail_fraction=spec.tail_fraction, extinction="averaged as zero infection")
        print(f"beta_c_theory = {theory:.6f}  beta_c_sim = {est.beta_c_sim:.6f}  beta_c_mmc = {est_mmc.beta_c_sim:.6f}")
    elif cmd == "sweep-gamma":
        rows = sweep_gamma(g, spec.gammas, spec.schedules, cfg, spec.runs, spec.sim_seed, spec.detection_eps,
                           n_jobs=spec.jobs)
        write_table(rows, GAMMA_COLUMNS, target)
        meta.update(_run_meta(spec))
        meta.update(detection_eps=spec.detection_eps)
    elif cmd == "sweep-ratio":
        rows = sweep_ratio(g, spec.gamma, spec.u_values, spec.v_values, cfg, spec.runs, spec.sim_seed,
                           spec.detection_eps, n_jobs=spec.jobs)
        write_table(rows, RATIO_COLUMNS, target)
        meta.update(_run_meta(spec))
        meta.update(detection_eps=spec.detection_eps)
    write_metadata(target + ".meta", meta)
    return target


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"sleepsis: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(args)
        execute(spec)
    except ValidationError as exc:
        print(f"sleepsis: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, OSError, RuntimeError) as exc:
        print(f"sleepsis: {cmd_label(args)} failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_label(args):
    return getattr(args, "command", "command")


if __name__ == "__main__":
    sys.exit(main())
