"""Command-line interface.

    jointkaczmarz [--config PATH] [--seed N] [--workers N] [--out DIR] COMMAND

Commands: ``generate`` writes a synthetic instance as JSRB matrices,
``solve`` runs one reconstruction, ``sweep`` runs a parameter grid and
writes a CSV, ``rates`` runs the noise-halving convergence-rate experiment.
"""

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND
from .errors import ConfigError, FormatError
from .io import config_from_dict, load_config, read_matrix, write_matrix, \
    write_results_csv
from .metrics import SsimOptions, data_residual, l2_error, ssim_1d
from .model import KaczmarzSchedule, ProblemInstance, ProjectionMap, RegParams, \
    validate_instance
from .testbed import PhantomSpec, generate_instance

log = logging.getLogger("jointkaczmarz")


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="PATH", default=default,
                        help="JSON run configuration")
    parser.add_argument("--seed", type=int, metavar="N", default=default,
                        help="override the instance seed")
    parser.add_argument("--workers", type=int, metavar="N", default=default,
                        help="parallel runs for sweeps")
    parser.add_argument("--out", metavar="DIR", default=default, help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="jointkaczmarz",
        description="Joint image and system-matrix reconstruction with regularized "
                    "Kaczmarz iterations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("generate", "write a synthetic instance"),
                        ("solve", "run one reconstruction"),
                        ("sweep", "run a regularization-parameter grid"),
                        ("rates", "empirical convergence-rate experiment")):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
    return parser


def resolve_config(args):
    cfg = load_config(args.config) if args.config else config_from_dict({})
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["out_dir"] = args.out
    for key, value in overrides.items():
        setattr(cfg, key, value)
    cfg.mode = args.command
    from .io import validate_config

    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def _phantom(cfg):
    if cfg.phantom == "custom":
        return PhantomSpec(M=cfg.M, kind="custom", breakpoints=cfg.phantom_breakpoints,
                           heights=cfg.phantom_heights)
    return PhantomSpec(M=cfg.M)


def load_instance(cfg):
    """Synthetic instance from the config, or external JSRB matrices if given."""
    if cfg.s_mod_path is None:
        return generate_instance(cfg.M, cfg.sigma, cfg.seed, _phantom(cfg))
    u = read_matrix(cfg.u_path)
    if u.shape[1] != 1:
        raise ConfigError([f"u_path must hold a column vector, got shape {u.shape}"])
    s_true = read_matrix(cfg.s_true_path) if cfg.s_true_path else None
    c_true = read_matrix(cfg.c_true_path)[:, 0].real if cfg.c_true_path else None
    inst = ProblemInstance(s_mod=read_matrix(cfg.s_mod_path),
                           s_calib=read_matrix(cfg.s_calib_path),
                           q=ProjectionMap.from_dense(read_matrix(cfg.q_path)),
                           u=u[:, 0], s_true=s_true, c_true=c_true, sigma=0.0, seed=cfg.seed)
    report = validate_instance(inst)
    if not report.ok:
        raise ConfigError(report.violations)
    return inst


def _schedule(cfg):
    return KaczmarzSchedule(cfg.outer_iterations, cfg.c_sweeps_per_outer,
                            cfg.s_sweeps_per_outer, cfg.relaxation_tau, cfg.stop_rel_change)


def cmd_generate(cfg):
    inst = generate_instance(cfg.M, cfg.sigma, cfg.seed, _phantom(cfg))
    os.makedirs(cfg.out_dir, exist_ok=True)
    files = {"s_true": inst.s_true, "s_mod": inst.s_mod, "s_calib": inst.s_calib,
             "q": inst.q.to_dense(), "c_true": inst.c_true, "u": inst.u}
    for name, arr in files.items():
        path = os.path.join(cfg.out_dir, f"{name}.jsrb")
        write_matrix(path, arr)
        print(f"wrote {path} {np.atleast_2d(arr.T).T.shape}")
    return 0


def cmd_solve(cfg):
    from .joint import solve_joint
    from .plots import emit_plots
    from .sweep import run_method

    inst = load_instance(cfg)
    params = RegParams(alpha=cfg.alpha, lam=cfg.lam, gamma=cfg.gamma, mu=cfg.mu)
    schedule = _schedule(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    if cfg.method == "joint":
        hist = solve_joint(inst, params, schedule, reset_S=cfg.reset_S,
                           warm_start_c=cfg.warm_start_c)
        c = hist.c_final if len(hist) else np.zeros(inst.dims[1])
        S = hist.S_last if len(hist) else np.asarray(inst.s_mod)
        c_fine = c
        write_matrix(os.path.join(cfg.out_dir, "S.jsrb"), S)
        if len(hist):
            plots_dir = cfg.plots_dir or os.path.join(cfg.out_dir, "plots")
            for path in emit_plots(hist, inst, plots_dir):
                print(f"wrote {path}")
    else:
        c, S, c_fine, _, _ = run_method(inst, cfg.method, params, schedule)
    write_matrix(os.path.join(cfg.out_dir, "c.jsrb"), c_fine)
    print(f"method={cfg.method} backend={BACKEND}")
    print(f"data_residual={data_residual(S, c, inst.u):.6g}")
    if inst.c_true is not None:
        print(f"l2_error={l2_error(c_fine, inst.c_true):.6g}")
        print(f"ssim={ssim_1d(c_fine, inst.c_true, SsimOptions()):.6g}")
    return 0


def _grid(cfg):
    from .sweep import GridSpec

    base = GridSpec.reduced(methods=tuple(cfg.methods))
    return GridSpec(cfg.grid_gamma or base.gamma_list, cfg.grid_mu or base.mu_list,
                    cfg.grid_alpha or base.alpha_list, cfg.grid_lambda or base.lambda_list,
                    tuple(cfg.methods))


def cmd_sweep(cfg):
    from .sweep import best_by_method, enumerate_grid, run_sweep

    inst = load_instance(cfg)
    spec = _grid(cfg)
    n = len(enumerate_grid(spec))
    print(f"{n} runs on {cfg.workers} worker(s), backend={BACKEND}")
    records = run_sweep(inst, spec, _schedule(cfg), workers=cfg.workers, reset_S=cfg.reset_S)
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = cfg.results_csv or os.path.join(cfg.out_dir, "results.csv")
    write_results_csv(records, path)
    print(f"wrote {path}")
    failed = sum(not r.ok for r in records)
    if failed:
        print(f"{failed} run(s) failed")
    if inst.c_true is not None:
        for method, rec in best_by_method(records, cfg.select_metric).items():
            print(f"best {method:14s} l2={rec.l2_error:.4f} ssim={rec.ssim:.4f} "
                  f"gamma={rec.gamma:g} mu={rec.mu:g} alpha={rec.alpha:g} lambda={rec.lam:g}")
    return 0


def cmd_rates(cfg):
    from .sweep import rate_experiment

    res = rate_experiment(M=cfg.M, sigma0=cfg.rate_sigma0, n_levels=cfg.rate_levels,
                          seeds=tuple(cfg.rate_seeds), gamma=cfg.rate_gamma,
                          mu_ratio=cfg.rate_mu_ratio, lam_ratio=cfg.rate_lambda_ratio,
                          schedule=_schedule(cfg))
    print("noise(delta+eps)  discrepancy")
    for n, d in zip(res.noise_levels, res.discrepancies):
        print(f"{n:16.6g}  {d:.6g}")
    print(f"slope={res.slope:.4f}")
    return 0


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "sweep": cmd_sweep,
            "rates": cmd_rates}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
