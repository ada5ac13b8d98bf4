"""Command line entry point ``lbblab``.

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path as FsPath

import numpy as np

from ..lbb import LbbPlan, centered_draws, exact_moments, symmetric_ci, validate_rates
from ..oracle import (
    enumerate_bootstrap_law,
    integrated_target_rv,
    limiting_variance_mc,
    total_variation,
)
from ..process import Gaussian, Path, ProcessSpec, TvMA, sigma_smile, simulate
from ..rng import derive_generator
from ..stats import FunctionalFamily, global_root_weights, kernel_weights, true_cf_tvar1, unit_weights
from .config import ConfigError, ExperimentConfig, load_config
from .experiments import run_experiment
from .output import emit_outputs

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("lbblab")


def _threads(args) -> int | None:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("LBBLAB_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"LBBLAB_THREADS must be an integer, got {env!r}") from None
    return None


def _config(args) -> ExperimentConfig:
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    threads = _threads(args)
    if threads is not None:
        if threads < 1:
            raise ConfigError("--threads must be >= 1")
        overrides["threads"] = threads
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.config is None:
        return ExperimentConfig(**overrides)
    return load_config(args.config, overrides)


def _emit(lines, out_dir, name):
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out_dir is not None:
        FsPath(out_dir).mkdir(parents=True, exist_ok=True)
        (FsPath(out_dir) / name).write_text(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    cfg = _config(args)
    spec = cfg.process_spec()
    T = cfg.T or cfg.T_list[0]
    path = simulate(spec, T, cfg.master_seed, root_t_scaled=cfg.experiment == "rv_coverage")
    out = FsPath(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    target = out / "path.csv"
    cols = ["x"] if path.dimension == 1 else [f"x{i + 1}" for i in range(path.dimension)]
    with open(target, "w", newline="\n") as fh:
        fh.write("t," + ",".join(cols) + "\n")
        for t, row in enumerate(path.values, 1):
            fh.write(f"{t}," + ",".join(repr(float(v)) for v in row) + "\n")
    print(f"path={target}")
    print(f"T={T}")
    print(f"spec={spec.spec_id}")
    print(f"seed={cfg.master_seed}")
    return EXIT_OK


def _read_path(file) -> Path:
    try:
        data = np.loadtxt(file, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read path file {file}: {exc}") from exc
    return Path(data[:, 1:], spec_id=FsPath(file).stem)


def cmd_bootstrap(args) -> int:
    cfg = _config(args)
    path = _read_path(args.path)
    T = path.T
    plan = LbbPlan(T, cfg.L_list[0], cfg.td_values(T)[0])
    gen = derive_generator(cfg.master_seed, T, plan.L, plan.TD, 0, 1)
    lines = [f"T={T}", f"L={plan.L}", f"TD={plan.TD}", f"B={cfg.B}", f"level={cfg.level:g}"]
    if cfg.experiment == "ecf_coverage":
        b_T = cfg.bandwidth_for(T)
        w = kernel_weights(cfg.ecf_u, b_T, T, cfg.kernel)
        fx = np.exp(1j * cfg.ecf_s * path.x)
        scale = math.sqrt(b_T * T)
        phi_hat = complex(np.dot(w.weights, fx)) / scale
        draws = centered_draws(fx, w, plan, cfg.B, gen)
        q = float(np.quantile(np.abs(draws), cfg.level, method="linear"))
        lines += [
            f"phi_hat_re={phi_hat.real:.10g}",
            f"phi_hat_im={phi_hat.imag:.10g}",
            f"radius={q / scale:.10g}",
        ]
    else:
        x = path.x
        w = unit_weights(T)
        est = float(np.dot(x, x))
        draws = centered_draws(x * x, w, plan, cfg.B, gen)
        lo, hi = symmetric_ci(est, draws, cfg.level)
        _, var = exact_moments(x * x, w, plan)
        lines += [f"estimate={est:.10g}", f"lo={lo:.10g}", f"hi={hi:.10g}", f"var_star={var:.10g}"]
    _emit(lines, args.out, "bootstrap.txt")
    return EXIT_OK


def cmd_coverage(args) -> int:
    cfg = _config(args)
    report = run_experiment(cfg)
    files = emit_outputs(report, cfg)
    for r in report.rows:
        print(f"T={r.T} L={r.L} TD={r.TD} coverage={r.coverage:.4f} stderr={r.mc_stderr:.4f}")
    for f in files:
        print(f"wrote={f}")
    return EXIT_OK if not report.failures else EXIT_RUNTIME


def cmd_oracle(args) -> int:
    seed = 0 if args.seed is None else args.seed
    lines = []
    # exact bootstrap law on the smallest instructive instance
    path = Path(np.arange(1.0, 9.0))
    plan = LbbPlan(8, 2, 1)
    sq = FunctionalFamily("square")
    law = enumerate_bootstrap_law(path, plan, unit_weights(8), sq)
    _, var = exact_moments(sq(path.values), unit_weights(8), plan)
    draws = centered_draws(sq(path.values), unit_weights(8), plan, 10_000, derive_generator(seed, 8))
    lines += [
        f"enumeration_outcomes={len(law)}",
        f"enumeration_mean={law.mean:.3e}",
        f"enumeration_variance={law.variance:.12g}",
        f"exact_variance={var:.12g}",
        f"sampled_tv_distance={total_variation(draws, law):.4f}",
    ]
    lines.append(f"rv_target_T1000={integrated_target_rv(sigma_smile, 1.0, 1000):.10g}")
    a_fn = lambda u: 0.9 * np.sin(2 * np.pi * u)  # noqa: E731
    lines.append(f"cf_u0.4_s6={true_cf_tvar1(0.4, 6.0, a_fn, 0.5, 1.5):.10g}")
    iid = ProcessSpec(TvMA(lambda u, j: np.ones_like(u) if j == 0 else np.zeros_like(u),
                           finite_support=0, causal=True), Gaussian(0.0, 1.0), spec_id="iid")
    lv = limiting_variance_mc(iid, global_root_weights, sq, n_paths=100, T_grid=(500,), seed=seed, n_u=3)
    lines.append(f"limiting_variance_iid_square={lv.value:.6g} (exact 2)")
    _emit(lines, args.out, "oracle.txt")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _config(args)
    lines = []
    for T, L, TD in cfg.cells():
        if cfg.experiment == "ecf_coverage" or cfg.weights == "kernel":
            w = kernel_weights(cfg.ecf_u, cfg.bandwidth_for(T), T, cfg.kernel)
        else:
            w = global_root_weights(T)
        try:
            LbbPlan(T, L, TD)
            plan_ok = "ok"
        except ValueError as exc:
            plan_ok = f"invalid ({exc})"
        rep = validate_rates(T, L, TD, w.d_T, cfg.delta)
        lines.append(f"[cell T={T} L={L} TD={TD}] plan={plan_ok} C_w={w.C_w:.6g}")
        lines += rep.lines()
    _emit(lines, args.out, "validate.txt")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lbblab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--seed", type=int, help="master seed (overrides the config)")
        p.add_argument("--threads", type=int, help="worker threads (fallback: LBBLAB_THREADS)")
        p.add_argument("--out", help="output directory")

    for name, fn, help_ in [
        ("simulate", cmd_simulate, "simulate one path and write it as CSV"),
        ("bootstrap", cmd_bootstrap, "bootstrap interval from a path CSV"),
        ("coverage", cmd_coverage, "run a coverage experiment"),
        ("oracle", cmd_oracle, "run the reference checks"),
        ("validate", cmd_validate, "weight and rate diagnostics per cell"),
    ]:
        p = sub.add_parser(name, help=help_)
        common(p)
        if name == "bootstrap":
            p.add_argument("--path", required=True, help="path CSV written by 'simulate'")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
