"""Command-line harness: ``eepc run``, ``eepc order`` and ``eepc verify``."""
import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_self_checks
from .config import load_config, preset_names
from .diagnostics import (
    invariant_series,
    order_study,
    residual_averaged,
    residual_known_eta,
)
from .errors import ConfigError, NonConvergence
from .stepper import integrate
from .systems import linear_rotation_exact, make_linear_rotation

log = logging.getLogger("eepc")

RNG_ALGORITHM = "numpy PCG64"
LINEAR_OMEGA, LINEAR_GAMMA, LINEAR_X0 = 10.0, 0.1, (1.0, 0.5)


def fmt(v):
    """Shortest round-trip decimal form of a float."""
    return repr(float(v))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _apply_overrides(cfg, args):
    if getattr(args, "seed", None) is not None:
        cfg.damping = replace(cfg.damping, seed=args.seed)
    if getattr(args, "out_dir", None):
        cfg.outputs.directory = args.out_dir
    if getattr(args, "quadrature_q", None) is not None:
        cfg.scheme.q = args.quadrature_q
    if getattr(args, "tol", None) is not None:
        cfg.scheme.tol = args.tol
    return cfg


def _residual_columns(traj, system):
    cols, names, warnings = [], [], []
    for inv in system.invariants:
        if inv.has_eta:
            series = residual_known_eta(traj, inv, strict=False)
        else:
            series = residual_averaged(traj, inv, system.damping_diag, strict=False)
        if np.isnan(series.values).any():
            warnings.append(f"{inv.name}: log-ratio undefined at "
                            f"{int(np.isnan(series.values).sum())} steps (sign change)")
        cols.append(series.values)
        names.append(f"{inv.name}[{series.mode}]")
    return names, cols, warnings


def cmd_run(cfg):
    """Integrate one experiment and write solution, invariant, residual and meta files."""
    out = Path(cfg.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    system = cfg.build_system()
    x0 = cfg.initial_state()
    tab = cfg.scheme.tableau()
    traj = integrate(system, x0, cfg.time.T, cfg.time.dt, tab, cfg.scheme.options())

    n = len(traj) - 1
    stride = cfg.outputs.stride
    snap = sorted(set(range(0, n + 1, stride)) | {n})
    write_csv(out / "solution.csv", ["t"] + [f"u{i}" for i in range(1, system.dim + 1)],
              ([traj.times[k]] + list(traj.states[k]) for k in snap))

    inv_cols = [invariant_series(traj, inv) for inv in system.invariants]
    write_csv(out / "invariants.csv", ["t"] + [inv.name for inv in system.invariants],
              ([traj.times[k]] + [c[k] for c in inv_cols] for k in range(n + 1)))

    names, res_cols, warnings = _residual_columns(traj, system)
    write_csv(out / "residuals.csv", ["t"] + names,
              ([traj.times[k + 1]] + [c[k] for c in res_cols] for k in range(n)))
    for w in warnings:
        log.warning(w)

    its = np.asarray(traj.iterations, dtype=int)
    meta = {
        "config": cfg.to_dict(),
        "version": __version__,
        "rng": RNG_ALGORITHM,
        "seed": cfg.damping.seed,
        "steps": n,
        "final_time": float(traj.times[-1]),
        "grid_points": system.dim,
        "dx": system.dx,
        "iterations": {
            "total": int(its.sum()),
            "min": int(its.min()) if n else 0,
            "max": int(its.max()) if n else 0,
            "mean": float(its.mean()) if n else 0.0,
        },
        "residual_max_abs": {nm: (float(np.nanmax(np.abs(c))) if c.size and not np.isnan(c).all()
                                  else None) for nm, c in zip(names, res_cols)},
        "warnings": warnings,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return traj, meta


def cmd_order(cfg, dts, ref_dt=None, stages=(1, 2, 3, 4), linear=False, T=None):
    """Global-error table per (s, dt) and fitted slopes; returns the study."""
    out = Path(cfg.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    opts = cfg.scheme.options()
    tabs = [cfg.scheme.tableau(s) for s in stages]
    T = cfg.time.T if T is None else T
    if linear:
        system = make_linear_rotation(LINEAR_OMEGA, LINEAR_GAMMA)
        x0 = np.array(LINEAR_X0)
        reference = linear_rotation_exact(T, x0, LINEAR_OMEGA, LINEAR_GAMMA)
        study = order_study(system, x0, T, dts, tabs, reference=reference, opts=opts)
    else:
        system = cfg.build_system()
        study = order_study(system, cfg.initial_state(), T, dts, tabs, dt_ref=ref_dt, opts=opts)
    write_csv(out / "order.csv", ["s", "dt", "error", "seconds"],
              ([r.s, r.dt, r.error, r.seconds] for r in study.rows))
    warnings = []
    rows = []
    for s, slope in study.slopes.items():
        if slope is None:
            warnings.append(f"s={s}: slope undefined (fewer than two usable step sizes)")
        else:
            rows.append([s, slope])
    write_csv(out / "slopes.csv", ["s", "slope"], rows)
    for w in warnings:
        log.warning(w)
    meta = {
        "config": cfg.to_dict(),
        "system": system.name,
        "T": T,
        "dts": list(map(float, dts)),
        "ref_dt": ref_dt,
        "error_floor": study.floor,
        "warnings": warnings,
    }
    (out / "order_meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return study


def cmd_verify(stream=None):
    stream = stream or sys.stdout
    results = run_self_checks()
    for r in results:
        print(r.line(), file=stream)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=stream)
    return 1 if failed else 0


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(prog="eepc", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="seed for constant-unequal damping")
    common.add_argument("--out-dir", help="output directory")
    common.add_argument("--quadrature-q", type=int, help="Gauss-Legendre nodes per step")
    common.add_argument("--tol", type=float, help="stage solver tolerance")

    run = sub.add_parser("run", parents=[common], help="integrate one experiment")
    run.add_argument("config", help=f"JSON file or preset ({', '.join(preset_names())})")

    order = sub.add_parser("order", parents=[common], help="temporal convergence study")
    order.add_argument("config", nargs="?", help="JSON file or preset")
    order.add_argument("--dts", type=_float_list, required=True, help="comma-separated steps")
    order.add_argument("--ref-dt", type=float, help="step of the s=4 reference run")
    order.add_argument("--stages", type=_int_list, default=[1, 2, 3, 4])
    order.add_argument("--T", type=float, dest="T", help="final time (overrides config)")
    order.add_argument("--linear", action="store_true",
                       help="use the 2-D damped rotation with its closed-form solution")

    sub.add_parser("verify", help="tableau and operator self-checks")
    return parser


def _linear_config():
    from .config import parse_config

    return parse_config({"system": "burgers", "grid": {"L": 1.0, "n1": 3},
                         "time": {"T": 1.0, "dt": 0.1}})


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify()
        if args.command == "run":
            cfg = _apply_overrides(load_config(args.config), args)
            _, meta = cmd_run(cfg)
            log.info("wrote %s (%d steps, max %d stage iterations)",
                     cfg.outputs.directory, meta["steps"], meta["iterations"]["max"])
            return 0
        if args.config is None:
            if not args.linear:
                raise ConfigError("<file>", "a config is required unless --linear is given")
            cfg = _linear_config()
        else:
            cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args)
        study = cmd_order(cfg, args.dts, args.ref_dt, args.stages, args.linear, args.T)
        for s, slope in study.slopes.items():
            log.info("s=%d slope=%s", s, "n/a" if slope is None else f"{slope:.3f}")
        return 0
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 2
    except NonConvergence as exc:
        log.error("%s", exc)
        return 3
    except ValueError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
