"""Command-line front end.

Subcommands: validate, point, sweep, optimize, preset.  Exit code 0 only
if every produced row succeeded (and, for MC rows, met the noise bar or
--allow-noisy was given).
"""

import argparse
import json
import math
import sys
from dataclasses import fields, replace

from . import __version__
from ._kernels import active_backend
from .analytic import analytic_outage
from .config import (ConfigError, SystemConfig, apply_overrides, load_config,
                     validate)
from .montecarlo import estimate_outage_pair
from .optimizer import OptimizerSettings, optimize
from .ris import resolve_alpha
from .sweep import (PRESET_NAMES, SweepSpec, is_noisy, parse_values,
                    run_preset, run_sweep)


def _add_common(p):
    p.add_argument("--config", help="config file (key = value lines)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override a config key (repeatable)")
    p.add_argument("--seed", type=int, help="override the RNG seed")
    p.add_argument("--trials", type=int, help="override the MC trial count")
    p.add_argument("--workers", type=int, default=1,
                   help="worker processes for MC blocks (default 1)")


def _build_config(args) -> SystemConfig:
    cfg = load_config(args.config) if args.config else SystemConfig()
    cfg = apply_overrides(cfg, args.overrides)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "trials", None) is not None:
        cfg = replace(cfg, mc_trials=args.trials)
    return validate(cfg)


def _cmd_validate(args) -> int:
    cfg = _build_config(args)
    print(json.dumps({f.name: getattr(cfg, f.name) for f in fields(cfg)},
                     indent=2, sort_keys=True))
    print(f"# ok, digest={cfg.digest()}", file=sys.stderr)
    return 0


def _cmd_point(args) -> int:
    cfg = _build_config(args)
    methods = ("mc", "analytic") if args.method == "both" else (args.method,)
    alpha = resolve_alpha(cfg) if cfg.alpha_mode != "optimized" else None
    results = []
    failed = False
    for method in methods:
        if method == "mc":
            pair = estimate_outage_pair(cfg, workers=args.workers)
        else:
            pair = (analytic_outage(cfg, 1), analytic_outage(cfg, 2))
        for res in pair:
            noisy = (method == "mc" and res.op > 0
                     and res.std_err > 0.2 * res.op)
            if noisy and not args.allow_noisy:
                failed = True
            results.append({
                "user": res.user, "method": res.method, "op": res.op,
                "err": res.std_err, "trials": res.trials, "noisy": noisy,
                "alpha": alpha, "config_digest": res.config_digest,
            })
    if args.json:
        print(json.dumps(results, indent=2))
    else:
        for r in results:
            flag = "  [noisy]" if r["noisy"] else ""
            print(f"user {r['user']}  {r['method']:>8}  op={r['op']:.6g}  "
                  f"err={r['err']:.3g}{flag}")
    if failed:
        print("error: noisy MC estimates (std_err > 20% of op); "
              "raise --trials or pass --allow-noisy", file=sys.stderr)
        return 1
    return 0


def _cmd_sweep(args) -> int:
    cfg = _build_config(args)
    as_int = args.param in ("m_active", "n_passive", "ris_size", "mc_trials")
    values = parse_values(args.values, as_int=as_int)
    methods = ("mc", "analytic") if args.method == "both" else (args.method,)
    spec = SweepSpec(param=args.param, values=values, methods=methods,
                     alpha_mode=args.alpha_mode)
    rows, noisy = run_sweep(spec, cfg, args.out, workers=args.workers)
    errors = [r for r in rows if r.mode.startswith("error")]
    print(f"wrote {args.out}: {len(rows)} rows "
          f"({len(errors)} failed, {len(noisy)} noisy)", file=sys.stderr)
    if errors:
        return 1
    if noisy and not args.allow_noisy:
        print("error: noisy MC rows present; raise --trials or pass "
              "--allow-noisy", file=sys.stderr)
        return 1
    return 0


def _cmd_optimize(args) -> int:
    cfg = _build_config(args)
    settings = OptimizerSettings(
        interval_dbm=(args.interval[0], args.interval[1]),
        tol_db=args.tol_db, method=args.search, evaluator=args.evaluator,
        tau=args.tau, mc_workers=args.workers,
    )
    outcome = optimize(cfg, settings)
    payload = {
        "pt_ris_dbm": outcome.pt_ris_dbm, "alpha": outcome.alpha,
        "op1": outcome.op1, "op2": outcome.op2, "gap": outcome.gap,
        "delta_max_op": outcome.delta, "mode": outcome.mode,
        "evaluations": outcome.evaluations,
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_preset(args) -> int:
    cfg = _build_config(args)
    status = 0
    for path, rows, noisy in run_preset(args.name, cfg, args.out_dir,
                                        workers=args.workers,
                                        trials=args.trials):
        errors = [r for r in rows if r.mode.startswith("error")]
        print(f"wrote {path}: {len(rows)} rows "
              f"({len(errors)} failed, {len(noisy)} noisy)", file=sys.stderr)
        if errors or (noisy and not args.allow_noisy):
            status = 1
    if status:
        print("error: failed or noisy rows; see messages above",
              file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="risnoma",
        description="Hybrid-RIS uplink NOMA outage simulator "
                    f"(v{__version__}, kernel backend: {active_backend()})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a configuration and echo it")
    _add_common(p)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("point", help="evaluate one configuration")
    _add_common(p)
    p.add_argument("--method", choices=("mc", "analytic", "both"), default="both")
    p.add_argument("--allow-noisy", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_point)

    p = sub.add_parser("sweep", help="sweep one parameter, write CSV")
    _add_common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True,
                   help="'a,b,c', 'start:stop:step', or 'log:a:b:n'")
    p.add_argument("--method", choices=("mc", "analytic", "both"), default="both")
    p.add_argument("--alpha-mode", choices=("fixed", "from_power", "optimized"),
                   default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--allow-noisy", action="store_true")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("optimize", help="solve the power-budget fairness problem")
    _add_common(p)
    p.add_argument("--interval", type=float, nargs=2, default=(-70.0, -10.0),
                   metavar=("LO_DBM", "HI_DBM"))
    p.add_argument("--tol-db", type=float, default=0.1)
    p.add_argument("--search", choices=("golden", "annealing"), default="golden")
    p.add_argument("--evaluator", choices=("analytic", "mc"), default="analytic")
    p.add_argument("--tau", type=float, default=0.9)
    p.set_defaults(fn=_cmd_optimize)

    p = sub.add_parser("preset", help="run a canned experiment sweep")
    _add_common(p)
    p.add_argument("name", choices=PRESET_NAMES)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--allow-noisy", action="store_true")
    p.set_defaults(fn=_cmd_preset)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
