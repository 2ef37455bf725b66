"""Command-line entry point: ``fisherstefan <subcommand> [options]``.

Every subcommand writes its artifacts into ``--out`` and prints a JSON
summary on stdout.  Options may also come from ``--config FILE`` (JSON, or
``key = value`` lines); flags given on the command line take precedence.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 undecided.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import essential, profile, prufer, records, stefan, vanishing
from .errors import FisherStefanError, Undecided

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_UNDECIDED = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError("JSON config must be an object")
        return {k.replace("-", "_"): v for k, v in data.items()}
    data = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = (part.strip() for part in line.split("=", 1))
        data[key.replace("-", "_")] = val
    return data


def _lambda_range(text: str):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from None
    if n < 2 or not hi > lo:
        raise argparse.ArgumentTypeError("need hi > lo and n >= 2")
    return lo, hi, n


def _interval(text: str):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    return lo, hi


def _float_list(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _tag(x: float) -> str:
    return repr(float(x)).replace("-", "m").replace(".", "p")


def _table(args, stem, header, rows, payload=None):
    """Write a table as CSV or JSON (``payload`` overrides the JSON body)."""
    out = Path(args.out)
    if args.format == "csv":
        return records.write_csv(out / f"{stem}.csv", header, rows)
    if payload is None:
        payload = {name: [row[i] for row in rows] for i, name in enumerate(header)}
    return records.write_json(out / f"{stem}.json", payload)


# -- subcommands ---------------------------------------------------------------


def cmd_wave(args):
    prof = profile.shoot_profile(args.c, tol=args.tol, step=args.step, length=args.length)
    out = Path(args.out)
    path = records.write_profile(out / f"profile.{args.format}", prof)
    return {
        "c": prof.c,
        "nu": prof.nu,
        "front_slope": prof.front_slope,
        "z_min": prof.z_min,
        "samples": int(prof.z.size),
        "artifact": path.name,
    }


def cmd_series(args):
    series = profile.manifold_series(args.c, args.order)
    path = records.write_series(Path(args.out) / f"series.{args.format}", series)
    return {
        "c": float(args.c),
        "nu": series.nu,
        "order": series.order,
        "J_minus_1_sum": profile.evaluate_manifold(series, -1.0),
        "artifact": path.name,
    }


def cmd_mu_of_c(args):
    nu = profile.unstable_eigenvalue(args.c)
    j = profile.axis_crossing(args.c, order=args.order, method=args.method)
    mu = profile.mu_from_c(args.c, order=args.order, method=args.method)
    summary = {"c": float(args.c), "nu": nu, "J_minus_1": j, "mu": mu}
    _table(args, "mu_of_c", ["c", "nu", "J_minus_1", "mu"], [(args.c, nu, j, mu)], summary)
    return summary


def cmd_c_of_mu(args):
    c = profile.c_from_mu(args.mu, order=args.order, c_max=args.c_max, method=args.method)
    summary = {"mu": float(args.mu), "c": c, "nu": profile.unstable_eigenvalue(c)}
    _table(args, "c_of_mu", ["mu", "c", "nu"], [(args.mu, c, summary["nu"])], summary)
    return summary


def cmd_vanishing(args):
    modes = vanishing.spectrum(args.h_inf, args.n)
    verdict, lam1 = vanishing.classify_vanishing(args.h_inf)
    path = _table(args, "spectrum", ["n", "lambda"], modes.to_rows())
    return {
        "h_inf": float(args.h_inf),
        "lambda_1": lam1,
        "verdict": verdict.value,
        "critical_length": vanishing.critical_length(),
        "artifact": path.name,
    }


def cmd_essential(args):
    curve = essential.border_curve(args.c, k_max=args.k_max, n=args.n)
    path = _table(args, "border", ["k", "re_lambda", "im_lambda"], curve.to_rows())
    queries = []
    for text in args.lam or []:
        lam = complex(text.replace(" ", ""))
        entry = {"lambda": lam, "region": essential.classify_lambda(args.c, lam).value}
        if args.greens is not None and entry["region"] == essential.Region.RESOLVENT.value:
            x, y = args.greens
            g = essential.greens_function(args.c, lam, x, y)
            entry["greens"] = {"x": x, "y": y, "value": complex(g)}
        queries.append(entry)
    return {
        "c": float(args.c),
        "max_re_border": float(np.max(curve.lam.real)),
        "q_border": essential.q_essential_border(args.c),
        "queries": queries,
        "artifact": path.name,
    }


def cmd_prufer(args):
    lo, hi, n_lam = args.lambda_grid
    lam_inf = hi if args.lambda_inf is None else args.lambda_inf
    prof = profile.shoot_profile(args.c, length=args.L)
    report = prufer.oscillation_check(
        args.c, np.linspace(lo, hi, n_lam), lambda_inf=lam_inf, profile=prof, L=args.L
    )
    out = Path(args.out)
    records.write_json(out / "oscillation_report.json", report.to_dict())
    summary = {
        "c": float(args.c),
        "verdict": report.verdict,
        "all_monotone": report.all_monotone,
        "all_crossing_free": report.all_crossing_free,
        "artifacts": ["oscillation_report.json"],
    }
    for lam in args.trajectory or []:
        traj = prufer.integrate_prufer(args.c, lam, profile=prof, L=args.L)
        path = _table(args, f"trajectory_{_tag(lam)}", ["z", "theta", "r", "log_r"], traj.to_rows())
        summary["artifacts"].append(path.name)
    if args.scan is not None:
        summary["eigenvalues"] = prufer.eigenvalue_scan(
            args.c, args.scan[0], args.scan[1], profile=prof, L=args.L
        )
    if args.kpp_demo:
        summary["line_winding"] = prufer.kpp_line_winding_demo(args.c)
        summary["half_line_winding"] = prufer.half_line_winding(args.c, L=args.L)
    return summary


def cmd_simulate(args):
    if args.c is not None and args.mu is not None:
        raise ValueError("give either c or mu, not both")
    if args.c is None and args.mu is None:
        raise ValueError("one of c or mu is required")
    mu = profile.mu_from_c(args.c) if args.c is not None else float(args.mu)
    run = stefan.simulate(
        stefan.cosine_data(args.h0, args.amplitude), args.h0, mu, args.T,
        dt=args.dt, nx=args.nx, save_every=args.save_every,
    )
    out = Path(args.out)
    stride = max(1, int(round(args.history_every / args.dt)))
    rows = run.history_rows()
    rows = rows[::stride] + ([rows[-1]] if (len(rows) - 1) % stride else [])
    _table(args, "history", ["t", "h", "h_prime", "max_u"], rows)
    artifacts = [f"history.{args.format}"]
    for t_snap in args.snapshot_times or []:
        state = min(run.states, key=lambda s: abs(s.t - t_snap))
        path = _table(args, f"snapshot_t{_tag(state.t)}", ["x", "u"], list(zip(state.x, state.u)))
        artifacts.append(path.name)
    summary = {"h0": float(args.h0), "mu": mu, "amplitude": float(args.amplitude),
               "T": float(args.T), "artifacts": artifacts}
    try:
        outcome = stefan.detect_outcome(run)
    except Undecided as exc:
        summary["outcome"] = {"kind": "Undecided", "reason": str(exc)}
        records.write_json(out / "outcome.json", summary)
        raise
    summary["outcome"] = outcome.to_dict()
    if outcome.kind == "Spreading" and args.c is not None:
        _, sups = stefan.moving_frame_compare(run, args.c)
        summary["final_frame_sup"] = float(sups[-1])
    records.write_json(out / "outcome.json", summary)
    return summary


def cmd_stability(args):
    rep = stefan.perturb_decay_experiment(
        args.c, amplitude=args.amplitude, T=args.T, L=args.L, nz=args.nz, dt=args.dt
    )
    stride = max(1, int(round(args.history_every / args.dt)))
    rows = list(zip(rep.times[::stride], rep.h1_norms[::stride]))
    path = _table(args, "decay", ["t", "h1_norm"], rows)
    records.write_json(Path(args.out) / "decay_report.json", rep.to_dict())
    return {**rep.to_dict(), "artifacts": [path.name, "decay_report.json"]}


# -- parser ------------------------------------------------------------------


def _common(p):
    p.add_argument("--out", default="fisherstefan-out", help="output directory")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--config", help="JSON or key = value file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fisherstefan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wave", help="shoot and export the wave profile")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--length", type=float, default=None)
    p.set_defaults(func=cmd_wave)

    p = sub.add_parser("series", help="unstable-manifold series coefficients")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--order", type=int, default=20)
    p.set_defaults(func=cmd_series)

    for name, func, flag in (("mu-of-c", cmd_mu_of_c, "--c"), ("c-of-mu", cmd_c_of_mu, "--mu")):
        p = sub.add_parser(name, help="Stefan coefficient and wave speed conversions")
        p.add_argument(flag, type=float, required=True)
        p.add_argument("--order", type=int, default=20)
        p.add_argument("--method", choices=("seeded", "sum", "pade"), default="seeded")
        if name == "c-of-mu":
            p.add_argument("--c-max", type=float, default=1.95)
        p.set_defaults(func=func)

    p = sub.add_parser("vanishing", help="spectrum about the vanishing state")
    p.add_argument("--h-inf", type=float, required=True)
    p.add_argument("--n", type=int, default=5)
    p.set_defaults(func=cmd_vanishing)

    p = sub.add_parser("essential", help="Fredholm border, classification, Green's function")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--k-max", type=float, default=5.0)
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--lambda", dest="lam", action="append", help="complex value, e.g. -1+0.5j")
    p.add_argument("--greens", type=float, nargs=2, metavar=("X", "Y"))
    p.set_defaults(func=cmd_essential)

    p = sub.add_parser("prufer", help="Prufer angles, oscillation report and eigenvalue scan")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--lambda-grid", type=_lambda_range, default=(0.0, 100.0, 41))
    p.add_argument("--lambda-inf", type=float, default=None)
    p.add_argument("--L", type=float, default=prufer.DEFAULT_L)
    p.add_argument("--trajectory", type=float, action="append", help="export the angle at this lambda")
    p.add_argument("--scan", type=_interval, default=None, metavar="LO:HI")
    p.add_argument("--kpp-demo", action="store_true")
    p.set_defaults(func=cmd_prufer)

    p = sub.add_parser("simulate", help="Fisher-Stefan free-boundary run")
    speed = p.add_mutually_exclusive_group()
    speed.add_argument("--c", type=float, default=None)
    speed.add_argument("--mu", type=float, default=None)
    p.add_argument("--h0", type=float, default=1.0)
    p.add_argument("--amplitude", type=float, default=0.01)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--nx", type=int, default=801)
    p.add_argument("--save-every", type=float, default=0.1)
    p.add_argument("--history-every", type=float, default=0.01)
    p.add_argument("--snapshot-times", type=_float_list, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stability", help="decay of a perturbed wave")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--amplitude", type=float, default=0.01)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--L", type=float, default=40.0)
    p.add_argument("--nz", type=int, default=801)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--history-every", type=float, default=0.01)
    p.set_defaults(func=cmd_stability)

    for p in sub.choices.values():
        _common(p)
    return parser


def _commands(parser):
    return parser._subparsers._group_actions[0].choices


def _coerce(parser, command, cfg):
    """Turn config entries into flags so they are parsed and validated like any other."""
    sub = _commands(parser)[command]
    known = {a.dest: a for a in sub._actions}
    argv = []
    for key, val in cfg.items():
        action = known.get(key)
        if action is None or key in ("config", "func", "help"):
            raise ConfigError(f"unknown config key {key!r} for {command}")
        flag = action.option_strings[-1]
        if action.nargs == 0:
            if str(val).lower() in ("1", "true", "yes"):
                argv.append(flag)
            continue
        vals = val if isinstance(val, list) and action.nargs is not None else [val]
        argv += [flag, *(str(v) for v in vals)]
    return argv


def _check_finite(args):
    for key, val in vars(args).items():
        if isinstance(val, float) and not math.isfinite(val):
            raise ValueError(f"{key} must be finite")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config and argv and argv[0] in _commands(parser):
            cfg = load_config(known.config)
            # a speed given as a flag replaces either speed from the config
            if {"--c", "--mu"} & set(argv) and argv[0] == "simulate":
                cfg.pop("c", None), cfg.pop("mu", None)
            cfg_argv = _coerce(parser, argv[0], cfg)
            # config first, command line last: later flags win
            argv = [argv[0], *cfg_argv, *argv[1:]]
    except (ValueError, OSError) as exc:
        print(f"fisherstefan: invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    args = parser.parse_args(argv)
    try:
        _check_finite(args)
        summary = args.func(args)
    except Undecided as exc:
        print(f"fisherstefan: undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except FisherStefanError as exc:
        print(f"fisherstefan: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"fisherstefan: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    records.write_json(Path(args.out) / "summary.json", {"command": args.command, **summary})
    sys.stdout.write(records.dumps(summary))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
