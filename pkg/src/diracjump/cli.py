"""Command-line front end: ``diracjump {solve,entropy,sweep,verify}``.

Every option can also come from an environment variable named
``DIRACJUMP_<OPTION>`` (dashes become underscores, e.g. ``DIRACJUMP_ABS_TOL``).
Precedence is command-line flag, then environment, then config file, then
built-in defaults.

Exit codes: 0 success, 1 usage or configuration error, 2 domain error,
3 accuracy error, 4 verification failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

from .bounds import build_report, reports_to_csv
from .errors import AccuracyError, ConfigError, DiracJumpError
from .medium import MediumParams
from .momentum_entropy import MOMENTUM_QUAD
from .quadrature import QuadSpec
from .scattering import flux_residual, solve_amplitudes
from .sweep import load_config, parse_windows, run_sweep, sweep_csv, sweep_json, write_outputs
from .verify import GROUPS, run_verify

ENV_PREFIX = "DIRACJUMP_"

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_ACCURACY, EXIT_VERIFY = range(5)

_PARAM_FLAGS = (("m_l", "--m-l"), ("m_r", "--m-r"), ("v_F", "--v-f"), ("a", "--a"), ("E", "--energy"))
# environment names follow the long flag, not the attribute
_ENV_NAMES = {dest: flag[2:].replace("-", "_").upper() for dest, flag in _PARAM_FLAGS}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_params(p, required=True):
    for dest, flag in _PARAM_FLAGS:
        p.add_argument(flag, dest=dest, type=float, default=None,
                       help=f"{dest} ({'required' if required else 'overrides the config file'})")


def _add_quad(p):
    p.add_argument("--abs-tol", type=float, default=None, help="absolute quadrature tolerance")
    p.add_argument("--rel-tol", type=float, default=None, help="relative quadrature tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diracjump", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="reflection/transmission amplitudes at one point")
    _add_params(solve)

    entropy = sub.add_parser("entropy", help="entropy report at one point")
    _add_params(entropy)
    entropy.add_argument("--windows", default=None, help="comma-separated window sizes N (default 4,8,16)")
    _add_quad(entropy)
    entropy.add_argument("--json", action="store_true", default=None, help="print the report as JSON")
    entropy.add_argument("--csv", action="store_true", default=None, help="print one CSV row per window")
    entropy.add_argument("--out", default=None, help="write output to this file instead of stdout")

    sweep = sub.add_parser("sweep", help="run a parameter grid from a config file")
    sweep.add_argument("--config", default=None, help="INI sweep configuration")
    _add_params(sweep, required=False)
    sweep.add_argument("--windows", default=None, help="comma-separated window sizes N")
    _add_quad(sweep)
    sweep.add_argument("--jobs", type=int, default=None, help="worker processes")
    sweep.add_argument("--out", default=None, help="output prefix; writes PREFIX.csv and PREFIX.jsonl")
    sweep.add_argument("--csv", action="store_true", default=None, help="with --out, write only the CSV")
    sweep.add_argument("--json", action="store_true", default=None, help="with --out, write only the JSON lines")

    verify = sub.add_parser("verify", help="run the built-in invariant suite")
    verify.add_argument("--group", action="append", choices=sorted(GROUPS), default=None,
                        help="run only this group (repeatable)")
    _add_quad(verify)
    return parser


def _apply_env(args, environ):
    for dest, value in vars(args).items():
        if value is not None or dest == "command":
            continue
        name = ENV_PREFIX + _ENV_NAMES.get(dest, dest.upper())
        raw = environ.get(name)
        if raw is None:
            continue
        if dest in ("json", "csv"):
            value = raw.strip().lower() in ("1", "true", "yes", "on")
        elif dest == "group":
            value = [g for g in raw.replace(",", " ").split() if g]
            unknown = [g for g in value if g not in GROUPS]
            if unknown:
                raise ConfigError(f"{ENV_PREFIX}GROUP: unknown group {unknown[0]!r}")
        elif dest in ("windows", "config", "out"):
            value = raw
        else:
            kind = int if dest == "jobs" else float
            try:
                value = kind(raw)
            except ValueError:
                raise ConfigError(f"{name}: cannot parse {raw!r}") from None
        setattr(args, dest, value)


def _quad_spec(args, base: QuadSpec | None):
    if args.abs_tol is None and args.rel_tol is None:
        return base
    base = base or MOMENTUM_QUAD
    try:
        return QuadSpec(
            abs_tol=args.abs_tol if args.abs_tol is not None else base.abs_tol,
            rel_tol=args.rel_tol if args.rel_tol is not None else base.rel_tol,
            max_subdivisions=base.max_subdivisions,
        )
    except DiracJumpError as exc:
        raise ConfigError(str(exc)) from None


def _params(args) -> MediumParams:
    missing = [flag for dest, flag in _PARAM_FLAGS if getattr(args, dest) is None]
    if missing:
        raise ConfigError(f"missing required parameter(s): {', '.join(missing)}")
    return MediumParams(*(getattr(args, dest) for dest, _ in _PARAM_FLAGS))


def _emit(text, path=None):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror}") from None


def _polar(z: complex) -> str:
    z = complex(z.real + 0.0, z.imag + 0.0)  # drop signed zeros
    return f"{z.real:+.12g}{z.imag:+.12g}i  (|.| = {abs(z):.12g}, arg = {math.atan2(z.imag, z.real):+.12g} rad)"


def cmd_solve(args) -> int:
    params = _params(args)
    sol = solve_amplitudes(params)
    lines = [
        f"regime             {sol.regime.value}",
        f"r1                 {_polar(sol.r1)}",
        f"t1                 {_polar(sol.t1)}",
        f"k_l                {sol.k_l:.15g}",
        f"k_r                {sol.k_r:.15g}",
        f"alpha_l            {sol.alpha_l:.15g}",
        f"alpha_r            {sol.alpha_r:.15g}",
        f"flux residual      {flux_residual(sol):.3e}",
        f"matching residual  {sol.residual:.3e}",
    ]
    if not sol.propagating:
        lines.append(
            f"note: E = {params.E:g} is below the right gap {params.gap_r:g}; the transmitted wave is "
            f"evanescent with decay rate {sol.k_r.imag:.12g} and |r1| = 1"
        )
    print("\n".join(lines))
    return EXIT_OK


def _report_text(report) -> str:
    f = report.flags
    lines = [
        f"S_x                {report.s_x:.15g}",
        f"S_x lower bound    {report.paper_bound:.15g}   (margin {report.sx_margin:.3e}, "
        f"{'ok' if f.sx_bound_ok else 'VIOLATED'})",
        f"1 + ln(pi)         {report.bbm_constant:.15g}",
        f"flux residual      {f.flux_residual:.3e}",
        f"density positive   {'yes' if f.positivity_ok else 'NO'}",
        "",
        f"{'N':>4} {'S_p':>20} {'+-':>9} {'S_x+S_p':>20} {'normalized sum':>20}  flags",
    ]
    for (n, s_p), w, (_, total), (_, norm) in zip(report.s_p_by_window, report.windows,
                                                  report.sum_by_window, report.normalized_sum_by_window):
        lines.append(f"{n:>4} {s_p:>20.13g} {w.s_p_error:>9.1e} {total:>20.13g} {norm:>20.13g}  "
                     f"{report.flag_string(n)}")
    return "\n".join(lines) + "\n"


def cmd_entropy(args) -> int:
    params = _params(args)
    windows = parse_windows(args.windows, "--windows") if args.windows else (4, 8, 16)
    report = build_report(params, windows, _quad_spec(args, None))
    if args.json:
        text = report.to_json() + "\n"
    elif args.csv:
        text = reports_to_csv(report.csv_rows())
    else:
        text = _report_text(report)
    _emit(text, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.config is None:
        raise ConfigError("sweep needs --config (or DIRACJUMP_CONFIG)")
    overrides = {f"params.{dest}": getattr(args, dest) for dest, _ in _PARAM_FLAGS}
    overrides["sweep.windows"] = args.windows
    overrides["sweep.jobs"] = args.jobs
    overrides["quad.abs_tol"] = args.abs_tol
    overrides["quad.rel_tol"] = args.rel_tol
    if args.out is not None:
        both = not args.csv and not args.json
        overrides["output.csv"] = f"{args.out}.csv" if (both or args.csv) else ""
        overrides["output.json"] = f"{args.out}.jsonl" if (both or args.json) else ""
    config = load_config(args.config, overrides)
    summary = run_sweep(config)
    written = write_outputs(summary, config)
    if not written:
        sys.stdout.write(sweep_csv(summary) if not args.json else sweep_json(summary))
    for line in summary.lines():
        print(line, file=sys.stderr if not written else sys.stdout)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_verify(args.group, _quad_spec(args, None))
    for res in results:
        print(res.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} groups passed")
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {"solve": cmd_solve, "entropy": cmd_entropy, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None, environ=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_env(args, os.environ if environ is None else environ)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except DiracJumpError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
