"""Command-line front end: ``qdeq <subcommand> ...``.

Exit codes: 0 success, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import acceptance, dmod, gammalimit, jfun, mzv, peaks
from .cohmodel import InvalidBlockError, UnknownSpaceError, space_model
from .config import SCHEMA_VERSION, ConfigError, RunConfig, from_env


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _fraction_list(text: str) -> tuple[Fraction, ...]:
    return tuple(_fraction(t) for t in text.split(",") if t.strip())


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--precision", type=int, help="decimal digits for BigReal values")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), help="output format")
    p.add_argument("--crossover", type=int, help="largest n evaluated exactly")
    p.add_argument("--workers", type=int, help="accepted for compatibility; runs are sequential")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="qdeq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    qh = sub.add_parser("qh", help="cohomology models").add_subparsers(dest="action", parser_class=_Parser)
    qh.required = True
    p = qh.add_parser("dump", parents=[common], help="print a space model")
    p.add_argument("--space", default="twistor")
    p.add_argument("--chi", type=_fraction, default=Fraction(1))

    mz = sub.add_parser("mzv", help="partial multiple zeta values").add_subparsers(
        dest="action", parser_class=_Parser)
    mz.required = True
    p = mz.add_parser("eval", parents=[common], help="partial value zeta_d(index)")
    p.add_argument("--index", type=_int_list, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--weak", action="store_true", help="non-strict (symmetric) sum")
    p.add_argument("--limit", action="store_true", help="also bracket the d -> infinity limit")
    p = mz.add_parser("expand", parents=[common], help="stuffle expansion of S(index)")
    p.add_argument("--sym", type=_int_list, required=True)

    jf = sub.add_parser("jfun", help="J-function coefficients").add_subparsers(
        dest="action", parser_class=_Parser)
    jf.required = True
    p = jf.add_parser("coeff", parents=[common], help="normalized J-coefficient")
    p.add_argument("--space", default="twistor")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--chi", type=_fraction, default=Fraction(1))
    p.add_argument("--raw", action="store_true", help="unnormalized coefficients")
    p = jf.add_parser("desc", parents=[common], help="one descendant invariant")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--insertion", required=True)
    p.add_argument("--chi", type=_fraction, default=Fraction(1))
    p.add_argument("--explain", action="store_true", help="include the recursion steps")

    gm = sub.add_parser("gamma", help="Gamma class limits").add_subparsers(
        dest="action", parser_class=_Parser)
    gm.required = True
    p = gm.add_parser("verify", parents=[common], help="limit table against the Gamma class")
    p.add_argument("--space", default="twistor")
    p.add_argument("--n", type=_int_list, default=(100000,), help="schedule, comma separated")
    p.add_argument("--tolerance-scale", type=_fraction, default=Fraction(10))
    p.add_argument("--richardson", action="store_true")

    pk = sub.add_parser("peaks", help="Laplace-method peak analysis").add_subparsers(
        dest="action", parser_class=_Parser)
    pk.required = True
    p = pk.add_parser("scan", parents=[common], help="tail ratios, defect and Stokes ratio")
    p.add_argument("--x", type=_float_list, default=(1e3, 1e4, 1e5))
    p.add_argument("--nu", type=_fraction)
    p.add_argument("--eps-base", choices=("x", "peak"), default="x")
    p.add_argument("--series", default="period", help="preset: period | cpn:N")
    p.add_argument("--alphas", type=_fraction_list, default=(), help="numerator Gamma slopes")
    p.add_argument("--a", type=_fraction_list, default=(), help="numerator Gamma shifts")
    p.add_argument("--betas", type=_fraction_list, default=(), help="denominator Gamma slopes")
    p.add_argument("--b", type=_fraction_list, default=(), help="denominator Gamma shifts")
    p.add_argument("--bseq", default="harmonic", help="one | harmonic | sym11 | logpow:p")
    p.add_argument("--k", type=int, default=1)

    dm = sub.add_parser("dmod", help="quantum connection classification").add_subparsers(
        dest="action", parser_class=_Parser)
    dm.required = True
    p = dm.add_parser("report", parents=[common], help="exponential-type report for a block")
    p.add_argument("--space", default="twistor")
    p.add_argument("--block", default="y", choices=("y", "main", "full"))
    p.add_argument("--q", type=_fraction, default=Fraction(1))
    p.add_argument("--chi", type=_fraction_list, help="chi samples (main block)")
    p.add_argument("--twist", type=_fraction, default=Fraction(0), help="apply E^(w/u) first")
    p = dm.add_parser("irr", parents=[common], help="irregularity of an operator")
    p.add_argument("--operator", required=True, help='e.g. "d2:1; d1:u^-2; d0:u^3"')

    p = sub.add_parser("verify-all", parents=[common], help="run the acceptance criteria")
    p.add_argument("--space", default="twistor", help="accepted for symmetry; all spaces run")
    p.add_argument("--only", type=_int_list, help="criterion numbers")
    p.add_argument("--timings", action="store_true", help="include wall-clock seconds")
    return parser


# ---------------------------------------------------------------------------

def _space(text: str, chi=None):
    try:
        if chi is not None and text.lower().startswith("twistor"):
            return space_model(text, chi=chi)
        return space_model(text)
    except (UnknownSpaceError, ValueError, TypeError) as exc:
        raise UsageError(f"--space: {exc}") from None


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _envelope(cfg: RunConfig, command: str, body) -> dict:
    return {"schema": SCHEMA_VERSION, "command": command, "config": cfg.to_json(), "result": body}


def _cmd_qh(args, cfg, out) -> int:
    _emit(_envelope(cfg, "qh dump", _space(args.space, args.chi).to_json()), out)
    return 0


def _cmd_mzv(args, cfg, out) -> int:
    if args.action == "eval":
        idx = args.index
        if any(s < 1 for s in idx):
            raise UsageError("--index: entries must be positive")
        val = mzv.partial_value(args.d, idx, args.weak, cfg.digits, cfg.crossover)
        body = {"index": list(idx), "d": args.d, "weak": args.weak,
                "value": val.to_json() if hasattr(val, "to_json") else str(val)}
        if args.limit:
            try:
                body["limit"] = mzv.zeta_limit(idx, args.d, cfg.digits, cfg.crossover).to_json()
            except mzv.DivergentIndexError as exc:
                raise UsageError(f"--index: {exc}") from None
        _emit(_envelope(cfg, "mzv eval", body), out)
        return 0
    comb = mzv.stuffle_expand(args.sym)
    _emit(_envelope(cfg, "mzv expand", {"sym": list(args.sym), "expansion": comb.to_json(),
                                        "text": comb.to_string()}), out)
    return 0


def _cmd_jfun(args, cfg, out) -> int:
    if args.action == "coeff":
        model = _space(args.space)
        jc = jfun.j_coeff(model, args.n, chi=args.chi)
        _emit(_envelope(cfg, "jfun coeff", jc.to_json(normalized=not args.raw)), out)
        return 0
    key = jfun.DescendantKey(args.d, args.insertion)
    try:
        val = jfun.desc_invariant(key, chi=args.chi)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"--insertion: {exc}") from None
    body = {"d": args.d, "insertion": args.insertion, "chi": str(args.chi), "value": str(val)}
    if args.explain and args.insertion in jfun.ENGINE_LABELS:
        body["derivation"] = jfun.engine(args.chi).derivation(
            (args.d, jfun.ENGINE_LABELS.index(args.insertion), None))
    _emit(_envelope(cfg, "jfun desc", body), out)
    return 0


def _cmd_gamma(args, cfg, out) -> int:
    model = _space(args.space)
    rows = gammalimit.limit_report(model, n_schedule=args.n,
                                   extrapolate="richardson" if args.richardson else "none",
                                   tolerance_scale=args.tolerance_scale, digits=cfg.digits)
    gating = [r for r in rows if r.method != "richardson"]
    ok = all(r.passed for r in gating)
    if cfg.fmt == "csv":
        _csv([r.to_json() for r in rows], out)
    else:
        _emit(_envelope(cfg, "gamma verify", {"space": model.name, "pass": ok,
                                              "rows": [r.to_json() for r in rows]}), out)
    return 0 if ok else 1


def _csv(rows: list[dict], out) -> None:
    if not rows:
        return
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    out.write(buf.getvalue())


def _series(text: str) -> peaks.PeakSeriesParams:
    if text == "period":
        return peaks.quantum_period_params()
    if text.startswith("cpn:"):
        return peaks.cpn_period_params(int(text[4:]))
    raise UsageError(f"--series: unknown series {text!r}")


def _cmd_peaks(args, cfg, out) -> int:
    if args.alphas or args.a or args.betas or args.b:
        try:
            params = peaks.series_params(args.alphas, args.a, args.betas, args.b)
        except ValueError as exc:
            raise UsageError(f"--betas/--b: {exc}") from None
    else:
        params = _series(args.series)
    try:
        peaks.scaling_sequence(args.bseq)
    except ValueError as exc:
        raise UsageError(f"--bseq: {exc}") from None
    nu = args.nu if args.nu is not None else cfg.nu
    digits = min(cfg.digits, 30)
    rows = []
    for x in args.x:
        tr = peaks.tail_ratios(params, x, nu, digits, eps_base=args.eps_base)
        row = {"x": f"{x:g}", "nu": str(nu), "eps_base": args.eps_base,
               "n_minus": tr.n_minus, "n_plus": tr.n_plus,
               "head": tr.head.to_string(8), "tail": tr.tail.to_string(8),
               "defect": peaks.peaking_defect(params, x, args.bseq, args.k, digits).to_string(8)}
        try:
            row["stokes"] = peaks.stokes_ratio(params, x, digits).to_string(12)
        except peaks.UnsupportedRegimeError:
            row["stokes"] = ""
        rows.append(row)
    if cfg.fmt == "csv":
        _csv(rows, out)
    else:
        _emit(_envelope(cfg, "peaks scan", {"rows": rows}), out)
    return 0


def _cmd_dmod(args, cfg, out) -> int:
    if args.action == "irr":
        try:
            L = dmod.DiffOperator.parse(args.operator)
        except (ValueError, SyntaxError) as exc:
            raise UsageError(f"--operator: {exc}") from None
        _emit(_envelope(cfg, "dmod irr", L.to_json()), out)
        return 0
    model = _space(args.space)
    chis = args.chi or (cfg.chi_samples if args.block == "main" else (None,))
    reports = []
    ok = True
    for chi in chis:
        try:
            conn = dmod.quantum_connection(model, args.block, args.q, chi=chi)
        except InvalidBlockError as exc:
            raise UsageError(f"--block: {exc}") from None
        conn = dmod.twist(conn, args.twist)
        rep = dmod.exp_type_report(conn, seed=cfg.seed)
        body = {"chi": None if chi is None else str(chi), "report": rep.to_json()}
        if args.block == "y":
            body["operator"] = dmod.associated_operator(conn, [1, 0, 0, 0]).to_json()
        reports.append(body)
        ok = ok and rep.verdict in (dmod.VERDICT_EXP, dmod.VERDICT_REGULAR)
    _emit(_envelope(cfg, "dmod report", {"space": model.name, "block": args.block,
                                         "q": str(args.q), "twist": str(args.twist),
                                         "samples": reports}), out)
    return 0 if ok else 1


def _cmd_verify_all(args, cfg, out) -> int:
    results = acceptance.run_all(cfg, only=set(args.only) if args.only else None)
    body = {"pass": all(r.passed for r in results),
            "criteria": [r.to_json(timings=args.timings) for r in results]}
    _emit(_envelope(cfg, "verify-all", body), out)
    for r in results:
        print(r.line(), file=sys.stderr)
    return 0 if body["pass"] else 1


COMMANDS = {"qh": _cmd_qh, "mzv": _cmd_mzv, "jfun": _cmd_jfun, "gamma": _cmd_gamma,
            "peaks": _cmd_peaks, "dmod": _cmd_dmod, "verify-all": _cmd_verify_all}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = from_env().with_overrides(digits=args.precision, seed=args.seed, fmt=args.fmt,
                                        crossover=args.crossover, workers=args.workers)
        return COMMANDS[args.command](args, cfg, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"qdeq: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
