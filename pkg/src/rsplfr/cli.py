"""Command-line front end.

Thin shims over the library: every subcommand parses arguments, calls one
module entry point, and formats the result.  Exit codes: 0 success, 1
verdict failure (a check that the variant claims does not hold, or an
invalid PDA), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import figures, netsim, oracle, pda as pda_mod, tradeoff
from .presets import (SCHEME_PRESETS, TRADEOFF_PRESETS, config_from_dict,
                      preset_config, scenario_from_dict)
from .scheme import ConfigInvalid, SchemeError, Variant

USAGE_ERROR = 2
VERDICT_FAILURE = 1


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return USAGE_ERROR


def _frac_str(x: Fraction) -> str:
    return f"{x} ({float(x):.6g})" if x.denominator != 1 else str(x)


def _load_config(args):
    """Resolve --config/--preset into (SchemeConfig, demands-or-None)."""
    if getattr(args, "config", None):
        with open(args.config) as fh:
            config, demands = config_from_dict(
                json.load(fh),
                skip_validation=getattr(args, "skip_validation", False))
    elif getattr(args, "preset", None):
        if args.preset in TRADEOFF_PRESETS:
            raise ConfigInvalid(
                f"preset {args.preset!r} names a tradeoff parameter set; "
                f"use `rsplfr tradeoff` with it")
        config = preset_config(args.preset)
        demands = None
    else:
        raise ConfigInvalid("need --config FILE or --preset NAME "
                            f"(presets: {', '.join(SCHEME_PRESETS)})")
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    return config, demands


def _default_demands(config):
    """One valid demand per user: unit vectors cycling through the files."""
    return [tuple(1 if n == (k % config.N) else 0 for n in range(config.N))
            for k in range(config.K)]


# -- pda ---------------------------------------------------------------


def cmd_pda_build(args) -> int:
    text = pda_mod.format_pda(pda_mod.man_pda(args.K, args.t))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_pda_validate(args) -> int:
    with open(args.file) as fh:
        text = fh.read()
    try:
        p = pda_mod.parse_pda(text)
    except pda_mod.PdaError as exc:
        result = {"valid": False, "reason": f"{type(exc).__name__}: {exc}"}
        if args.json:
            print(json.dumps(result))
        else:
            print(f"invalid: {result['reason']}")
        return VERDICT_FAILURE
    K, F, Z, S = p.parameters()
    if args.json:
        print(json.dumps({"valid": True, "K": K, "F": F, "Z": Z, "S": S}))
    else:
        print(f"valid (K,F,Z,S) = ({K},{F},{Z},{S})")
    return 0


def cmd_pda_print(args) -> int:
    with open(args.file) as fh:
        p = pda_mod.parse_pda(fh.read())
    width = max(len(str(p.S)), 1)
    for row in p.entries:
        print(" ".join(("*" if a is pda_mod.STAR else str(a)).rjust(width)
                       for a in row))
    K, F, Z, S = p.parameters()
    print(f"(K,F,Z,S) = ({K},{F},{Z},{S})")
    return 0


# -- run / sim ----------------------------------------------------------


def _print_transcript_summary(transcript, as_json: bool):
    if as_json:
        print(netsim.transcript_to_json(transcript))
        return
    trade = transcript.tradeoff
    config = transcript.run.config
    print(f"variant {config.variant.value}  "
          f"(N,K,L,H,q,B) = ({config.N},{config.K},{config.L},"
          f"{config.H},{config.q},{config.B})")
    print(f"M_measured       = {_frac_str(trade.M_measured)}")
    print(f"M_payload_only   = {_frac_str(trade.M_payload_only)}")
    print(f"R_measured       = {_frac_str(trade.R_measured)}")
    print(f"R_payload_only   = {_frac_str(trade.R_payload_only)}")
    print(f"R_payload_worst  = {_frac_str(trade.R_payload_worst_case)}")
    print(f"blocks/server    = {trade.blocks_per_server}")
    if trade.realized_rank is not None:
        flag = ("matches worst case" if trade.R_payload_only ==
                trade.R_payload_worst_case else "beats worst case")
        print(f"query rank       = {trade.realized_rank} ({flag})")
    print(f"subpacketization = {config.subpacketization}")
    for k in sorted(transcript.decode_outcomes):
        o = transcript.decode_outcomes[k]
        status = "ok" if o["ok"] and o["correct"] else \
            (o["error"] or "wrong value")
        print(f"user {k}: decode {status}")


def _write_transcript(transcript, outdir) -> str:
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "transcript.json")
    with open(path, "w") as fh:
        fh.write(netsim.transcript_to_json(transcript))
    return path


def cmd_run(args) -> int:
    config, demands = _load_config(args)
    if demands is None:
        demands = _default_demands(config)
    scenario = netsim.Scenario(config=config, demands=demands, availability={})
    transcript = netsim.simulate(scenario)
    _print_transcript_summary(transcript, args.json)
    if args.out:
        path = _write_transcript(transcript, args.out)
        if not args.json:
            print(f"wrote {path}")
    bad = [k for k, o in transcript.decode_outcomes.items()
           if not (o["ok"] and o["correct"])]
    return VERDICT_FAILURE if bad else 0


def cmd_sim(args) -> int:
    with open(args.config) as fh:
        scenario = scenario_from_dict(json.load(fh),
                                      skip_validation=args.skip_validation)
    if args.seed is not None:
        scenario.config.seed = args.seed
    transcript = netsim.simulate(scenario)
    _print_transcript_summary(transcript, args.json)
    if args.out:
        path = _write_transcript(transcript, args.out)
        if not args.json:
            print(f"wrote {path}")
    expected_fail = {k for k, subset in transcript.scenario.availability.items()
                     if len(subset) < scenario.config.L}
    bad = [k for k, o in transcript.decode_outcomes.items()
           if not (o["ok"] and o["correct"]) and k not in expected_fail]
    return VERDICT_FAILURE if bad else 0


# -- verify --------------------------------------------------------------


def _verify_reports(which: str, config, budget):
    """Yield (condition, claimed, report) for the requested checks."""
    claimed = set(config.variant.claimed_conditions)
    reports = []
    needs_enum = which in ("security", "user-privacy", "server-privacy", "all")
    enum = None
    if needs_enum:
        # enumerate first so an over-budget instance is rejected before
        # any slower check starts
        enum = oracle.enumerate_worlds(config, budget=budget)
    if which in ("correctness", "all"):
        reports.append(("correctness", True,
                        oracle.check_robust_correctness(config, budget=budget)))
    if needs_enum:
        if which in ("security", "all"):
            reports.append(("security", "security" in claimed,
                            oracle.check_security(enum)))
            reports.append(("security-joint", "security" in claimed,
                            oracle.check_security_joint(enum)))
        if which in ("user-privacy", "all"):
            per_subset = oracle.check_user_privacy(enum)
            for S in sorted(per_subset):
                reports.append((f"user-privacy S={set(S)}",
                                "user-privacy" in claimed, per_subset[S]))
        if which in ("server-privacy", "all"):
            reports.append(("server-privacy", "server-privacy" in claimed,
                            oracle.check_server_privacy(enum)))
    return reports


def cmd_verify(args) -> int:
    config, _ = _load_config(args)
    budget = args.budget if args.budget is not None else oracle.enumeration_budget()
    try:
        reports = _verify_reports(args.which, config, budget)
    except oracle.BudgetExceeded as exc:
        return _fail_usage(str(exc))
    failures = 0
    out = []
    for name, claimed, report in reports:
        holds = report.verdict
        if claimed and not holds:
            failures += 1
        if args.json:
            d = report.to_json_dict()
            d["claimed"] = claimed
            out.append(d)
        else:
            mark = "holds" if holds else "violated"
            note = ""
            if not claimed:
                note = " [not claimed by this variant]" + \
                    ("" if holds else " (expected)")
            if hasattr(report, "max_deviation"):
                detail = (f"deviation {report.max_deviation} over "
                          f"{report.world_count} worlds")
            else:
                detail = (f"{report.attempted} decodes, "
                          f"{len(report.failures)} failures, "
                          f"{'exhaustive' if report.exhaustive else 'sampled'}")
            print(f"{name:<24} {mark:<9} {detail}{note}")
    if args.json:
        print(json.dumps(out))
    return VERDICT_FAILURE if failures else 0


# -- tradeoff -------------------------------------------------------------


def _tradeoff_params(args):
    if getattr(args, "preset", None):
        if args.preset not in TRADEOFF_PRESETS:
            raise ConfigInvalid(f"unknown tradeoff preset {args.preset!r} "
                                f"(available: {', '.join(TRADEOFF_PRESETS)})")
        return TRADEOFF_PRESETS[args.preset]
    if None in (args.N, args.K, args.L, args.H):
        raise ConfigInvalid("need --N --K --L --H (or --preset fig2a/b/c)")
    return args.N, args.K, args.L, args.H


def cmd_tradeoff_points(args) -> int:
    N, K, L, H = _tradeoff_params(args)
    variants = [Variant(v) for v in args.variant] if args.variant else list(Variant)
    rows = []
    for variant in variants:
        curve = tradeoff.variant_curve(variant, N, K, L, H)
        for p in curve.corners:
            rows.append({"variant": variant.value,
                         "t": p.t, "M": str(p.M), "R": str(p.R),
                         "subpacketization": p.subpacketization})
    if args.json:
        print(json.dumps(rows))
    else:
        print(f"(N,K,L,H) = ({N},{K},{L},{H}), "
              f"regime {tradeoff.envelope_regime(N, K)}")
        print(f"{'variant':<8}{'t':>4}  {'M':<12}{'R':<16}{'subpack'}")
        for r in rows:
            t = "-" if r["t"] is None else r["t"]
            sp = "-" if r["subpacketization"] is None else r["subpacketization"]
            print(f"{r['variant']:<8}{t:>4}  {r['M']:<12}{r['R']:<16}{sp}")
    return 0


def cmd_tradeoff_curve(args) -> int:
    N, K, L, H = _tradeoff_params(args)
    variant = Variant(args.variant[0]) if args.variant else Variant.LSP
    curve = tradeoff.variant_curve(variant, N, K, L, H)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        name = f"curve_N{N}_K{K}_L{L}_H{H}_{variant.value}"
        csv_path = tradeoff.write_curve_csv(
            os.path.join(args.out, name + ".csv"), curve, samples=args.samples)
        fig_path = figures.render_curves(
            {variant.value: curve}, os.path.join(args.out, name + ".png"),
            title=f"(N,K,L,H)=({N},{K},{L},{H})")
        print(csv_path)
        print(fig_path)
    elif args.json:
        print(json.dumps(tradeoff.curve_rows(curve, samples=args.samples)))
    else:
        for p in curve.corners:
            t = "-" if p.t is None else p.t
            print(f"t={t:<4} M={str(p.M):<12} R={p.R}")
    return 0


def cmd_tradeoff_fig2(args) -> int:
    outdir = args.out or "."
    written = figures.emit_fig2(outdir, samples=args.samples)
    for path in written:
        print(path)
    return 0


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsplfr",
        description="Cache-aided linear function retrieval from MDS-coded "
                    "servers: protocol runs, exhaustive verification, and "
                    "tradeoff curves.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_pda = sub.add_parser("pda", help="build, validate or show placement arrays")
    pda_sub = p_pda.add_subparsers(dest="pda_command", required=True)
    b = pda_sub.add_parser("build", help="construct the MAN array for (K, t)")
    b.add_argument("--K", type=int, required=True)
    b.add_argument("--t", type=int, required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_pda_build)
    v = pda_sub.add_parser("validate", help="validate a PDA text file")
    v.add_argument("file")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_pda_validate)
    pr = pda_sub.add_parser("print", help="pretty-print a PDA text file")
    pr.add_argument("file")
    pr.set_defaults(func=cmd_pda_print)

    def add_config_flags(p):
        p.add_argument("--config", help="run config JSON file")
        p.add_argument("--preset", help=f"one of: {', '.join(SCHEME_PRESETS)}")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--json", action="store_true")
        p.add_argument("--out", help="directory for output files")
        p.add_argument("--skip-validation", action="store_true",
                       help="accept an explicit generator matrix without "
                            "checking its minors (large codes only)")

    r = sub.add_parser("run", help="run one protocol round end to end")
    add_config_flags(r)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sim", help="simulate a scenario with availability "
                                   "and adversaries")
    s.add_argument("--config", required=True, help="scenario JSON file")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--json", action="store_true")
    s.add_argument("--out", help="directory for output files")
    s.add_argument("--skip-validation", action="store_true",
                   help="accept an explicit generator matrix without "
                        "checking its minors (large codes only)")
    s.set_defaults(func=cmd_sim)

    ver = sub.add_parser("verify", help="exhaustive correctness/security/"
                                        "privacy checks on micro instances")
    ver.add_argument("which", choices=["correctness", "security",
                                       "user-privacy", "server-privacy", "all"])
    add_config_flags(ver)
    ver.add_argument("--budget", type=int, default=None,
                     help="world-count budget (default RSPLFR_BUDGET or 1e7)")
    ver.set_defaults(func=cmd_verify)

    tr = sub.add_parser("tradeoff", help="closed-form tradeoff points and curves")
    tr_sub = tr.add_subparsers(dest="tradeoff_command", required=True)

    def add_param_flags(p):
        p.add_argument("--N", type=int)
        p.add_argument("--K", type=int)
        p.add_argument("--L", type=int)
        p.add_argument("--H", type=int)
        p.add_argument("--preset", help="fig2a, fig2b or fig2c")
        p.add_argument("--variant", action="append",
                       choices=[v.value for v in Variant])
        p.add_argument("--samples", type=int, default=256)
        p.add_argument("--json", action="store_true")
        p.add_argument("--out")

    tp = tr_sub.add_parser("points", help="corner points of the envelopes")
    add_param_flags(tp)
    tp.set_defaults(func=cmd_tradeoff_points)
    tc = tr_sub.add_parser("curve", help="one variant's envelope as CSV/figure")
    add_param_flags(tc)
    tc.set_defaults(func=cmd_tradeoff_curve)
    tf = tr_sub.add_parser("fig2", help="regenerate all comparison curves")
    tf.add_argument("--samples", type=int, default=256)
    tf.add_argument("--out")
    tf.set_defaults(func=cmd_tradeoff_fig2)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigInvalid, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        return _fail_usage(str(exc))
    except SchemeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return VERDICT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
