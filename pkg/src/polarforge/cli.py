"""Command-line front end.

Every subcommand writes one JSON document to stdout; human diagnostics go
to stderr.  Exit codes: 0 success, 2 invalid input, 3 numeric or
geometry violation (including failed verification checks), 4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__, attractor, channels, design, ga, order, serialize, verify
from .errors import PolarforgeError, UnsupportedSpecError, ValidationError
from .index import ChannelSpec, parse_index

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(f"{self.prog}: {message}")


def _int_auto(text):
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _add_output(p):
    p.add_argument("--json", action="store_true",
                   help="emit JSON on stdout (the default; accepted for explicitness)")
    p.add_argument("--csv", metavar="PATH", help="also write a CSV table to PATH")


def _add_awgn(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--sigma", type=float, help="AWGN noise standard deviation")
    g.add_argument("--snr-db", type=float, help="Eb/N0 in dB (uses --rate for the conversion)")
    g.add_argument("--llr", type=float, help="base LLR mean directly")


def build_parser():
    parser = _Parser(prog="polarforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("ga", help="GA reliability profile or single-index evolution")
    p.add_argument("--n", type=int, required=True)
    _add_awgn(p)
    p.add_argument("--rate", type=float, default=1.0, help="code rate for --snr-db (default 1)")
    p.add_argument("--index", help="evolve only this bit string")
    p.add_argument("--table", action="store_true", help="use the lookup-table phi")
    _add_output(p)

    p = sub.add_parser("attractor", help="attractor set and its partial-order closure")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--regime", choices=("half-pi", "pi"), default="half-pi")
    p.add_argument("--max-order", type=int)
    p.add_argument("--contiguous", action="store_true",
                   help="restrict order >= 3 swaps to contiguous patterns")
    _add_output(p)

    p = sub.add_parser("order", help="partial-order queries")
    osub = p.add_subparsers(dest="order_command", metavar="ACTION", parser_class=_Parser)
    osub.required = True
    q = osub.add_parser("check", help="does --more dominate --less? prints a witness chain")
    q.add_argument("--less", required=True)
    q.add_argument("--more", required=True)
    q.add_argument("--max-order", type=int)
    q.add_argument("--contiguous", action="store_true")
    q.add_argument("--json", action="store_true", help="emit JSON on stdout (default)")
    q = osub.add_parser("closure", help="upward or downward closure of seed indices")
    q.add_argument("seeds", nargs="+", metavar="BITS")
    q.add_argument("--direction", choices=("down", "up"), default="down")
    q.add_argument("--max-order", type=int)
    q.add_argument("--contiguous", action="store_true")
    _add_output(q)
    q = osub.add_parser("operators", help="list the operators for length --n")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--json", action="store_true", help="emit JSON on stdout (default)")

    p = sub.add_parser("design", help="construct a code for an AWGN channel")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rate", type=float, required=True)
    _add_awgn(p)
    p.add_argument("--emit-frozen", metavar="PATH", help="write frozen indices, one per line")
    p.add_argument("--lazy", action="store_true", help="evaluate only indices outside the worse set")
    p.add_argument("--no-audit", action="store_true", help="skip the consistency audit")
    p.add_argument("--max-order", type=int)
    _add_output(p)

    p = sub.add_parser("simulate", help="Monte Carlo SC decoding")
    p.add_argument("--channel", choices=("bec", "bsc", "awgn"), required=True)
    p.add_argument("--param", type=float, help="erasure/crossover probability or sigma")
    p.add_argument("--snr-db", type=float, help="AWGN Eb/N0 in dB instead of --param")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=_int_auto, default=channels.DEFAULT_SEED)
    p.add_argument("--blocks", type=int, default=1, help="parallel work blocks")
    p.add_argument("--frozen", metavar="FILE|auto",
                   help="frame-error simulation with this frozen set; omit for genie mode")
    p.add_argument("--rate", type=float, default=0.5, help="rate for --frozen auto and --snr-db")
    p.add_argument("--min-sum", action="store_true")
    p.add_argument("--timing", action="store_true", help="include elapsed time in the JSON")
    _add_output(p)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", choices=sorted(verify.SUITES))
    p.add_argument("--trials", type=int, help="Monte Carlo trials (monte-carlo, fig7)")
    p.add_argument("--seed", type=_int_auto, default=channels.DEFAULT_SEED)
    p.add_argument("--max-n", type=int, help="largest length for exhaustive suites")
    _add_output(p)
    return parser


def _awgn_spec(args, rate):
    if args.sigma is not None:
        return ChannelSpec.awgn(args.sigma)
    if args.snr_db is not None:
        if not 0.0 < rate <= 1.0:
            raise ValidationError("Eb/N0 conversion needs a rate in (0, 1]")
        return ChannelSpec.awgn_from_snr_db(args.snr_db, rate)
    if not (args.llr > 0.0 and math.isfinite(args.llr)):
        raise ValidationError(f"--llr must be positive and finite, got {args.llr}")
    return ChannelSpec.awgn(math.sqrt(2.0 / args.llr))


def _write_csv(path, header, rows, emitted):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize.to_csv(header, rows))
    emitted.append(path)


def _cmd_ga(args, emitted):
    spec = _awgn_spec(args, args.rate)
    table = ga_table() if args.table else None
    if args.index is not None:
        k = parse_index(args.index, args.n)
        base = ga.init_llr(spec)
        out = ga.evolve(base, k, table)
        return {
            "channel": spec.to_json(),
            "base": base.value,
            "index": k.to_json(),
            "value": out.value,
            "clamped": out.clamped,
            "error_prob": ga.error_prob(out),
        }
    prof = ga.full_profile(spec, args.n, table)
    if args.csv:
        _write_csv(args.csv, *prof.csv_rows(), emitted)
    return prof.to_json()


def ga_table():
    from .special import phi_table

    return phi_table()


def _cmd_attractor(args, emitted):
    regime = "below_half_pi" if args.regime == "half-pi" else "below_pi"
    rep = attractor.bad_set(args.n, regime, args.max_order, block_gap=not args.contiguous)
    if args.csv:
        rows = [(v, format(v, f"0{args.n}b"), tag) for v, tag in sorted(rep.members.items())]
        _write_csv(args.csv, ("index", "index_bits", "provenance"), rows, emitted)
    return rep.to_json()


def _cmd_order(args, emitted):
    if args.order_command == "operators":
        ops = order.generate_operators(args.n)
        return {"n": args.n, "operators": [
            {"order": o.order, "less": o.less_pattern, "more": o.more_pattern} for o in ops]}
    if args.order_command == "check":
        if len(args.less) != len(args.more):
            raise ValidationError("--less and --more must have the same length")
        less = parse_index(args.less, len(args.less))
        more = parse_index(args.more, len(args.more))
        rel = order.dominates(more, less, args.max_order, block_gap=not args.contiguous)
        out = {"less": less.bits, "more": more.bits, "dominates": rel is not None}
        if rel is not None:
            out["witness"] = [s.to_json() for s in rel.witness]
        return out
    n = len(args.seeds[0])
    seeds = [parse_index(s, n) for s in args.seeds]
    fn = order.downward_closure if args.direction == "down" else order.upward_closure
    members = fn(seeds, args.max_order, block_gap=not args.contiguous)
    if args.csv:
        _write_csv(args.csv, ("index", "index_bits"), [(k.value, k.bits) for k in members], emitted)
    return {"n": n, "direction": args.direction, "seeds": [k.bits for k in seeds],
            "size": len(members), "members": [k.bits for k in members]}


def _cmd_design(args, emitted):
    rate = args.rate
    if math.isnan(rate) or not 0.0 <= rate <= 1.0:
        raise ValidationError(f"--rate must lie in [0, 1], got {rate}")
    spec = _awgn_spec(args, rate)
    res = design.design_code(spec, args.n, rate, lazy=args.lazy, check=not args.no_audit,
                             max_order=args.max_order)
    if args.emit_frozen:
        design.write_frozen(res, args.emit_frozen)
        emitted.append(args.emit_frozen)
    if args.csv:
        rows = [(v, format(v, f"0{args.n}b"), tag, "info" if v in set(res.information) else "frozen")
                for v, tag in enumerate(res.provenance)]
        _write_csv(args.csv, ("index", "index_bits", "provenance", "role"), rows, emitted)
    return res.to_json()


def _sim_spec(args):
    kind = args.channel.upper()
    if kind == "AWGN" and args.snr_db is not None:
        return ChannelSpec.awgn_from_snr_db(args.snr_db, args.rate)
    if args.param is None:
        raise ValidationError("--param is required (or --snr-db for awgn)")
    return ChannelSpec(kind, args.param)


def _auto_frozen(spec, n, rate):
    if spec.kind == "AWGN":
        return design.design_code(spec, n, rate).frozen_mask()
    if spec.kind == "BEC":
        z = channels.bec_profile(spec, n).values
        K = int(math.floor(rate * (1 << n) + 0.5))
        keep = sorted(range(1 << n), key=lambda i: (z[i], i))[:K]
        mask = np.ones(1 << n, dtype=bool)
        mask[keep] = False
        return mask
    raise UnsupportedSpecError(f"--frozen auto is not available for {spec.kind}")


def _cmd_simulate(args, emitted):
    spec = _sim_spec(args)
    cfg = channels.SimConfig(spec, args.n, args.trials, args.seed, args.blocks, args.min_sum)
    if args.frozen is None:
        res = channels.genie_channel_error_rates(cfg)
    else:
        if args.frozen == "auto":
            mask = _auto_frozen(spec, args.n, args.rate)
        else:
            mask = design.read_frozen(args.frozen, args.n)
        res = channels.simulate_fer(mask, cfg)
        res.meta["frozen_count"] = int(mask.sum())
    if args.csv:
        rows = []
        for i in range(1 << args.n):
            lo, hi = res.interval(i)
            rows.append((i, format(i, f"0{args.n}b"), int(res.counts[i]), float(res.rates[i]), lo, hi))
        _write_csv(args.csv, ("index", "index_bits", "count", "rate", "ci_low", "ci_high"), rows, emitted)
    return res.to_json(timing=args.timing)


def _cmd_verify(args, emitted):
    fn = verify.SUITES[args.suite]
    kwargs = {}
    if args.suite in ("monte-carlo", "fig7"):
        kwargs["seed"] = args.seed
        if args.trials is not None:
            if args.suite == "fig7":
                kwargs["trials"] = args.trials
            else:
                kwargs["trials_bec"] = kwargs["trials_bsc"] = args.trials
    elif args.trials is not None:
        raise ValidationError(f"suite {args.suite} takes no --trials")
    if args.max_n is not None:
        key = {"partial-order-bec": "max_n", "attractor-ga": "max_n", "series": "max_n",
               "table2": "po_max_n"}.get(args.suite)
        if key is None:
            raise ValidationError(f"suite {args.suite} takes no --max-n")
        kwargs[key] = args.max_n
    if args.csv:
        if args.suite != "special-functions":
            raise ValidationError("--csv is only available for special-functions")
        kwargs["csv_path"] = args.csv
    result = fn(**kwargs)
    if args.csv:
        emitted.append(args.csv)
    return result


_COMMANDS = {
    "ga": _cmd_ga,
    "attractor": _cmd_attractor,
    "order": _cmd_order,
    "design": _cmd_design,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI and return the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    emitted = []
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return int(exc.code or 0)
        payload = _COMMANDS[args.command](args, emitted)
    except PolarforgeError as exc:
        print(f"polarforge: error: {exc}", file=stderr)
        for line in getattr(exc, "violations", [])[:20]:
            print(f"  {line}", file=stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"polarforge: I/O error: {exc}", file=stderr)
        return EXIT_IO
    if emitted:
        payload = {**payload, "emitted": emitted}
    stdout.write(serialize.dumps(payload))
    if args.command == "verify":
        for check in payload["checks"]:
            print(f"{'PASS' if check['passed'] else 'FAIL'} {payload['suite']}: {check['name']}",
                  file=stderr)
        return EXIT_OK if payload["passed"] else EXIT_NUMERIC
    return EXIT_OK


def main():
    sys.exit(run())
