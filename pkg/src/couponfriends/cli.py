"""Command-line entry point.

Exit codes: 0 success, 1 configuration or validation error, 2 I/O error,
3 oracle enumeration budget exceeded.
"""
import argparse
import json
import sys

from . import __version__, bounds, oracle
from .experiment import (
    ConfigError,
    OutputError,
    SweepSpec,
    atomic_write,
    build_config,
    get_preset,
    parse_sweep,
    preset_regimes,
    run_experiment,
    run_sweep,
    simulate_trials,
)
from .kernels import BACKEND
from .rng import GENERATOR, check_seed
from .sim import DomainError, StrategyId
from .stats import SuccessSummary, summarize
from .variants import M_RULES, limit_law_check, resolve_m_rule, until_complete_batch

EXIT_CONFIG, EXIT_IO, EXIT_BUDGET = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _rounds(text):
    return int(text) if text.isdigit() else text


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def _float_list(text):
    return [float(x) for x in text.split(",") if x]


def _emit(text, out=None):
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _common(p, rounds=True):
    p.add_argument("--n", type=int, help="number of coupon types")
    p.add_argument("--m", type=int, help="number of collectors")
    if rounds:
        p.add_argument("--rc", type=_rounds, help="collection rounds: integer or preset name")
        p.add_argument("--re", type=_rounds, help="interactions: integer or preset name")
        p.add_argument("--strategy", help=f"one of {[s.value for s in StrategyId]}")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="64-bit master seed")
    p.add_argument("--out", help="output path (written atomically)")
    p.add_argument("--workers", type=int, default=None)


def build_parser():
    parser = _Parser(prog="couponfriends", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run independent trials of one configuration")
    p.add_argument("--config", help="JSON config file; flags override its fields")
    _common(p)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--trace", action="store_true", default=None,
                   help="record interactions to OUT.trace.jsonl")
    p.add_argument("--target-failure", type=float)
    p.add_argument("--z", type=float)

    p = sub.add_parser("sweep", help="grid of configurations, one summary row per cell")
    p.add_argument("--spec", help="JSON sweep spec file; flags override its fields")
    p.add_argument("--n-values", type=_int_list)
    p.add_argument("--m-values", type=_int_list)
    p.add_argument("--m-rule", choices=M_RULES)
    p.add_argument("--m-const", type=int)
    p.add_argument("--rc", type=_rounds)
    p.add_argument("--re", type=_rounds)
    p.add_argument("--rc-mult", type=_float_list)
    p.add_argument("--re-mult", type=_float_list)
    p.add_argument("--strategy")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("bounds", help="evaluate the closed-form round bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("oracle", help="exact success probability for a small instance")
    p.add_argument("--kind", choices=("single", "no-exchange", "at-least-m", "two-phase"),
                   default="two-phase")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--rc", type=int, default=0)
    p.add_argument("--re", type=int, default=0)
    p.add_argument("--T", type=int, default=0, help="total draws (at-least-m)")
    p.add_argument("--strategy", default=StrategyId.SURPLUS_TO_NEEDY.value)
    p.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)
    p.add_argument("--out")

    p = sub.add_parser("until-complete", help="draw until m full sets; sample-count statistics")
    _common(p, rounds=False)
    p.add_argument("--m-rule", choices=M_RULES, help="m as a function of n (explorer)")
    p.add_argument("--n-values", type=_int_list, help="explore several n at once")
    p.add_argument("--c", type=_float_list, default=[-1.0, 0.0, 1.0],
                   help="limit-law offsets checked when m = 1")

    p = sub.add_parser("presets", help="list (and optionally run) the regime presets")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--name")
    p.add_argument("--run", action="store_true")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    return parser


def cmd_simulate(args):
    doc = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
    flags = {
        "n": args.n, "m": args.m, "r_c": args.rc, "r_e": args.re,
        "strategy": args.strategy, "trials": args.trials, "seed": args.seed,
        "out": args.out, "format": args.format, "trace": args.trace,
        "workers": args.workers, "target_failure": args.target_failure, "z": args.z,
    }
    doc.update({k: v for k, v in flags.items() if v is not None})
    config = build_config(doc)
    if config.trace and not config.out:
        raise ConfigError("--trace needs --out", "trace")
    result = run_experiment(config)
    sys.stdout.write(result.to_json())


def cmd_sweep(args):
    doc = {}
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            doc = json.load(fh)
    flags = {
        "n_values": args.n_values, "m_values": args.m_values, "m_rule": args.m_rule,
        "m_const": args.m_const, "rc": args.rc, "re": args.re,
        "rc_multipliers": args.rc_mult, "re_multipliers": args.re_mult,
        "strategy": args.strategy, "trials": args.trials, "seed": args.seed,
        "workers": args.workers,
    }
    doc.update({k: v for k, v in flags.items() if v is not None})
    spec: SweepSpec = parse_sweep(json.dumps(doc))
    result = run_sweep(spec, progress=lambda msg: print(msg, file=sys.stderr))
    _emit(result.to_csv() if args.format == "csv" else result.to_json(), args.out)


def cmd_bounds(args):
    report = bounds.bound_report(args.n, args.m)
    if args.format == "json":
        text = json.dumps(report.as_dict(), indent=2) + "\n"
    else:
        text = report.to_text() + "\n"
    _emit(text, args.out)


def cmd_oracle(args):
    if args.kind == "single":
        p = oracle.exact_single_collector_success(args.n, args.rc)
    elif args.kind == "no-exchange":
        p = oracle.exact_no_exchange_success(args.n, args.m, args.rc)
    elif args.kind == "at-least-m":
        p = oracle.exact_all_coupons_at_least_m(args.n, args.m, args.T, budget=args.budget)
    else:
        p = oracle.exact_two_phase_success(args.n, args.m, args.rc, args.re, args.strategy,
                                           budget=args.budget)
    out = {"kind": args.kind, "n": args.n, "m": args.m, "rc": args.rc, "re": args.re}
    if args.kind == "at-least-m":
        out["T"] = args.T
    if args.kind == "two-phase":
        out["strategy"] = StrategyId.parse(args.strategy).value
    out.update(p.as_dict())
    _emit(json.dumps(out, indent=2) + "\n", args.out)


def _until_row(n, m, trials, seed, cs):
    samples = until_complete_batch(n, m, trials, seed)
    row = {"n": n, "m": m, "trials": trials}
    row.update(summarize(samples).as_dict())
    row["mean_over_n"] = row["mean"] / n
    if n >= 3:
        row["newman_shepp"] = bounds.newman_shepp_expectation(n, m)
    if m == 1:
        row["limit_law"] = limit_law_check(samples, n, cs)
    return row


def cmd_until_complete(args):
    if args.trials is None or args.seed is None:
        raise ConfigError("--trials and --seed are required")
    seed = check_seed(args.seed)
    ns = args.n_values or ([args.n] if args.n is not None else [])
    if not ns:
        raise ConfigError("give --n or --n-values", "n")
    rows = []
    for n in ns:
        if args.m_rule:
            m = resolve_m_rule(args.m_rule, n, args.m or 1)
        else:
            m = args.m if args.m is not None else 1
        rows.append(_until_row(n, m, args.trials, seed, args.c))
    out = {
        "m_rule": args.m_rule,
        "seed": seed,
        "generator": GENERATOR,
        "version": __version__,
        "results": rows,
    }
    _emit(json.dumps(out, indent=2) + "\n", args.out)


def cmd_presets(args):
    presets = [get_preset(args.name)] if args.name else preset_regimes()
    sized = args.n is not None and args.m is not None
    if args.run and not sized:
        raise ConfigError("--run needs --n and --m")
    items = []
    for p in presets:
        item = p.describe(args.n, args.m) if sized else p.describe()
        if args.run:
            runs = []
            for plan in p.plans(args.n, args.m):
                rows = simulate_trials(args.n, args.m, plan, args.trials, args.seed, args.workers)
                s = SuccessSummary(args.trials, int(rows["completed"].sum()))
                runs.append({"r_c": plan.r_c, "r_e": plan.r_e, **s.as_dict()})
            item["runs"] = runs
        items.append(item)
    _emit(json.dumps(items, indent=2) + "\n", args.out)


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
    "oracle": cmd_oracle,
    "until-complete": cmd_until_complete,
    "presets": cmd_presets,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except oracle.BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, DomainError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
