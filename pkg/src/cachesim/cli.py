"""cachesim command line: ``run``, ``compare`` and ``gen``.

Exit status: 0 on success, 1 for usage/configuration errors, 2 for I/O or
trace-parse failures.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .core import CacheConfig, ConfigError
from .energy import ENERGY_KEYS, load_params
from .harness import POLICIES, RunConfig, compare, default_buffer, sweep_configs, write_results
from .lwrp import LwrpVariantFlags
from .traces import TraceParseError, WorkloadSpec, generate, read_trace, write_trace

EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageExit(message)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _add_workload_flags(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--workload", choices=("zipf", "loop", "scan", "uniform"), required=required)
    p.add_argument("--universe", type=int, default=None)
    p.add_argument("--length", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.8)
    p.add_argument("--seed", type=_seed, default=0)


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trace", help="trace file, one access per line")
    p.add_argument("--mode", choices=("block", "address"), default="block")
    p.add_argument("--block-size", type=int, default=64)
    _add_workload_flags(p, required=False)
    p.add_argument("--energy-file", help="key=value energy parameters (fallback: $CACHESIM_ENERGY_FILE)")
    for key in ENERGY_KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=float, default=None)
    p.add_argument("--buffered", action="store_true", help="attach the victim buffer to baseline policies too")
    p.add_argument("--freeze-frequency", action="store_true")
    p.add_argument("--freeze-delta", action="store_true")
    p.add_argument("--log-victims", action="store_true")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cachesim", description="Trace-driven cache replacement simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate one policy")
    run.add_argument("--policy", required=True)
    run.add_argument("--capacity", type=int, required=True)
    run.add_argument("--buffer", type=int, default=None, help="victim buffer frames (lwrp default: capacity/4)")
    _add_sim_flags(run)

    cmp_ = sub.add_parser("compare", help="simulate several policies on one trace")
    cmp_.add_argument("--policies", required=True, help="comma-separated policy names")
    cmp_.add_argument("--capacity", type=_int_list, required=True, help="one or more comma-separated capacities")
    cmp_.add_argument("--buffer", type=_int_list, default=None, help="one or more comma-separated buffer sizes")
    _add_sim_flags(cmp_)

    gen = sub.add_parser("gen", help="write a synthetic trace file")
    _add_workload_flags(gen, required=True)
    gen.add_argument("--out")
    return parser


def _workload(args) -> WorkloadSpec:
    if args.length is None:
        raise UsageExit("--length is required with --workload")
    universe = args.universe
    if universe is None:
        if args.workload != "scan":
            raise UsageExit("--universe is required with --workload")
        universe = args.length
    return WorkloadSpec(args.workload, universe, args.length, args.alpha, args.seed)


def _load_trace(args):
    if args.trace and args.workload:
        raise UsageExit("give either --trace or --workload, not both")
    if args.trace:
        return read_trace(args.trace, args.mode, args.block_size)
    if args.workload:
        return generate(_workload(args))
    raise UsageExit("one of --trace or --workload is required")


def _policies(text: str) -> list[str]:
    names = [p.strip() for p in text.split(",") if p.strip()]
    bad = [p for p in names if p not in POLICIES]
    if bad or not names:
        raise UsageExit(f"unknown policy {','.join(bad) or text!r}; expected one of {', '.join(POLICIES)}")
    return names


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dispatch(args) -> None:
    if args.command == "gen":
        trace = generate(_workload(args))
        if args.out:
            write_trace(trace, args.out)
        else:
            sys.stdout.write(f"# source: {trace.source}\n" + trace.to_text())
        return

    policies = _policies(args.policy if args.command == "run" else args.policies)
    if args.command == "run" and len(policies) != 1:
        raise UsageExit("run takes a single --policy; use compare for several")
    overrides = {k: getattr(args, k) for k in ENERGY_KEYS}
    energy, time_params = load_params(args.energy_file, overrides)
    common = dict(
        energy=energy,
        time_params=time_params,
        flags=LwrpVariantFlags(args.freeze_frequency, args.freeze_delta),
        buffered=True if args.buffered else None,
        log_victims=args.log_victims,
    )
    if args.command == "run":
        buf = args.buffer
        if buf is None:
            buf = default_buffer(args.capacity) if policies[0] == "lwrp" else 0
        configs = [RunConfig(policies[0], CacheConfig(args.capacity, buf, args.block_size), **common)]
    else:
        for cap in args.capacity:
            CacheConfig(cap, 0, args.block_size)
        configs = sweep_configs(policies, args.capacity, args.buffer, **common)
    trace = _load_trace(args)
    _emit(write_results(compare(trace, configs), args.format), args.out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _dispatch(args)
    except (UsageExit, ConfigError) as e:
        print(f"cachesim: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, TraceParseError) as e:
        print(f"cachesim: error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
