"""Command-line surface: build arrangements, route, export diagrams, verify claims.

Exit codes are a stable contract: 0 success, 1 check failure, 2 usage or
parse error, 3 skipped by the enumeration guard. All channel lists read or
printed here are 1-based.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import fa as fa_mod
from . import fabric, oracle, router
from .permcore import Permutation, to_matrix, layer_to_permutation
from .topology import ShuffleKind, stage_permutation

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_SKIPPED = 3

CACHE_ENV_VAR = "MINFA_CACHE_DIR"

# exhaustive oracle-match switches to sampling above this many setting bits
_EXHAUSTIVE_MATCH_BITS = 16


def _cache_dir(args: argparse.Namespace) -> str | None:
    if getattr(args, "cache_dir", None):
        return args.cache_dir
    return os.environ.get(CACHE_ENV_VAR) or None


def _arch(name: str) -> ShuffleKind:
    try:
        return ShuffleKind.from_name(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _write_or_print(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_fa_build(args: argparse.Namespace) -> int:
    expected = args.n * (args.n - 1) // 2
    try:
        arrangement = fa_mod.build_fa(args.n, args.arch, cache_dir=_cache_dir(args))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except fa_mod.ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        print(f"pairs: 0/{expected}")
        return EXIT_CHECK_FAILED
    if args.output:
        fa_mod.save_fa(arrangement, args.output)
    got = len(arrangement.coverage)
    print(f"pairs: {got}/{expected}")
    return EXIT_OK if got == expected else EXIT_CHECK_FAILED


def cmd_route(args: argparse.Namespace) -> int:
    try:
        network = fabric.load_network(args.network)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load network file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        target = Permutation.from_one_based(args.target)
    except ValueError as exc:
        print(f"error: bad target: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if target.n != network.n:
        print(
            f"error: target lists {target.n} channels, network has {network.n}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    try:
        arrangement = fa_mod.build_fa(network.n, network.kind, cache_dir=_cache_dir(args))
        trace = router.route_any_to_any(network, arrangement, target, mode=args.mode)
    except router.StalledError as exc:
        dump_path = Path(args.trace or "route-stalled") .with_suffix(".dump")
        dump_path.write_text(exc.dump.render() + "\n")
        print(f"stalled; diagnostic dump written to {dump_path}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (router.NotAnFAError, fa_mod.ConstructionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    print(f"steps: {trace.total_steps} (bound: {2 * (network.n - 1)})")
    if args.trace:
        Path(args.trace).write_text(trace.render())
    final = trace.toggles[-1].output if trace.toggles else fabric.evaluate(network)
    return EXIT_OK if final.mapping == target.mapping else EXIT_CHECK_FAILED


def _matrices_text(cfg: fabric.NetworkConfig) -> str:
    chunks = []
    for s in range(1, cfg.stage_count + 1):
        static = to_matrix(stage_permutation(cfg.kind, cfg.n, s))
        switches = to_matrix(layer_to_permutation(cfg.layers[s - 1]))
        chunks.append(f"# stage {s} static\n{static.to_text()}\n")
        chunks.append(f"# stage {s} switches\n{switches.to_text()}\n")
    return "\n".join(chunks)


def cmd_export(args: argparse.Namespace) -> int:
    try:
        network = fabric.load_network(args.network)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load network file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = fabric.to_dot(network) if args.dot else _matrices_text(network)
    _write_or_print(text, args.output)
    return EXIT_OK


def _finish(passed: bool) -> int:
    print("PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        if args.check == "reachability":
            return _verify_reachability(args)
        if args.check == "equivalence":
            return _verify_equivalence(args)
        if args.check == "snb":
            return _verify_snb(args)
        if args.check == "oracle-match":
            return _verify_oracle_match(args)
        return _verify_hazard(args)
    except oracle.EnumerationLimitError as exc:
        print(f"note: {exc}", file=sys.stderr)
        print("SKIP (too large)")
        return EXIT_SKIPPED
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _verify_reachability(args: argparse.Namespace) -> int:
    import math

    reached = oracle.reachable_set(args.n, args.arch, args.stages)
    total = math.factorial(args.n)
    print(f"reachable: {len(reached)}/{total}")
    return _finish(len(reached) == total)


def _verify_equivalence(args: argparse.Namespace) -> int:
    report = oracle.equivalence_evidence(args.n, args.stages)
    for kind, size in report.sizes.items():
        print(f"{kind.value}: {size} reachable")
    ok = report.sizes_agree
    if report.relabelings is not None:
        for (a, b), found in report.relabelings.items():
            print(f"relabeling {a.value} -> {b.value}: {'found' if found else 'none'}")
        ok = ok and report.all_relabeled
    return _finish(ok)


def _verify_snb(args: argparse.Namespace) -> int:
    report = oracle.snb_impossibility_evidence(args.n)
    for channel, partners in enumerate(report.partners):
        print(f"channel {channel + 1}: {len(partners)} distinct partners")
    print(
        f"expected {report.expected} per channel; "
        f"{report.never_met} channels never met directly"
    )
    return _finish(report.consistent)


def _verify_oracle_match(args: argparse.Namespace) -> int:
    half = args.n // 2
    bits = args.stages * half
    if bits <= _EXHAUSTIVE_MATCH_BITS:
        settings = []
        from .permcore import SwitchLayer

        for setting in range(1 << bits):
            settings.append(
                tuple(
                    SwitchLayer.from_bits(
                        (setting >> (s * half + k)) & 1 for k in range(half)
                    )
                    for s in range(args.stages)
                )
            )
        print(f"checking all {len(settings)} switch settings")
    else:
        settings = oracle.random_settings(args.n, args.stages, args.samples, args.seed)
        print(f"checking {len(settings)} sampled settings (seed {args.seed})")
    mismatches = 0
    for layers in settings:
        cfg = fabric.NetworkConfig(args.n, args.arch, layers)
        if fabric.evaluate(cfg).mapping != oracle.matrix_evaluate(cfg).mapping:
            mismatches += 1
    print(f"mismatches: {mismatches}")
    return _finish(mismatches == 0)


def _verify_hazard(args: argparse.Namespace) -> int:
    network = fabric.load_network(args.network)
    report = fabric.wsnb_hazard(network)
    print(report.describe())
    # independent re-scan of every window, so the detector cannot drift
    window = network.n.bit_length() - 1
    naive = any(
        all(layer.is_all_bypass() for layer in network.layers[i : i + window])
        for i in range(network.stage_count - window + 1)
    )
    return _finish(report.hazardous == naive)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minfa",
        description="Omega-2 multistage interconnection networks: "
        "fundamental arrangements and bounded-step routing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fa_parser = sub.add_parser("fa", help="fundamental arrangement commands")
    fa_sub = fa_parser.add_subparsers(dest="fa_command", required=True)
    build = fa_sub.add_parser("build", help="construct a fundamental arrangement")
    build.add_argument("-n", type=int, required=True, help="channel count (power of two)")
    build.add_argument("--arch", type=_arch, default=ShuffleKind.PERFECT_SHUFFLE)
    build.add_argument("-o", "--output", help="arrangement file to write")
    build.add_argument("--cache-dir", help=f"cache directory (default ${CACHE_ENV_VAR})")
    build.set_defaults(func=cmd_fa_build)

    route = sub.add_parser("route", help="route a network to a target arrangement")
    route.add_argument("--network", required=True, help="network or arrangement file")
    route.add_argument("--target", required=True, help='1-based list, e.g. "1,3,5,7,2,4,6,8"')
    route.add_argument("--trace", help="write the toggle trace to this file")
    route.add_argument("--mode", choices=("reverse", "reset"), default="reverse")
    route.add_argument("--cache-dir", help=f"cache directory (default ${CACHE_ENV_VAR})")
    route.set_defaults(func=cmd_route)

    export = sub.add_parser("export", help="export a network as DOT or matrices")
    export.add_argument("--network", required=True)
    what = export.add_mutually_exclusive_group(required=True)
    what.add_argument("--dot", action="store_true", help="Graphviz fabric diagram")
    what.add_argument("--matrix", action="store_true", help="per-stage routing matrices")
    export.add_argument("-o", "--output", help="output file (default: stdout)")
    export.set_defaults(func=cmd_export)

    verify = sub.add_parser("verify", help="run a brute-force check; last line PASS/FAIL")
    verify.add_argument(
        "check",
        choices=("reachability", "equivalence", "snb", "oracle-match", "hazard"),
    )
    verify.add_argument("-n", type=int, default=4, help="channel count")
    verify.add_argument("--arch", type=_arch, default=ShuffleKind.PERFECT_SHUFFLE)
    verify.add_argument("--stages", type=int, default=3)
    verify.add_argument("--samples", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--network", help="network file (hazard check)")
    verify.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "check", None) == "hazard" and not args.network:
        parser.error("verify hazard requires --network")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
