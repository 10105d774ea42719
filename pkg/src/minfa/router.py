"""Rearrangement routing over a fundamental arrangement.

From a full-coverage starting arrangement, any required output is reached by
repeatedly comparing the current output to the target, collecting the
mismatched {current, wanted} channel pairs, and toggling, at the earliest
stage holding any of them, every switch whose input pair is required. Each
toggle swaps exactly two channels in the output and puts at least one of
them in place, so at most n-1 toggles are needed; a round trip through the
base arrangement bounds arbitrary start-to-target routing by 2(n-1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .fa import FundamentalArrangement, verify_coverage
from .fabric import NetworkConfig, Pair, channel_pair, evaluate, stage_pairings, toggle
from .permcore import Permutation
from .topology import stage_permutation


class NotAnFAError(ValueError):
    """The starting network does not cover every channel pair."""


@dataclass(frozen=True)
class RouteDump:
    """Diagnostic snapshot emitted when routing aborts."""

    reason: str
    current: Permutation
    target: Permutation
    required: frozenset[Pair]
    pairings: tuple[tuple[Pair, ...], ...]
    steps_taken: int

    def render(self) -> str:
        def fmt_pair(p: Pair) -> str:
            return f"{{{p[0] + 1},{p[1] + 1}}}"

        lines = [
            f"routing aborted: {self.reason}",
            f"steps taken: {self.steps_taken}",
            f"current output: {self.current.to_one_based()}",
            f"target output:  {self.target.to_one_based()}",
            "required pairs: " + (" ".join(sorted(fmt_pair(p) for p in self.required)) or "(none)"),
        ]
        for s, pairs in enumerate(self.pairings, start=1):
            lines.append(f"stage {s} pairings: " + " ".join(fmt_pair(p) for p in pairs))
        return "\n".join(lines)


class StalledError(RuntimeError):
    """Routing aborted; carries the diagnostic dump."""

    def __init__(self, dump: RouteDump):
        super().__init__(dump.render())
        self.dump = dump


@dataclass(frozen=True)
class RouteRequest:
    network: NetworkConfig
    target: Permutation

    def __post_init__(self) -> None:
        if self.network.n != self.target.n:
            raise ValueError(
                f"size mismatch: network has {self.network.n} channels, "
                f"target has {self.target.n}"
            )


@dataclass(frozen=True)
class ToggleRecord:
    stage: int  # 1-based
    switch: int  # 0-based
    output: Permutation  # arrangement right after this toggle


@dataclass(frozen=True)
class RouteTrace:
    toggles: tuple[ToggleRecord, ...]
    total_steps: int
    mode: str = "fa"  # "fa" | "reverse" | "reset"
    step_bounded: bool = True  # False when the reset fallback was used

    def render(self) -> str:
        lines = [
            f"step {i}: stage {rec.stage} switch {rec.switch} -> output {rec.output.to_one_based()}"
            for i, rec in enumerate(self.toggles, start=1)
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def required_pairs(current: Permutation, target: Permutation) -> frozenset[Pair]:
    """Unordered {current, wanted} channel pairs at every mismatched output slot."""
    if current.n != target.n:
        raise ValueError(f"size mismatch: {current.n} vs {target.n}")
    return frozenset(
        channel_pair(c, t) for c, t in zip(current.mapping, target.mapping) if c != t
    )


# --- the routing loop -------------------------------------------------------

class _Plan:
    """Precomputed immutable context shared by every route over one base config."""

    __slots__ = ("n", "half", "stages", "shuffles", "base_bits")

    def __init__(self, cfg: NetworkConfig):
        self.n = cfg.n
        self.half = cfg.n // 2
        self.stages = cfg.stage_count
        self.shuffles = tuple(
            stage_permutation(cfg.kind, cfg.n, s).mapping
            for s in range(1, cfg.stage_count + 1)
        )
        self.base_bits = tuple(tuple(layer.to_bits()) for layer in cfg.layers)


def _forward_bits(
    plan: _Plan, bits: Sequence[Sequence[int]]
) -> tuple[list[tuple[int, ...]], tuple[int, ...]]:
    v = tuple(range(plan.n))
    at_switches = []
    for mapping, layer in zip(plan.shuffles, bits):
        v = tuple(v[i] for i in mapping)
        at_switches.append(v)
        v = tuple(v[p ^ layer[p >> 1]] for p in range(plan.n))
    return at_switches, v


def _route(plan: _Plan, target: tuple[int, ...]) -> list[tuple[int, int, tuple[int, ...]]]:
    """Toggle list [(stage, switch, output-after)] leading from the plan's base to target."""
    bits = [list(layer) for layer in plan.base_bits]
    at_switches, out = _forward_bits(plan, bits)
    budget = 2 * (plan.n - 1)
    records: list[tuple[int, int, tuple[int, ...]]] = []
    placed = sum(o == t for o, t in zip(out, target))

    while out != target:
        required = {
            channel_pair(o, t) for o, t in zip(out, target) if o != t
        }
        hits: list[int] = []
        hit_stage = -1
        for s in range(plan.stages):
            v = at_switches[s]
            hits = [
                k
                for k in range(plan.half)
                if channel_pair(v[2 * k], v[2 * k + 1]) in required
            ]
            if hits:
                hit_stage = s
                break
        if hit_stage < 0:
            raise StalledError(_dump("no stage holds any required pair", plan, bits, out, target, records))
        for k in hits:
            if len(records) >= budget:
                raise StalledError(_dump(f"step budget {budget} exceeded", plan, bits, out, target, records))
            bits[hit_stage][k] ^= 1
            at_switches, out = _forward_bits(plan, bits)
            records.append((hit_stage + 1, k, out))
        now_placed = sum(o == t for o, t in zip(out, target))
        if now_placed < placed:
            raise StalledError(_dump("correctly-placed channels decreased", plan, bits, out, target, records))
        placed = now_placed
    return records


def _dump(reason, plan, bits, out, target, records) -> RouteDump:
    at_switches, _ = _forward_bits(plan, bits)
    pairings = tuple(
        tuple(channel_pair(v[2 * k], v[2 * k + 1]) for k in range(plan.half))
        for v in at_switches
    )
    return RouteDump(
        reason=reason,
        current=Permutation(out),
        target=Permutation(tuple(target)),
        required=frozenset(channel_pair(o, t) for o, t in zip(out, target) if o != t),
        pairings=pairings,
        steps_taken=len(records),
    )


def route_from_fa(req: RouteRequest) -> RouteTrace:
    """Route the network (a fundamental arrangement) to the target output."""
    report = verify_coverage(req.network)
    full = req.network.n * (req.network.n - 1) // 2
    if not report.complete:
        raise NotAnFAError(
            f"pair coverage {len(report.pairs)}/{full} is incomplete; "
            "routing guarantees are void"
        )
    plan = _Plan(req.network)
    records = _route(plan, req.target.mapping)
    toggles = tuple(
        ToggleRecord(stage, switch, Permutation(out)) for stage, switch, out in records
    )
    return RouteTrace(toggles=toggles, total_steps=len(toggles), mode="fa")


def replay(cfg: NetworkConfig, trace: RouteTrace) -> list[Permutation]:
    """Re-apply a trace's toggles from ``cfg``; the outputs after each toggle."""
    outputs = []
    for rec in trace.toggles:
        cfg = toggle(cfg, rec.stage, rec.switch)
        outputs.append(evaluate(cfg))
    return outputs


def _config_delta(a: NetworkConfig, b: NetworkConfig) -> list[tuple[int, int]]:
    """Switch positions where two same-shape configs differ, in scan order."""
    return [
        (s + 1, k)
        for s in range(a.stage_count)
        for k in range(a.n // 2)
        if a.layers[s].states[k] != b.layers[s].states[k]
    ]


def route_any_to_any(
    network: NetworkConfig,
    fa: FundamentalArrangement,
    target: Permutation,
    prior_trace: RouteTrace | None = None,
    mode: str = "reverse",
) -> RouteTrace:
    """Route an arbitrary arrangement-base-derived network to ``target``.

    Phase A returns the network to the base arrangement, Phase B routes from
    there. In "reverse" mode phase A undoes ``prior_trace`` (the trace that
    produced the network from the base) back to front; without one, the trace
    is recomputed from the base to the network's current output, which matches
    whenever the network was itself produced by this algorithm. "reset" mode
    flips every differing switch instead: always correct, not step-bounded.
    """
    if mode not in ("reverse", "reset"):
        raise ValueError(f"unknown mode {mode!r}")
    if (network.n, network.kind, network.stage_count) != (
        fa.cfg.n,
        fa.cfg.kind,
        fa.cfg.stage_count,
    ):
        raise ValueError("network and fundamental arrangement shapes differ")

    current = evaluate(network)
    if current.mapping == target.mapping:
        return RouteTrace(toggles=(), total_steps=0, mode=mode)

    bounded = mode == "reverse"
    if network.layers == fa.cfg.layers:
        phase_a: list[tuple[int, int]] = []
    elif mode == "reset":
        phase_a = _config_delta(network, fa.cfg)
    elif prior_trace is not None:
        delta = {(r.stage, r.switch) for r in prior_trace.toggles}
        if sorted(delta) != sorted(_config_delta(network, fa.cfg)):
            raise ValueError(
                "prior trace does not connect the base arrangement to this network"
            )
        phase_a = [(r.stage, r.switch) for r in reversed(prior_trace.toggles)]
    else:
        fresh = route_from_fa(RouteRequest(fa.cfg, current))
        delta = {(r.stage, r.switch) for r in fresh.toggles}
        if sorted(delta) != sorted(_config_delta(network, fa.cfg)):
            raise ValueError(
                "network is not reachable from the base by the in-order algorithm; "
                "pass the producing trace or use reset mode"
            )
        phase_a = [(r.stage, r.switch) for r in reversed(fresh.toggles)]

    records: list[ToggleRecord] = []
    cfg = network
    for stage, switch in phase_a:
        cfg = toggle(cfg, stage, switch)
        records.append(ToggleRecord(stage, switch, evaluate(cfg)))
    assert cfg.layers == fa.cfg.layers

    phase_b = route_from_fa(RouteRequest(fa.cfg, target))
    records.extend(phase_b.toggles)
    return RouteTrace(
        toggles=tuple(records),
        total_steps=len(records),
        mode=mode,
        step_bounded=bounded,
    )


# --- swap-case classification ------------------------------------------------

class SwapCase(enum.Enum):
    """How a follow-up pair swap relates to an already-performed swap."""

    DISJOINT = "1"        # no channel shared; the pair's switch is untouched
    UPSTREAM_INTACT = "2.1"  # shared channel, but the pair meets before the prior swap
    ROLE_SWAP = "2.2"     # both relevant meetings follow the prior swap; labels trade places
    CHAIN = "2.3"         # the only direct meeting upstream was consumed; chaining needed
    SAME_PAIR = "repeat"  # the request is the prior pair itself


@dataclass(frozen=True)
class ChainReport:
    case: SwapCase
    prior_pair: Pair
    prior_stage: int
    request_pair: Pair
    stages: tuple[int, ...]
    note: str


def _meeting_stages(fa: FundamentalArrangement) -> dict[Pair, int]:
    table: dict[Pair, int] = {}
    for s, pairs in enumerate(stage_pairings(fa.cfg), start=1):
        for p in pairs:
            table.setdefault(p, s)
    return table


def chain_analysis(
    fa: FundamentalArrangement, a: int, b: int, prior: Pair = (0, 1)
) -> ChainReport:
    """Classify swapping channels ``a`` and ``b`` after ``prior`` was already swapped.

    Channels are 0-based. The classification reads the arrangement's meeting
    stages: every pair meets at exactly one switch, and swapping a pair
    relabels that pair's channels at every later stage.
    """
    pair = channel_pair(a, b)
    prior = channel_pair(*prior)
    table = _meeting_stages(fa)
    prior_stage = table[prior]

    if pair == prior:
        return ChainReport(
            SwapCase.SAME_PAIR, prior, prior_stage, pair, (prior_stage,),
            "re-toggle the prior switch itself",
        )
    shared = set(pair) & set(prior)
    if not shared:
        return ChainReport(
            SwapCase.DISJOINT, prior, prior_stage, pair, (table[pair],),
            "prior swap cannot have touched this pair; its switch still exists",
        )
    s = shared.pop()
    other = prior[0] if prior[1] == s else prior[1]
    c = pair[0] if pair[1] == s else pair[1]
    direct = table[pair]
    if direct < prior_stage:
        return ChainReport(
            SwapCase.UPSTREAM_INTACT, prior, prior_stage, pair, (direct,),
            "the pair meets before the prior swap, so its switch is intact",
        )
    alt = table[channel_pair(other, c)]
    if alt > prior_stage:
        return ChainReport(
            SwapCase.ROLE_SWAP, prior, prior_stage, pair, (alt,),
            "downstream of the prior swap the two candidates traded labels; "
            "a single switch still realizes the pair",
        )
    return ChainReport(
        SwapCase.CHAIN, prior, prior_stage, pair, (alt, direct),
        "the direct meeting survives only in relabeled form after the prior "
        "stage; realizing the swap chains through the switch before it",
    )


# --- exhaustive sweeps --------------------------------------------------------

@dataclass
class SweepSummary:
    total: int
    max_steps: int
    step_histogram: dict[int, int]
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def exhaustive_route_check(
    fa: FundamentalArrangement,
    targets: Iterable[Permutation] | None = None,
    step_bound: int | None = None,
) -> SweepSummary:
    """Route every target (default: all n! arrangements) and tally step counts."""
    from itertools import permutations as all_perms

    plan = _Plan(fa.cfg)
    bound = step_bound if step_bound is not None else fa.n - 1
    histogram: dict[int, int] = {}
    failures: list[str] = []
    max_steps = 0
    total = 0
    if targets is None:
        iterator: Iterable = all_perms(range(fa.n))
    else:
        iterator = (t.mapping for t in targets)
    for mapping in iterator:
        total += 1
        try:
            records = _route(plan, mapping)
        except StalledError as exc:
            failures.append(exc.dump.render())
            continue
        steps = len(records)
        histogram[steps] = histogram.get(steps, 0) + 1
        max_steps = max(max_steps, steps)
        if records and records[-1][2] != tuple(mapping):
            failures.append(f"wrong final output for target {mapping}")
        if steps > bound:
            failures.append(f"target {mapping} needed {steps} steps (> {bound})")
    return SweepSummary(total, max_steps, histogram, failures)
