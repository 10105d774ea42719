"""The modeled network: alternating static shuffles and 2x2 switch stages."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .permcore import Permutation, SwitchLayer, is_power_of_two, layer_to_permutation
from .topology import ShuffleKind, stage_permutation

Pair = tuple[int, int]

FILE_FORMAT = "omega2-min/1"


def channel_pair(a: int, b: int) -> Pair:
    """Canonical unordered channel pair (smaller label first)."""
    if a == b:
        raise ValueError(f"self-pair {a}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class NetworkConfig:
    """A shuffle architecture plus one switch layer per stage."""

    n: int
    kind: ShuffleKind
    layers: tuple[SwitchLayer, ...]

    def __post_init__(self) -> None:
        if self.n < 2 or not is_power_of_two(self.n):
            raise ValueError(f"channel count must be a power of two >= 2, got {self.n}")
        if not self.layers:
            raise ValueError("a network needs at least one stage")
        for s, layer in enumerate(self.layers, start=1):
            if layer.switch_count != self.n // 2:
                raise ValueError(
                    f"stage {s} has {layer.switch_count} switches, expected {self.n // 2}"
                )

    @property
    def stage_count(self) -> int:
        return len(self.layers)

    @classmethod
    def all_bypass(cls, n: int, kind: ShuffleKind, stages: int) -> "NetworkConfig":
        return cls(n, kind, tuple(SwitchLayer.all_bypass(n // 2) for _ in range(stages)))


def _forward(cfg: NetworkConfig) -> tuple[list[tuple[int, ...]], tuple[int, ...]]:
    """Propagate the identity arrangement; per-stage switch-input vectors plus output."""
    v = tuple(range(cfg.n))
    at_switches: list[tuple[int, ...]] = []
    for s in range(1, cfg.stage_count + 1):
        v = stage_permutation(cfg.kind, cfg.n, s).apply(v)
        at_switches.append(v)
        v = layer_to_permutation(cfg.layers[s - 1]).apply(v)
    return at_switches, v


def evaluate(cfg: NetworkConfig) -> Permutation:
    """The end-to-end permutation the configured network realizes."""
    _, out = _forward(cfg)
    return Permutation(out)


def stage_pairings(cfg: NetworkConfig) -> tuple[tuple[Pair, ...], ...]:
    """Per stage, the channel pair entering each switch (0-based labels).

    Pairs are read at the switch inputs, i.e. after the stage's shuffle and
    after all upstream layers have acted.
    """
    at_switches, _ = _forward(cfg)
    return tuple(
        tuple(channel_pair(v[2 * k], v[2 * k + 1]) for k in range(cfg.n // 2))
        for v in at_switches
    )


def toggle(cfg: NetworkConfig, stage: int, switch: int) -> NetworkConfig:
    """A copy of ``cfg`` with one switch flipped (stage 1-based, switch 0-based)."""
    if not 1 <= stage <= cfg.stage_count:
        raise ValueError(f"stage {stage} out of range 1..{cfg.stage_count}")
    if not 0 <= switch < cfg.n // 2:
        raise ValueError(f"switch {switch} out of range 0..{cfg.n // 2 - 1}")
    states = list(cfg.layers[stage - 1].states)
    states[switch] = not states[switch]
    layers = (
        cfg.layers[: stage - 1]
        + (SwitchLayer(tuple(states)),)
        + cfg.layers[stage:]
    )
    return NetworkConfig(cfg.n, cfg.kind, layers)


@dataclass(frozen=True)
class HazardReport:
    """Result of scanning for a run of all-bypass stages long enough to break non-blocking."""

    hazardous: bool
    window_start: int | None = None  # 1-based first stage of the first offending window
    window_length: int | None = None

    def describe(self) -> str:
        if not self.hazardous:
            return "no all-bypass window of critical length"
        end = self.window_start + self.window_length - 1
        return (
            f"all-bypass window of {self.window_length} consecutive stages "
            f"at stages {self.window_start}-{end}"
        )


def wsnb_hazard(cfg: NetworkConfig) -> HazardReport:
    """Detect log2(n) consecutive all-bypass stages, the wide-sense blocking hazard."""
    window = cfg.n.bit_length() - 1
    run = 0
    for s, layer in enumerate(cfg.layers, start=1):
        run = run + 1 if layer.is_all_bypass() else 0
        if run >= window:
            return HazardReport(True, s - window + 1, window)
    return HazardReport(False)


# --- file format -----------------------------------------------------------

def network_to_dict(cfg: NetworkConfig) -> dict:
    return {
        "format": FILE_FORMAT,
        "channel_labels": "1-based",
        "n": cfg.n,
        "kind": cfg.kind.value,
        "layers": [layer.to_bits() for layer in cfg.layers],
    }


def network_from_dict(data: dict) -> NetworkConfig:
    if data.get("format") != FILE_FORMAT:
        raise ValueError(f"unrecognized network file format: {data.get('format')!r}")
    kind = ShuffleKind.from_name(data["kind"])
    layers = tuple(SwitchLayer.from_bits(bits) for bits in data["layers"])
    return NetworkConfig(int(data["n"]), kind, layers)


def save_network(cfg: NetworkConfig, path: Path | str) -> None:
    Path(path).write_text(json.dumps(network_to_dict(cfg), indent=2) + "\n")


def load_network(path: Path | str) -> NetworkConfig:
    return network_from_dict(json.loads(Path(path).read_text()))


# --- DOT export ------------------------------------------------------------

def to_dot(cfg: NetworkConfig) -> str:
    """Graphviz digraph: one column per stage, switch nodes s<stage>.<switch>,
    edges labeled with the 1-based channel they carry."""
    at_switches, out = _forward(cfg)
    lines = [
        "digraph network {",
        "  rankdir=LR;",
        "  node [shape=box];",
    ]
    for j in range(cfg.n):
        lines.append(f'  "in{j + 1}" [shape=plaintext];')
    for s in range(1, cfg.stage_count + 1):
        lines.append(f"  subgraph cluster_stage{s} {{")
        lines.append(f'    label="stage {s}";')
        for k in range(cfg.n // 2):
            state = "exchange" if cfg.layers[s - 1].states[k] else "bypass"
            lines.append(f'    "s{s}.{k}" [label="s{s}.{k}\\n{state}"];')
        lines.append("  }")
    for j in range(cfg.n):
        lines.append(f'  "out{j + 1}" [shape=plaintext];')
    for s in range(1, cfg.stage_count + 1):
        mapping = stage_permutation(cfg.kind, cfg.n, s).mapping
        labels = at_switches[s - 1]
        for p in range(cfg.n):
            src_pos = mapping[p]
            src = f"in{src_pos + 1}" if s == 1 else f"s{s - 1}.{src_pos // 2}"
            lines.append(
                f'  "{src}" -> "s{s}.{p // 2}" [label="{labels[p] + 1}"];'
            )
    for j in range(cfg.n):
        lines.append(
            f'  "s{cfg.stage_count}.{j // 2}" -> "out{j + 1}" [label="{out[j] + 1}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
