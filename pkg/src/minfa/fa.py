"""Fundamental arrangements: (n-1)-stage settings where every channel pair meets once.

With n/2 switches per stage and n*(n-1)/2 distinct pairs, an arrangement
covering them all must contribute n/2 previously-unseen pairs at every one
of its n-1 stages. The builder searches stage by stage: fixing the layer
before stage t+1 determines which pairs meet there, and the next shuffle
couples that layer's switches into small independent groups, so candidates
enumerate as a product of per-group choices with backtracking on dead ends.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterator

from .fabric import (
    FILE_FORMAT,
    NetworkConfig,
    Pair,
    channel_pair,
    network_from_dict,
    network_to_dict,
    stage_pairings,
)
from .permcore import SwitchLayer, is_power_of_two
from .topology import ShuffleKind, stage_permutation

FA_FILE_FORMAT = "omega2-min-fa/1"


class ConstructionError(RuntimeError):
    """The stage-by-stage search ran out of candidates or budget."""


@dataclass(frozen=True)
class FundamentalArrangement:
    cfg: NetworkConfig
    coverage: frozenset[Pair]

    @property
    def n(self) -> int:
        return self.cfg.n

    def __post_init__(self) -> None:
        n = self.cfg.n
        if self.cfg.stage_count != n - 1:
            raise ValueError(
                f"a fundamental arrangement needs {n - 1} stages, got {self.cfg.stage_count}"
            )
        if len(self.coverage) != n * (n - 1) // 2:
            raise ValueError(
                f"coverage holds {len(self.coverage)} pairs, expected {n * (n - 1) // 2}"
            )


@dataclass(frozen=True)
class CoverageReport:
    """Stage-by-stage pair bookkeeping for an arbitrary network."""

    pairs: frozenset[Pair]
    new_per_stage: tuple[int, ...]
    complete: bool        # every one of the n*(n-1)/2 pairs met somewhere
    strictly_new: bool    # every stage contributed only unseen pairs


def verify_coverage(cfg: NetworkConfig) -> CoverageReport:
    """Tally which channel pairs meet at switches, using only the stage pairings."""
    seen: set[Pair] = set()
    new_counts = []
    for pairs in stage_pairings(cfg):
        new_counts.append(sum(1 for p in pairs if p not in seen))
        seen.update(pairs)
    full = cfg.n * (cfg.n - 1) // 2
    return CoverageReport(
        pairs=frozenset(seen),
        new_per_stage=tuple(new_counts),
        complete=len(seen) == full,
        strictly_new=all(c == cfg.n // 2 for c in new_counts),
    )


def _layer_options(
    prev: tuple[int, ...], shuffle: tuple[int, ...], seen: set[Pair]
) -> Iterator[tuple[int, ...]]:
    """Switch settings whose next-stage pairing avoids ``seen``, in canonical order.

    ``prev`` holds the channel labels feeding this layer's switches; the next
    stage's shuffle pairs the layer outputs at positions (shuffle[2j],
    shuffle[2j+1]). Each such constraint couples at most two switches, so the
    switches split into independent groups solved separately; full settings
    are the lazy product of per-group choices, groups ordered by their lowest
    switch index and group choices ordered lexicographically.
    """
    n = len(prev)
    half = n // 2
    parent = list(range(half))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    constraints = [(shuffle[2 * j], shuffle[2 * j + 1]) for j in range(half)]
    for p, q in constraints:
        ra, rb = find(p // 2), find(q // 2)
        if ra != rb:
            parent[rb] = ra

    groups: dict[int, list[int]] = {}
    for k in range(half):
        groups.setdefault(find(k), []).append(k)
    group_constraints: dict[int, list[Pair]] = {root: [] for root in groups}
    for p, q in constraints:
        group_constraints[find(p // 2)].append((p, q))

    choice_lists: list[list[dict[int, int]]] = []
    for root in sorted(groups, key=lambda r: min(groups[r])):
        switches = sorted(groups[root])
        valid: list[dict[int, int]] = []
        for bits in product((0, 1), repeat=len(switches)):
            assign = dict(zip(switches, bits))
            ok = True
            for p, q in group_constraints[root]:
                a = prev[p ^ assign[p // 2]]
                b = prev[q ^ assign[q // 2]]
                if channel_pair(a, b) in seen:
                    ok = False
                    break
            if ok:
                valid.append(assign)
        if not valid:
            return
        choice_lists.append(valid)

    for combo in product(*choice_lists):
        merged = [0] * half
        for assign in combo:
            for k, bit in assign.items():
                merged[k] = bit
        yield tuple(merged)


def build_fa(
    n: int,
    kind: ShuffleKind = ShuffleKind.PERFECT_SHUFFLE,
    cache_dir: Path | str | None = None,
    search_budget: int = 2_000_000,
) -> FundamentalArrangement:
    """Construct a fundamental arrangement for ``n`` channels, deterministically.

    The result is cached under ``cache_dir`` (keyed by n and kind) when one is
    given. Raises ConstructionError if the search exhausts its candidates or
    the step budget; with the modeled architectures this is not expected for
    n up to 64 and beyond.
    """
    if n < 4 or not is_power_of_two(n):
        raise ValueError(f"channel count must be a power of two >= 4, got {n}")
    if cache_dir is not None:
        cached = _load_cache(cache_dir, n, kind)
        if cached is not None:
            return cached

    half = n // 2
    stages = n - 1
    shuffles = [stage_permutation(kind, n, s).mapping for s in range(1, stages + 1)]

    first = tuple(shuffles[0])  # the shuffle applied to the identity arrangement
    seen: set[Pair] = {channel_pair(first[2 * k], first[2 * k + 1]) for k in range(half)}
    vectors: list[tuple[int, ...]] = [first]
    chosen: list[tuple[int, ...]] = []
    added: list[list[Pair]] = []
    iterators: list[Iterator[tuple[int, ...]]] = []
    visited = 0

    t = 1  # next stage (0-based) whose pairing must consist of unseen pairs
    while t <= stages - 1:
        if len(iterators) < t:
            iterators.append(_layer_options(vectors[t - 1], shuffles[t], seen))
        advanced = False
        for bits in iterators[t - 1]:
            visited += 1
            if visited > search_budget:
                raise ConstructionError(
                    f"search budget {search_budget} exhausted at stage {t + 1} "
                    f"of {stages} (n={n}, kind={kind.value}, pairs so far {len(seen)})"
                )
            prev = vectors[t - 1]
            after_layer = tuple(prev[p ^ bits[p // 2]] for p in range(n))
            nxt = tuple(after_layer[i] for i in shuffles[t])
            fresh = [channel_pair(nxt[2 * k], nxt[2 * k + 1]) for k in range(half)]
            seen.update(fresh)
            added.append(fresh)
            chosen.append(bits)
            vectors.append(nxt)
            advanced = True
            break
        if advanced:
            t += 1
        elif t == 1:
            raise ConstructionError(
                f"no fundamental arrangement exists in the searched space "
                f"(n={n}, kind={kind.value})"
            )
        else:
            iterators.pop()
            seen.difference_update(added.pop())
            chosen.pop()
            vectors.pop()
            t -= 1

    layers = tuple(SwitchLayer.from_bits(bits) for bits in chosen) + (
        SwitchLayer.all_bypass(half),  # the last layer meets no new switch inputs
    )
    fa = FundamentalArrangement(
        cfg=NetworkConfig(n, kind, layers), coverage=frozenset(seen)
    )
    if cache_dir is not None:
        save_fa(fa, _cache_path(cache_dir, n, kind))
    return fa


# --- persistence -----------------------------------------------------------

def fa_to_dict(fa: FundamentalArrangement) -> dict:
    report = verify_coverage(fa.cfg)
    data = network_to_dict(fa.cfg)
    data["format"] = FA_FILE_FORMAT
    data["coverage_complete"] = report.complete
    data["new_pairs_per_stage"] = list(report.new_per_stage)
    return data


def save_fa(fa: FundamentalArrangement, path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(fa_to_dict(fa), indent=2) + "\n")


def load_fa(path: Path | str) -> FundamentalArrangement:
    """Load and re-verify an arrangement file; coverage is recomputed, not trusted."""
    data = json.loads(Path(path).read_text())
    if data.get("format") != FA_FILE_FORMAT:
        raise ValueError(f"unrecognized arrangement file format: {data.get('format')!r}")
    cfg = network_from_dict(dict(data, format=FILE_FORMAT))
    report = verify_coverage(cfg)
    if not report.complete:
        raise ValueError(f"{path}: coverage incomplete, not a fundamental arrangement")
    return FundamentalArrangement(cfg=cfg, coverage=report.pairs)


def _cache_path(cache_dir: Path | str, n: int, kind: ShuffleKind) -> Path:
    return Path(cache_dir) / f"fa-{kind.value}-n{n}.json"


def _load_cache(cache_dir: Path | str, n: int, kind: ShuffleKind) -> FundamentalArrangement | None:
    path = _cache_path(cache_dir, n, kind)
    if not path.exists():
        return None
    try:
        return load_fa(path)
    except (ValueError, KeyError, json.JSONDecodeError):
        return None  # stale or corrupt cache entries are rebuilt
