"""Brute-force reference checks built on the matrix formalism.

Everything here recomputes network behavior through 0/1 matrix products
rather than permutation composition, so agreement between the two paths is
meaningful evidence and not a tautology.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations as all_permutations

import numpy as np

from .fabric import NetworkConfig, stage_pairings
from .permcore import Permutation, RoutingMatrix, SwitchLayer, to_matrix
from .topology import ShuffleKind, stage_permutation

ENUMERATION_BIT_LIMIT = 24


class EnumerationLimitError(ValueError):
    """The requested exhaustive enumeration exceeds the desk-scale guard."""


def _shuffle_matrices(n: int, kind: ShuffleKind, stages: int) -> list[np.ndarray]:
    return [
        np.array(to_matrix(stage_permutation(kind, n, s)).entries, dtype=np.int64)
        for s in range(1, stages + 1)
    ]


def _layer_matrix(n: int, mask: int) -> np.ndarray:
    """Block-diagonal switch matrix for a layer bitmask (bit k = switch k exchanges)."""
    m = np.eye(n, dtype=np.int64)
    for k in range(n // 2):
        if (mask >> k) & 1:
            r = 2 * k
            m[r, r] = m[r + 1, r + 1] = 0
            m[r, r + 1] = m[r + 1, r] = 1
    return m


def matrix_evaluate(cfg: NetworkConfig) -> Permutation:
    """Evaluate a network purely by multiplying routing matrices."""
    n = cfg.n
    acc = np.eye(n, dtype=np.int64)
    for s in range(1, cfg.stage_count + 1):
        static = np.array(
            to_matrix(stage_permutation(cfg.kind, n, s)).entries, dtype=np.int64
        )
        mask = sum(1 << k for k, on in enumerate(cfg.layers[s - 1].states) if on)
        acc = _layer_matrix(n, mask) @ static @ acc
    return Permutation(tuple(int(i) for i in np.argmax(acc, axis=1)))


def reachable_set(n: int, kind: ShuffleKind, stages: int) -> frozenset[Permutation]:
    """Exact set of realizable output permutations over all switch settings."""
    half = n // 2
    bits = stages * half
    if bits > ENUMERATION_BIT_LIMIT:
        raise EnumerationLimitError(
            f"2^{bits} switch settings exceed the 2^{ENUMERATION_BIT_LIMIT} "
            "exhaustive-enumeration guard"
        )
    statics = _shuffle_matrices(n, kind, stages)
    layer_cache = {mask: _layer_matrix(n, mask) for mask in range(1 << half)}
    found: set[Permutation] = set()
    layer_mask_all = (1 << half) - 1
    for setting in range(1 << bits):
        acc = np.eye(n, dtype=np.int64)
        for s in range(stages):
            mask = (setting >> (s * half)) & layer_mask_all
            acc = layer_cache[mask] @ statics[s] @ acc
        found.add(Permutation(tuple(int(i) for i in np.argmax(acc, axis=1))))
    return frozenset(found)


@dataclass(frozen=True)
class EquivalenceReport:
    n: int
    stages: int
    sizes: dict[ShuffleKind, int]
    relabelings: dict[tuple[ShuffleKind, ShuffleKind], bool] | None

    @property
    def sizes_agree(self) -> bool:
        return len(set(self.sizes.values())) == 1

    @property
    def all_relabeled(self) -> bool:
        return self.relabelings is not None and all(self.relabelings.values())


def _relabeling_exists(
    set_a: frozenset[Permutation], set_b: frozenset[Permutation], n: int
) -> bool:
    """Search input/output relabelings carrying one reachable set onto the other."""
    if len(set_a) != len(set_b):
        return False
    bare_b = {p.mapping for p in set_b}
    for alpha in all_permutations(range(n)):
        for beta in all_permutations(range(n)):
            relabeled = {
                tuple(alpha[p.mapping[beta[j]]] for j in range(n)) for p in set_a
            }
            if relabeled == bare_b:
                return True
    return False


def equivalence_evidence(n: int, stages: int) -> EquivalenceReport:
    """Reachable-set sizes per architecture, plus a relabeling search at n=4."""
    sizes: dict[ShuffleKind, int] = {}
    sets: dict[ShuffleKind, frozenset[Permutation]] = {}
    for kind in ShuffleKind:
        sets[kind] = reachable_set(n, kind, stages)
        sizes[kind] = len(sets[kind])
    relabelings = None
    if n == 4:
        kinds = list(ShuffleKind)
        relabelings = {}
        for i, a in enumerate(kinds):
            for b in kinds[i + 1 :]:
                relabelings[(a, b)] = _relabeling_exists(sets[a], sets[b], n)
    return EquivalenceReport(n=n, stages=stages, sizes=sizes, relabelings=relabelings)


@dataclass(frozen=True)
class PartnerReport:
    """Distinct switch partners per channel in an all-bypass network."""

    n: int
    depth: int
    partners: tuple[frozenset[int], ...]
    expected: int  # log2(n)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.partners)

    @property
    def consistent(self) -> bool:
        return all(c == self.expected for c in self.counts)

    @property
    def never_met(self) -> int:
        """Channels that never share a switch with a given channel."""
        return self.n - 1 - self.expected


def snb_impossibility_evidence(n: int) -> PartnerReport:
    """Partner counts in a deep all-bypass network: log2(n) each, no more.

    With every switch bypassing, the channel order repeats every log2(n)
    stages, so depth n*log2(n) is far past saturation.
    """
    if n not in (4, 8, 16):
        raise ValueError(f"supported channel counts are 4, 8 and 16, got {n}")
    log2n = n.bit_length() - 1
    depth = n * log2n
    cfg = NetworkConfig.all_bypass(n, ShuffleKind.PERFECT_SHUFFLE, depth)
    partners: list[set[int]] = [set() for _ in range(n)]
    for pairs in stage_pairings(cfg):
        for a, b in pairs:
            partners[a].add(b)
            partners[b].add(a)
    return PartnerReport(
        n=n,
        depth=depth,
        partners=tuple(frozenset(p) for p in partners),
        expected=log2n,
    )


def crossbar_reference(n: int, target: Permutation) -> RoutingMatrix:
    """The n-by-n crosspoint grid realizing ``target`` in a single stage."""
    if target.n != n:
        raise ValueError(f"target has {target.n} channels, expected {n}")
    grid = [[0] * n for _ in range(n)]
    for out_pos, in_pos in enumerate(target.mapping):
        grid[out_pos][in_pos] = 1
    return RoutingMatrix(tuple(tuple(row) for row in grid))


def random_settings(
    n: int, stages: int, count: int, seed: int
) -> list[tuple[SwitchLayer, ...]]:
    """Deterministic sample of switch settings for spot checks."""
    rng = random.Random(seed)
    half = n // 2
    return [
        tuple(
            SwitchLayer(tuple(rng.random() < 0.5 for _ in range(half)))
            for _ in range(stages)
        )
        for _ in range(count)
    ]
