"""Static shuffle-stage generators for the four modeled architectures.

Perfect shuffle and its reverse are stage-invariant. Crossover and banyan
cycle through log2(n)-1 distinct patterns: crossover starts at full width
and halves its active block each stage (blocks of 2 are no shuffle at all,
so they are skipped), banyan starts at blocks of 4 and doubles until the
full-width stage, then both return to their first pattern.
"""

from __future__ import annotations

import enum
from functools import lru_cache

from .permcore import Permutation, compose, invert, is_power_of_two


class ShuffleKind(enum.Enum):
    """Shuffle architectures; values are the wire/CLI names."""

    PERFECT_SHUFFLE = "perfect-shuffle"
    REVERSE_PERFECT_SHUFFLE = "reverse-perfect-shuffle"
    CROSSOVER = "crossover"
    BANYAN = "banyan"

    @classmethod
    def from_name(cls, name: str) -> "ShuffleKind":
        for kind in cls:
            if kind.value == name:
                return kind
        known = ", ".join(k.value for k in cls)
        raise ValueError(f"unknown shuffle kind {name!r}; expected one of: {known}")


def _require_channel_count(n: int) -> None:
    if n < 2 or not is_power_of_two(n):
        raise ValueError(f"channel count must be a power of two >= 2, got {n}")


def _interleave(block: int) -> list[int]:
    # card-deck interleave: output 2i takes input i, output 2i+1 takes input i + block/2
    half = block // 2
    mapping = [0] * block
    for i in range(half):
        mapping[2 * i] = i
        mapping[2 * i + 1] = i + half
    return mapping


def _crossover_interleave(block: int) -> list[int]:
    # like the deck interleave, but the second half is taken bottom-up
    mapping = [0] * block
    for i in range(block // 2):
        mapping[2 * i] = i
        mapping[2 * i + 1] = block - 1 - i
    return mapping


def perfect_shuffle(n: int) -> Permutation:
    """The full-width card-deck interleave on ``n`` channels."""
    _require_channel_count(n)
    return Permutation(tuple(_interleave(n)))


@lru_cache(maxsize=None)
def _cycle_pattern(kind: ShuffleKind, n: int, c: int) -> Permutation:
    if kind is ShuffleKind.PERFECT_SHUFFLE:
        return perfect_shuffle(n)
    if kind is ShuffleKind.REVERSE_PERFECT_SHUFFLE:
        return invert(perfect_shuffle(n))
    if kind is ShuffleKind.CROSSOVER:
        block = n >> c  # full width down to blocks of 4
        pattern = _crossover_interleave(block)
    else:
        block = 1 << (c + 2)  # blocks of 4 up to full width
        pattern = _interleave(block)
    mapping = [base + src for base in range(0, n, block) for src in pattern]
    return Permutation(tuple(mapping))


def stage_permutation(kind: ShuffleKind, n: int, stage: int) -> Permutation:
    """The static permutation feeding the switches of ``stage`` (1-based)."""
    _require_channel_count(n)
    if stage < 1:
        raise ValueError(f"stage index must be >= 1, got {stage}")
    if n == 2:
        # every kind degenerates to the identity: there is nothing to shuffle
        return perfect_shuffle(2)
    if kind in (ShuffleKind.PERFECT_SHUFFLE, ShuffleKind.REVERSE_PERFECT_SHUFFLE):
        return _cycle_pattern(kind, n, 0)
    period = n.bit_length() - 2  # log2(n) - 1
    return _cycle_pattern(kind, n, (stage - 1) % period)


def shuffle_period(kind: ShuffleKind, n: int) -> int:
    """Smallest stage count after which an all-bypass network restores its input order."""
    _require_channel_count(n)
    cap = n * n
    acc = stage_permutation(kind, n, 1)
    stage = 1
    while not acc.is_identity():
        if stage >= cap:
            raise RuntimeError(f"no period within {cap} stages for {kind.value}, n={n}")
        stage += 1
        acc = compose(acc, stage_permutation(kind, n, stage))
    return stage
