"""Permutations on channel positions, 2x2 switch layers, and their matrix view."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Permutation:
    """A bijection on channel positions 0..n-1.

    ``mapping[j]`` is the input position routed to output position j, so
    applying the permutation to a vector v yields ``(v[mapping[0]], ...)``.
    Applied to the identity vector, ``mapping`` itself is the output channel
    arrangement. Labels are 0-based internally; 1-based only at I/O
    boundaries.
    """

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.mapping)
        if n < 2 or not is_power_of_two(n):
            raise ValueError(f"channel count must be a power of two >= 2, got {n}")
        if sorted(self.mapping) != list(range(n)):
            raise ValueError(f"not a bijection on 0..{n - 1}: {self.mapping}")

    @property
    def n(self) -> int:
        return len(self.mapping)

    def apply(self, values: Sequence) -> tuple:
        """Rearrange ``values`` (length n) according to this permutation."""
        return tuple(values[i] for i in self.mapping)

    def is_identity(self) -> bool:
        return all(i == j for j, i in enumerate(self.mapping))

    def to_one_based(self) -> str:
        """Render as the 1-based comma-separated channel list, e.g. "1,3,2,4"."""
        return ",".join(str(i + 1) for i in self.mapping)

    @classmethod
    def from_one_based(cls, text: str) -> "Permutation":
        """Parse a 1-based comma-separated channel list."""
        try:
            labels = [int(tok) for tok in text.split(",")]
        except ValueError as exc:
            raise ValueError(f"malformed channel list: {text!r}") from exc
        return cls(tuple(label - 1 for label in labels))


@dataclass(frozen=True)
class SwitchLayer:
    """One dynamic stage: a row of 2x2 switch states (False = bypass, True = exchange)."""

    states: tuple[bool, ...]

    def __post_init__(self) -> None:
        if not self.states:
            raise ValueError("a switch layer needs at least one switch")

    @property
    def switch_count(self) -> int:
        return len(self.states)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "SwitchLayer":
        return cls(tuple(bool(b) for b in bits))

    def to_bits(self) -> list[int]:
        return [int(s) for s in self.states]

    @classmethod
    def all_bypass(cls, switch_count: int) -> "SwitchLayer":
        return cls((False,) * switch_count)

    def is_all_bypass(self) -> bool:
        return not any(self.states)


@dataclass(frozen=True)
class RoutingMatrix:
    """A square 0/1 grid; a 1 at (row j, column i) routes input channel i to output j.

    The constructor enforces shape and binary entries only, so invalid switch
    matrices (duplicate 1s, broken blocks) can be represented and then
    rejected by :func:`validate_switch_matrix`.
    """

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        size = len(self.entries)
        if size == 0 or any(len(row) != size for row in self.entries):
            raise ValueError("routing matrix must be square and non-empty")
        if any(cell not in (0, 1) for row in self.entries for cell in row):
            raise ValueError("routing matrix entries must be 0 or 1")

    @property
    def size(self) -> int:
        return len(self.entries)

    def apply(self, values: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product over the channel vector."""
        return tuple(
            sum(v for cell, v in zip(row, values) if cell) for row in self.entries
        )

    def to_text(self) -> str:
        """Rows of space-separated 0/1 digits, one row per line."""
        return "\n".join(" ".join(str(cell) for cell in row) for row in self.entries)


@dataclass(frozen=True)
class SwitchMatrixVerdict:
    valid: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.valid


def identity(n: int) -> Permutation:
    """The arrangement-preserving permutation on ``n`` channels."""
    if n < 2 or not is_power_of_two(n):
        raise ValueError(f"channel count must be a power of two >= 2, got {n}")
    return Permutation(tuple(range(n)))


def compose(first: Permutation, second: Permutation) -> Permutation:
    """The permutation that acts as ``first`` followed by ``second``."""
    if first.n != second.n:
        raise ValueError(f"size mismatch: {first.n} vs {second.n}")
    return Permutation(tuple(first.mapping[i] for i in second.mapping))


def invert(p: Permutation) -> Permutation:
    """The permutation q with compose(p, q) == identity."""
    inverse = [0] * p.n
    for j, i in enumerate(p.mapping):
        inverse[i] = j
    return Permutation(tuple(inverse))


def layer_to_permutation(layer: SwitchLayer) -> Permutation:
    """Positions 2k and 2k+1 swap when switch k is in exchange, else stay put."""
    mapping: list[int] = []
    for k, exchange in enumerate(layer.states):
        a, b = 2 * k, 2 * k + 1
        mapping.extend((b, a) if exchange else (a, b))
    return Permutation(tuple(mapping))


def to_matrix(p: Permutation) -> RoutingMatrix:
    """The permutation-matrix view: row j holds its single 1 at column mapping[j]."""
    return RoutingMatrix(
        tuple(tuple(int(i == src) for i in range(p.n)) for src in p.mapping)
    )


def from_matrix(m: RoutingMatrix) -> Permutation:
    """Inverse of :func:`to_matrix`; rejects non-permutation matrices."""
    mapping = []
    for j, row in enumerate(m.entries):
        if sum(row) != 1:
            raise ValueError(f"row {j} holds {sum(row)} ones, not a permutation matrix")
    for row in m.entries:
        mapping.append(row.index(1))
    return Permutation(tuple(mapping))


_BYPASS_BLOCK = ((1, 0), (0, 1))
_EXCHANGE_BLOCK = ((0, 1), (1, 0))


def validate_switch_matrix(
    m: RoutingMatrix | Sequence[Sequence[int]],
) -> SwitchMatrixVerdict:
    """Accept exactly the block-diagonal matrices built from 2x2 bypass/exchange blocks.

    Any other square 0/1 grid yields an invalid verdict carrying the first
    offending reason. Non-square or non-binary input raises ValueError.
    """
    if not isinstance(m, RoutingMatrix):
        m = RoutingMatrix(tuple(tuple(row) for row in m))
    size = m.size
    if size % 2:
        return SwitchMatrixVerdict(False, f"odd dimension {size} cannot tile into 2x2 blocks")
    for j, row in enumerate(m.entries):
        ones = sum(row)
        if ones != 1:
            return SwitchMatrixVerdict(False, f"row {j} holds {ones} ones, expected exactly 1")
    for i in range(size):
        ones = sum(row[i] for row in m.entries)
        if ones != 1:
            return SwitchMatrixVerdict(False, f"column {i} holds {ones} ones, expected exactly 1")
    for k in range(size // 2):
        r = 2 * k
        for j in (r, r + 1):
            for i, cell in enumerate(m.entries[j]):
                if cell and not r <= i <= r + 1:
                    return SwitchMatrixVerdict(
                        False, f"off-diagonal block entry at row {j}, column {i}"
                    )
        block = (m.entries[r][r : r + 2], m.entries[r + 1][r : r + 2])
        if block not in (_BYPASS_BLOCK, _EXCHANGE_BLOCK):
            return SwitchMatrixVerdict(False, f"block {k} is neither bypass nor exchange")
    return SwitchMatrixVerdict(True)
