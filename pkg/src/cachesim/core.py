"""Shared domain types: cache geometry, access outcomes and run statistics."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace


class UsageError(RuntimeError):
    """An engine or policy was driven outside its contract."""


class ConfigError(ValueError):
    """Invalid configuration values."""


BlockId = int


class AccessOutcome(enum.Enum):
    HIT = "hit"
    PARTIAL_HIT = "partial_hit"
    MISS = "miss"


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class CacheConfig:
    """Fully associative cache geometry.

    ``block_size`` only matters when parsing address-mode traces.
    """

    capacity: int
    buffer_capacity: int = 0
    block_size: int = 64

    def __post_init__(self):
        if not isinstance(self.capacity, int) or self.capacity < 1:
            raise ConfigError(f"capacity must be a positive integer, got {self.capacity!r}")
        if not isinstance(self.buffer_capacity, int) or self.buffer_capacity < 0:
            raise ConfigError(f"buffer_capacity must be >= 0, got {self.buffer_capacity!r}")
        if not _is_pow2(self.block_size):
            raise ConfigError(f"block_size must be a power of two, got {self.block_size!r}")


@dataclass(frozen=True)
class SimStats:
    accesses: int = 0
    hits: int = 0
    partial_hits: int = 0
    misses: int = 0
    evictions: int = 0

    @property
    def hit_ratio(self) -> float:
        return self.ratios()[0]

    @property
    def miss_ratio(self) -> float:
        return self.ratios()[1]

    @property
    def partial_ratio(self) -> float:
        return self.ratios()[2]

    def ratios(self) -> tuple[float, float, float]:
        return ratios(self)


def record_outcome(stats: SimStats, outcome: AccessOutcome) -> SimStats:
    """Return ``stats`` with one more access of the given outcome."""
    if outcome is AccessOutcome.HIT:
        return replace(stats, accesses=stats.accesses + 1, hits=stats.hits + 1)
    if outcome is AccessOutcome.PARTIAL_HIT:
        return replace(stats, accesses=stats.accesses + 1, partial_hits=stats.partial_hits + 1)
    return replace(stats, accesses=stats.accesses + 1, misses=stats.misses + 1)


def ratios(stats: SimStats) -> tuple[float, float, float]:
    """(hit ratio, miss ratio, partial ratio).

    The miss ratio is ``1 - HR``, so partial hits are counted inside it.
    An empty run yields all zeros.
    """
    if stats.accesses == 0:
        return 0.0, 0.0, 0.0
    hr = stats.hits / stats.accesses
    return hr, 1.0 - hr, stats.partial_hits / stats.accesses
