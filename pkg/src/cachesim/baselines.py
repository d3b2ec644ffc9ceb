"""Classic replacement policies (FIFO, LRU, LFU, MRU) behind one eviction interface.

Each policy only tracks bookkeeping and picks victims; the surrounding
simulator decides when a block is inserted, hit or removed.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

from .core import BlockId, UsageError


@dataclass
class PolicyMeta:
    insert_seq: int
    last_access_seq: int
    ref_count: int = 1


class EvictionPolicy(ABC):
    """Victim selection contract shared by every policy.

    ``seq`` is the simulator's access sequence number and must strictly
    increase across calls.
    """

    name: str = ""

    def __init__(self):
        self.meta: dict[BlockId, PolicyMeta] = {}

    def on_insert(self, block: BlockId, seq: int) -> None:
        if block in self.meta:
            raise UsageError(f"block {block} already resident")
        self.meta[block] = PolicyMeta(insert_seq=seq, last_access_seq=seq)

    def on_hit(self, block: BlockId, seq: int) -> None:
        try:
            m = self.meta[block]
        except KeyError:
            raise UsageError(f"hit on non-resident block {block}") from None
        m.last_access_seq = seq
        m.ref_count += 1

    def remove(self, block: BlockId) -> None:
        del self.meta[block]

    def resident_set(self) -> set[BlockId]:
        return set(self.meta)

    def select_victim(self) -> BlockId:
        if not self.meta:
            raise UsageError("select_victim on an empty resident set")
        return self._select()

    @abstractmethod
    def _select(self) -> BlockId: ...


class FIFOPolicy(EvictionPolicy):
    """Evicts the block that entered the cache first; hits are ignored."""

    name = "fifo"

    def _select(self):
        return min(self.meta, key=lambda b: self.meta[b].insert_seq)


class LRUPolicy(EvictionPolicy):
    name = "lru"

    def _select(self):
        return min(self.meta, key=lambda b: self.meta[b].last_access_seq)


class LFUPolicy(EvictionPolicy):
    """Least reference count; ties go to the least recently used block."""

    name = "lfu"

    def _select(self):
        return min(self.meta, key=lambda b: (self.meta[b].ref_count, self.meta[b].last_access_seq))


class MRUPolicy(EvictionPolicy):
    """Most recently used block is evicted."""

    name = "mru"

    def _select(self):
        return max(self.meta, key=lambda b: self.meta[b].last_access_seq)


BASELINES: dict[str, type[EvictionPolicy]] = {
    cls.name: cls for cls in (FIFOPolicy, LRUPolicy, LFUPolicy, MRUPolicy)
}


def _require_resident(policy: EvictionPolicy) -> None:
    if not policy.meta:
        raise UsageError("select_victim on an empty resident set")


# Stand-alone selectors; they accept any policy's bookkeeping.
def fifo_select_victim(policy: EvictionPolicy) -> BlockId:
    _require_resident(policy)
    return FIFOPolicy._select(policy)


def lru_select_victim(policy: EvictionPolicy) -> BlockId:
    _require_resident(policy)
    return LRUPolicy._select(policy)


def lfu_select_victim(policy: EvictionPolicy) -> BlockId:
    _require_resident(policy)
    return LFUPolicy._select(policy)


def mru_select_victim(policy: EvictionPolicy) -> BlockId:
    _require_resident(policy)
    return MRUPolicy._select(policy)
