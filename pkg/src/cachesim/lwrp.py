"""Weighting replacement with a victim buffer (LWRP).

Every resident block carries a recency counter ``R`` (accesses to other
blocks since it was last touched), a hit-energy accumulator and an
inter-reference gap ``delta_t``.  Its weight is ``R / (hit_energy * delta_t)``
and the heaviest block is evicted.  Evicted blocks go to a bounded FIFO
victim buffer; a reference that misses the cache but finds the block in the
buffer is a partial hit and is served at buffer cost.

This module is the step-by-step reference engine: counters are updated
literally on every access.  Bulk simulation goes through
:mod:`cachesim.kernel`, which must agree with it exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .core import AccessOutcome, BlockId, UsageError


@dataclass
class BlockState:
    R: int = 0
    hit_energy: float = 1.0
    delta_t: float = 1.0
    insert_seq: int = 0


@dataclass(frozen=True)
class LwrpVariantFlags:
    """Ablation switches.  With both set the weight is just ``R`` (pure LRU)."""

    freeze_frequency: bool = False
    freeze_delta: bool = False


def weight(state: BlockState) -> float:
    return state.R / (state.hit_energy * state.delta_t)


class VictimBuffer:
    """Bounded FIFO of evicted block ids, oldest first."""

    def __init__(self, capacity: int):
        if capacity < 0:
            raise UsageError(f"buffer capacity must be >= 0, got {capacity}")
        self.capacity = capacity
        self.queue: deque[BlockId] = deque()
        self._members: set[BlockId] = set()

    def __contains__(self, block: BlockId) -> bool:
        return block in self._members

    def __len__(self) -> int:
        return len(self.queue)

    def push(self, block: BlockId) -> Optional[BlockId]:
        """Append ``block``; return whatever was dropped to make room."""
        if block in self._members:
            raise UsageError(f"block {block} already buffered")
        if self.capacity == 0:
            return block
        dropped = None
        if len(self.queue) == self.capacity:
            dropped = self.queue.popleft()
            self._members.discard(dropped)
        self.queue.append(block)
        self._members.add(block)
        return dropped

    def remove(self, block: BlockId) -> None:
        if block not in self._members:
            raise UsageError(f"block {block} not in buffer")
        self.queue.remove(block)
        self._members.discard(block)

    def contents(self) -> list[BlockId]:
        return list(self.queue)


def buffer_push(buffer: VictimBuffer, block: BlockId) -> Optional[BlockId]:
    return buffer.push(block)


@dataclass
class LwrpCache:
    capacity: int
    flags: LwrpVariantFlags = field(default_factory=LwrpVariantFlags)
    resident: dict[BlockId, BlockState] = field(default_factory=dict)
    access_seq: int = 0
    last_victim: Optional[BlockId] = None

    def __post_init__(self):
        if self.capacity < 1:
            raise UsageError(f"capacity must be >= 1, got {self.capacity}")

    def on_hit(self, j: BlockId, per_hit_energy: float = 1.0) -> None:
        if j not in self.resident:
            raise UsageError(f"hit on non-resident block {j}")
        for i, st in self.resident.items():
            if i != j:
                st.R += 1
        st = self.resident[j]
        if not self.flags.freeze_delta:
            # R_j is 0 on back-to-back hits; the gap is at least one access.
            st.delta_t = float(max(st.R, 1))
        if not self.flags.freeze_frequency:
            st.hit_energy = st.hit_energy + per_hit_energy
        st.R = 0

    def select_victim(self) -> BlockId:
        """Heaviest block; ties go to larger ``R``, then to the oldest insert."""
        if not self.resident:
            raise UsageError("select_victim on an empty cache")
        best = None
        best_key = None
        for i, st in self.resident.items():
            key = (weight(st), st.R, -st.insert_seq)
            if best_key is None or key > best_key:
                best, best_key = i, key
        return best

    def _install(self, buffer: VictimBuffer, j: BlockId) -> Optional[BlockId]:
        victim = None
        if len(self.resident) >= self.capacity:
            victim = self.select_victim()
            del self.resident[victim]
            buffer.push(victim)
        for st in self.resident.values():
            st.R += 1
        self.resident[j] = BlockState(insert_seq=self.access_seq)
        self.last_victim = victim
        return victim

    def on_miss_insert(self, buffer: VictimBuffer, j: BlockId) -> Optional[BlockId]:
        if j in self.resident or j in buffer:
            raise UsageError(f"block {j} is already cached or buffered")
        return self._install(buffer, j)

    def on_partial_hit(self, buffer: VictimBuffer, j: BlockId) -> Optional[BlockId]:
        if j not in buffer:
            raise UsageError(f"block {j} not in buffer")
        buffer.remove(j)
        return self._install(buffer, j)

    def access(self, buffer: VictimBuffer, j: BlockId, per_hit_energy: float = 1.0) -> AccessOutcome:
        self.access_seq += 1
        self.last_victim = None
        if j in self.resident:
            self.on_hit(j, per_hit_energy)
            return AccessOutcome.HIT
        if j in buffer:
            self.on_partial_hit(buffer, j)
            return AccessOutcome.PARTIAL_HIT
        self.on_miss_insert(buffer, j)
        return AccessOutcome.MISS

    def check_invariants(self, buffer: VictimBuffer, touched: Optional[BlockId] = None) -> None:
        """Raise AssertionError if any structural invariant is broken."""
        assert len(self.resident) <= self.capacity, "cache over capacity"
        assert len(buffer.queue) <= buffer.capacity, "buffer over capacity"
        assert len(set(buffer.queue)) == len(buffer.queue), "duplicate buffer entry"
        assert not (self.resident.keys() & set(buffer.queue)), "cache/buffer overlap"
        rs = [st.R for st in self.resident.values()]
        assert len(set(rs)) == len(rs), "recency counters collide"
        for st in self.resident.values():
            assert st.R >= 0 and st.delta_t >= 1 and st.hit_energy >= 1, "counter clamp violated"
        if touched is not None:
            assert self.resident[touched].R == 0, "touched block not at R=0"
