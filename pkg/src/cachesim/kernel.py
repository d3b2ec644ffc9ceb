"""Compiled bulk simulation loop.

Block ids are dense (``0..n_universe-1``) here; the harness remaps traces.
LWRP recency counters are kept implicitly: every access bumps ``R`` of all
other residents and zeroes the touched block, so ``R_i`` at access ``t``
is ``(t - 1) - touch_i``.  The step-by-step engine in :mod:`cachesim.lwrp`
keeps them explicitly and the test-suite checks both agree.
"""

from __future__ import annotations

import numpy as np
from numba import njit

FIFO, LRU, LFU, MRU, LWRP = 0, 1, 2, 3, 4
POLICY_CODES = {"fifo": FIFO, "lru": LRU, "lfu": LFU, "mru": MRU, "lwrp": LWRP}

_FNV_OFFSET = np.uint64(0xCBF29CE484222325)
_FNV_PRIME = np.uint64(0x100000001B3)


@njit(cache=True)
def fnv1a64(data):
    h = _FNV_OFFSET
    for b in data:
        h = (h ^ np.uint64(b)) * _FNV_PRIME
    return h


@njit(cache=True)
def _select(policy, t, nres, touch, ins, refc, he, dt):
    best = 0
    if policy == LWRP:
        best_r = (t - 1) - touch[0]
        best_w = best_r / (he[0] * dt[0])
        for f in range(1, nres):
            r = (t - 1) - touch[f]
            w = r / (he[f] * dt[f])
            if w > best_w or (w == best_w and (r > best_r or (r == best_r and ins[f] < ins[best]))):
                best, best_w, best_r = f, w, r
    elif policy == FIFO:
        for f in range(1, nres):
            if ins[f] < ins[best]:
                best = f
    elif policy == LRU:
        for f in range(1, nres):
            if touch[f] < touch[best]:
                best = f
    elif policy == LFU:
        for f in range(1, nres):
            if refc[f] < refc[best] or (refc[f] == refc[best] and touch[f] < touch[best]):
                best = f
    else:
        for f in range(1, nres):
            if touch[f] > touch[best]:
                best = f
    return best


@njit(cache=True)
def run_trace(dense, n_universe, policy, capacity, buffer_cap, per_hit_energy, freeze_freq, freeze_delta, log_victims):
    """Simulate one trace.

    Returns ``(counts, victims, buffer_blocks, buffer_order)`` where counts
    is ``[hits, partial_hits, misses, evictions]``.
    """
    n = dense.shape[0]
    loc = np.full(n_universe, -1, np.int64)
    bslot = np.full(n_universe, -1, np.int64)

    blk = np.empty(capacity, np.int64)
    touch = np.empty(capacity, np.int64)
    ins = np.empty(capacity, np.int64)
    refc = np.empty(capacity, np.int64)
    he = np.empty(capacity, np.float64)
    dt = np.empty(capacity, np.float64)
    nres = 0

    bblk = np.full(buffer_cap, -1, np.int64)
    bseq = np.zeros(buffer_cap, np.int64)
    bcount = 0
    bpushes = 0

    hits = 0
    partials = 0
    misses = 0
    evictions = 0
    victims = np.empty(n if log_victims else 0, np.int64)

    for t in range(1, n + 1):
        j = dense[t - 1]
        f = loc[j]
        if f >= 0:
            hits += 1
            if policy == LWRP:
                r = (t - 1) - touch[f]
                if not freeze_delta:
                    dt[f] = float(max(r, 1))
                if not freeze_freq:
                    he[f] = he[f] + per_hit_energy
            refc[f] += 1
            touch[f] = t
            continue

        s = bslot[j]
        if s >= 0:
            partials += 1
            bslot[j] = -1
            bblk[s] = -1
            bcount -= 1
        else:
            misses += 1

        if nres < capacity:
            f = nres
            nres += 1
        else:
            f = _select(policy, t, nres, touch, ins, refc, he, dt)
            v = blk[f]
            loc[v] = -1
            if log_victims:
                victims[evictions] = v
            evictions += 1
            if buffer_cap > 0:
                if bcount == buffer_cap:
                    slot = 0
                    for q in range(1, buffer_cap):
                        if bseq[q] < bseq[slot]:
                            slot = q
                    bslot[bblk[slot]] = -1
                    bcount -= 1
                else:
                    slot = 0
                    while bblk[slot] >= 0:
                        slot += 1
                bblk[slot] = v
                bseq[slot] = bpushes
                bpushes += 1
                bslot[v] = slot
                bcount += 1

        blk[f] = j
        loc[j] = f
        touch[f] = t
        ins[f] = t
        refc[f] = 1
        he[f] = 1.0
        dt[f] = 1.0

    counts = np.array([hits, partials, misses, evictions], np.int64)
    return counts, victims[:evictions], bblk, bseq
