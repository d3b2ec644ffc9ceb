import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cachesim.core import AccessOutcome, CacheConfig, UsageError
from cachesim.harness import POLICIES, RunConfig, simulate
from cachesim.lwrp import BlockState, LwrpCache, LwrpVariantFlags, VictimBuffer, buffer_push, weight
from cachesim.traces import Trace, WorkloadSpec, generate

A, B, C, X = 10, 11, 12, 99
H, P, M = AccessOutcome.HIT, AccessOutcome.PARTIAL_HIT, AccessOutcome.MISS


def states(cache):
    return {k: (s.R, s.hit_energy, s.delta_t) for k, s in cache.resident.items()}


@pytest.mark.parametrize(
    "r, he, dt, expected",
    [(0, 5, 3, 0.0), (6, 2, 3, 1.0), (1, 1, 1, 1.0)],
)
def test_weight(r, he, dt, expected):
    assert weight(BlockState(R=r, hit_energy=he, delta_t=dt)) == expected


class TestOnHit:
    def test_hand_step(self):
        c = LwrpCache(2, resident={A: BlockState(R=3), B: BlockState(R=0)})
        c.on_hit(A, 1.0)
        assert states(c) == {A: (0, 2.0, 3.0), B: (1, 1.0, 1.0)}

    def test_immediate_rehit_clamps_delta(self):
        c = LwrpCache(2, resident={A: BlockState(R=0)})
        c.on_hit(A)
        assert c.resident[A].delta_t == 1.0

    def test_single_block_hit_twice(self):
        c = LwrpCache(1, resident={X: BlockState()})
        c.on_hit(X, 1.0)
        c.on_hit(X, 1.0)
        assert states(c) == {X: (0, 3.0, 1.0)}

    def test_non_resident(self):
        with pytest.raises(UsageError):
            LwrpCache(2).on_hit(A)

    def test_freeze_flags_pin_counters(self):
        c = LwrpCache(2, LwrpVariantFlags(True, True), resident={A: BlockState(R=4)})
        c.on_hit(A, 7.0)
        assert states(c) == {A: (0, 1.0, 1.0)}


class TestSelectVictim:
    def test_heaviest(self):
        c = LwrpCache(2, resident={A: BlockState(R=1), B: BlockState(R=0)})
        assert c.select_victim() == A

    def test_tie_goes_to_larger_r(self):
        c = LwrpCache(
            2,
            resident={B: BlockState(R=2, delta_t=2.0, insert_seq=0), A: BlockState(R=4, hit_energy=4.0, insert_seq=1)},
        )
        assert weight(c.resident[A]) == weight(c.resident[B]) == 1.0
        assert c.select_victim() == A

    def test_tie_then_oldest(self):
        c = LwrpCache(2, resident={B: BlockState(R=0, insert_seq=5), A: BlockState(R=0, insert_seq=2)})
        assert c.select_victim() == A

    def test_single(self):
        assert LwrpCache(1, resident={X: BlockState()}).select_victim() == X

    def test_empty(self):
        with pytest.raises(UsageError):
            LwrpCache(1).select_victim()


class TestMissInsert:
    def test_free_frame(self):
        c, buf = LwrpCache(2), VictimBuffer(1)
        assert c.on_miss_insert(buf, A) is None
        assert states(c) == {A: (0, 1.0, 1.0)}

    def test_third_access_of_abc(self):
        c, buf = LwrpCache(2), VictimBuffer(1)
        for b in (A, B, C):
            c.access(buf, b)
        assert states(c) == {B: (1, 1.0, 1.0), C: (0, 1.0, 1.0)}
        assert buf.contents() == [A]

    def test_zero_buffer_discards(self):
        c, buf = LwrpCache(1), VictimBuffer(0)
        c.on_miss_insert(buf, A)
        assert c.on_miss_insert(buf, B) == A
        assert buf.contents() == []

    def test_already_present(self):
        c, buf = LwrpCache(2), VictimBuffer(1)
        c.on_miss_insert(buf, A)
        with pytest.raises(UsageError):
            c.on_miss_insert(buf, A)


class TestPartialHit:
    def test_hand_trace_e1(self):
        c, buf = LwrpCache(2), VictimBuffer(1)
        for b in (A, B, C):
            c.access(buf, b)
        assert c.on_partial_hit(buf, A) == B
        assert states(c) == {C: (1, 1.0, 1.0), A: (0, 1.0, 1.0)}
        assert buf.contents() == [B]

    def test_free_frame_path(self):
        c, buf = LwrpCache(3), VictimBuffer(2)
        buf.push(A)
        assert c.on_partial_hit(buf, A) is None
        assert A in c.resident and len(buf) == 0

    def test_promotion_frees_slot(self):
        c, buf = LwrpCache(1), VictimBuffer(1)
        c.access(buf, A)
        c.access(buf, B)
        assert buf.contents() == [A]
        c.access(buf, A)
        assert buf.contents() == [B]

    def test_not_buffered(self):
        with pytest.raises(UsageError):
            LwrpCache(1).on_partial_hit(VictimBuffer(1), A)


class TestBufferPush:
    def test_space_available(self):
        buf = VictimBuffer(2)
        buf.push("X")
        assert buffer_push(buf, "Y") is None
        assert buf.contents() == ["X", "Y"]

    def test_overflow_drops_oldest(self):
        buf = VictimBuffer(2)
        buf.push("X")
        buf.push("Y")
        assert buffer_push(buf, "Z") == "X"
        assert buf.contents() == ["Y", "Z"]

    def test_zero_capacity(self):
        buf = VictimBuffer(0)
        assert buf.push("X") == "X"
        assert buf.contents() == []

    def test_duplicate(self):
        buf = VictimBuffer(2)
        buf.push("X")
        with pytest.raises(UsageError):
            buf.push("X")


@pytest.mark.parametrize(
    "trace, cap, bcap, expected",
    [
        ([A, A], 1, 0, [M, H]),
        ([A, B, C, A], 2, 1, [M, M, M, P]),
        ([A, B, C, A], 2, 0, [M, M, M, M]),
    ],
)
def test_access_dispatch(trace, cap, bcap, expected):
    c, buf = LwrpCache(cap), VictimBuffer(bcap)
    assert [c.access(buf, b) for b in trace] == expected


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(0, 15), max_size=300),
    st.integers(1, 6),
    st.integers(0, 4),
    st.floats(0.0, 5.0),
    st.booleans(),
    st.booleans(),
)
def test_invariants_hold_after_every_access(trace, cap, bcap, phe, ff, fd):
    c, buf = LwrpCache(cap, LwrpVariantFlags(ff, fd)), VictimBuffer(bcap)
    n = {H: 0, P: 0, M: 0}
    for b in trace:
        n[c.access(buf, b, phe)] += 1
        c.check_invariants(buf, touched=b)
    assert sum(n.values()) == len(trace)


def _lru_victims(blocks, capacity):
    from collections import OrderedDict

    cache, out = OrderedDict(), []
    for b in blocks:
        if b in cache:
            cache.move_to_end(b)
            continue
        if len(cache) == capacity:
            out.append(cache.popitem(last=False)[0])
        cache[b] = None
    return out


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 12), max_size=400), st.integers(1, 6))
def test_frozen_lwrp_is_lru(trace, cap):
    c, buf = LwrpCache(cap, LwrpVariantFlags(True, True)), VictimBuffer(0)
    victims = []
    for b in trace:
        c.access(buf, b)
        if c.last_victim is not None:
            victims.append(c.last_victim)
    assert victims == _lru_victims(trace, cap)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(0, 20), max_size=300),
    st.integers(1, 6),
    st.sampled_from([1, 2, 5]),
)
def test_buffer_transparency(trace, cap, bcap):
    def run(b):
        c, buf = LwrpCache(cap), VictimBuffer(b)
        outs, victims = [], []
        for x in trace:
            outs.append(c.access(buf, x) is H)
            victims.append(c.last_victim)
        return outs, victims

    assert run(0) == run(bcap)


@pytest.mark.parametrize("policy", POLICIES)
@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize("buffered", [False, True])
def test_kernel_matches_reference(policy, seed, buffered):
    trace = generate(WorkloadSpec("zipf", 60, 4000, 0.7, seed))
    for phe in (1.0, 0.25):
        cfg = RunConfig(policy, CacheConfig(9, 3), buffered=buffered, log_victims=True, per_hit_energy=phe)
        fast = simulate(trace, cfg)
        ref = simulate(trace, cfg, engine="reference")
        assert fast.stats == ref.stats
        assert fast.victim_log == ref.victim_log
        assert fast.final_buffer == ref.final_buffer


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 2**40), min_size=0, max_size=200), st.integers(1, 5), st.integers(0, 3))
def test_kernel_matches_reference_sparse_ids(blocks, cap, bcap):
    # few distinct ids drawn from a huge range
    pool = sorted(set(blocks))[:8] or [0]
    trace = Trace.from_blocks([pool[b % len(pool)] for b in blocks])
    cfg = RunConfig("lwrp", CacheConfig(cap, bcap), log_victims=True)
    fast = simulate(trace, cfg)
    ref = simulate(trace, cfg, engine="reference")
    assert (fast.stats, fast.victim_log, fast.final_buffer) == (ref.stats, ref.victim_log, ref.final_buffer)
