# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop for pairwise tie counting over packed record arrays.

Mirrors ties.count_ties branch for branch; the pure-Python pipeline stays
the behavioural reference and the equivalence is enforced by tests.
"""

import numpy as np

from cython.operator cimport dereference, preincrement
from libc.stdint cimport int32_t, int64_t, uint8_t, uint32_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cdef extern from *:
    """
    #include <cstdint>
    #include <vector>
    struct PairSlot {
        uint8_t phase = 0;        // 0 outside, 1 small-group journey, 2 large-group journey
        uint8_t tally = 0;        // 0 no journey yet, 1 lone large journey, 2 counting
        int32_t j_start = 0;      // day the open journey began
        int32_t j_origin = -1;    // airport index of the opening segment
        int64_t j_last = -1;      // record index of the last merged segment
        uint32_t co_sfpg = 0;
        uint32_t co_pnr = 0;
        uint32_t co_jny = 0;
        std::vector<int32_t> pnrs;
    };
    """
    cdef cppclass PairSlot:
        uint8_t phase
        uint8_t tally
        int32_t j_start
        int32_t j_origin
        int64_t j_last
        uint32_t co_sfpg
        uint32_t co_pnr
        uint32_t co_jny
        vector[int32_t] pnrs


cdef inline void _count_event(PairSlot* slot, uint8_t journey_phase) noexcept nogil:
    # journey_phase: 1 = small-group journey, 2 = large-group journey.
    if slot.tally == 0:
        if journey_phase == 2:
            slot.tally = 1
        else:
            slot.tally = 2
            slot.co_jny = 1
    elif slot.tally == 1:
        slot.tally = 2
        slot.co_jny = 2
    else:
        slot.co_jny += 1


cdef inline void _open_journey(PairSlot* slot, uint8_t is_large, int32_t day,
                               int32_t origin, int64_t rec_idx) noexcept nogil:
    slot.phase = 2 if is_large else 1
    slot.j_start = day
    slot.j_origin = origin
    slot.j_last = rec_idx


cdef inline uint64_t _shard_hash(int64_t u, int64_t v) noexcept nogil:
    return (<uint64_t>u) * <uint64_t>2654435761u + <uint64_t>v


cdef double _jaccard(const int32_t* flat, const int64_t* offsets,
                     int64_t ra, int64_t rb) noexcept nogil:
    # Passenger slices are sorted ascending at pack time.
    cdef int64_t a = offsets[ra], a_end = offsets[ra + 1]
    cdef int64_t b = offsets[rb], b_end = offsets[rb + 1]
    cdef int64_t inter = 0
    cdef int64_t na = a_end - a, nb = b_end - b
    while a < a_end and b < b_end:
        if flat[a] == flat[b]:
            inter += 1
            a += 1
            b += 1
        elif flat[a] < flat[b]:
            a += 1
        else:
            b += 1
    return <double>inter / <double>(na + nb - inter)


def count_pairs(int32_t[::1] dates, int32_t[::1] origins, int32_t[::1] dests,
                int32_t[::1] pnr_ids, uint8_t[::1] is_large, int32_t[::1] intervals,
                int64_t[::1] offsets, int32_t[::1] flat, int64_t[::1] real_ids,
                double t_overlap, int shard_id=0, int n_shards=1):
    """Run the full two-stage machine over packed records.

    Returns parallel arrays (u, v, co_sfpg, co_pnr, co_jny) with u < v by
    external id, unsorted.  ``real_ids`` maps dense passenger index back to
    external id and drives the shard hash, so partitions agree with the
    Python engine.
    """
    cdef unordered_map[uint64_t, PairSlot] pairs
    cdef unordered_map[int64_t, double] overlap_memo
    cdef PairSlot* slot
    cdef int64_t n = dates.shape[0]
    cdef int64_t r, lo, hi, a, b
    cdef int32_t day, org, dst, pnr, t_int
    cdef uint8_t large
    cdef uint32_t ua, vb
    cdef uint64_t key
    cdef double ov
    cdef bint found, sharded = n_shards > 1
    cdef size_t npnr, i

    with nogil:
        for r in range(n):
            lo = offsets[r]
            hi = offsets[r + 1]
            if hi - lo < 2:
                continue
            day = dates[r]
            org = origins[r]
            dst = dests[r]
            pnr = pnr_ids[r]
            large = is_large[r]
            t_int = intervals[r]
            overlap_memo.clear()
            for a in range(lo, hi - 1):
                ua = <uint32_t>flat[a]
                for b in range(a + 1, hi):
                    vb = <uint32_t>flat[b]
                    if sharded:
                        if _shard_hash(real_ids[ua], real_ids[vb]) % <uint64_t>n_shards != <uint64_t>shard_id:
                            continue
                    key = (<uint64_t>ua << 32) | <uint64_t>vb
                    slot = &pairs[key]

                    # Simple counters.
                    slot.co_sfpg += 1
                    found = False
                    npnr = slot.pnrs.size()
                    for i in range(npnr):
                        if slot.pnrs[i] == pnr:
                            found = True
                            break
                    if not found:
                        slot.pnrs.push_back(pnr)
                        slot.co_pnr += 1

                    # Journey machine.
                    if slot.phase == 0:
                        _open_journey(slot, large, day, org, r)
                    elif slot.phase == 1:
                        if day - slot.j_start >= t_int:
                            # Stale: close without this segment, then reopen.
                            _count_event(slot, 1)
                            _open_journey(slot, large, day, org, r)
                        else:
                            slot.j_last = r
                            if dst == slot.j_origin:
                                _count_event(slot, 1)
                                slot.phase = 0
                    else:
                        if dst == slot.j_origin:
                            slot.j_last = r
                            _count_event(slot, 2)
                            slot.phase = 0
                        else:
                            if overlap_memo.count(slot.j_last):
                                ov = overlap_memo[slot.j_last]
                            else:
                                ov = _jaccard(&flat[0], &offsets[0], slot.j_last, r)
                                overlap_memo[slot.j_last] = ov
                            if ov >= t_overlap:
                                slot.j_last = r
                            elif day - slot.j_start < t_int:
                                slot.j_last = r
                            else:
                                _count_event(slot, 2)
                                _open_journey(slot, large, day, org, r)

    # Window end: close whatever is still open, then export.
    cdef int64_t n_pairs = <int64_t>pairs.size()
    out_u = np.empty(n_pairs, dtype=np.int64)
    out_v = np.empty(n_pairs, dtype=np.int64)
    out_sfpg = np.empty(n_pairs, dtype=np.uint32)
    out_pnr = np.empty(n_pairs, dtype=np.uint32)
    out_jny = np.empty(n_pairs, dtype=np.uint32)
    cdef int64_t[::1] mu = out_u
    cdef int64_t[::1] mv = out_v
    cdef uint32_t[::1] ms = out_sfpg
    cdef uint32_t[::1] mp = out_pnr
    cdef uint32_t[::1] mj = out_jny

    cdef int64_t written = 0
    cdef int64_t ru, rv, tmp
    cdef unordered_map[uint64_t, PairSlot].iterator it = pairs.begin()
    while it != pairs.end():
        slot = &dereference(it).second
        if slot.phase != 0:
            _count_event(slot, slot.phase)
        key = dereference(it).first
        ru = real_ids[<uint32_t>(key >> 32)]
        rv = real_ids[<uint32_t>(key & <uint64_t>0xFFFFFFFF)]
        if ru > rv:
            tmp = ru
            ru = rv
            rv = tmp
        mu[written] = ru
        mv[written] = rv
        ms[written] = slot.co_sfpg
        mp[written] = slot.co_pnr
        mj[written] = slot.co_jny
        written += 1
        preincrement(it)
    return out_u, out_v, out_sfpg, out_pnr, out_jny
