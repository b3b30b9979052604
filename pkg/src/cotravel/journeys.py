"""Per-pair segmentation of booking streams into complete co-journeys.

For every unordered passenger pair, the chronological stream of SFPGs that
contain both passengers is cut into *co-journey events*: maximal runs of
segments belonging to one shared trip.  A journey opened by a small group
closes when the pair flies back to the journey's starting airport, or goes
stale once too much time has passed since the journey began.  A journey
opened by a large group additionally tolerates intermediate segments as long
as the surrounding passenger group stays recognisably the same (organized
groups have low flexibility, so a quick group switch still belongs to the
same trip).

The interval cutoffs are timeouts for abandoning open journeys, not a limit
on how often journeys may occur: a returned journey closes immediately and a
new one may start the next day.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Iterator

from .records import Dataset, SfpgRecord

# Pair phases.
OUTSIDE = "outside"
IN_SMALL = "in_small_group"
IN_LARGE = "in_large_group"

# Journey types (standard airline jargon: small/large passenger group).
SPG = "SPG"
LPG = "LPG"

# Why a journey event closed.
CLOSED_RETURN = "return"
CLOSED_TIMEOUT = "timeout"
CLOSED_WINDOW_END = "window_end"

# Tallying states for the second-stage counter (see ties.py).
JNY_NULL = "null"
JNY_ONE_LARGE = "one_large"
JNY_COUNTING = "counting"

#: Journey staleness cutoffs in days for small groups, by group size.
#: Endpoints follow observed round-trip duration variance (small parties are
#: more flexible travellers); interior sizes are linearly interpolated.
DEFAULT_SMALL_GROUP_INTERVALS = {2: 22, 3: 21, 4: 20, 5: 19, 6: 19, 7: 18, 8: 17, 9: 16}

DEFAULT_GROUP_SIZE_CAP = 500


class GroupSizeError(ValueError):
    """An SFPG or flight manifest exceeds the pair-explosion cap."""


@dataclass
class Thresholds:
    """Cutoffs steering journey discovery.

    t_size: group sizes at or above this count as large groups (the group
        discount threshold in Chinese civil aviation is 10).
    t_overlap: minimum Jaccard similarity between consecutive segments for a
        large group to count as unchanged.
    t_interval_lpg: staleness cutoff in days for large-group journeys.
    t_interval_spg: staleness cutoff per small-group size (2..t_size-1).
    """

    t_size: int = 10
    t_overlap: float = 0.7
    t_interval_lpg: int = 15
    t_interval_spg: dict[int, int] = field(
        default_factory=lambda: dict(DEFAULT_SMALL_GROUP_INTERVALS)
    )

    def __post_init__(self):
        if self.t_size < 2:
            raise ValueError("t_size must be at least 2")
        if not 0 < self.t_overlap <= 1:
            raise ValueError("t_overlap must be in (0, 1]")
        if self.t_interval_lpg < 1:
            raise ValueError("t_interval_lpg must be at least 1 day")
        for size in range(2, self.t_size):
            if size not in self.t_interval_spg:
                raise ValueError(f"t_interval_spg missing an entry for size {size}")
        for size, days in self.t_interval_spg.items():
            if days < 1:
                raise ValueError(f"t_interval_spg[{size}] must be at least 1 day")


DEFAULT_THRESHOLDS = Thresholds()


@dataclass
class OpenJourney:
    """A journey currently being assembled for one pair."""

    start_date: date
    origin: str
    journey_type: str
    sfpg_ids: list[str]
    last_passengers: frozenset[int]
    last_date: date


@dataclass(frozen=True)
class CoJourneyEvent:
    """One complete co-journey between a pair of passengers."""

    pair: tuple[int, int]
    journey_type: str
    sfpg_ids: tuple[str, ...]
    start_date: date
    end_date: date
    closed_by: str

    def to_json_obj(self) -> dict:
        return {
            "pair_u": self.pair[0],
            "pair_v": self.pair[1],
            "type": self.journey_type,
            "closed_by": self.closed_by,
            "start_date": self.start_date.isoformat(),
            "end_date": self.end_date.isoformat(),
            "sfpg_ids": list(self.sfpg_ids),
        }


@dataclass
class PairState:
    """Everything tracked per unordered passenger pair.

    Journey discovery owns ``phase``/``open_journey``; the counters are
    maintained by the second stage (ties.py).  Outside a journey the state
    carries only counters, which bounds memory on long streams.
    """

    pair: tuple[int, int]
    phase: str = OUTSIDE
    open_journey: OpenJourney | None = None
    co_sfpg: int = 0
    co_pnr: int = 0
    seen_pnrs: set[str] = field(default_factory=set)
    co_jny: int = 0
    jny_state: str = JNY_NULL


def jaccard(a: frozenset[int], b: frozenset[int]) -> float:
    inter = len(a & b)
    if inter == 0:
        return 0.0
    return inter / (len(a) + len(b) - inter)


def is_large_group(rec: SfpgRecord, th: Thresholds) -> bool:
    return len(rec.passengers) >= th.t_size


def groups_overlap(rec: SfpgRecord, prev_passengers: frozenset[int], th: Thresholds) -> bool:
    """True when the segment's group is essentially the previous one."""
    return jaccard(rec.passengers, prev_passengers) >= th.t_overlap


def applicable_interval(rec: SfpgRecord, th: Thresholds) -> int:
    """Staleness cutoff in days, chosen by the size of the incoming segment."""
    size = len(rec.passengers)
    if size >= th.t_size:
        return th.t_interval_lpg
    try:
        return th.t_interval_spg[size]
    except KeyError:
        raise ValueError(f"no small-group interval configured for size {size}") from None


def journey_timed_out(rec: SfpgRecord, journey: OpenJourney, th: Thresholds) -> bool:
    """True when the segment arrives too long after the journey began."""
    return (rec.flight_date - journey.start_date).days >= applicable_interval(rec, th)


def returned_to_origin(rec: SfpgRecord, journey: OpenJourney) -> bool:
    return rec.destination == journey.origin


def _open_journey(state: PairState, rec: SfpgRecord, th: Thresholds) -> None:
    # The opening segment is merged unconditionally; a same-airport segment
    # never closes the journey it just started.
    jtype = LPG if is_large_group(rec, th) else SPG
    state.open_journey = OpenJourney(
        start_date=rec.flight_date,
        origin=rec.origin,
        journey_type=jtype,
        sfpg_ids=[rec.sfpg_id],
        last_passengers=rec.passengers,
        last_date=rec.flight_date,
    )
    state.phase = IN_LARGE if jtype == LPG else IN_SMALL


def _merge(journey: OpenJourney, rec: SfpgRecord) -> None:
    journey.sfpg_ids.append(rec.sfpg_id)
    journey.last_passengers = rec.passengers
    journey.last_date = rec.flight_date


def _close(state: PairState, closed_by: str) -> CoJourneyEvent:
    j = state.open_journey
    event = CoJourneyEvent(
        pair=state.pair,
        journey_type=j.journey_type,
        sfpg_ids=tuple(j.sfpg_ids),
        start_date=j.start_date,
        end_date=j.last_date,
        closed_by=closed_by,
    )
    state.open_journey = None
    state.phase = OUTSIDE
    return event


def step_pair(state: PairState, rec: SfpgRecord, th: Thresholds) -> list[CoJourneyEvent]:
    """Advance one pair's machine by one segment containing both passengers.

    Mutates ``state`` and returns the journey events the segment closed (at
    most one).  A stale journey closes *without* the incoming segment, which
    then immediately opens a fresh journey.
    """
    j = state.open_journey
    if j is None:
        _open_journey(state, rec, th)
        return []

    if j.journey_type == SPG:
        if journey_timed_out(rec, j, th):
            event = _close(state, CLOSED_TIMEOUT)
            _open_journey(state, rec, th)
            return [event]
        _merge(j, rec)
        if returned_to_origin(rec, j):
            return [_close(state, CLOSED_RETURN)]
        return []

    # Large-group journey: a return closes it even if stale; an unchanged
    # group, or a quick group switch, continues the same trip.
    if returned_to_origin(rec, j):
        _merge(j, rec)
        return [_close(state, CLOSED_RETURN)]
    if groups_overlap(rec, j.last_passengers, th):
        _merge(j, rec)
        return []
    if not journey_timed_out(rec, j, th):
        _merge(j, rec)
        return []
    event = _close(state, CLOSED_TIMEOUT)
    _open_journey(state, rec, th)
    return [event]


def flush_pair(state: PairState) -> list[CoJourneyEvent]:
    """Close an open journey at the end of the observation window."""
    if state.open_journey is None:
        return []
    return [_close(state, CLOSED_WINDOW_END)]


def record_pairs(rec: SfpgRecord, cap: int = DEFAULT_GROUP_SIZE_CAP) -> Iterator[tuple[int, int]]:
    """All unordered passenger pairs of a record, guarded against blowup."""
    size = len(rec.passengers)
    if size > cap:
        raise GroupSizeError(
            f"sfpg {rec.sfpg_id!r} has {size} passengers, above the cap of {cap}"
        )
    return itertools.combinations(sorted(rec.passengers), 2)


class JourneyTracker:
    """Incremental journey discovery over a chronological record stream.

    State persists between :meth:`feed` calls, so a dataset may be processed
    in date-ordered chunks; journeys still open at the very end are closed by
    :meth:`flush`.  ``shard`` optionally restricts processing to the pairs of
    one hash partition.
    """

    def __init__(
        self,
        thresholds: Thresholds | None = None,
        max_group_size: int = DEFAULT_GROUP_SIZE_CAP,
        shard: tuple[int, int] | None = None,
    ):
        self.thresholds = thresholds if thresholds is not None else DEFAULT_THRESHOLDS
        self.max_group_size = max_group_size
        self.shard = shard
        self.states: dict[tuple[int, int], PairState] = {}

    def feed(self, records: Iterable[SfpgRecord]) -> list[CoJourneyEvent]:
        events: list[CoJourneyEvent] = []
        th = self.thresholds
        states = self.states
        shard = self.shard
        for rec in records:
            if len(rec.passengers) < 2:
                continue
            for pair in record_pairs(rec, self.max_group_size):
                if shard is not None and pair_shard(pair, shard[1]) != shard[0]:
                    continue
                state = states.get(pair)
                if state is None:
                    state = states[pair] = PairState(pair)
                events.extend(step_pair(state, rec, th))
        return events

    def flush(self) -> list[CoJourneyEvent]:
        events: list[CoJourneyEvent] = []
        for pair in sorted(self.states):
            events.extend(flush_pair(self.states[pair]))
        return events


def pair_shard(pair: tuple[int, int], n_shards: int) -> int:
    """Deterministic shard assignment, identical across engine backends."""
    u, v = pair
    return ((u * 2654435761 + v) & 0xFFFFFFFFFFFFFFFF) % n_shards


def discover_cojourneys(
    dataset: Dataset,
    thresholds: Thresholds | None = None,
    max_group_size: int = DEFAULT_GROUP_SIZE_CAP,
    shard: tuple[int, int] | None = None,
) -> Iterator[CoJourneyEvent]:
    """Yield every pair's co-journey events over the whole dataset.

    Events come out in processing order, which is chronological for each
    pair; open journeys at the window end are emitted last, closed with
    ``window_end``.
    """
    tracker = JourneyTracker(thresholds, max_group_size, shard)
    for rec in dataset.records:
        yield from tracker.feed((rec,))
    yield from tracker.flush()


def collect_cojourneys(
    dataset: Dataset,
    thresholds: Thresholds | None = None,
    max_group_size: int = DEFAULT_GROUP_SIZE_CAP,
) -> dict[tuple[int, int], list[CoJourneyEvent]]:
    """Group the discovered events by pair."""
    by_pair: dict[tuple[int, int], list[CoJourneyEvent]] = {}
    for event in discover_cojourneys(dataset, thresholds, max_group_size):
        by_pair.setdefault(event.pair, []).append(event)
    return by_pair


def write_events_jsonl(events: Iterable[CoJourneyEvent], path) -> None:
    import json

    with open(path, "w") as fh:
        for event in events:
            fh.write(json.dumps(event.to_json_obj()) + "\n")
