"""Tie-strength counting and labeling.

Three strengths are kept per pair: how many segments they shared (co_sfpg),
how many bookings (co_pnr), and how many complete journeys (co_jny).  Journey
counting treats the first journey cautiously: a lone large-group journey is
no evidence of acquaintance (tour buses are full of strangers), so it parks
the pair in an undecided state; any further journey retroactively confirms
the pair and counts the parked journey too.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .journeys import (
    DEFAULT_GROUP_SIZE_CAP,
    JNY_COUNTING,
    JNY_NULL,
    JNY_ONE_LARGE,
    LPG,
    CoJourneyEvent,
    PairState,
    Thresholds,
    flush_pair,
    pair_shard,
    record_pairs,
    step_pair,
)
from .records import Dataset, SfpgRecord

ACTIVE = "active"
PASSIVE = "passive"

TIE_COLUMNS = ("u", "v", "co_sfpg", "co_pnr", "co_jny", "label")


@dataclass(frozen=True, slots=True)
class TieRecord:
    """Final edge between two passengers, u < v numerically."""

    u: int
    v: int
    co_sfpg: int
    co_pnr: int
    co_jny: int
    label: str

    @property
    def pair(self) -> tuple[int, int]:
        return (self.u, self.v)


def count_simple(state: PairState, rec: SfpgRecord) -> PairState:
    """Bump the segment count, and the booking count on a new pnr_id."""
    state.co_sfpg += 1
    if rec.pnr_id not in state.seen_pnrs:
        state.seen_pnrs.add(rec.pnr_id)
        state.co_pnr += 1
    return state


def count_cojourney(state: PairState, event: CoJourneyEvent) -> PairState:
    """Fold one closed journey event into the pair's journey count."""
    if state.jny_state == JNY_NULL:
        if event.journey_type == LPG:
            state.jny_state = JNY_ONE_LARGE
        else:
            state.jny_state = JNY_COUNTING
            state.co_jny = 1
    elif state.jny_state == JNY_ONE_LARGE:
        # The parked large-group journey is confirmed retroactively.
        state.jny_state = JNY_COUNTING
        state.co_jny = 2
    else:
        state.co_jny += 1
    return state


def jny_state_label(state: PairState) -> str:
    """Human-readable journey-count bucket: null / j0 / j1 / j2 / jmore."""
    if state.jny_state == JNY_NULL:
        return "null"
    if state.jny_state == JNY_ONE_LARGE:
        return "j0"
    if state.co_jny == 1:
        return "j1"
    if state.co_jny == 2:
        return "j2"
    return "jmore"


def label_tie(state: PairState) -> TieRecord:
    """Produce the final edge record with its active/passive label."""
    if state.co_sfpg > 0 and state.jny_state == JNY_NULL:
        # Every co-segment belongs to some journey, so a counted pair without
        # any journey event means a stage was skipped.
        raise RuntimeError(f"pair {state.pair} counted but saw no journey event")
    label = ACTIVE if state.co_jny >= 1 else PASSIVE
    u, v = state.pair
    return TieRecord(u, v, state.co_sfpg, state.co_pnr, state.co_jny, label)


def count_ties(
    dataset: Dataset,
    thresholds: Thresholds | None = None,
    max_group_size: int = DEFAULT_GROUP_SIZE_CAP,
    shard: tuple[int, int] | None = None,
) -> list[TieRecord]:
    """Pure-Python reference pipeline: records in, labeled ties out.

    Runs journey discovery and both counters in a single pass.  The compiled
    kernel (see infer.py) must match this function's output exactly.
    """
    th = thresholds if thresholds is not None else Thresholds()
    states: dict[tuple[int, int], PairState] = {}
    for rec in dataset.records:
        if len(rec.passengers) < 2:
            continue
        for pair in record_pairs(rec, max_group_size):
            if shard is not None and pair_shard(pair, shard[1]) != shard[0]:
                continue
            state = states.get(pair)
            if state is None:
                state = states[pair] = PairState(pair)
            count_simple(state, rec)
            for event in step_pair(state, rec, th):
                count_cojourney(state, event)
    ties = []
    for pair in sorted(states):
        state = states[pair]
        for event in flush_pair(state):
            count_cojourney(state, event)
        ties.append(label_tie(state))
    return ties


def write_tie_file(ties: Iterable[TieRecord], path: str | Path) -> None:
    """Canonical interchange file: one row per pair, sorted by (u, v)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIE_COLUMNS)
        for tie in sorted(ties, key=lambda t: (t.u, t.v)):
            writer.writerow([tie.u, tie.v, tie.co_sfpg, tie.co_pnr, tie.co_jny, tie.label])


def read_tie_file(path: str | Path) -> list[TieRecord]:
    ties = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in TIE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"tie file missing column(s) {missing}")
        for row in reader:
            ties.append(
                TieRecord(
                    u=int(row["u"]),
                    v=int(row["v"]),
                    co_sfpg=int(row["co_sfpg"]),
                    co_pnr=int(row["co_pnr"]),
                    co_jny=int(row["co_jny"]),
                    label=row["label"],
                )
            )
    return ties
