"""Booking-record domain model: SFPG rows, PNR grouping, ingestion, profiling.

The unit record is a single-flight passenger group (SFPG): one flight segment
plus the set of passengers booked together on it.  A booking (PNR) may span
several SFPGs.  Everything downstream consumes a :class:`Dataset`, whose
records are held in one deterministic chronological order.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable


class FormatError(ValueError):
    """An input file violates the expected row format."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


CSV_COLUMNS = (
    "sfpg_id",
    "pnr_id",
    "flight_id",
    "flight_date",
    "origin",
    "destination",
    "passengers",
)


@dataclass(frozen=True, slots=True)
class SfpgRecord:
    """One single-flight passenger group."""

    sfpg_id: str
    pnr_id: str
    flight_id: str
    flight_date: date
    origin: str
    destination: str
    passengers: frozenset[int]

    def sort_key(self) -> tuple[date, str, str]:
        return (self.flight_date, self.flight_id, self.sfpg_id)


@dataclass(frozen=True, slots=True)
class Pnr:
    """A booking: the chronologically ordered SFPGs sharing one pnr_id."""

    pnr_id: str
    sfpg_ids: tuple[str, ...]


@dataclass
class Dataset:
    """Sorted SFPG records plus the PNR grouping derived from them.

    Records are sorted by (flight_date, flight_id, sfpg_id); sfpg_id is unique
    so the order is total and two parses of the same file agree byte for byte
    when re-serialized.
    """

    records: list[SfpgRecord]
    pnr_index: dict[str, Pnr]
    window: tuple[date, date] | None
    duplicates_collapsed: int = 0

    def __len__(self) -> int:
        return len(self.records)


def build_dataset(
    records: Iterable[SfpgRecord],
    duplicates_collapsed: int = 0,
    window: tuple[date, date] | None = None,
) -> Dataset:
    """Validate, sort and index records into a Dataset.

    An explicit ``window`` may only widen the span covered by the data;
    records outside it are an error, matching the invariant that every record
    date falls inside the dataset window.
    """
    recs = sorted(records, key=SfpgRecord.sort_key)
    seen_ids: set[str] = set()
    for rec in recs:
        if rec.sfpg_id in seen_ids:
            raise ValueError(f"duplicate sfpg_id {rec.sfpg_id!r}")
        seen_ids.add(rec.sfpg_id)
        if not rec.passengers:
            raise ValueError(f"sfpg {rec.sfpg_id!r} has no passengers")

    pnr_sfpgs: dict[str, list[str]] = {}
    for rec in recs:
        pnr_sfpgs.setdefault(rec.pnr_id, []).append(rec.sfpg_id)
    pnr_index = {pid: Pnr(pid, tuple(ids)) for pid, ids in pnr_sfpgs.items()}

    if recs:
        data_window = (recs[0].flight_date, max(r.flight_date for r in recs))
        if window is None:
            window = data_window
        elif window[0] > data_window[0] or window[1] < data_window[1]:
            raise ValueError(
                f"window {window} does not cover record dates {data_window}"
            )
    return Dataset(recs, pnr_index, window, duplicates_collapsed)


def merge_datasets(*datasets: Dataset) -> Dataset:
    """Merge independently parsed datasets into one deterministic order.

    Files may be ingested in parallel and merged here; the result is
    identical to parsing the concatenated rows.
    """
    records = [rec for ds in datasets for rec in ds.records]
    dups = sum(ds.duplicates_collapsed for ds in datasets)
    windows = [ds.window for ds in datasets if ds.window is not None]
    window = (
        (min(w[0] for w in windows), max(w[1] for w in windows)) if windows else None
    )
    return build_dataset(records, duplicates_collapsed=dups, window=window)


def _parse_passenger_ids(raw: Iterable, line: int) -> tuple[frozenset[int], int]:
    """Return (unique ids, number of duplicates collapsed)."""
    ids = []
    for item in raw:
        try:
            ids.append(int(item))
        except (TypeError, ValueError):
            raise FormatError(f"bad passenger id {item!r}", line) from None
    if not ids:
        raise FormatError("empty passenger list", line)
    unique = frozenset(ids)
    return unique, len(ids) - len(unique)


def _parse_flight_date(raw: str, line: int) -> date:
    try:
        return date.fromisoformat(raw)
    except (TypeError, ValueError):
        raise FormatError(f"unparseable date {raw!r}", line) from None


def parse_sfpg_file(
    path: str | Path,
    format: str = "csv",
    window: tuple[date, date] | None = None,
) -> Dataset:
    """Load a CSV or JSONL file of SFPG rows into a validated Dataset.

    Duplicate passenger ids within one row are collapsed and tallied on the
    returned Dataset rather than rejected; booking extracts do contain them.
    """
    path = Path(path)
    if format == "csv":
        records, dups = _parse_csv(path)
    elif format == "jsonl":
        records, dups = _parse_jsonl(path)
    else:
        raise ValueError(f"unknown format {format!r}")
    return build_dataset(records, duplicates_collapsed=dups, window=window)


def _parse_csv(path: Path) -> tuple[list[SfpgRecord], int]:
    records: list[SfpgRecord] = []
    dups = 0
    intern = sys.intern
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return [], 0
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise FormatError(f"missing required column(s) {missing}", line=1)
        col = {name: header.index(name) for name in CSV_COLUMNS}
        width = len(header)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise FormatError(
                    f"expected {width} fields, found {len(row)}", lineno
                )
            passengers, d = _parse_passenger_ids(
                row[col["passengers"]].split(";"), lineno
            )
            dups += d
            records.append(
                SfpgRecord(
                    sfpg_id=row[col["sfpg_id"]],
                    pnr_id=row[col["pnr_id"]],
                    flight_id=intern(row[col["flight_id"]]),
                    flight_date=_parse_flight_date(row[col["flight_date"]], lineno),
                    origin=intern(row[col["origin"]]),
                    destination=intern(row[col["destination"]]),
                    passengers=passengers,
                )
            )
    return records, dups


def _parse_jsonl(path: Path) -> tuple[list[SfpgRecord], int]:
    records: list[SfpgRecord] = []
    dups = 0
    intern = sys.intern
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc}", lineno) from None
            missing = [c for c in CSV_COLUMNS if c not in obj]
            if missing:
                raise FormatError(f"missing required field(s) {missing}", lineno)
            raw = obj["passengers"]
            if not isinstance(raw, list):
                raise FormatError("passengers must be an array", lineno)
            passengers, d = _parse_passenger_ids(raw, lineno)
            dups += d
            records.append(
                SfpgRecord(
                    sfpg_id=str(obj["sfpg_id"]),
                    pnr_id=str(obj["pnr_id"]),
                    flight_id=intern(str(obj["flight_id"])),
                    flight_date=_parse_flight_date(str(obj["flight_date"]), lineno),
                    origin=intern(str(obj["origin"])),
                    destination=intern(str(obj["destination"])),
                    passengers=passengers,
                )
            )
    return records, dups


def write_sfpg_file(dataset: Dataset, path: str | Path, format: str = "csv") -> None:
    """Serialize a Dataset back to disk in the ingestion format."""
    path = Path(path)
    if format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for rec in dataset.records:
                writer.writerow(
                    [
                        rec.sfpg_id,
                        rec.pnr_id,
                        rec.flight_id,
                        rec.flight_date.isoformat(),
                        rec.origin,
                        rec.destination,
                        ";".join(str(p) for p in sorted(rec.passengers)),
                    ]
                )
    elif format == "jsonl":
        with open(path, "w") as fh:
            for rec in dataset.records:
                fh.write(
                    json.dumps(
                        {
                            "sfpg_id": rec.sfpg_id,
                            "pnr_id": rec.pnr_id,
                            "flight_id": rec.flight_id,
                            "flight_date": rec.flight_date.isoformat(),
                            "origin": rec.origin,
                            "destination": rec.destination,
                            "passengers": sorted(rec.passengers),
                        }
                    )
                    + "\n"
                )
    else:
        raise ValueError(f"unknown format {format!r}")


@dataclass
class DatasetProfile:
    """Descriptive statistics of group sizes and itinerary lengths."""

    pnr_size_hist: dict[int, int] = field(default_factory=dict)
    sfpg_size_hist: dict[int, int] = field(default_factory=dict)
    segments_small_groups: dict[int, int] = field(default_factory=dict)
    segments_large_groups: dict[int, int] = field(default_factory=dict)
    single_passenger_fraction: float = 0.0
    n_records: int = 0
    n_pnrs: int = 0
    n_passengers: int = 0
    size_split: int = 10

    def to_dict(self) -> dict:
        return {
            "pnr_size_hist": {str(k): v for k, v in sorted(self.pnr_size_hist.items())},
            "sfpg_size_hist": {str(k): v for k, v in sorted(self.sfpg_size_hist.items())},
            "segments_small_groups": {
                str(k): v for k, v in sorted(self.segments_small_groups.items())
            },
            "segments_large_groups": {
                str(k): v for k, v in sorted(self.segments_large_groups.items())
            },
            "single_passenger_fraction": self.single_passenger_fraction,
            "n_records": self.n_records,
            "n_pnrs": self.n_pnrs,
            "n_passengers": self.n_passengers,
            "size_split": self.size_split,
        }


def profile_dataset(dataset: Dataset, size_split: int = 10) -> DatasetProfile:
    """Histogram passengers per PNR/SFPG and segments per PNR.

    Segment counts are stratified by whether the booking's distinct passenger
    count falls below ``size_split`` (the business large-group threshold).
    """
    profile = DatasetProfile(size_split=size_split)
    profile.n_records = len(dataset.records)
    profile.n_pnrs = len(dataset.pnr_index)

    by_id = {rec.sfpg_id: rec for rec in dataset.records}
    all_passengers: set[int] = set()
    singles = 0
    for rec in dataset.records:
        size = len(rec.passengers)
        profile.sfpg_size_hist[size] = profile.sfpg_size_hist.get(size, 0) + 1
        all_passengers.update(rec.passengers)
    for pnr in dataset.pnr_index.values():
        members: set[int] = set()
        for sid in pnr.sfpg_ids:
            members.update(by_id[sid].passengers)
        size = len(members)
        profile.pnr_size_hist[size] = profile.pnr_size_hist.get(size, 0) + 1
        if size == 1:
            singles += 1
        hist = (
            profile.segments_small_groups
            if size < size_split
            else profile.segments_large_groups
        )
        nseg = len(pnr.sfpg_ids)
        hist[nseg] = hist.get(nseg, 0) + 1
    profile.n_passengers = len(all_passengers)
    if profile.n_pnrs:
        profile.single_passenger_fraction = singles / profile.n_pnrs
    return profile
