"""Ingestion, validation, ordering, and profiling."""

import random
from datetime import date

import pytest

from conftest import random_records
from cotravel.records import (
    FormatError,
    SfpgRecord,
    build_dataset,
    merge_datasets,
    parse_sfpg_file,
    profile_dataset,
    write_sfpg_file,
)

CSV_HEADER = "sfpg_id,pnr_id,flight_id,flight_date,origin,destination,passengers\n"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parse_minimal_csv(tmp_path):
    path = write(
        tmp_path,
        "mini.csv",
        CSV_HEADER + "s1,p1,F100,2012-05-01,PEK,SHA,7;9\n",
    )
    ds = parse_sfpg_file(path)
    assert len(ds.records) == 1
    rec = ds.records[0]
    assert rec.passengers == frozenset({7, 9})
    assert rec.flight_date == date(2012, 5, 1)
    assert ds.window == (date(2012, 5, 1), date(2012, 5, 1))
    assert ds.pnr_index["p1"].sfpg_ids == ("s1",)


def test_parse_empty_file(tmp_path):
    path = write(tmp_path, "empty.csv", "")
    ds = parse_sfpg_file(path)
    assert ds.records == []
    assert ds.window is None


def test_parse_jsonl(tmp_path):
    path = write(
        tmp_path,
        "rows.jsonl",
        '{"sfpg_id": "s1", "pnr_id": "p1", "flight_id": "F1", '
        '"flight_date": "2012-02-03", "origin": "A", "destination": "B", '
        '"passengers": [3, 4, 3]}\n',
    )
    ds = parse_sfpg_file(path, format="jsonl")
    assert ds.records[0].passengers == frozenset({3, 4})
    assert ds.duplicates_collapsed == 1


def test_out_of_order_rows_are_sorted(tmp_path):
    rng = random.Random(5)
    records = random_records(rng, 10)
    shuffled = records[:]
    rng.shuffle(shuffled)
    lines = [CSV_HEADER]
    for rec in shuffled:
        passengers = ";".join(str(p) for p in sorted(rec.passengers))
        lines.append(
            f"{rec.sfpg_id},{rec.pnr_id},{rec.flight_id},{rec.flight_date},"
            f"{rec.origin},{rec.destination},{passengers}\n"
        )
    path = write(tmp_path, "shuffled.csv", "".join(lines))
    ds = parse_sfpg_file(path)
    expected = sorted(records, key=lambda r: (r.flight_date, r.flight_id, r.sfpg_id))
    assert [r.sfpg_id for r in ds.records] == [r.sfpg_id for r in expected]


def test_reparse_is_byte_identical(tmp_path):
    rng = random.Random(11)
    ds = build_dataset(random_records(rng, 60))
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    write_sfpg_file(ds, first)
    write_sfpg_file(parse_sfpg_file(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_jsonl_roundtrip(tmp_path):
    rng = random.Random(12)
    ds = build_dataset(random_records(rng, 30))
    path = tmp_path / "ds.jsonl"
    write_sfpg_file(ds, path, format="jsonl")
    again = parse_sfpg_file(path, format="jsonl")
    assert again.records == ds.records


@pytest.mark.parametrize(
    "row,fragment",
    [
        ("s1,p1,F1,2012-13-40,A,B,1;2", "date"),
        ("s1,p1,F1,2012-01-01,A,B,", "passenger"),
        ("s1,p1,F1,2012-01-01,A,B,1;x", "passenger"),
        ("s1,p1,F1,2012-01-01,A,B", "fields"),
    ],
)
def test_malformed_rows_report_line(tmp_path, row, fragment):
    path = write(tmp_path, "bad.csv", CSV_HEADER + row + "\n")
    with pytest.raises(FormatError, match="line 2"):
        parse_sfpg_file(path)


def test_missing_column(tmp_path):
    path = write(tmp_path, "cols.csv", "sfpg_id,pnr_id\ns1,p1\n")
    with pytest.raises(FormatError, match="missing"):
        parse_sfpg_file(path)


def test_duplicate_sfpg_id_rejected(tmp_path):
    body = CSV_HEADER + "s1,p1,F1,2012-01-01,A,B,1;2\ns1,p2,F2,2012-01-02,A,B,3;4\n"
    with pytest.raises(ValueError, match="duplicate sfpg_id"):
        parse_sfpg_file(write(tmp_path, "dup.csv", body))


def test_window_override_must_cover_data(tmp_path):
    path = write(tmp_path, "w.csv", CSV_HEADER + "s1,p1,F1,2012-06-01,A,B,1;2\n")
    wide = parse_sfpg_file(path, window=(date(2012, 1, 1), date(2012, 12, 31)))
    assert wide.window == (date(2012, 1, 1), date(2012, 12, 31))
    with pytest.raises(ValueError, match="window"):
        parse_sfpg_file(path, window=(date(2012, 6, 2), date(2012, 12, 31)))


def test_merge_equals_single_parse(tmp_path):
    rng = random.Random(29)
    records = random_records(rng, 90)
    whole = build_dataset(records)
    parts = [build_dataset(records[i::3]) for i in range(3)]
    merged = merge_datasets(*parts)
    assert merged.records == whole.records
    assert merged.window == whole.window
    assert merged.pnr_index == whole.pnr_index
    assert merge_datasets(build_dataset([])).records == []


def test_pnr_index_consistency():
    rng = random.Random(3)
    ds = build_dataset(random_records(rng, 80))
    by_id = {r.sfpg_id: r for r in ds.records}
    for pnr_id, pnr in ds.pnr_index.items():
        for sid in pnr.sfpg_ids:
            assert by_id[sid].pnr_id == pnr_id
    assert sum(len(p.sfpg_ids) for p in ds.pnr_index.values()) == len(ds.records)


def test_profile_single_passenger_fraction_trivial():
    rec = SfpgRecord("s1", "p1", "F1", date(2012, 1, 1), "A", "B", frozenset({5}))
    profile = profile_dataset(build_dataset([rec]))
    assert profile.single_passenger_fraction == 1.0
    assert profile.pnr_size_hist == {1: 1}


def test_profile_two_pnrs():
    recs = [
        SfpgRecord("s1", "p1", "F1", date(2012, 1, 1), "A", "B", frozenset({5})),
        SfpgRecord("s2", "p2", "F2", date(2012, 1, 2), "A", "B", frozenset({1, 2, 3})),
    ]
    profile = profile_dataset(build_dataset(recs))
    assert profile.single_passenger_fraction == 0.5
    assert profile.pnr_size_hist == {1: 1, 3: 1}
    assert profile.sfpg_size_hist == {1: 1, 3: 1}


def test_profile_hist_total_matches_pnr_count():
    rng = random.Random(9)
    ds = build_dataset(random_records(rng, 120))
    profile = profile_dataset(ds)
    assert sum(profile.pnr_size_hist.values()) == len(ds.pnr_index)
    assert sum(profile.sfpg_size_hist.values()) == len(ds.records)
    assert (
        sum(profile.segments_small_groups.values())
        + sum(profile.segments_large_groups.values())
        == len(ds.pnr_index)
    )


def test_profile_synthetic_matches_configured_fraction(default_synth):
    cfg, dataset, _ = default_synth
    profile = profile_dataset(dataset)
    # sampling error plus the injected noise PNRs shift it slightly
    assert abs(profile.single_passenger_fraction - cfg.single_pnr_fraction) < 0.02
