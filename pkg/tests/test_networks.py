"""Threshold networks and the co-flight baseline."""

import random
from datetime import date, timedelta

import pytest

from conftest import random_dataset
from cotravel.networks import (
    CO_FLIGHT,
    CO_JNY,
    CO_PNR,
    CO_SFPG,
    build_network,
    co_flight_baseline,
    sweep,
    write_edge_file,
)
from cotravel.journeys import GroupSizeError
from cotravel.records import SfpgRecord, build_dataset
from cotravel.ties import ACTIVE, PASSIVE, TieRecord, count_ties

D0 = date(2012, 4, 1)


def tie(u, v, co_sfpg=1, co_pnr=1, co_jny=0):
    label = ACTIVE if co_jny else PASSIVE
    return TieRecord(u, v, co_sfpg, co_pnr, co_jny, label)


def test_no_filtering_at_zero_journeys():
    ties = [tie(1, 2, co_jny=0), tie(2, 3, co_jny=2)]
    net = build_network(ties, CO_JNY, 0)
    assert net.edge_count == 2


def test_journey_threshold_one_drops_passive():
    ties = [tie(1, 2, co_jny=0), tie(2, 3, co_jny=2)]
    net = build_network(ties, CO_JNY, 1)
    assert set(net.edges) == {(2, 3)}
    assert set(net.nodes) == {2, 3}


def test_unfiltered_edge_counts_agree():
    rng = random.Random(31)
    ties = count_ties(random_dataset(rng, 150))
    assert (
        build_network(ties, CO_SFPG, 1).edge_count
        == build_network(ties, CO_PNR, 1).edge_count
        == build_network(ties, CO_JNY, 0).edge_count
    )


def test_tau_bounds():
    with pytest.raises(ValueError):
        build_network([], CO_SFPG, 0)
    with pytest.raises(ValueError):
        build_network([], CO_JNY, -1)
    with pytest.raises(ValueError):
        build_network([], "degree", 1)


def test_nesting():
    rng = random.Random(37)
    ties = count_ties(random_dataset(rng, 200))
    for measure in (CO_SFPG, CO_PNR, CO_JNY):
        prev = None
        for tau in range(1, 8):
            edges = set(build_network(ties, measure, tau).edges)
            if prev is not None:
                assert edges <= prev
            prev = edges


def test_sweep_single_and_monotone():
    rng = random.Random(41)
    ties = count_ties(random_dataset(rng, 200))
    single = sweep(ties, CO_SFPG, [3])
    net = build_network(ties, CO_SFPG, 3)
    assert single == [{"tau": 3, "nodes": net.node_count, "edges": net.edge_count}]
    curve = sweep(ties, CO_SFPG, range(1, 16))
    for a, b in zip(curve, curve[1:]):
        assert b["nodes"] <= a["nodes"] and b["edges"] <= a["edges"]
    with pytest.raises(ValueError):
        sweep(ties, CO_SFPG, [])


def rec(sfpg_id, pnr_id, flight_id, day, passengers):
    return SfpgRecord(
        sfpg_id=sfpg_id,
        pnr_id=pnr_id,
        flight_id=flight_id,
        flight_date=D0 + timedelta(days=day),
        origin="A",
        destination="B",
        passengers=frozenset(passengers),
    )


class TestCoFlightBaseline:
    def test_single_shared_flight(self):
        ds = build_dataset([rec("s1", "p1", "F1", 0, [1, 2])])
        net = co_flight_baseline(ds, t=0)
        assert set(net.edges) == {(1, 2)}

    def test_strict_threshold(self):
        records = [rec(f"s{i}", f"p{i}", f"F{i}", i, [1, 2]) for i in range(4)]
        ds = build_dataset(records)
        assert co_flight_baseline(ds, t=3).edge_count == 1
        assert co_flight_baseline(ds, t=4).edge_count == 0

    def test_strangers_on_same_flight_join_baseline_only(self):
        # two solo bookings on one flight: a baseline edge but no booking tie
        ds = build_dataset(
            [
                rec("s1", "p1", "F9", 0, [1]),
                rec("s2", "p2", "F9", 0, [2]),
            ]
        )
        assert set(co_flight_baseline(ds, t=0).edges) == {(1, 2)}
        assert count_ties(ds) == []

    def test_booking_ties_are_subset_of_baseline(self):
        rng = random.Random(43)
        ds = random_dataset(rng, 120)
        baseline = set(co_flight_baseline(ds, t=0).edges)
        booked = {t.pair for t in count_ties(ds)}
        assert booked <= baseline

    def test_manifest_cap(self):
        ds = build_dataset(
            [rec("s1", "p1", "F1", 0, range(30)), rec("s2", "p2", "F1", 0, range(30, 60))]
        )
        with pytest.raises(GroupSizeError):
            co_flight_baseline(ds, t=0, max_manifest_size=50)
        assert co_flight_baseline(ds, t=0, max_manifest_size=60).measure == CO_FLIGHT


def test_edge_file(tmp_path):
    net = build_network([tie(5, 9, co_sfpg=4), tie(1, 2, co_sfpg=2)], CO_SFPG, 1)
    path = tmp_path / "edges.csv"
    write_edge_file(net, path)
    assert path.read_text() == "u,v,weight\n1,2,2\n5,9,4\n"
