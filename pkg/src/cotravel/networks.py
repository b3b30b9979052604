"""Threshold networks over tie records, plus the naive co-flight baseline."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .journeys import DEFAULT_GROUP_SIZE_CAP, GroupSizeError
from .records import Dataset
from .ties import TieRecord

CO_SFPG = "cosfpg"
CO_PNR = "copnr"
CO_JNY = "cojny"
CO_FLIGHT = "coflight"

TIE_MEASURES = (CO_SFPG, CO_PNR, CO_JNY)
MEASURES = TIE_MEASURES + (CO_FLIGHT,)

_FIELD = {CO_SFPG: "co_sfpg", CO_PNR: "co_pnr", CO_JNY: "co_jny"}


def min_tau(measure: str) -> int:
    """Lowest meaningful threshold: 0 only for journey counts."""
    return 0 if measure == CO_JNY else 1


@dataclass
class ThresholdNetwork:
    """Simple undirected graph of pairs whose strength passes a cutoff.

    Edge weights keep the raw counts so a sweep can re-filter cheaply.
    Nodes are edge endpoints only; isolated passengers never appear.
    """

    measure: str
    tau: int
    edges: dict[tuple[int, int], int]
    adj: dict[int, set[int]] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.adj and self.edges:
            self.adj = adjacency(self.edges)

    @property
    def nodes(self):
        return self.adj.keys()

    @property
    def node_count(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def adjacency(edges: dict[tuple[int, int], int]) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return adj


def build_network(ties: Iterable[TieRecord], measure: str, tau: int) -> ThresholdNetwork:
    """Keep the ties whose selected count is at least tau."""
    if measure not in TIE_MEASURES:
        raise ValueError(f"unknown tie measure {measure!r}")
    if tau < min_tau(measure):
        raise ValueError(f"tau {tau} below the minimum for {measure}")
    attr = _FIELD[measure]
    edges = {}
    for tie in ties:
        weight = getattr(tie, attr)
        if weight >= tau:
            edges[(tie.u, tie.v)] = weight
    return ThresholdNetwork(measure, tau, edges)


def sweep(
    ties: Sequence[TieRecord],
    measure: str,
    taus: Sequence[int],
    summary_fn: Callable[[ThresholdNetwork], dict] | None = None,
) -> list[dict]:
    """One size summary per threshold, ascending.

    ``summary_fn`` may attach extra statistics (see netstats) to each entry.
    """
    if not taus:
        raise ValueError("empty tau range")
    out = []
    for tau in sorted(taus):
        net = build_network(ties, measure, tau)
        entry = {"tau": tau, "nodes": net.node_count, "edges": net.edge_count}
        if summary_fn is not None:
            entry.update(summary_fn(net))
        out.append(entry)
    return out


def co_flight_baseline(
    dataset: Dataset, t: int, max_manifest_size: int = DEFAULT_GROUP_SIZE_CAP
) -> ThresholdNetwork:
    """Tie passengers who shared strictly more than ``t`` flights.

    Flight manifests are approximated as the union of all booked groups per
    (flight_id, flight_date), so strangers co-booked separately on one plane
    do connect here -- the noise this method suffers from, and the reason the
    booking-group measures exist.
    """
    manifests: dict[tuple[str, object], set[int]] = {}
    for rec in dataset.records:
        manifests.setdefault((rec.flight_id, rec.flight_date), set()).update(
            rec.passengers
        )
    counts: dict[tuple[int, int], int] = {}
    for (flight_id, _), members in manifests.items():
        if len(members) > max_manifest_size:
            raise GroupSizeError(
                f"flight {flight_id!r} manifest of {len(members)} passengers "
                f"is above the cap of {max_manifest_size}"
            )
        ordered = sorted(members)
        for i, u in enumerate(ordered):
            for v in ordered[i + 1 :]:
                pair = (u, v)
                counts[pair] = counts.get(pair, 0) + 1
    edges = {pair: c for pair, c in counts.items() if c > t}
    return ThresholdNetwork(CO_FLIGHT, t, edges)


def write_edge_file(net: ThresholdNetwork, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "weight"])
        for (u, v) in sorted(net.edges):
            writer.writerow([u, v, net.edges[(u, v)]])
