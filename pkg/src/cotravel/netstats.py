"""Graph statistics and calibration analytics.

Network- and node-level metrics are deliberately simple implementations over
adjacency sets; each has an independent brute-force oracle in the test suite
that it must match exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .networks import ThresholdNetwork
from .records import Dataset


class UnionFind:
    """Disjoint sets with path compression; good enough for our graph sizes."""

    def __init__(self):
        self.parent: dict = {}

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def groups(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def components(net: ThresholdNetwork) -> tuple[int, float, dict[int, int]]:
    """(component count, largest fraction of nodes, size histogram)."""
    if net.node_count == 0:
        return 0, 0.0, {}
    uf = UnionFind()
    for node in net.adj:
        uf.add(node)
    for u, v in net.edges:
        uf.union(u, v)
    sizes = [len(members) for members in uf.groups().values()]
    hist: dict[int, int] = {}
    for s in sizes:
        hist[s] = hist.get(s, 0) + 1
    return len(sizes), max(sizes) / net.node_count, hist


def degree_histogram(net: ThresholdNetwork) -> dict[int, int]:
    hist: dict[int, int] = {}
    for neighbours in net.adj.values():
        k = len(neighbours)
        hist[k] = hist.get(k, 0) + 1
    return hist


def clustering(net: ThresholdNetwork, node: int) -> tuple[float, float]:
    """Local clustering plus its density-normalized variant.

    The normalized value divides by the graph density k/(N-1) where N is the
    node count of this network.  Degenerate nodes (k < 2, or k = 0 for the
    normalized form) are defined as 0 so they still enter population means.
    """
    neighbours = net.adj[node]
    k = len(neighbours)
    n = net.node_count
    if k < 2:
        c = 0.0
    else:
        links = sum(len(net.adj[j] & neighbours) for j in neighbours)
        c = links / (k * (k - 1))
    if k == 0 or n < 2:
        return c, 0.0
    return c, c / (k / (n - 1))


def two_hop(net: ThresholdNetwork, node: int) -> int:
    """Distinct nodes within two edges of ``node``, excluding it."""
    reach = set(net.adj[node])
    for j in net.adj[node]:
        reach |= net.adj[j]
    reach.discard(node)
    return len(reach)


def ego_components(net: ThresholdNetwork, node: int) -> int:
    """Components of the neighbourhood once the focal node is removed."""
    neighbours = net.adj[node]
    if not neighbours:
        return 0
    uf = UnionFind()
    for j in neighbours:
        uf.add(j)
    for j in neighbours:
        for m in net.adj[j] & neighbours:
            uf.union(j, m)
    return len(uf.groups())


def node_feature_means(net: ThresholdNetwork) -> dict[str, float]:
    """Arithmetic means of the node features over non-isolated nodes."""
    if net.node_count == 0:
        raise ValueError("empty network has no feature means")
    totals = {
        "degree": 0.0,
        "two_hop": 0.0,
        "clustering": 0.0,
        "normalized_clustering": 0.0,
        "ego_components": 0.0,
    }
    for node in net.adj:
        c, cn = clustering(net, node)
        totals["degree"] += len(net.adj[node])
        totals["two_hop"] += two_hop(net, node)
        totals["clustering"] += c
        totals["normalized_clustering"] += cn
        totals["ego_components"] += ego_components(net, node)
    n = net.node_count
    return {key: value / n for key, value in totals.items()}


def mean_degree_fixed_universe(net: ThresholdNetwork, universe_size: int) -> float:
    """Mean degree over a fixed node universe, isolated nodes included."""
    if universe_size <= 0:
        raise ValueError("universe_size must be positive")
    return 2 * net.edge_count / universe_size


@dataclass
class NetworkSummary:
    node_count: int
    edge_count: int
    fractional_nodes: float
    fractional_edges: float
    component_count: int
    largest_component_fraction: float
    component_size_histogram: dict[int, int]
    degree_histogram: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "fractional_nodes": self.fractional_nodes,
            "fractional_edges": self.fractional_edges,
            "component_count": self.component_count,
            "largest_component_fraction": self.largest_component_fraction,
            "component_size_histogram": {
                str(k): v for k, v in sorted(self.component_size_histogram.items())
            },
            "degree_histogram": {
                str(k): v for k, v in sorted(self.degree_histogram.items())
            },
        }


def summarize_network(
    net: ThresholdNetwork, reference: tuple[int, int] | None = None
) -> NetworkSummary:
    """Network-level summary; fractions are relative to ``reference``
    (node count, edge count) when given, e.g. the unfiltered network."""
    count, largest, hist = components(net)
    ref_nodes, ref_edges = reference if reference else (net.node_count, net.edge_count)
    return NetworkSummary(
        node_count=net.node_count,
        edge_count=net.edge_count,
        fractional_nodes=net.node_count / ref_nodes if ref_nodes else 0.0,
        fractional_edges=net.edge_count / ref_edges if ref_edges else 0.0,
        component_count=count,
        largest_component_fraction=largest,
        component_size_histogram=hist,
        degree_histogram=degree_histogram(net),
    )


def write_histogram_csv(hist: dict[int, int] | dict[float, int], path) -> None:
    """2-column (value,count) file, ready for external plotting."""
    with open(path, "w", newline="") as fh:
        fh.write("value,count\n")
        for value in sorted(hist):
            fh.write(f"{value},{hist[value]}\n")


# --- calibration analytics over raw datasets -------------------------------

def _pnr_records(dataset: Dataset) -> Iterable[list]:
    by_id = {rec.sfpg_id: rec for rec in dataset.records}
    for pnr in dataset.pnr_index.values():
        yield [by_id[sid] for sid in pnr.sfpg_ids]


def _is_round(recs: list) -> bool:
    return len(recs) >= 2 and recs[0].origin == recs[-1].destination


@dataclass
class OverlapCalibration:
    """Membership overlap between consecutive segments of large round bookings."""

    histogram: dict[float, int] = field(default_factory=dict)
    n_qualifying_pnrs: int = 0
    n_overlaps: int = 0
    fraction_above_09: float = 0.0
    fraction_above_07: float = 0.0

    def to_dict(self) -> dict:
        return {
            "histogram": {f"{k:.2f}": v for k, v in sorted(self.histogram.items())},
            "n_qualifying_pnrs": self.n_qualifying_pnrs,
            "n_overlaps": self.n_overlaps,
            "fraction_above_09": self.fraction_above_09,
            "fraction_above_07": self.fraction_above_07,
        }


def calibrate_overlap(dataset: Dataset, t_size: int = 10) -> OverlapCalibration:
    """Distribution of consecutive-segment Jaccard overlaps in bookings with
    at least two segments, all of size >= t_size, forming a round journey."""
    from .journeys import jaccard

    cal = OverlapCalibration()
    values: list[float] = []
    for recs in _pnr_records(dataset):
        if len(recs) < 2 or not _is_round(recs):
            continue
        if any(len(r.passengers) < t_size for r in recs):
            continue
        cal.n_qualifying_pnrs += 1
        for prev, cur in zip(recs, recs[1:]):
            values.append(jaccard(prev.passengers, cur.passengers))
    for v in values:
        key = round(v, 2)
        cal.histogram[key] = cal.histogram.get(key, 0) + 1
    cal.n_overlaps = len(values)
    if values:
        cal.fraction_above_09 = sum(1 for v in values if v > 0.9) / len(values)
        cal.fraction_above_07 = sum(1 for v in values if v > 0.7) / len(values)
    return cal


@dataclass
class DurationCalibration:
    """Round-trip durations by group size, plus tail curves for picking the
    large-group staleness cutoff.

    p1[T] is the fraction of large round bookings lasting strictly more than
    T days; p2 scales it by the measured fraction of large bookings that are
    not round, bounding how often a cutoff of T would clip an unfinished
    journey.
    """

    by_size: dict[int, tuple[float, float, int]] = field(default_factory=dict)
    p1: list[tuple[int, float]] = field(default_factory=list)
    p2: list[tuple[int, float]] = field(default_factory=list)
    round_fraction_large: float = 0.0
    n_large_pnrs: int = 0
    n_large_round_pnrs: int = 0

    def to_dict(self) -> dict:
        return {
            "by_size": {
                str(k): {"mean": m, "variance": var, "count": c}
                for k, (m, var, c) in sorted(self.by_size.items())
            },
            "p1": [[t, f] for t, f in self.p1],
            "p2": [[t, f] for t, f in self.p2],
            "round_fraction_large": self.round_fraction_large,
            "n_large_pnrs": self.n_large_pnrs,
            "n_large_round_pnrs": self.n_large_round_pnrs,
        }


def calibrate_duration(dataset: Dataset, t_size: int = 10) -> DurationCalibration:
    cal = DurationCalibration()
    durations_by_size: dict[int, list[int]] = {}
    large_round_durations: list[int] = []
    for recs in _pnr_records(dataset):
        distinct: set[int] = set()
        for r in recs:
            distinct.update(r.passengers)
        is_large = max(len(r.passengers) for r in recs) >= t_size
        if is_large:
            cal.n_large_pnrs += 1
        if not _is_round(recs):
            continue
        duration = (recs[-1].flight_date - recs[0].flight_date).days
        durations_by_size.setdefault(len(distinct), []).append(duration)
        if is_large:
            cal.n_large_round_pnrs += 1
            large_round_durations.append(duration)

    for size, values in durations_by_size.items():
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        cal.by_size[size] = (mean, var, len(values))

    if cal.n_large_pnrs:
        cal.round_fraction_large = cal.n_large_round_pnrs / cal.n_large_pnrs
    if large_round_durations:
        total = len(large_round_durations)
        unrounded = 1.0 - cal.round_fraction_large
        for t in range(max(large_round_durations) + 1):
            p1 = sum(1 for d in large_round_durations if d > t) / total
            cal.p1.append((t, p1))
            cal.p2.append((t, unrounded * p1))
    return cal
