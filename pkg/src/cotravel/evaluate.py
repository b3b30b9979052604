"""Scoring inference output against ground truth, and measure comparison.

Beyond the plain confusion matrix, this module builds the threshold-sweep
curves that show why journey counting beats raw segment or booking counts:
how cleanly each measure separates passive from active ties, and how smooth
its feature curves are across thresholds (segment counting inherits the
even-segment bias of round trips, which shows up as waves at even cutoffs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import netstats
from .infer import infer_ties
from .journeys import Thresholds
from .networks import CO_JNY, CO_PNR, CO_SFPG, TIE_MEASURES, build_network, min_tau
from .records import Dataset
from .synth import GroundTruth
from .ties import ACTIVE, PASSIVE, TieRecord

_FIELD = {CO_SFPG: "co_sfpg", CO_PNR: "co_pnr", CO_JNY: "co_jny"}


@dataclass
class EvalReport:
    confusion: dict[str, int] = field(default_factory=dict)
    per_class: dict[str, dict[str, float]] = field(default_factory=dict)
    n_pairs: int = 0
    curves: dict[str, list[dict]] = field(default_factory=dict)
    smoothness: dict[str, dict[str, float]] = field(default_factory=dict)
    degree_bumps: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "confusion": self.confusion,
            "per_class": self.per_class,
            "n_pairs": self.n_pairs,
            "curves": self.curves,
            "smoothness": self.smoothness,
            "degree_bumps": self.degree_bumps,
        }


def score_labels(ties: Sequence[TieRecord], truth: GroundTruth | dict) -> EvalReport:
    """Confusion-matrix scoring of predicted vs expected labels.

    Every tie pair must exist in the ground truth; a miss means the
    generator and the pipeline disagree about who ever co-travelled, which
    is a bug, not a scoring matter.
    """
    expected = truth.expected_labels if isinstance(truth, GroundTruth) else truth
    report = EvalReport(n_pairs=len(ties))
    counts = {
        (ACTIVE, ACTIVE): 0,
        (ACTIVE, PASSIVE): 0,
        (PASSIVE, ACTIVE): 0,
        (PASSIVE, PASSIVE): 0,
    }
    for tie in ties:
        want = expected.get(tie.pair)
        if want is None:
            raise KeyError(f"pair {tie.pair} missing from ground truth")
        counts[(want, tie.label)] += 1
    report.confusion = {f"{want}_as_{got}": n for (want, got), n in counts.items()}
    for cls in (ACTIVE, PASSIVE):
        tp = counts[(cls, cls)]
        predicted = sum(counts[(w, cls)] for w in (ACTIVE, PASSIVE))
        actual = sum(counts[(cls, g)] for g in (ACTIVE, PASSIVE))
        precision = tp / predicted if predicted else 0.0
        recall = tp / actual if actual else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        report.per_class[cls] = {"precision": precision, "recall": recall, "f1": f1}
    return report


def smoothness(values: Sequence[float]) -> float:
    """Total variation of the consecutive first differences of a curve.

    Zero for straight lines; grows with every kink, so wavier curves score
    higher.
    """
    if len(values) < 3:
        return 0.0
    return sum(
        abs((values[i + 2] - values[i + 1]) - (values[i + 1] - values[i]))
        for i in range(len(values) - 2)
    )


def degree_bump_count(hist: dict[int, int], lo: int = 9, hi: int = 40) -> int:
    """Strict local maxima of a degree histogram inside the organized-group
    band; residual bumps there betray unfiltered tour-sized cohorts."""
    bumps = 0
    for d in range(lo, hi + 1):
        if hist.get(d, 0) > hist.get(d - 1, 0) and hist.get(d, 0) > hist.get(d + 1, 0):
            bumps += 1
    return bumps


def tau_curves(
    ties: Sequence[TieRecord],
    expected: dict[tuple[int, int], str],
    measure: str,
    taus: Sequence[int],
) -> list[dict]:
    """Per-threshold separation quality and node-feature means.

    passive_removal is the fraction of ground-truth passive pairs filtered
    out; active_retention the fraction of ground-truth active pairs kept.
    """
    attr = _FIELD[measure]
    active_pairs = [t for t in ties if expected.get(t.pair) == ACTIVE]
    passive_pairs = [t for t in ties if expected.get(t.pair) == PASSIVE]
    curve = []
    for tau in sorted(taus):
        net = build_network(ties, measure, tau)
        kept_active = sum(1 for t in active_pairs if getattr(t, attr) >= tau)
        kept_passive = sum(1 for t in passive_pairs if getattr(t, attr) >= tau)
        entry = {
            "tau": tau,
            "nodes": net.node_count,
            "edges": net.edge_count,
            "passive_edges": kept_passive,
            "passive_removal": 1.0 - kept_passive / len(passive_pairs) if passive_pairs else 1.0,
            "active_retention": kept_active / len(active_pairs) if active_pairs else 0.0,
        }
        if net.node_count:
            entry.update(
                {f"mean_{k}": v for k, v in netstats.node_feature_means(net).items()}
            )
        else:
            for k in ("degree", "two_hop", "clustering", "normalized_clustering", "ego_components"):
                entry[f"mean_{k}"] = 0.0
        curve.append(entry)
    return curve


def compare_measures(
    dataset: Dataset,
    truth: GroundTruth,
    thresholds: Thresholds | None = None,
    max_tau: int = 15,
    backend: str = "auto",
) -> EvalReport:
    """Full pipeline run plus the three-measure threshold comparison.

    Smoothness of the feature curves is compared over the shared thresholds
    1..max_tau (the journey measure's 0 point is the unfiltered reference,
    whose one-off cliff would swamp the comparison).
    """
    ties = infer_ties(dataset, thresholds, backend=backend)
    report = score_labels(ties, truth)
    expected = truth.expected_labels
    for measure in TIE_MEASURES:
        taus = list(range(min_tau(measure), max_tau + 1))
        report.curves[measure] = tau_curves(ties, expected, measure, taus)
        shared = [e for e in report.curves[measure] if e["tau"] >= 1]
        report.smoothness[measure] = {
            "mean_degree": smoothness([e["mean_degree"] for e in shared]),
            "mean_ego_components": smoothness([e["mean_ego_components"] for e in shared]),
        }
        first_filtering_tau = 1 if measure == CO_JNY else 2
        for tag, tau in (("unfiltered", min_tau(measure)), ("filtered", first_filtering_tau)):
            hist = netstats.degree_histogram(build_network(ties, measure, tau))
            report.degree_bumps[f"{measure}_tau{tau}_{tag}"] = degree_bump_count(hist)
    return report


def write_curves_csv(report: EvalReport, path) -> None:
    import csv

    columns = [
        "measure", "tau", "nodes", "edges", "passive_edges", "passive_removal",
        "active_retention", "mean_degree", "mean_two_hop", "mean_clustering",
        "mean_normalized_clustering", "mean_ego_components",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for measure, curve in report.curves.items():
            for entry in curve:
                writer.writerow([measure] + [entry.get(c, "") for c in columns[1:]])
