"""Synthetic booking data with known acquaintance ground truth.

The generated world has three traveller populations:

* acquainted cliques (families, colleagues) taking repeated small-group
  journeys, sometimes splitting one journey across two bookings or packing
  two journeys into one booking;
* organized tour groups: large parties of mutual strangers, occasionally
  carrying one or two acquainted cliques along, with the usual bias toward
  sizes that are multiples of five;
* solo travellers, who keep the single-passenger booking fraction realistic.

Every pair that ever shares a group gets an expected label: acquainted pairs
are active, everyone else passive.  By construction a stranger joins at most
one group (unless explicitly allowed), so passive pairs never co-travel
twice and a perfect inference run can separate the classes exactly.

Journey plans respect the default inference cutoffs: itineraries stay short
enough not to go stale mid-trip, and after an unreturned journey a clique
rests long enough for the open journey to time out before its next trip.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from typing import Iterable

from .journeys import DEFAULT_THRESHOLDS
from .records import Dataset, SfpgRecord, build_dataset
from .ties import ACTIVE, PASSIVE

#: Rest period after an unreturned journey, long enough for any default
#: staleness cutoff to expire before the clique travels again.
SAFE_GAP_DAYS = (
    max(max(DEFAULT_THRESHOLDS.t_interval_spg.values()), DEFAULT_THRESHOLDS.t_interval_lpg)
    + 1
)

#: Every n-th clique is reserved as a pool of lone riders: members who may
#: join one tour group individually, bridging their own circle and a tour
#: circle.  Reserved cliques are never embedded whole, so a lone rider's
#: tour pairs can never recur through a clique embedding.
LONE_RIDER_STRIDE = 4


@dataclass
class GenConfig:
    population: int = 12_000
    n_cliques: int = 1_200
    clique_size_weights: dict[int, float] = field(
        default_factory=lambda: {2: 0.44, 3: 0.26, 4: 0.15, 5: 0.08, 6: 0.04, 7: 0.02, 8: 0.007, 9: 0.003}
    )
    clique_repeat_continue: float = 0.55  # chance of planning yet another journey
    clique_max_journeys: int = 7
    frequent_clique_fraction: float = 0.04  # heavy travellers with deep journey tails
    frequent_journeys_min: int = 8
    frequent_journeys_max: int = 22
    tour_only_clique_prob: float = 0.08  # cliques that only ever ride tours
    multi_clique_member_prob: float = 0.12  # clique carries one member of an earlier one
    lone_rider_weights: dict[int, float] = field(
        default_factory=lambda: {0: 0.25, 1: 0.40, 2: 0.35}
    )
    spg_round_trip_prob: float = 0.68  # grows mildly with group size
    spg_duration_mean: float = 4.5
    spg_duration_sd: float = 2.5
    split_pnr_prob: float = 0.18  # round journey booked as two PNRs
    pack_pnr_prob: float = 0.08  # two consecutive journeys in one PNR

    n_tour_groups: int = 220
    tour_size_min: int = 10
    tour_size_max: int = 40
    tour_five_multiple_boost: float = 6.0
    lpg_round_trip_prob: float = 0.85
    tour_split_pnr_prob: float = 0.35  # agency books out and return legs separately
    tour_duration_mean: float = 5.4
    tour_duration_sd: float = 1.5
    tour_stability: float = 0.9  # chance a follow-on segment keeps the full group
    tour_leg_drop_fraction: float = 0.4
    embedded_clique_weights: dict[int, float] = field(
        default_factory=lambda: {0: 0.35, 1: 0.45, 2: 0.20}
    )

    single_pnr_fraction: float = 0.745
    solo_round_trip_prob: float = 0.5

    n_airports: int = 50
    flights_per_route_day: int = 2
    window_start: date = date(2012, 1, 1)
    window_days: int = 365
    seed: int = 0

    noise_rate: float = 0.25  # artificial stranger groups per tour group
    noise_size_min: int = 10
    noise_size_max: int = 16
    unique_stranger_pairs: bool = True
    track_ground_truth: bool = True

    def validate(self) -> None:
        probs = {
            "clique_repeat_continue": self.clique_repeat_continue,
            "spg_round_trip_prob": self.spg_round_trip_prob,
            "split_pnr_prob": self.split_pnr_prob,
            "pack_pnr_prob": self.pack_pnr_prob,
            "lpg_round_trip_prob": self.lpg_round_trip_prob,
            "tour_stability": self.tour_stability,
            "solo_round_trip_prob": self.solo_round_trip_prob,
            "tour_leg_drop_fraction": self.tour_leg_drop_fraction,
        }
        for name, p in probs.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0.0 <= self.single_pnr_fraction < 1.0:
            raise ValueError("single_pnr_fraction must lie in [0, 1)")
        if self.noise_rate < 0:
            raise ValueError("noise_rate must be >= 0")
        if self.population < 10:
            raise ValueError("population too small")
        if self.tour_size_min < 2 or self.tour_size_max < self.tour_size_min:
            raise ValueError("bad tour size range")
        if self.window_days < 60:
            raise ValueError("window_days must be at least 60")
        if self.n_airports < 5:
            raise ValueError("need at least 5 airports")


@dataclass(frozen=True)
class TourGroup:
    group_id: str
    members: tuple[int, ...]
    embedded_cliques: tuple[tuple[int, ...], ...]


@dataclass
class GroundTruth:
    """What the generator knows that inference must recover."""

    cliques: list[tuple[int, ...]]
    acquaintance_edges: set[tuple[int, int]]
    tour_groups: list[TourGroup]
    artificial_groups: list[TourGroup] = field(default_factory=list)
    expected_labels: dict[tuple[int, int], str] = field(default_factory=dict)
    expected_cojourneys: dict[tuple[int, int], int] = field(default_factory=dict)
    single_pnr_fraction_target: float = 0.0
    stranger_pool: tuple[int, ...] = ()
    stranger_cursor: int = 0
    config: GenConfig | None = None


def _pairs(members: Iterable[int]) -> Iterable[tuple[int, int]]:
    ordered = sorted(members)
    for i, u in enumerate(ordered):
        for v in ordered[i + 1 :]:
            yield (u, v)


def _weighted_choice(rng: random.Random, weights: dict[int, float]) -> int:
    keys = sorted(weights)
    return rng.choices(keys, weights=[weights[k] for k in keys], k=1)[0]


class _Calendar:
    """Per-clique engagement spans with rest-gap rules between them."""

    def __init__(self):
        self.spans: list[tuple[int, int, bool]] = []  # (start, end, returned)

    def fits(self, start: int, end: int, returned: bool) -> bool:
        for s, e, r in self.spans:
            if not (end < s or start > e):
                return False
            if end < s and not returned and s - start < SAFE_GAP_DAYS:
                return False
            if start > e and not r and start - s < SAFE_GAP_DAYS:
                return False
        return True

    def add(self, start: int, end: int, returned: bool) -> None:
        self.spans.append((start, end, returned))


@dataclass
class _JourneyPlan:
    start: int               # day offset in the window
    leg_days: list[int]      # offsets of each segment
    route: list[tuple[str, str]]
    returned: bool


def _plan_itinerary(
    rng: random.Random,
    airports: list[str],
    home: str,
    round_trip: bool,
    legs: int,
) -> list[tuple[str, str]]:
    others = [a for a in airports if a != home]
    vias = rng.sample(others, legs if not round_trip else legs - 1)
    stops = [home] + vias
    if round_trip:
        stops.append(home)
    return list(zip(stops, stops[1:]))


def _leg_days(rng: random.Random, legs: int, duration: int) -> list[int]:
    # Distinct, increasing day offsets keep the chronological order of the
    # segments unambiguous.
    if legs == 1:
        return [0]
    if duration < legs - 1:
        duration = legs - 1
    interior = sorted(rng.sample(range(1, duration), legs - 2)) if legs > 2 else []
    return [0] + interior + [duration]


def _journey(
    rng: random.Random,
    airports: list[str],
    home: str,
    round_trip: bool,
    leg_weights: dict[int, float],
    dur_mean: float,
    dur_sd: float,
    dur_cap: int,
) -> tuple[list[int], list[tuple[str, str]], bool, int]:
    legs = _weighted_choice(rng, leg_weights)
    if round_trip and legs < 2:
        legs = 2
    duration = int(round(rng.gauss(dur_mean, dur_sd)))
    duration = max(legs - 1 if legs > 1 else 0, min(duration, dur_cap))
    if legs == 1:
        duration = 0
    route = _plan_itinerary(rng, airports, home, round_trip, legs)
    return _leg_days(rng, legs, duration), route, round_trip, duration


class _Emitter:
    def __init__(self, cfg: GenConfig, rng: random.Random, prefix: str = ""):
        self.cfg = cfg
        self.rng = rng
        self.prefix = prefix
        self.rows: list[SfpgRecord] = []
        self.n_sfpg = 0
        self.n_pnr = 0

    def next_pnr(self) -> str:
        self.n_pnr += 1
        return f"{self.prefix}p{self.n_pnr:07d}"

    def add(self, pnr_id: str, day: int, org: str, dst: str, members: Iterable[int]) -> None:
        self.n_sfpg += 1
        when = self.cfg.window_start + timedelta(days=day)
        slot = self.rng.randrange(self.cfg.flights_per_route_day)
        self.rows.append(
            SfpgRecord(
                sfpg_id=f"{self.prefix}s{self.n_sfpg:08d}",
                pnr_id=pnr_id,
                flight_id=f"F-{org}-{dst}-{when.isoformat()}-{slot}",
                flight_date=when,
                origin=org,
                destination=dst,
                passengers=frozenset(members),
            )
        )


def generate(cfg: GenConfig) -> tuple[Dataset, GroundTruth]:
    """Build a dataset plus its ground truth, deterministically per seed."""
    cfg.validate()
    rng = random.Random(cfg.seed)
    airports = [f"A{i:02d}" for i in range(cfg.n_airports)]

    # Population layout: clique members first, everyone else may travel solo
    # and additionally join at most one organized group.  Some cliques carry
    # a member of an earlier clique, so that person bridges two circles.
    clique_sizes = [_weighted_choice(rng, cfg.clique_size_weights) for _ in range(cfg.n_cliques)]
    n_clique_members = sum(clique_sizes)
    if n_clique_members + 10 > cfg.population:
        raise ValueError(
            f"population {cfg.population} cannot hold {n_clique_members} clique members"
        )
    next_id = 1
    cliques: list[tuple[int, ...]] = []
    for size in clique_sizes:
        bridge = None
        if cliques and size >= 3 and rng.random() < cfg.multi_clique_member_prob:
            donor = cliques[rng.randrange(len(cliques))]
            bridge = donor[rng.randrange(len(donor))]
        fresh = size if bridge is None else size - 1
        members = list(range(next_id, next_id + fresh))
        next_id += fresh
        if bridge is not None:
            members.append(bridge)
        cliques.append(tuple(sorted(members)))
    others = list(range(next_id, cfg.population + 1))
    rng.shuffle(others)

    truth = GroundTruth(
        cliques=cliques,
        acquaintance_edges={p for c in cliques for p in _pairs(c)},
        tour_groups=[],
        single_pnr_fraction_target=cfg.single_pnr_fraction,
        config=cfg,
    )
    calendars = [_Calendar() for _ in cliques]
    clique_homes = [rng.choice(airports) for _ in cliques]
    journeys_per_clique = [0] * len(cliques)
    emitter = _Emitter(cfg, rng)
    cursor = 0  # next unused stranger in ``others``

    def take_strangers(n: int) -> list[int]:
        nonlocal cursor
        if cfg.unique_stranger_pairs:
            if cursor + n > len(others):
                raise ValueError(
                    "population too small for the requested organized groups "
                    "with unique stranger pairs"
                )
            chunk = others[cursor : cursor + n]
            cursor += n
            return chunk
        return [others[rng.randrange(len(others))] for _ in range(n)]

    lone_pool = [
        (ci, p)
        for ci in range(0, len(cliques), LONE_RIDER_STRIDE)
        for p in cliques[ci]
    ]
    rng.shuffle(lone_pool)
    lone_cursor = 0

    # --- organized tour groups (scheduled first: they pin clique calendars)
    used_clique_pairs: set[tuple[int, int]] = set()
    for g in range(cfg.n_tour_groups):
        size = _tour_size(rng, cfg)
        embedded = _pick_embedded(rng, cfg, cliques, size, used_clique_pairs)
        round_trip = rng.random() < cfg.lpg_round_trip_prob
        leg_weights = {2: 0.72, 3: 0.13, 4: 0.15} if round_trip else {1: 0.6, 2: 0.4}
        origin = rng.choice(airports)
        leg_days, route, returned, duration = _journey(
            rng, airports, origin, round_trip, leg_weights,
            cfg.tour_duration_mean, cfg.tour_duration_sd, dur_cap=13,
        )
        start = _place(rng, cfg, duration, [calendars[ci] for ci in embedded], returned)
        if start is None:
            embedded = []
            start = rng.randrange(cfg.window_days - duration)
        for ci in embedded:
            calendars[ci].add(start, start + duration, returned)
            journeys_per_clique[ci] += 1

        clique_members = {p for ci in embedded for p in cliques[ci]}
        n_lone = _weighted_choice(rng, cfg.lone_rider_weights)
        lone_cliques: set[int] = set()
        # One rider per clique per tour: clique mates riding the same tour
        # would interleave it with their own journeys and fuse events.
        while n_lone and lone_cursor < len(lone_pool) and len(clique_members) < size - 2:
            lci, rider = lone_pool[lone_cursor]
            lone_cursor += 1
            if lci in lone_cliques:
                continue
            lone_cliques.add(lci)
            clique_members.add(rider)
            n_lone -= 1
        strangers = take_strangers(size - len(clique_members))
        members = sorted(clique_members | set(strangers))
        stranger_set = sorted(strangers)

        legs = list(zip(route, leg_days))
        pnr = emitter.next_pnr()
        pnr_per_leg = [pnr] * len(legs)
        if len(legs) >= 2 and rng.random() < cfg.tour_split_pnr_prob:
            pnr_per_leg[-1] = emitter.next_pnr()
        for k, ((org, dst), day) in enumerate(legs):
            leg_members = members
            if k > 0 and rng.random() > cfg.tour_stability and len(stranger_set) >= 2:
                drop = max(1, int(len(stranger_set) * cfg.tour_leg_drop_fraction))
                dropped = set(rng.sample(stranger_set, drop))
                leg_members = [m for m in members if m not in dropped]
            emitter.add(pnr_per_leg[k], start + day, org, dst, leg_members)

        truth.tour_groups.append(
            TourGroup(
                group_id=f"tour{g:05d}",
                members=tuple(members),
                embedded_cliques=tuple(cliques[ci] for ci in embedded),
            )
        )

    # --- clique journeys
    for ci, clique in enumerate(cliques):
        size = len(clique)
        frequent = rng.random() < cfg.frequent_clique_fraction
        if frequent:
            n_journeys = rng.randint(cfg.frequent_journeys_min, cfg.frequent_journeys_max)
            p_round = 0.92
        elif rng.random() < cfg.tour_only_clique_prob:
            n_journeys = 0
            p_round = 0.0
        else:
            n_journeys = 1
            while (
                n_journeys < cfg.clique_max_journeys
                and rng.random() < cfg.clique_repeat_continue
            ):
                n_journeys += 1
            p_round = min(0.9, cfg.spg_round_trip_prob + 0.02 * (size - 2))
        plans: list[_JourneyPlan] = []
        for _ in range(n_journeys):
            round_trip = rng.random() < p_round
            leg_weights = {2: 0.8, 3: 0.1, 4: 0.1} if round_trip else {1: 0.65, 2: 0.35}
            leg_days, route, returned, duration = _journey(
                rng, airports, clique_homes[ci], round_trip, leg_weights,
                3.0 if frequent else cfg.spg_duration_mean,
                1.5 if frequent else cfg.spg_duration_sd,
                dur_cap=12,
            )
            start = _place(rng, cfg, duration, [calendars[ci]], returned)
            if start is None:
                continue
            calendars[ci].add(start, start + duration, returned)
            plans.append(_JourneyPlan(start, leg_days, route, returned))
        plans.sort(key=lambda p: p.start)
        journeys_per_clique[ci] += len(plans)

        split = [
            p.returned and len(p.leg_days) >= 2 and rng.random() < cfg.split_pnr_prob
            for p in plans
        ]
        pnr_ids: list[str] = []
        for i in range(len(plans)):
            if (
                i > 0
                and not split[i]
                and not split[i - 1]
                and rng.random() < cfg.pack_pnr_prob
            ):
                pnr_ids.append(pnr_ids[i - 1])
            else:
                pnr_ids.append(emitter.next_pnr())
        for plan, is_split, pnr in zip(plans, split, pnr_ids):
            legs = list(zip(plan.route, plan.leg_days))
            if is_split:
                tail_pnr = emitter.next_pnr()
                for (org, dst), day in legs[:-1]:
                    emitter.add(pnr, plan.start + day, org, dst, clique)
                (org, dst), day = legs[-1]
                emitter.add(tail_pnr, plan.start + day, org, dst, clique)
            else:
                for (org, dst), day in legs:
                    emitter.add(pnr, plan.start + day, org, dst, clique)

    # --- solo travellers, sized to hit the single-passenger booking fraction
    n_group_pnrs = emitter.n_pnr
    f = cfg.single_pnr_fraction
    n_solo = int(round(n_group_pnrs * f / (1.0 - f))) if f < 1.0 else 0
    solo_pool = others  # solo trips create no pairs, so overlap is harmless
    for _ in range(n_solo):
        traveller = solo_pool[rng.randrange(len(solo_pool))]
        home = rng.choice(airports)
        pnr = emitter.next_pnr()
        if rng.random() < cfg.solo_round_trip_prob:
            duration = rng.randint(1, 10)
            start = rng.randrange(cfg.window_days - duration)
            away = rng.choice([a for a in airports if a != home])
            emitter.add(pnr, start, home, away, [traveller])
            emitter.add(pnr, start + duration, away, home, [traveller])
        else:
            start = rng.randrange(cfg.window_days)
            away = rng.choice([a for a in airports if a != home])
            emitter.add(pnr, start, home, away, [traveller])

    truth.stranger_pool = tuple(others)
    truth.stranger_cursor = cursor
    if cfg.track_ground_truth:
        _fill_expectations(truth, journeys_per_clique)

    window = (cfg.window_start, cfg.window_start + timedelta(days=cfg.window_days))
    return build_dataset(emitter.rows, window=window), truth


def _tour_size(rng: random.Random, cfg: GenConfig) -> int:
    sizes = range(cfg.tour_size_min, cfg.tour_size_max + 1)
    weights = [
        (s ** -1.3) * (cfg.tour_five_multiple_boost if s % 5 == 0 else 1.0)
        for s in sizes
    ]
    return rng.choices(list(sizes), weights=weights, k=1)[0]


def _pick_embedded(
    rng: random.Random,
    cfg: GenConfig,
    cliques: list[tuple[int, ...]],
    tour_size: int,
    used_clique_pairs: set[tuple[int, int]],
) -> list[int]:
    """Clique indices to embed in a tour.

    Each clique must stay a clear minority of the group (otherwise the tour
    would look like the clique's own booking), and no two cliques ride
    together twice, which would make their cross pairs recur.
    """
    want = _weighted_choice(rng, cfg.embedded_clique_weights)
    if want == 0:
        return []
    chosen: list[int] = []
    budget = tour_size - 2
    for _ in range(want * 8):
        if len(chosen) == want:
            break
        ci = rng.randrange(len(cliques))
        if ci in chosen or ci % LONE_RIDER_STRIDE == 0:
            continue
        size = len(cliques[ci])
        if size > tour_size // 2 or size > budget:
            continue
        if any(tuple(sorted((ci, cj))) in used_clique_pairs for cj in chosen):
            continue
        chosen.append(ci)
        budget -= size
    for i, ci in enumerate(chosen):
        for cj in chosen[i + 1 :]:
            used_clique_pairs.add(tuple(sorted((ci, cj))))
    return chosen


def _place(
    rng: random.Random,
    cfg: GenConfig,
    duration: int,
    calendars: list[_Calendar],
    returned: bool,
    tries: int = 40,
) -> int | None:
    span = cfg.window_days - duration
    if span <= 1:
        return None
    for _ in range(tries):
        start = rng.randrange(span)
        if all(c.fits(start, start + duration, returned) for c in calendars):
            return start
    return None


def _fill_expectations(truth: GroundTruth, journeys_per_clique: list[int]) -> None:
    labels = truth.expected_labels
    for pair in truth.acquaintance_edges:
        labels[pair] = ACTIVE
    for group in truth.tour_groups + truth.artificial_groups:
        for pair in _pairs(group.members):
            if pair not in truth.acquaintance_edges:
                labels[pair] = PASSIVE
    for ci, clique in enumerate(truth.cliques):
        for pair in _pairs(clique):
            truth.expected_cojourneys[pair] = journeys_per_clique[ci]


def inject_noise(
    dataset: Dataset, truth: GroundTruth, cfg: GenConfig | None = None
) -> tuple[Dataset, GroundTruth]:
    """Add agency-built artificial large groups of strangers.

    Each injected booking is a single flight whose passengers were scraped
    together purely for the group discount; all its internal pairs are
    passive by construction.  A zero noise rate returns the inputs untouched.
    """
    cfg = cfg if cfg is not None else truth.config
    n_groups = int(round(cfg.noise_rate * cfg.n_tour_groups))
    if n_groups == 0:
        return dataset, truth
    rng = random.Random(f"{cfg.seed}-noise")
    airports = [f"A{i:02d}" for i in range(cfg.n_airports)]
    emitter = _Emitter(cfg, rng, prefix="x")  # distinct id space from generate()

    pool = list(truth.stranger_pool)
    cursor = truth.stranger_cursor
    artificial: list[TourGroup] = []
    for g in range(n_groups):
        size = rng.randint(cfg.noise_size_min, cfg.noise_size_max)
        if cfg.unique_stranger_pairs:
            if cursor + size > len(pool):
                raise ValueError("stranger pool exhausted; grow the population")
            members = pool[cursor : cursor + size]
            cursor += size
        else:
            members = [pool[rng.randrange(len(pool))] for _ in range(size)]
        day = rng.randrange(cfg.window_days)
        org, dst = rng.sample(airports, 2)
        emitter.add(emitter.next_pnr(), day, org, dst, members)
        artificial.append(
            TourGroup(
                group_id=f"noise{g:05d}",
                members=tuple(sorted(members)),
                embedded_cliques=(),
            )
        )

    new_truth = replace(
        truth,
        artificial_groups=truth.artificial_groups + artificial,
        expected_labels=dict(truth.expected_labels),
        stranger_cursor=cursor,
    )
    if cfg.track_ground_truth:
        for group in artificial:
            for pair in _pairs(group.members):
                if pair not in new_truth.acquaintance_edges:
                    new_truth.expected_labels[pair] = PASSIVE
    merged = build_dataset(
        dataset.records + emitter.rows,
        duplicates_collapsed=dataset.duplicates_collapsed,
        window=dataset.window,
    )
    return merged, new_truth


# --- ground truth serialization --------------------------------------------

def write_truth_labels(truth: GroundTruth, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "expected_label"])
        for (u, v) in sorted(truth.expected_labels):
            writer.writerow([u, v, truth.expected_labels[(u, v)]])


def read_truth_labels(path) -> dict[tuple[int, int], str]:
    labels: dict[tuple[int, int], str] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            labels[(int(row["u"]), int(row["v"]))] = row["expected_label"]
    return labels


def write_truth_manifest(truth: GroundTruth, path) -> None:
    cfg = truth.config
    obj = {
        "single_pnr_fraction_target": truth.single_pnr_fraction_target,
        "cliques": [list(c) for c in truth.cliques],
        "tour_groups": [
            {
                "group_id": g.group_id,
                "members": list(g.members),
                "embedded_cliques": [list(c) for c in g.embedded_cliques],
            }
            for g in truth.tour_groups
        ],
        "artificial_groups": [
            {"group_id": g.group_id, "members": list(g.members)}
            for g in truth.artificial_groups
        ],
        "config": {
            k: (v.isoformat() if isinstance(v, date) else v)
            for k, v in vars(cfg).items()
        }
        if cfg
        else None,
    }
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
