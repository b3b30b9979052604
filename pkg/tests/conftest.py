"""Shared fixtures, random-dataset helpers, and acceptance reporting."""

from __future__ import annotations

import random
from datetime import date, timedelta

import pytest

from cotravel.records import SfpgRecord, build_dataset
from cotravel.synth import GenConfig, generate, inject_noise

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def record_criterion(number: int, description: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[criterion {number:02d}] {status} {description}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def random_records(
    rng: random.Random,
    n_records: int,
    n_passengers: int = 40,
    n_airports: int = 6,
    n_pnrs: int = 15,
    date_span: int = 120,
    max_size: int = 14,
    start: date = date(2012, 3, 1),
    focal_pair: tuple[int, int] | None = None,
) -> list[SfpgRecord]:
    """Adversarial random SFPG rows; sizes straddle the default large-group
    cutoff and routes are drawn from a small pool so returns actually occur."""
    airports = [f"T{i}" for i in range(n_airports)]
    records = []
    day = 0
    for i in range(n_records):
        day += rng.choice([0, 0, 1, 1, 2, 3, 5, 9, 17, 26])
        if day > date_span:
            day = date_span
        size = rng.choice([1, 2, 2, 2, 3, 3, 4, 5, 7, 10, 11, 12, max_size])
        members = set(rng.sample(range(1, n_passengers + 1), min(size, n_passengers)))
        if focal_pair is not None:
            members.update(focal_pair)
        org = rng.choice(airports)
        dst = rng.choice(airports)  # org == dst allowed on purpose
        records.append(
            SfpgRecord(
                sfpg_id=f"r{i:05d}",
                pnr_id=f"q{rng.randrange(n_pnrs):04d}",
                flight_id=f"G{rng.randrange(40):03d}",
                flight_date=start + timedelta(days=day),
                origin=org,
                destination=dst,
                passengers=frozenset(members),
            )
        )
    return records


def random_dataset(rng: random.Random, n_records: int, **kwargs):
    return build_dataset(random_records(rng, n_records, **kwargs))


@pytest.fixture(scope="session")
def default_synth():
    """Default-config synthetic world with injected noise, shared per session."""
    cfg = GenConfig(seed=7)
    dataset, truth = generate(cfg)
    dataset, truth = inject_noise(dataset, truth, cfg)
    return cfg, dataset, truth
