"""Backend selection for tie counting: compiled kernel or pure Python.

The compiled extension is optional; when it failed to build, everything
falls back to ties.count_ties transparently.  Both backends produce the
same TieRecords in the same order.
"""

from __future__ import annotations

import multiprocessing

import numpy as np

from . import ties
from .journeys import DEFAULT_GROUP_SIZE_CAP, GroupSizeError, Thresholds, applicable_interval
from .records import Dataset
from .ties import ACTIVE, PASSIVE, TieRecord

try:
    from . import _kernel
except ImportError:  # pragma: no cover - depends on the build environment
    _kernel = None

HAVE_KERNEL = _kernel is not None


def default_backend() -> str:
    return "kernel" if HAVE_KERNEL else "python"


def pack_dataset(dataset: Dataset, thresholds: Thresholds, max_group_size: int):
    """Convert a Dataset into the flat integer arrays the kernel consumes."""
    n = len(dataset.records)
    dates = np.empty(n, dtype=np.int32)
    origins = np.empty(n, dtype=np.int32)
    dests = np.empty(n, dtype=np.int32)
    pnr_ids = np.empty(n, dtype=np.int32)
    is_large = np.empty(n, dtype=np.uint8)
    intervals = np.empty(n, dtype=np.int32)
    offsets = np.empty(n + 1, dtype=np.int64)

    airport_index: dict[str, int] = {}
    pnr_index: dict[str, int] = {}
    passenger_index: dict[int, int] = {}
    flat: list[int] = []

    offsets[0] = 0
    for r, rec in enumerate(dataset.records):
        size = len(rec.passengers)
        if size > max_group_size:
            raise GroupSizeError(
                f"sfpg {rec.sfpg_id!r} has {size} passengers, above the cap of {max_group_size}"
            )
        dates[r] = rec.flight_date.toordinal()
        origins[r] = airport_index.setdefault(rec.origin, len(airport_index))
        dests[r] = airport_index.setdefault(rec.destination, len(airport_index))
        pnr_ids[r] = pnr_index.setdefault(rec.pnr_id, len(pnr_index))
        large = size >= thresholds.t_size
        is_large[r] = large
        # Sub-pair segments never feed the machine; a placeholder keeps the
        # array dense.
        intervals[r] = applicable_interval(rec, thresholds) if size >= 2 else 0
        members = [
            passenger_index.setdefault(p, len(passenger_index))
            for p in rec.passengers
        ]
        members.sort()
        flat.extend(members)
        offsets[r + 1] = len(flat)

    if len(passenger_index) > 0xFFFFFFFF:
        raise ValueError("more than 2**32 distinct passengers")
    real_ids = np.empty(len(passenger_index), dtype=np.int64)
    for pid, idx in passenger_index.items():
        real_ids[idx] = pid
    flat_arr = np.asarray(flat, dtype=np.int32)
    return dates, origins, dests, pnr_ids, is_large, intervals, offsets, flat_arr, real_ids


def _kernel_shard(packed, t_overlap: float, shard_id: int, n_shards: int):
    dates, origins, dests, pnr_ids, is_large, intervals, offsets, flat, real_ids = packed
    return _kernel.count_pairs(
        dates, origins, dests, pnr_ids, is_large, intervals, offsets, flat,
        real_ids, t_overlap, shard_id, n_shards,
    )


def infer_tie_arrays(
    dataset: Dataset,
    thresholds: Thresholds | None = None,
    backend: str = "auto",
    max_group_size: int = DEFAULT_GROUP_SIZE_CAP,
    shards: int = 1,
    parallel: bool = False,
):
    """Compute per-pair counters as numpy arrays sorted by (u, v).

    Returns (u, v, co_sfpg, co_pnr, co_jny).  ``shards`` splits the pair
    space by hash; with ``parallel`` the shards run in worker processes,
    otherwise sequentially.  Either way the merged output is identical to a
    single-shard run.
    """
    th = thresholds if thresholds is not None else Thresholds()
    if backend == "auto":
        backend = default_backend()
    if backend == "kernel" and not HAVE_KERNEL:
        raise RuntimeError("compiled kernel is not available in this install")
    if backend not in ("kernel", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if shards < 1:
        raise ValueError("shards must be >= 1")

    if backend == "python":
        shard_args = [
            (dataset, th, max_group_size, (s, shards) if shards > 1 else None)
            for s in range(shards)
        ]
        if parallel and shards > 1:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(processes=min(shards, ctx.cpu_count())) as pool:
                parts = pool.starmap(ties.count_ties, shard_args)
        else:
            parts = [ties.count_ties(*args) for args in shard_args]
        records = [t for part in parts for t in part]
        u = np.fromiter((t.u for t in records), dtype=np.int64, count=len(records))
        v = np.fromiter((t.v for t in records), dtype=np.int64, count=len(records))
        sfpg = np.fromiter((t.co_sfpg for t in records), dtype=np.uint32, count=len(records))
        pnr = np.fromiter((t.co_pnr for t in records), dtype=np.uint32, count=len(records))
        jny = np.fromiter((t.co_jny for t in records), dtype=np.uint32, count=len(records))
    else:
        packed = pack_dataset(dataset, th, max_group_size)
        if shards == 1:
            u, v, sfpg, pnr, jny = _kernel_shard(packed, th.t_overlap, 0, 1)
        else:
            if parallel:
                ctx = multiprocessing.get_context("fork")
                with ctx.Pool(processes=min(shards, ctx.cpu_count())) as pool:
                    results = pool.starmap(
                        _kernel_shard,
                        [(packed, th.t_overlap, s, shards) for s in range(shards)],
                    )
            else:
                results = [
                    _kernel_shard(packed, th.t_overlap, s, shards)
                    for s in range(shards)
                ]
            u = np.concatenate([r[0] for r in results])
            v = np.concatenate([r[1] for r in results])
            sfpg = np.concatenate([r[2] for r in results])
            pnr = np.concatenate([r[3] for r in results])
            jny = np.concatenate([r[4] for r in results])

    order = np.lexsort((v, u))
    return u[order], v[order], sfpg[order], pnr[order], jny[order]


def infer_ties(
    dataset: Dataset,
    thresholds: Thresholds | None = None,
    backend: str = "auto",
    max_group_size: int = DEFAULT_GROUP_SIZE_CAP,
    shards: int = 1,
    parallel: bool = False,
) -> list[TieRecord]:
    """Records in, labeled TieRecords out, via the selected backend."""
    u, v, sfpg, pnr, jny = infer_tie_arrays(
        dataset, thresholds, backend, max_group_size, shards, parallel
    )
    return [
        TieRecord(
            int(u[i]), int(v[i]), int(sfpg[i]), int(pnr[i]), int(jny[i]),
            ACTIVE if jny[i] >= 1 else PASSIVE,
        )
        for i in range(len(u))
    ]


def write_tie_arrays(path, u, v, sfpg, pnr, jny) -> None:
    """Stream the canonical tie CSV without materialising TieRecords."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(ties.TIE_COLUMNS) + "\n")
        for i in range(len(u)):
            label = ACTIVE if jny[i] >= 1 else PASSIVE
            fh.write(f"{u[i]},{v[i]},{sfpg[i]},{pnr[i]},{jny[i]},{label}\n")
