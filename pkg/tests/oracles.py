"""Independent reference implementations used only to check the real ones.

Everything here is written directly from the behavioural rules, in a
different shape from the production code (whole-list segmentation instead of
incremental stepping, plain BFS instead of union-find), so agreement is
meaningful.
"""

from __future__ import annotations

from collections import deque

from cotravel.journeys import (
    CLOSED_RETURN,
    CLOSED_TIMEOUT,
    CLOSED_WINDOW_END,
    LPG,
    SPG,
    Thresholds,
)

Event = tuple  # (journey_type, closed_by, sfpg_ids, start_date, end_date)


def _interval_for(rec, th: Thresholds) -> int:
    size = len(rec.passengers)
    return th.t_interval_lpg if size >= th.t_size else th.t_interval_spg[size]


def _jaccard(a, b) -> float:
    inter = len(a & b)
    return inter / (len(a) + len(b) - inter) if inter else 0.0


def reference_segment(records, th: Thresholds) -> list[Event]:
    """Direct segmentation of one pair's record list into journey events.

    Consumes the list journey by journey: each journey starts with the next
    unconsumed record and swallows records until a closing rule fires.
    """
    events: list[Event] = []
    i = 0
    n = len(records)
    while i < n:
        opener = records[i]
        jtype = LPG if len(opener.passengers) >= th.t_size else SPG
        members = [i]
        origin = opener.origin
        start = opener.flight_date
        i += 1
        closed = None
        while i < n:
            rec = records[i]
            stale = (rec.flight_date - start).days >= _interval_for(rec, th)
            goes_back = rec.destination == origin
            if jtype == SPG:
                if stale:
                    closed = CLOSED_TIMEOUT  # rec not consumed
                    break
                members.append(i)
                i += 1
                if goes_back:
                    closed = CLOSED_RETURN
                    break
            else:
                if goes_back:
                    members.append(i)
                    i += 1
                    closed = CLOSED_RETURN
                    break
                same_group = (
                    _jaccard(rec.passengers, records[members[-1]].passengers)
                    >= th.t_overlap
                )
                if not same_group and stale:
                    closed = CLOSED_TIMEOUT  # rec not consumed
                    break
                members.append(i)
                i += 1
        events.append(
            (
                jtype,
                closed if closed else CLOSED_WINDOW_END,
                tuple(records[k].sfpg_id for k in members),
                start,
                records[members[-1]].flight_date,
            )
        )
    return events


def closed_form_journey_count(event_types: list[str]) -> int:
    """Journey count implied by an event-type sequence, reasoned out directly:
    a first small-group journey starts the count at one and everything after
    increments; a lone large-group journey counts zero, but any follow-up
    confirms it retroactively, so the whole sequence counts."""
    if not event_types:
        return 0
    if event_types[0] == SPG:
        return len(event_types)
    return 0 if len(event_types) == 1 else len(event_types)


# --- graph oracles ----------------------------------------------------------

def bfs_components(adj: dict) -> list[set]:
    seen: set = set()
    out = []
    for node in adj:
        if node in seen:
            continue
        comp = {node}
        queue = deque([node])
        seen.add(node)
        while queue:
            cur = queue.popleft()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    comp.add(nxt)
                    queue.append(nxt)
        out.append(comp)
    return out


def brute_clustering(adj: dict, node, n_nodes: int) -> tuple[float, float]:
    neighbours = sorted(adj[node])
    k = len(neighbours)
    if k < 2:
        c = 0.0
    else:
        links = 0
        for x in range(k):
            for y in range(x + 1, k):
                if neighbours[y] in adj[neighbours[x]]:
                    links += 1
        c = 2 * links / (k * (k - 1))
    if k == 0 or n_nodes < 2:
        return c, 0.0
    return c, c / (k / (n_nodes - 1))


def bfs_two_hop(adj: dict, node) -> int:
    dist = {node: 0}
    queue = deque([node])
    while queue:
        cur = queue.popleft()
        if dist[cur] == 2:
            continue
        for nxt in adj[cur]:
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return len(dist) - 1


def bfs_ego_components(adj: dict, node) -> int:
    neighbours = set(adj[node])
    sub = {j: adj[j] & neighbours for j in neighbours}
    return len(bfs_components(sub))
