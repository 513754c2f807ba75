"""Run reports: message statistics, contact times, buffer occupancy,
distance/delay — plus arithmetic-mean aggregation across seeds.

Every per-run artifact is a pure function of the event log (plus, for the
distance-delay report, the node positions captured at each message's
creation), so persisted logs can be re-reduced to identical numbers.
Undefined averages (e.g. latency with zero deliveries) are carried as NaN
and spelled ``NaN`` in CSV output; they are excluded from seed averaging
and the exclusions are counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Iterable, Mapping

from .simcore import (
    EV_ABORTED,
    EV_CREATED,
    EV_DELIVERED,
    EV_DROPPED,
    EV_LINK_DOWN,
    EV_LINK_UP,
    EV_RELAYED,
    EV_STARTED,
    Event,
    EventLog,
)

UNDEFINED = float("nan")


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else UNDEFINED


def fmt_num(v) -> str:
    """Shortest round-trip decimal; NaN spelled out; ints stay ints."""
    if isinstance(v, float):
        if math.isnan(v):
            return "NaN"
        if v.is_integer() and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# message statistics


@dataclass(frozen=True)
class MessageStats:
    created: int = 0
    started: int = 0
    relayed: int = 0
    aborted: int = 0
    dropped: int = 0
    delivered: int = 0
    delivery_prob: float = UNDEFINED
    overhead_ratio: float = UNDEFINED
    latency_avg: float = UNDEFINED
    hopcount_avg: float = UNDEFINED
    buffertime_avg: float = UNDEFINED

    @staticmethod
    def field_names() -> list[str]:
        return [f.name for f in fields(MessageStats)]

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in self.field_names()}


def finalize_message_stats(log: EventLog | Iterable[Event], horizon: float) -> MessageStats:
    """Reduce an event log to the run's headline counters and averages.

    ``started >= relayed + aborted``; the difference is transfers still in
    flight at the horizon. Buffer-residency episodes still open at the
    horizon are excluded from the buffer-time average.
    """
    counts = {k: 0 for k in (EV_CREATED, EV_STARTED, EV_RELAYED, EV_ABORTED,
                             EV_DROPPED, EV_DELIVERED)}
    destination: dict[str, str] = {}
    created_at: dict[str, float] = {}
    latencies: list[float] = []
    hopcounts: list[float] = []
    episodes_open: dict[tuple[str, str], float] = {}
    episode_lengths: list[float] = []

    def open_episode(node: str, mid: str, t: float) -> None:
        episodes_open[(node, mid)] = t

    def close_episode(node: str, mid: str, t: float) -> None:
        t0 = episodes_open.pop((node, mid), None)
        if t0 is not None:
            episode_lengths.append(t - t0)

    for ev in log:
        kind = ev.kind
        if kind in counts:
            counts[kind] += 1
        if kind == EV_CREATED:
            mid, src, dst, _size = ev.fields
            destination[mid] = dst
            created_at[mid] = ev.time
            open_episode(src, mid, ev.time)
        elif kind == EV_RELAYED:
            mid, _frm, to = ev.fields
            if destination.get(mid) != to:
                open_episode(to, mid, ev.time)
        elif kind == EV_DELIVERED:
            mid, frm, _to, hops = ev.fields
            latencies.append(ev.time - created_at[mid])
            hopcounts.append(float(hops))
            close_episode(frm, mid, ev.time)
        elif kind == EV_DROPPED:
            mid, node = ev.fields
            close_episode(node, mid, ev.time)

    created = counts[EV_CREATED]
    delivered = counts[EV_DELIVERED]
    return MessageStats(
        created=created,
        started=counts[EV_STARTED],
        relayed=counts[EV_RELAYED],
        aborted=counts[EV_ABORTED],
        dropped=counts[EV_DROPPED],
        delivered=delivered,
        delivery_prob=(delivered / created) if created else UNDEFINED,
        overhead_ratio=((counts[EV_RELAYED] - delivered) / delivered) if delivered else UNDEFINED,
        latency_avg=_mean(latencies),
        hopcount_avg=_mean(hopcounts),
        buffertime_avg=_mean(episode_lengths),
    )


# ---------------------------------------------------------------------------
# contact times


def bin_contact_durations(log: EventLog | Iterable[Event], horizon: float) -> dict[int, float]:
    """Histogram of contact lengths, rounded half-up to the nearest second.

    Contacts still open at the horizon are closed there.
    """
    open_since: dict[tuple[str, str], float] = {}
    bins: dict[int, float] = {}

    def record(duration: float) -> None:
        key = int(math.floor(duration + 0.5))
        bins[key] = bins.get(key, 0) + 1

    for ev in log:
        if ev.kind == EV_LINK_UP:
            a, b = ev.fields
            open_since[(a, b)] = ev.time
        elif ev.kind == EV_LINK_DOWN:
            a, b = ev.fields[0], ev.fields[1]
            t0 = open_since.pop((a, b), None)
            if t0 is None:
                raise ValueError(f"link_down without link_up for {(a, b)}")
            record(ev.time - t0)
    for t0 in open_since.values():
        record(horizon - t0)
    return bins


# ---------------------------------------------------------------------------
# buffer occupancy


@dataclass(frozen=True)
class OccupancyRow:
    time: float
    mean: float
    min: float
    max: float


def sample_buffer_occupancy(world, t: float) -> OccupancyRow:
    """One timeline row: mean/min/max of per-node buffer fill fractions."""
    fracs = [n.buffer.occupancy() for n in world.nodes]
    if not fracs:
        return OccupancyRow(t, 0.0, 0.0, 0.0)
    return OccupancyRow(t, sum(fracs) / len(fracs), min(fracs), max(fracs))


# ---------------------------------------------------------------------------
# distance / delay


@dataclass(frozen=True)
class DistanceDelayRecord:
    message_id: str
    distance: float
    delay: float   # NaN when the message was never delivered
    hops: int


def record_distance_delay(log: EventLog | Iterable[Event],
                          creation_distance: Mapping[str, float]) -> list[DistanceDelayRecord]:
    """One record per created message, in creation order."""
    order: list[str] = []
    created_at: dict[str, float] = {}
    delivered_at: dict[str, float] = {}
    hops: dict[str, int] = {}
    for ev in log:
        if ev.kind == EV_CREATED:
            mid = ev.fields[0]
            order.append(mid)
            created_at[mid] = ev.time
        elif ev.kind == EV_DELIVERED:
            mid = ev.fields[0]
            delivered_at[mid] = ev.time
            hops[mid] = int(ev.fields[3])
    out = []
    for mid in order:
        if mid in delivered_at:
            out.append(DistanceDelayRecord(mid, creation_distance[mid],
                                           delivered_at[mid] - created_at[mid], hops[mid]))
        else:
            out.append(DistanceDelayRecord(mid, creation_distance[mid], UNDEFINED, 0))
    return out


# ---------------------------------------------------------------------------
# bundles and the live collector


@dataclass
class ReportBundle:
    stats: MessageStats
    contact_histogram: dict[int, float]
    occupancy: list[OccupancyRow]
    distance_delay: list[DistanceDelayRecord]
    metadata: dict[str, object]


class ReportCollector:
    """Attached to a world; observes events and samples the buffers."""

    def __init__(self, sample_interval: float = 30.0):
        if sample_interval <= 0:
            raise ValueError("sample interval must be positive")
        self.sample_interval = sample_interval
        self._world = None
        self._next_sample = sample_interval
        self.occupancy: list[OccupancyRow] = []
        self.creation_distance: dict[str, float] = {}
        self.bundle: ReportBundle | None = None

    def attach(self, world) -> None:
        self._world = world

    def on_event(self, ev: Event) -> None:
        if ev.kind == EV_CREATED:
            mid, src, dst, _size = ev.fields
            a = self._world.node_by_id(src).position
            b = self._world.node_by_id(dst).position
            self.creation_distance[mid] = math.dist(a, b)

    def sample(self, world, now: float) -> None:
        while self._next_sample <= now + 1e-9:
            self.occupancy.append(sample_buffer_occupancy(world, self._next_sample))
            self._next_sample += self.sample_interval

    def finalize(self, world, horizon: float) -> ReportBundle:
        self.bundle = ReportBundle(
            stats=finalize_message_stats(world.log, horizon),
            contact_histogram=bin_contact_durations(world.log, horizon),
            occupancy=list(self.occupancy),
            distance_delay=record_distance_delay(world.log, self.creation_distance),
            metadata={},
        )
        return self.bundle


# ---------------------------------------------------------------------------
# seed aggregation


@dataclass
class AggregateBundle:
    stats: MessageStats
    undefined_excluded: dict[str, int]
    contact_histogram: dict[int, float]
    occupancy: list[OccupancyRow]
    distance_delay: list[tuple[int, DistanceDelayRecord]]  # (seed, record)
    metadata: dict[str, object]


def aggregate_seeds(bundles: list[ReportBundle]) -> AggregateBundle:
    """Arithmetic-mean aggregation across same-config, different-seed runs.

    Stats fields average with NaN values excluded (and counted); histograms
    average bin-wise with missing bins as zero; occupancy averages row-wise;
    distance-delay records concatenate, each tagged with its seed.
    """
    if not bundles:
        raise ValueError("nothing to aggregate")
    hashes = {b.metadata.get("config_hash") for b in bundles}
    if len(hashes) != 1:
        raise ValueError(f"bundles disagree on config: {sorted(map(str, hashes))}")

    excluded: dict[str, int] = {}
    values: dict[str, float] = {}
    for name in MessageStats.field_names():
        per_seed = [getattr(b.stats, name) for b in bundles]
        defined = [v for v in per_seed if not (isinstance(v, float) and math.isnan(v))]
        excluded[name] = len(per_seed) - len(defined)
        values[name] = _mean([float(v) for v in defined])
    stats = MessageStats(**values)  # count fields may average to fractions

    all_bins = sorted({k for b in bundles for k in b.contact_histogram})
    histogram = {k: sum(b.contact_histogram.get(k, 0) for b in bundles) / len(bundles)
                 for k in all_bins}

    lengths = {len(b.occupancy) for b in bundles}
    if len(lengths) != 1:
        raise ValueError("occupancy timelines have differing lengths")
    occupancy = []
    for rows in zip(*(b.occupancy for b in bundles)):
        times = {r.time for r in rows}
        if len(times) != 1:
            raise ValueError("occupancy timelines are misaligned")
        occupancy.append(OccupancyRow(
            rows[0].time,
            _mean([r.mean for r in rows]),
            _mean([r.min for r in rows]),
            _mean([r.max for r in rows]),
        ))

    distance_delay = []
    for b in bundles:
        seed = int(b.metadata.get("seed", -1))
        distance_delay.extend((seed, rec) for rec in b.distance_delay)

    meta = dict(bundles[0].metadata)
    meta.pop("seed", None)
    meta["seeds"] = [int(b.metadata.get("seed", -1)) for b in bundles]
    return AggregateBundle(stats=stats, undefined_excluded=excluded,
                           contact_histogram=histogram, occupancy=occupancy,
                           distance_delay=distance_delay, metadata=meta)


# ---------------------------------------------------------------------------
# CSV output


MESSAGE_STATS_FILE = "message_stats.csv"
CONTACT_TIMES_FILE = "contact_times.csv"
BUFFER_OCCUPANCY_FILE = "buffer_occupancy.csv"
DISTANCE_DELAY_FILE = "distance_delay.csv"


def _stats_csv(stats: MessageStats) -> str:
    names = MessageStats.field_names()
    head = ",".join(names)
    row = ",".join(fmt_num(getattr(stats, n)) for n in names)
    return f"{head}\n{row}\n"


def _contacts_csv(histogram: dict[int, float]) -> str:
    lines = ["duration_s,count"]
    lines += [f"{k},{fmt_num(histogram[k])}" for k in sorted(histogram)]
    return "\n".join(lines) + "\n"


def _occupancy_csv(rows: list[OccupancyRow]) -> str:
    lines = ["time_s,mean,min,max"]
    lines += [f"{fmt_num(r.time)},{fmt_num(r.mean)},{fmt_num(r.min)},{fmt_num(r.max)}"
              for r in rows]
    return "\n".join(lines) + "\n"


def _distance_delay_csv(records: list[DistanceDelayRecord]) -> str:
    lines = ["message_id,distance_m,delay_s,hops"]
    lines += [f"{r.message_id},{fmt_num(r.distance)},{fmt_num(r.delay)},{r.hops}"
              for r in records]
    return "\n".join(lines) + "\n"


def _tagged_distance_delay_csv(records: list[tuple[int, DistanceDelayRecord]]) -> str:
    lines = ["seed,message_id,distance_m,delay_s,hops"]
    lines += [f"{seed},{r.message_id},{fmt_num(r.distance)},{fmt_num(r.delay)},{r.hops}"
              for seed, r in records]
    return "\n".join(lines) + "\n"


def write_bundle(bundle: ReportBundle, out_dir) -> None:
    """Write the four per-run report CSVs (plus metadata) into ``out_dir``."""
    import json
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / MESSAGE_STATS_FILE).write_text(_stats_csv(bundle.stats))
    (out / CONTACT_TIMES_FILE).write_text(_contacts_csv(bundle.contact_histogram))
    (out / BUFFER_OCCUPANCY_FILE).write_text(_occupancy_csv(bundle.occupancy))
    (out / DISTANCE_DELAY_FILE).write_text(_distance_delay_csv(bundle.distance_delay))
    (out / "metadata.json").write_text(json.dumps(bundle.metadata, sort_keys=True) + "\n")


def write_aggregate(agg: AggregateBundle, out_dir) -> None:
    """Write the seed-averaged CSVs, ``avg_`` prefixed, into ``out_dir``."""
    import json
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"avg_{MESSAGE_STATS_FILE}").write_text(_stats_csv(agg.stats))
    (out / f"avg_{CONTACT_TIMES_FILE}").write_text(_contacts_csv(agg.contact_histogram))
    (out / f"avg_{BUFFER_OCCUPANCY_FILE}").write_text(_occupancy_csv(agg.occupancy))
    (out / f"avg_{DISTANCE_DELAY_FILE}").write_text(_tagged_distance_delay_csv(agg.distance_delay))
    meta = dict(agg.metadata)
    meta["undefined_excluded"] = {k: v for k, v in agg.undefined_excluded.items() if v}
    (out / "avg_metadata.json").write_text(json.dumps(meta, sort_keys=True) + "\n")
