"""Scenario configuration, single runs, and multi-seed parameter sweeps.

Configs are flat ``section.key = value`` text with ``#`` comments. Parsing
is strict: unknown keys, type mismatches and missing files are errors that
name the offending line. A parsed config plus one integer seed determines a
run completely; sweeps rerun the same config with one field swept across a
value list, every value executed for every seed and then seed-averaged.

Output layout::

    out/seed<N>/message_stats.csv ...          (sim run)
    out/<axis>/<value>/seed<N>/...             (sim sweep)
    out/<axis>/<value>/avg_message_stats.csv   (per-value seed average)
    out/<axis>/sweep_summary.csv               (one row per axis value)
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import geodata, mobility, reports
from .rng import substream
from .routing import ProphetParams, SawParams, make_router
from .simcore import Buffer, MessageGenerator, RadioConfig, SimNode, TrafficConfig, World


class ConfigError(ValueError):
    """A scenario file is malformed; the message names the key and line."""


NODE_CLASSES = ("pedestrian", "vehicle", "bus")
ROUTERS = ("prophet", "saw", "epidemic")

_SIZE_SUFFIX = {"k": 1_000, "M": 1_000_000, "G": 1_000_000_000}


def parse_size(text: str) -> int:
    """Byte count with optional decimal suffix: ``512k``, ``1M``, ``2G``."""
    text = text.strip()
    mult = 1
    if text and text[-1] in _SIZE_SUFFIX:
        mult = _SIZE_SUFFIX[text[-1]]
        text = text[:-1]
    try:
        value = float(text) * mult
    except ValueError:
        raise ConfigError(f"not a size: {text!r}") from None
    if value <= 0 or value != int(value):
        raise ConfigError(f"size must be a positive whole byte count, got {text!r}")
    return int(value)


def format_size(n: int) -> str:
    for suffix in ("G", "M", "k"):
        m = _SIZE_SUFFIX[suffix]
        if n % m == 0 and n >= m:
            return f"{n // m}{suffix}"
    return str(n)


def _parse_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"not a finite number: {text!r}")
    return v


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}") from None


def _parse_bool(text: str) -> bool:
    if text in ("true", "false"):
        return text == "true"
    raise ConfigError(f"expected true or false, got {text!r}")


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"expected 'min,max', got {text!r}")
    lo, hi = _parse_float(parts[0]), _parse_float(parts[1])
    if lo > hi:
        raise ConfigError(f"range is backwards: {text!r}")
    return lo, hi


def _parse_size_pair(text: str) -> tuple[int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"expected 'min,max', got {text!r}")
    lo, hi = parse_size(parts[0]), parse_size(parts[1])
    if lo > hi:
        raise ConfigError(f"range is backwards: {text!r}")
    return lo, hi


def _parse_int_list(text: str) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError("empty list")
    return tuple(_parse_int(p) for p in parts)


# ---------------------------------------------------------------------------
# config model


@dataclass(frozen=True)
class GroupConfig:
    count: int
    node_class: str
    buffer: int = 5_000_000
    speed: tuple[float, float] | None = None
    wait: tuple[float, float] | None = None
    route: str | None = None       # resolved path, bus groups only
    reverse: bool = False
    prefix: str = ""

    def profile(self) -> mobility.SpeedProfile:
        base = mobility.DEFAULT_PROFILES[self.node_class]
        lo, hi = self.speed if self.speed else (base.min_speed, base.max_speed)
        wlo, whi = self.wait if self.wait else (base.wait_min, base.wait_max)
        return mobility.SpeedProfile(lo, hi, wlo, whi)


@dataclass(frozen=True)
class ScenarioConfig:
    duration: float
    tick: float = 0.1
    map_file: str | None = None
    map_snap: float = 0.0
    radio_range: float = 10.0
    radio_bandwidth: int = 250_000
    router: str = "saw"
    prophet: ProphetParams = ProphetParams()
    saw: SawParams = SawParams()
    msg_interval: tuple[float, float] = (25.0, 35.0)
    msg_size: tuple[int, int] = (512_000, 1_000_000)
    msg_start: float = 0.0
    msg_end: float | None = None    # None: generate for the whole run
    buffer_report_interval: float = 30.0
    groups: tuple[GroupConfig, ...] = ()
    seeds: tuple[int, ...] = (1, 2, 3)
    out: str = "out"


# key -> (parser, serializer); group keys handled separately
_SCALAR_KEYS = {
    "scenario.duration": "duration",
    "scenario.tick": "tick",
    "map.file": "map_file",
    "map.snap": "map_snap",
    "radio.range": "radio_range",
    "radio.bandwidth": "radio_bandwidth",
    "router": "router",
    "prophet.pinit": None,
    "prophet.beta": None,
    "prophet.k": None,
    "prophet.timeUnit": None,
    "saw.copies": None,
    "saw.mode": None,
    "events.interval": "msg_interval",
    "events.size": "msg_size",
    "events.start": "msg_start",
    "events.end": "msg_end",
    "report.bufferInterval": "buffer_report_interval",
    "groups": None,
    "seeds": "seeds",
    "out": "out",
}

_GROUP_KEYS = ("count", "class", "buffer", "speed", "wait", "route", "reverse", "prefix")


def _split_lines(text: str) -> list[tuple[int, str, str]]:
    """Yield (lineno, key, value) for every assignment line."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        out.append((lineno, key, value))
    return out


def parse_scenario(text: str, base_dir: str | os.PathLike = ".") -> ScenarioConfig:
    """Parse and fully validate a scenario config.

    File paths are resolved relative to ``base_dir`` and must exist.
    Unknown keys are errors, not warnings.
    """
    base = Path(base_dir)
    entries = _split_lines(text)
    seen: dict[str, tuple[int, str]] = {}
    for lineno, key, value in entries:
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen[key] = (lineno, value)

    def take(key: str) -> tuple[int, str] | None:
        return seen.pop(key, None)

    def require(key: str) -> tuple[int, str]:
        got = take(key)
        if got is None:
            raise ConfigError(f"missing required key {key!r}")
        return got

    def parse_with(key: str, parser, default=None, required=False):
        got = require(key) if required else take(key)
        if got is None:
            return default
        lineno, value = got
        try:
            return parser(value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None

    def resolve_file(key: str, required=False) -> str | None:
        got = require(key) if required else take(key)
        if got is None:
            return None
        lineno, value = got
        path = (base / value).resolve() if not Path(value).is_absolute() else Path(value)
        if not path.is_file():
            raise ConfigError(f"line {lineno}: {key}: no such file {value!r}")
        return str(path)

    duration = parse_with("scenario.duration", _parse_float, required=True)
    tick = parse_with("scenario.tick", _parse_float, default=0.1)
    if duration <= 0 or tick <= 0 or duration < tick:
        raise ConfigError("scenario.duration must cover at least one scenario.tick")

    map_file = resolve_file("map.file")
    map_snap = parse_with("map.snap", _parse_float, default=0.0)
    if map_snap < 0:
        raise ConfigError("map.snap must be >= 0")

    radio_range = parse_with("radio.range", _parse_float, default=10.0)
    radio_bandwidth = parse_with("radio.bandwidth", parse_size, default=250_000)

    def parse_router(value: str) -> str:
        if value not in ROUTERS:
            raise ConfigError(f"unknown router {value!r}, pick one of {ROUTERS}")
        return value

    router = parse_with("router", parse_router, required=True)
    try:
        prophet = ProphetParams(
            p_init=parse_with("prophet.pinit", _parse_float, default=0.75),
            beta=parse_with("prophet.beta", _parse_float, default=0.25),
            k=parse_with("prophet.k", _parse_float, default=0.0202),
            time_unit=parse_with("prophet.timeUnit", _parse_float, default=1.0),
        )
        saw_mode = parse_with("saw.mode", str, default="source")
        saw = SawParams(copies=parse_with("saw.copies", _parse_int, default=6), mode=saw_mode)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    msg_interval = parse_with("events.interval", _parse_pair, default=(25.0, 35.0))
    msg_size = parse_with("events.size", _parse_size_pair, default=(512_000, 1_000_000))
    msg_start = parse_with("events.start", _parse_float, default=0.0)
    msg_end = parse_with("events.end", _parse_float, default=None)
    buffer_interval = parse_with("report.bufferInterval", _parse_float, default=30.0)

    n_groups = parse_with("groups", _parse_int, required=True)
    if n_groups < 1:
        raise ConfigError("groups must be >= 1")
    groups = []
    for k in range(1, n_groups + 1):
        pre = f"group{k}."
        count = parse_with(pre + "count", _parse_int, required=True)
        if count < 1:
            raise ConfigError(f"{pre}count must be >= 1")

        def parse_class(value: str) -> str:
            if value not in NODE_CLASSES:
                raise ConfigError(f"unknown class {value!r}, pick one of {NODE_CLASSES}")
            return value

        node_class = parse_with(pre + "class", parse_class, required=True)
        buffer = parse_with(pre + "buffer", parse_size, default=5_000_000)
        speed = parse_with(pre + "speed", _parse_pair, default=None)
        wait = parse_with(pre + "wait", _parse_pair, default=None)
        route = resolve_file(pre + "route")
        reverse = parse_with(pre + "reverse", _parse_bool, default=False)
        prefix = parse_with(pre + "prefix", str, default=f"g{k}_")
        if node_class == "bus" and route is None:
            raise ConfigError(f"{pre}route is required for bus groups")
        if node_class != "bus" and route is not None:
            raise ConfigError(f"{pre}route only applies to bus groups")
        if node_class != "bus" and map_file is None:
            raise ConfigError(f"group{k} ({node_class}) needs map.file")
        groups.append(GroupConfig(count=count, node_class=node_class, buffer=buffer,
                                  speed=speed, wait=wait, route=route,
                                  reverse=reverse, prefix=prefix))
    prefixes = [g.prefix for g in groups]
    if len(set(prefixes)) != len(prefixes):
        raise ConfigError("group prefixes must be unique")

    seeds = parse_with("seeds", _parse_int_list, default=(1, 2, 3))
    out = parse_with("out", str, default="out")

    if seen:
        key = min(seen, key=lambda k: seen[k][0])
        raise ConfigError(f"line {seen[key][0]}: unknown key {key!r}")

    return ScenarioConfig(
        duration=duration, tick=tick, map_file=map_file, map_snap=map_snap,
        radio_range=radio_range, radio_bandwidth=radio_bandwidth, router=router,
        prophet=prophet, saw=saw, msg_interval=msg_interval, msg_size=msg_size,
        msg_start=msg_start, msg_end=msg_end, buffer_report_interval=buffer_interval,
        groups=tuple(groups), seeds=seeds, out=out)


def load_scenario(path: str | os.PathLike) -> ScenarioConfig:
    p = Path(path)
    return parse_scenario(p.read_text(), base_dir=p.parent)


def serialize_scenario(config: ScenarioConfig) -> str:
    """Canonical text form; reparses to an equal config."""
    c = config
    lines = [
        f"scenario.duration = {c.duration}",
        f"scenario.tick = {c.tick}",
    ]
    if c.map_file:
        lines += [f"map.file = {c.map_file}", f"map.snap = {c.map_snap}"]
    lines += [
        f"radio.range = {c.radio_range}",
        f"radio.bandwidth = {format_size(c.radio_bandwidth)}",
        f"router = {c.router}",
        f"prophet.pinit = {c.prophet.p_init}",
        f"prophet.beta = {c.prophet.beta}",
        f"prophet.k = {c.prophet.k}",
        f"prophet.timeUnit = {c.prophet.time_unit}",
        f"saw.copies = {c.saw.copies}",
        f"saw.mode = {c.saw.mode}",
        f"events.interval = {c.msg_interval[0]},{c.msg_interval[1]}",
        f"events.size = {format_size(c.msg_size[0])},{format_size(c.msg_size[1])}",
        f"events.start = {c.msg_start}",
    ]
    if c.msg_end is not None:
        lines.append(f"events.end = {c.msg_end}")
    lines.append(f"report.bufferInterval = {c.buffer_report_interval}")
    lines.append(f"groups = {len(c.groups)}")
    for k, g in enumerate(c.groups, start=1):
        lines.append(f"group{k}.count = {g.count}")
        lines.append(f"group{k}.class = {g.node_class}")
        lines.append(f"group{k}.buffer = {format_size(g.buffer)}")
        if g.speed:
            lines.append(f"group{k}.speed = {g.speed[0]},{g.speed[1]}")
        if g.wait:
            lines.append(f"group{k}.wait = {g.wait[0]},{g.wait[1]}")
        if g.route:
            lines.append(f"group{k}.route = {g.route}")
        if g.reverse:
            lines.append(f"group{k}.reverse = true")
        lines.append(f"group{k}.prefix = {g.prefix}")
    lines.append("seeds = " + ",".join(map(str, c.seeds)))
    lines.append(f"out = {c.out}")
    return "\n".join(lines) + "\n"


def config_hash(config: ScenarioConfig) -> str:
    """Digest of everything that affects a run's behavior (not seeds/out)."""
    canon = serialize_scenario(replace(config, seeds=(0,), out=""))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# running


def build_world(config: ScenarioConfig, seed: int,
                extra_collectors: tuple = ()) -> tuple[World, reports.ReportCollector]:
    """Construct the simulation world for one (config, seed) pair."""
    graph = None
    if config.map_file:
        doc = geodata.parse_wkt_document(Path(config.map_file).read_text())
        graph = geodata.build_map_graph(doc, snap_epsilon=config.map_snap)

    nodes: list[SimNode] = []
    for gi, group in enumerate(config.groups, start=1):
        route = None
        if group.route:
            route = geodata.load_route(Path(group.route).read_text(),
                                       name=Path(group.route).stem)
        ids = [f"{group.prefix}{i}" for i in range(group.count)]
        movers = mobility.make_movers(
            group.node_class, group.count, graph=graph, route=route,
            profile=group.profile(), reverse=group.reverse,
            rngs=[substream(seed, "move", node_id) for node_id in ids])
        for node_id, mover in zip(ids, movers):
            nodes.append(SimNode(len(nodes), node_id, mover, Buffer(group.buffer)))

    router = make_router(config.router, prophet=config.prophet, saw=config.saw)
    traffic = MessageGenerator(
        TrafficConfig(interval_min=config.msg_interval[0], interval_max=config.msg_interval[1],
                      size_min=config.msg_size[0], size_max=config.msg_size[1],
                      start=config.msg_start,
                      end=config.msg_end if config.msg_end is not None else math.inf),
        [n.id for n in nodes], substream(seed, "traffic"))
    collector = reports.ReportCollector(sample_interval=config.buffer_report_interval)
    world = World(nodes, RadioConfig(config.radio_range, float(config.radio_bandwidth)),
                  router, traffic, config.tick,
                  collectors=[collector, *extra_collectors])
    return world, collector


def run_scenario(config: ScenarioConfig, seed: int) -> reports.ReportBundle:
    """Execute one deterministic run and reduce it to a report bundle."""
    world, collector = build_world(config, seed)
    world.run(config.duration)
    world.finalize()
    bundle = collector.bundle
    bundle.metadata = {"config_hash": config_hash(config), "seed": int(seed)}
    return bundle


def execute_run(config: ScenarioConfig, seed: int, out_dir: str | os.PathLike,
                write_events: bool = False) -> reports.ReportBundle:
    """Run and persist the per-run reports under ``out_dir``."""
    out = Path(out_dir)
    if write_events:
        world, collector = build_world(config, seed)
        world.run(config.duration)
        world.finalize()
        bundle = collector.bundle
        bundle.metadata = {"config_hash": config_hash(config), "seed": int(seed)}
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "events.log", "w") as fh:
            for line in world.log.lines():
                fh.write(line + "\n")
    else:
        bundle = run_scenario(config, seed)
    reports.write_bundle(bundle, out)
    return bundle


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[str, ...]
    base: ScenarioConfig
    seeds: tuple[int, ...] = ()

    def effective_seeds(self) -> tuple[int, ...]:
        return self.seeds if self.seeds else self.base.seeds


#: config fields addressable as a sweep axis, with their value parsers
_AXIS_PARSERS = {
    "radio.range": ("radio_range", _parse_float),
    "radio.bandwidth": ("radio_bandwidth", parse_size),
    "saw.copies": ("saw.copies", _parse_int),
    "saw.mode": ("saw.mode", str),
    "prophet.timeUnit": ("prophet.time_unit", _parse_float),
    "prophet.k": ("prophet.k", _parse_float),
    "prophet.pinit": ("prophet.p_init", _parse_float),
    "prophet.beta": ("prophet.beta", _parse_float),
    "events.interval": ("msg_interval", _parse_pair),
    "events.size": ("msg_size", _parse_size_pair),
    "scenario.duration": ("duration", _parse_float),
}


def apply_axis(config: ScenarioConfig, axis: str, raw_value: str) -> tuple[ScenarioConfig, object]:
    """Return (config with one field replaced, the parsed value).

    Besides plain config keys, two whole-population axes exist: ``buffer``
    sets every group's buffer, and ``nodes`` sets the total node count,
    split across groups in proportion to their configured counts.
    """
    if axis == "buffer":
        value = parse_size(raw_value)
        groups = tuple(replace(g, buffer=value) for g in config.groups)
        return replace(config, groups=groups), value
    if axis == "nodes":
        total = _parse_int(raw_value)
        if total < len(config.groups):
            raise ConfigError(f"nodes axis needs >= {len(config.groups)} (one per group)")
        base = [g.count for g in config.groups]
        base_total = sum(base)
        spare = total - len(base)  # everyone gets one; the rest goes by share
        counts = [1 + (spare * b) // base_total for b in base]
        k = 0
        while sum(counts) < total:  # rounding remainder, round-robin
            counts[k % len(counts)] += 1
            k += 1
        groups = tuple(replace(g, count=n) for g, n in zip(config.groups, counts))
        return replace(config, groups=groups), total
    if axis.startswith("group") and axis.endswith((".count", ".buffer")):
        idx_text = axis[len("group"):axis.index(".")]
        try:
            idx = int(idx_text) - 1
        except ValueError:
            raise ConfigError(f"bad sweep axis {axis!r}") from None
        if not (0 <= idx < len(config.groups)):
            raise ConfigError(f"sweep axis {axis!r}: no such group")
        field_name = axis.rsplit(".", 1)[1]
        value = _parse_int(raw_value) if field_name == "count" else parse_size(raw_value)
        if field_name == "count" and value < 1:
            raise ConfigError(f"sweep axis {axis!r}: count must be >= 1")
        groups = list(config.groups)
        groups[idx] = replace(groups[idx], **{"count" if field_name == "count" else "buffer": value})
        return replace(config, groups=tuple(groups)), value

    if axis not in _AXIS_PARSERS:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    target, parser = _AXIS_PARSERS[axis]
    value = parser(raw_value)
    if target.startswith("saw."):
        try:
            saw = replace(config.saw, **{target.split(".", 1)[1]: value})
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return replace(config, saw=saw), value
    if target.startswith("prophet."):
        try:
            prophet = replace(config.prophet, **{target.split(".", 1)[1]: value})
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return replace(config, prophet=prophet), value
    return replace(config, **{target: value}), value


def _safe_name(text: str) -> str:
    return "".join(ch if (ch.isalnum() or ch in "._-") else "_" for ch in str(text))


def _worker(args):
    config, seed, out_dir = args
    try:
        bundle = execute_run(config, seed, out_dir)
        return seed, bundle, None
    except Exception as exc:  # noqa: BLE001 - sweep must survive run failures
        return seed, None, f"{type(exc).__name__}: {exc}"


@dataclass
class SweepRow:
    value: object
    stats: reports.MessageStats | None
    error: str | None = None


@dataclass
class SweepResult:
    axis: str
    rows: list[SweepRow]
    out_dir: Path
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def worker_pool_size(n_jobs: int) -> int:
    env = os.environ.get("SIM_THREADS", "").strip()
    if env:
        try:
            limit = max(1, int(env))
        except ValueError:
            raise ConfigError(f"SIM_THREADS must be an integer, got {env!r}") from None
    else:
        limit = os.cpu_count() or 1
    return max(1, min(limit, n_jobs))


def run_sweep(spec: SweepSpec, out_root: str | os.PathLike) -> SweepResult:
    """Run axis x seeds, seed-average each value, and write the summary.

    Individual run failures do not stop the sweep; failed values produce a
    summary row with NaN statistics and are listed in ``failures``.
    """
    seeds = spec.effective_seeds()
    if not seeds:
        raise ConfigError("sweep needs at least one seed")
    axis_dir = Path(out_root) / _safe_name(spec.axis)
    jobs = []
    derived = []
    for raw in spec.values:
        config, value = apply_axis(spec.base, spec.axis, raw)
        value_dir = axis_dir / _safe_name(_render_value(value))
        derived.append((value, config, value_dir))
        for seed in seeds:
            jobs.append((config, seed, value_dir / f"seed{seed}"))

    results: dict[tuple[str, int], tuple] = {}
    pool = worker_pool_size(len(jobs))
    if pool == 1:
        outcomes = map(_worker, jobs)
    else:
        with ProcessPoolExecutor(max_workers=pool) as ex:
            outcomes = list(ex.map(_worker, jobs))
    for (config, seed, out_dir), (rseed, bundle, error) in zip(jobs, outcomes):
        results[(str(out_dir), rseed)] = (bundle, error)

    rows: list[SweepRow] = []
    failures: list[str] = []
    for value, config, value_dir in derived:
        bundles = []
        errors = []
        for seed in seeds:
            bundle, error = results[(str(value_dir / f"seed{seed}"), seed)]
            if error:
                errors.append(f"{spec.axis}={_render_value(value)} seed{seed}: {error}")
            else:
                bundles.append(bundle)
        if errors or not bundles:
            failures.extend(errors)
            rows.append(SweepRow(value=value, stats=None, error="; ".join(errors)))
            continue
        agg = reports.aggregate_seeds(bundles)
        reports.write_aggregate(agg, value_dir)
        rows.append(SweepRow(value=value, stats=agg.stats))

    axis_dir.mkdir(parents=True, exist_ok=True)
    (axis_dir / "sweep_summary.csv").write_text(_summary_csv(spec.axis, rows))
    return SweepResult(axis=spec.axis, rows=rows, out_dir=axis_dir, failures=failures)


def _render_value(value: object) -> str:
    if isinstance(value, tuple):
        return ",".join(reports.fmt_num(v) for v in value)
    return reports.fmt_num(value)


def _summary_csv(axis: str, rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = reports.MessageStats.field_names()
    writer.writerow([axis, *names, "status"])
    for row in rows:
        stats = row.stats if row.stats is not None else reports.MessageStats()
        cells = [reports.fmt_num(getattr(stats, n)) if row.stats is not None else "NaN"
                 for n in names]
        writer.writerow([_render_value(row.value), *cells, "ok" if row.stats else "failed"])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# presets


@dataclass(frozen=True)
class Preset:
    name: str
    axis: str
    values: tuple[str, ...]
    note: str


def _preset_dir() -> Path:
    from importlib import resources

    return Path(str(resources.files("dtnsim"))) / "data" / "presets"


def load_preset(name: str) -> Preset:
    path = _preset_dir() / f"{name}.preset"
    if not path.is_file():
        raise ConfigError(f"no preset named {name!r} (try: sim presets list)")
    axis = None
    values: tuple[str, ...] = ()
    notes = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            notes.append(line.lstrip("# "))
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "axis":
            axis = value
        elif key == "values":
            values = tuple(v.strip() for v in value.split(";") if v.strip())
        else:
            raise ConfigError(f"{path.name} line {lineno}: unknown preset key {key!r}")
    if not axis or not values:
        raise ConfigError(f"{path.name}: preset needs axis and values")
    return Preset(name=name, axis=axis, values=values, note=" ".join(notes))


def list_presets() -> list[Preset]:
    return [load_preset(p.stem) for p in sorted(_preset_dir().glob("*.preset"))]
