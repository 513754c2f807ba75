"""Command-line surface: ``sim convert | run | sweep | presets``.

Exit codes: 0 success, 1 config/usage error, 2 run failure, 3 a sweep
finished but some runs failed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import geodata, harness, reports


def _cmd_convert(args) -> int:
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        print(f"convert: {exc}", file=sys.stderr)
        return 1
    try:
        records = geodata.read_path_records(text, geometry_column=args.geometry_column,
                                            class_column=args.class_column)
        track_classes = {c.strip() for c in args.track_classes.split(",") if c.strip()}
        roads, tracks = geodata.split_tracks(records, track_classes)

        def to_polylines(records):
            out = []
            for rec in records:
                out.extend(geodata.parse_wkt_document(rec.geometry))
            return out

        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        road_lines, track_lines = to_polylines(roads), to_polylines(tracks)
        (out_dir / "roads.wkt").write_text(geodata.write_wkt(road_lines))
        (out_dir / "tracks.wkt").write_text(geodata.write_wkt(track_lines))
    except geodata.GeodataError as exc:
        print(f"convert: {exc}", file=sys.stderr)
        return 1
    print(f"convert: {len(records)} rows -> {len(roads)} roads, {len(tracks)} tracks "
          f"({args.out}/roads.wkt, {args.out}/tracks.wkt)", file=sys.stderr)
    return 0


def _cmd_run(args) -> int:
    try:
        config = harness.load_scenario(args.config)
    except (harness.ConfigError, OSError) as exc:
        print(f"run: {exc}", file=sys.stderr)
        return 1
    out_root = Path(args.out) if args.out else Path(config.out)
    seeds = [args.seed] if args.seed is not None else list(config.seeds)
    bundles = []
    for seed in seeds:
        out_dir = out_root if args.seed is not None else out_root / f"seed{seed}"
        try:
            bundles.append(harness.execute_run(config, seed, out_dir,
                                               write_events=args.events))
        except Exception as exc:  # noqa: BLE001 - report, do not traceback at users
            print(f"run: seed {seed} failed: {exc}", file=sys.stderr)
            return 2
        print(f"run: seed {seed} done -> {out_dir}", file=sys.stderr)
    if args.seed is None and len(bundles) > 1:
        agg = reports.aggregate_seeds(bundles)
        reports.write_aggregate(agg, out_root)
        print(f"run: seed average -> {out_root}", file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    try:
        config = harness.load_scenario(args.config)
        if args.preset:
            preset = harness.load_preset(args.preset)
            axis, values = preset.axis, preset.values
        else:
            if not args.axis or not args.values:
                print("sweep: need --axis and --values (or --preset)", file=sys.stderr)
                return 1
            axis = args.axis
            sep = ";" if ";" in args.values else ","
            values = tuple(v.strip() for v in args.values.split(sep) if v.strip())
        seeds = tuple(int(s) for s in args.seeds.split(",")) if args.seeds else ()
        spec = harness.SweepSpec(axis=axis, values=values, base=config, seeds=seeds)
        # validate every value up front so typos fail before any run
        for raw in values:
            harness.apply_axis(config, axis, raw)
    except (harness.ConfigError, ValueError, OSError) as exc:
        print(f"sweep: {exc}", file=sys.stderr)
        return 1
    out_root = Path(args.out) if args.out else Path(config.out)
    result = harness.run_sweep(spec, out_root)
    print(f"sweep: {len(result.rows)} values x {len(spec.effective_seeds())} seeds "
          f"-> {result.out_dir / 'sweep_summary.csv'}", file=sys.stderr)
    for failure in result.failures:
        print(f"sweep: FAILED {failure}", file=sys.stderr)
    return 0 if result.ok else 3


def _cmd_presets(args) -> int:
    if args.action != "list":
        print("presets: only 'list' is supported", file=sys.stderr)
        return 1
    for preset in harness.list_presets():
        print(f"{preset.name}: axis={preset.axis} values={';'.join(preset.values)}")
        if preset.note:
            print(f"    {preset.note}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim",
                                     description="Road-map DTN simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="split a ways CSV into roads/tracks WKT")
    p.add_argument("--input", required=True, help="CSV export with a WKT column")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--track-classes", default="track",
                   help="comma-separated way classes treated as tracks")
    p.add_argument("--geometry-column", default="WKT")
    p.add_argument("--class-column", default="highway")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("run", help="run one scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="run this seed only (default: every config seed, plus the average)")
    p.add_argument("--out", default=None, help="output directory (default: config 'out')")
    p.add_argument("--events", action="store_true", help="also write events.log")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="sweep one config field across values x seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", default=None, help="config key to sweep, e.g. saw.copies")
    p.add_argument("--values", default=None,
                   help="comma-separated values (use ';' when values contain commas)")
    p.add_argument("--seeds", default=None, help="comma-separated seed list")
    p.add_argument("--preset", default=None, help="use a shipped axis/values preset")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("presets", help="inspect shipped sweep presets")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=_cmd_presets)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
