"""Command-line pipeline: synth, compute, distance, partition, scan.

Subcommands exchange data through plain-text files: delimited point tables,
the barcode interchange format, JSON partition rules, and CSV plot series.
Table output is formatted to 2 decimals for reading; structured-text output
carries full precision and is byte-stable for identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .barcode_metrics import WassersteinConfig, wasserstein_details
from .errors import (CapacityError, ConfigError, EmptyInputError,
                     IncomparableBarcodesError, ParseError, TdakitError,
                     TooSmallError, UnclassifiableRecordError)
from .metric_space import (ColumnSpec, PointCloud, read_records,
                           standardize_features)
from .persistence import Barcode, compute_persistence, read_barcode, write_barcode
from .partition_analysis import (default_partition_spec, load_partition_spec,
                                 pairwise_report, partition_records,
                                 partition_size_sweep, with_subset_halves)
from .synthetic import MANIFOLD_KINDS, ManifoldSpec, sample
from .vr_filtration import (DEFAULT_SIMPLEX_BUDGET, FiltrationParams,
                            build_filtration, filtration_dump_lines)

__all__ = ["main", "emit_barcode_plot"]

EXIT_OK = 0
EXIT_USAGE = 2          # argparse: unknown flags, bad values
EXIT_IO = 3             # missing or unreadable/unwritable files
EXIT_PARSE = 4          # malformed tables, barcodes, or rules documents
EXIT_CAPACITY = 5       # simplex budget exceeded
EXIT_INCOMPARABLE = 6   # barcodes with different dimension caps
EXIT_PARTITION = 7      # unclassifiable records / too few points

_EPILOG = """\
exit codes:
  0  success
  2  usage error (unknown flag, bad value)
  3  missing or unreadable file
  4  malformed input (table, barcode, or rules document)
  5  simplex budget exceeded (lower --max-dim, set --cap, or raise --budget)
  6  barcodes computed with different --max-dim are incomparable
  7  partition error (unclassifiable records, too few points)

file formats are documented in FORMATS.md.
"""


@dataclass(frozen=True)
class RunConfig:
    """Validated per-invocation settings shared by the subcommand handlers."""

    subcommand: str
    inputs: tuple[Path, ...]
    output: Path | None
    filtration: FiltrationParams
    metric: WassersteinConfig
    rules_path: Path | None
    seed: int
    out_format: str
    threads: int


def _columns_from(args) -> ColumnSpec:
    features = tuple(s for s in (args.features or "").split(",") if s)
    return ColumnSpec(feature_columns=features,
                      temperature_column=args.temperature_col,
                      index_column=args.index_col)


def _metric_from(args) -> WassersteinConfig:
    dims = None
    if getattr(args, "dims", None):
        try:
            dims = tuple(int(s) for s in args.dims.split(",") if s)
        except ValueError:
            raise ConfigError(f"--dims must be a comma-separated list of integers, "
                              f"got {args.dims!r}") from None
    try:
        return WassersteinConfig(p=args.p, dimensions=dims,
                                 essential_policy=args.essential)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _filtration_from(args) -> FiltrationParams:
    return FiltrationParams(max_dimension=args.max_dim, diameter_cap=args.cap,
                            budget=args.budget)


def _run_config(args, inputs: tuple[Path, ...], output: Path | None) -> RunConfig:
    cfg = RunConfig(
        subcommand=args.command,
        inputs=inputs,
        output=output,
        filtration=_filtration_from(args) if hasattr(args, "max_dim") else FiltrationParams(),
        metric=_metric_from(args) if hasattr(args, "p") else WassersteinConfig(),
        rules_path=Path(args.rules) if getattr(args, "rules", None) else None,
        seed=getattr(args, "seed", 0),
        out_format=getattr(args, "format", "table"),
        threads=getattr(args, "threads", 1),
    )
    for path in cfg.inputs:
        if not path.is_file():
            raise FileNotFoundError(f"input file not found: {path}")
    if cfg.rules_path is not None and not cfg.rules_path.is_file():
        raise FileNotFoundError(f"rules file not found: {cfg.rules_path}")
    return cfg


def _load_table(path: Path, args) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        return read_records(fh, _columns_from(args), delimiter=args.delimiter)


def _standardized_records(records):
    import numpy as np

    from .metric_space import FeatureRecord
    pts = np.array([r.features for r in records], dtype=float)
    mean = pts.mean(axis=0)
    std = pts.std(axis=0)
    std[std == 0.0] = 1.0
    pts = (pts - mean) / std
    return [FeatureRecord(r.index, tuple(row), r.temperature)
            for r, row in zip(records, pts.tolist())]


def emit_barcode_plot(barcode: Barcode, path) -> None:
    """Plot-ready series: one CSV record per interval, essentials drawn to
    1.05x the enclosing diameter and flagged."""
    cap = 1.05 * barcode.enclosing_diameter
    ivs = sorted(barcode.intervals, key=lambda iv: (iv.dimension, iv.birth, iv.death))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,dimension,birth,death,essential\n")
        for y, iv in enumerate(ivs):
            essential = math.isinf(iv.death)
            death = cap if essential else iv.death
            fh.write(f"{y},{iv.dimension},{iv.birth!r},{death!r},{int(essential)}\n")


def _write_points_csv(cloud: PointCloud, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(f"x{i}" for i in range(cloud.dim)) + "\n")
        for row in cloud.points.tolist():
            fh.write(",".join(repr(v) for v in row) + "\n")


# ---- subcommand handlers ----

def _cmd_synth(args) -> int:
    _run_config(args, inputs=(), output=Path(args.out))
    cloud = sample(ManifoldSpec(kind=args.kind, n=args.n, noise_sigma=args.noise,
                                seed=args.seed, scale=args.scale))
    _write_points_csv(cloud, Path(args.out))
    print(f"wrote {cloud.n} points ({args.kind}, d={cloud.dim}) to {args.out}")
    return EXIT_OK


def _cmd_compute(args) -> int:
    cfg = _run_config(args, inputs=(Path(args.input),), output=Path(args.out))
    records = _load_table(cfg.inputs[0], args)
    if args.standardize:
        records = _standardized_records(records)
    label = args.label or cfg.inputs[0].stem
    cloud = PointCloud.from_records(label, records)
    from .metric_space import pairwise_distances
    filt = build_filtration(pairwise_distances(cloud), cfg.filtration.max_dimension,
                            cfg.filtration.diameter_cap, cfg.filtration.budget)
    if args.dump_filtration:
        with open(args.dump_filtration, "w", encoding="utf-8", newline="\n") as fh:
            for line in filtration_dump_lines(filt):
                fh.write(line + "\n")
    barcode = compute_persistence(filt, label=label)
    write_barcode(barcode, cfg.output)
    if args.plot_out:
        emit_barcode_plot(barcode, args.plot_out)
    print(f"wrote barcode with {len(barcode.intervals)} intervals to {cfg.output}")
    return EXIT_OK


def _cmd_distance(args) -> int:
    cfg = _run_config(args, inputs=(Path(args.barcode1), Path(args.barcode2)), output=None)
    b1 = read_barcode(cfg.inputs[0])
    b2 = read_barcode(cfg.inputs[1])
    result = wasserstein_details(b1, b2, cfg.metric)
    print(f"distance {result.distance!r} ({result.distance:.2f})")
    for dim in sorted(result.per_dimension):
        print(f"dim {dim} {result.per_dimension[dim]!r}")
    return EXIT_OK


def _partition_clouds(args, cfg: RunConfig) -> dict[str, PointCloud]:
    records = _load_table(cfg.inputs[0], args)
    if args.standardize:
        records = _standardized_records(records)
    if cfg.rules_path is not None:
        spec = load_partition_spec(cfg.rules_path.read_text(encoding="utf-8"))
    else:
        spec = default_partition_spec()
    return partition_records(records, spec)


def _largest(clouds: dict[str, PointCloud]) -> str:
    # ties keep the first partition in rule order
    return max(clouds, key=lambda name: clouds[name].n)


def _cmd_partition(args) -> int:
    cfg = _run_config(args, inputs=(Path(args.input),), output=Path(args.out) if args.out else None)
    clouds = _partition_clouds(args, cfg)
    if not args.no_subsets:
        target = args.split or _largest(clouds)
        if target not in clouds:
            raise ConfigError(f"--split names unknown partition {target!r}")
        clouds = with_subset_halves(clouds, target, cfg.seed)
    report = pairwise_report(clouds, cfg.metric, cfg.filtration, threads=cfg.threads)
    text = report.to_table_text() if cfg.out_format == "table" else report.to_records_text()
    if cfg.output is not None:
        cfg.output.write_text(text, encoding="utf-8")
        print(f"wrote report over {len(report.labels)} partitions to {cfg.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_scan(args) -> int:
    cfg = _run_config(args, inputs=(Path(args.input),), output=Path(args.out) if args.out else None)
    clouds = _partition_clouds(args, cfg)
    target = args.target or _largest(clouds)
    if target not in clouds:
        raise ConfigError(f"--target names unknown partition {target!r}")
    try:
        fractions = [float(s) for s in args.fractions.split(",") if s]
    except ValueError:
        raise ConfigError(f"--fractions must be a comma-separated list of numbers, "
                          f"got {args.fractions!r}") from None
    sweep = partition_size_sweep(clouds, target, fractions, cfg.seed,
                                 cfg.metric, cfg.filtration, threads=cfg.threads)

    header = f"{'fraction':>8} {'partition':>12} {'points':>7} {'row_sum':>10} {'scaled':>8}"
    print(header)
    lines = ["fraction,label,n_points,row_sum,scaled_sum"]
    for row in sweep.rows:
        rep = row.report
        for i, label in enumerate(rep.labels):
            print(f"{row.fraction:>8.2f} {label:>12} {rep.n_points[i]:>7d} "
                  f"{rep.row_sums[i]:>10.2f} {rep.scaled_sums[i]:>8.2f}")
            lines.append(f"{row.fraction!r},{label},{rep.n_points[i]},"
                         f"{rep.row_sums[i]!r},{rep.scaled_sums[i]!r}")
    if cfg.output is not None:
        cfg.output.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote sweep series to {cfg.output}")
    return EXIT_OK


# ---- parser ----

def _add_table_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", default=None,
                   help="comma-separated feature column names (default: every "
                        "column not claimed by --temperature-col/--index-col)")
    p.add_argument("--temperature-col", default=None)
    p.add_argument("--index-col", default=None,
                   help="record index column (default: row number from 0)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--standardize", action="store_true",
                   help="z-score feature columns before computing distances")


def _add_filtration_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-dim", type=int, default=2,
                   help="largest simplex dimension (homology below it is "
                        "fully resolved; default 2)")
    p.add_argument("--cap", type=float, default=None,
                   help="diameter cap for the filtration (default: none)")
    p.add_argument("--budget", type=int, default=DEFAULT_SIMPLEX_BUDGET,
                   help="simplex budget before a capacity error")


def _add_metric_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, default=2.0, help="Wasserstein order (default 2)")
    p.add_argument("--dims", default=None,
                   help="comma-separated homology dimensions to compare "
                        "(default: all dimensions below --max-dim)")
    p.add_argument("--essential", choices=("truncate", "match-or-fail"),
                   default="truncate", help="how infinite intervals are matched")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdakit",
        description="Persistent-homology barcodes, Wasserstein distances, and "
                    "size-normalized partition comparison for point-cloud data.",
        epilog=_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="sample a synthetic point cloud with known topology")
    p.add_argument("--kind", choices=MANIFOLD_KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("compute", help="compute the barcode of a point table")
    p.add_argument("--input", required=True)
    p.add_argument("--label", default=None, help="barcode label (default: input stem)")
    _add_table_flags(p)
    _add_filtration_flags(p)
    p.add_argument("--out", required=True, help="barcode output path")
    p.add_argument("--plot-out", default=None, help="also write a plot-series CSV")
    p.add_argument("--dump-filtration", default=None,
                   help="write 'diameter dim v0 ... vk' per simplex, in filtration order")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("distance", help="p-Wasserstein distance between two barcode files")
    p.add_argument("barcode1")
    p.add_argument("barcode2")
    _add_metric_flags(p)
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("partition", help="partition a table by rules and report "
                                         "pairwise Wasserstein distances")
    p.add_argument("--input", required=True)
    p.add_argument("--rules", default=None, help="JSON rules file (default: built-in "
                                                 "freezing/cold/warm bands, damage index > 3475)")
    _add_table_flags(p)
    _add_filtration_flags(p)
    _add_metric_flags(p)
    p.add_argument("--no-subsets", action="store_true",
                   help="skip the random halves of the split partition")
    p.add_argument("--split", default=None,
                   help="partition to halve (default: the largest)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("table", "records"), default="table")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_partition)

    p = sub.add_parser("scan", help="re-run the report while one partition is subsampled")
    p.add_argument("--input", required=True)
    p.add_argument("--rules", default=None)
    _add_table_flags(p)
    _add_filtration_flags(p)
    _add_metric_flags(p)
    p.add_argument("--target", default=None,
                   help="partition to subsample (default: the largest)")
    p.add_argument("--fractions", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="write the plot-series CSV here")
    p.set_defaults(func=_cmd_scan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"tdakit: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"tdakit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, EmptyInputError, ConfigError) as exc:
        print(f"tdakit: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"tdakit: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except IncomparableBarcodesError as exc:
        print(f"tdakit: {exc}", file=sys.stderr)
        return EXIT_INCOMPARABLE
    except (UnclassifiableRecordError, TooSmallError) as exc:
        print(f"tdakit: {exc}", file=sys.stderr)
        return EXIT_PARTITION
    except TdakitError as exc:
        print(f"tdakit: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
