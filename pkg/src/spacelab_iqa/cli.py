"""Command-line front end.

Exit codes: 0 success, 1 usage errors, 2 validation failures,
3 I/O failures, 4 analysis failures.

Commands::

    spacelab-iqa ingest-validate MANIFEST
    spacelab-iqa background-rank MANIFEST --out DIR [--jobs N]
    spacelab-iqa exposure-curve MANIFEST --out DIR [--jobs N]
    spacelab-iqa ev --aperture N --shutter S --iso I
    spacelab-iqa catalog FILE --rank-by KEY [--direction asc|desc] [--filter EXPR ...]
    spacelab-iqa fixtures --spec DESC --out DIR

``--jobs`` (or the SPACELAB_IQA_JOBS environment variable) sets the
worker count for per-capture metric evaluation; outputs are identical
at any setting.  Shutter times accept decimals or ``1/N`` fractions.
``--filter`` accepts ``key=value``, ``key<=value``, ``key>=value``.
Fixture descriptors: the scene grammar (``flat:0.5:64x64``,
``gradient:0:1:h:256x256``, ``checker:8:0:1:128x128``,
``composite:42:256x256``) or a suite (``background-suite[:WxH]``,
``exposure-suite[:WxH[:SEED]]``).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .analysis import AnalysisError, background_rank, exposure_curve
from .catalog import (
    CatalogError,
    QueryError,
    filter_records,
    load_catalog,
    parse_constraint,
    rank_by,
)
from .dataset import load_manifest, validate
from .errors import (
    DomainError,
    IngestError,
    ManifestError,
    ShapeError,
    SpacelabError,
)
from .exposure import ExposureTuple, ev, parse_shutter, round_ev
from .fixtures import (
    generate,
    parse_scene_spec,
    write_background_suite,
    write_exposure_suite,
)
from .imaging import encode_raster
from .report import emit_background_report, emit_exposure_report, write_bundle

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_ANALYSIS = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spacelab-iqa",
        description="Image-quality analysis for space-lab image acquisition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-validate", help="validate a dataset manifest")
    p.add_argument("manifest", help="manifest file path")

    for name, help_text in (
        ("background-rank", "rank backgrounds by featurelessness"),
        ("exposure-curve", "compute exposure degradation curves"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("manifest", help="manifest file path")
        p.add_argument("--out", required=True, help="report output directory")
        p.add_argument(
            "--jobs",
            type=int,
            default=None,
            help="worker threads (default: SPACELAB_IQA_JOBS or CPU count)",
        )

    p = sub.add_parser("ev", help="exposure value of a camera setting")
    p.add_argument("--aperture", required=True, help="aperture number (e.g. 2 or 2.8)")
    p.add_argument("--shutter", required=True, help="shutter seconds (decimal or 1/N)")
    p.add_argument("--iso", required=True, help="ISO sensitivity (e.g. 100)")

    p = sub.add_parser("catalog", help="rank and filter an equipment catalog")
    p.add_argument("file", help="catalog CSV path")
    p.add_argument("--rank-by", required=True, help="spec key to rank by")
    p.add_argument("--direction", choices=("asc", "desc"), default="asc")
    p.add_argument(
        "--filter",
        action="append",
        default=[],
        metavar="EXPR",
        help="constraint (key=value, key<=value, key>=value); repeatable",
    )

    p = sub.add_parser("fixtures", help="write synthetic images and a manifest")
    p.add_argument("--spec", required=True, help="scene or suite descriptor")
    p.add_argument("--out", required=True, help="output directory")

    return parser


def _resolve_jobs(jobs: int | None) -> int | None:
    if jobs is not None:
        if jobs < 1:
            raise DomainError(f"--jobs must be >= 1, got {jobs}")
        return jobs
    env = os.environ.get("SPACELAB_IQA_JOBS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise DomainError(f"SPACELAB_IQA_JOBS must be an integer, got {env!r}") from exc
        if value < 1:
            raise DomainError(f"SPACELAB_IQA_JOBS must be >= 1, got {value}")
        return value
    return None


def _cmd_ingest_validate(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    report = validate(manifest)
    for finding in report.findings:
        scope = finding.capture or "manifest"
        print(f"{finding.severity.upper()} {scope}: {finding.message}")
    if report.ok:
        print(f"OK: {len(manifest.captures)} captures, kind {manifest.kind.value}")
        return EXIT_OK
    print(f"REJECTED: {len(report.fatal)} fatal finding(s)", file=sys.stderr)
    return EXIT_VALIDATION


def _cmd_background_rank(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    scores = background_rank(manifest, jobs=_resolve_jobs(args.jobs))
    bundle = emit_background_report(scores)
    written = write_bundle(bundle, Path(args.out) / manifest.experiment_id)
    for score in scores:
        print(f"rank {score.rank}: {score.background.value} mean={score.mean:.6g}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_exposure_curve(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    curves = exposure_curve(manifest, jobs=_resolve_jobs(args.jobs))
    bundle = emit_exposure_report(curves)
    written = write_bundle(bundle, Path(args.out) / manifest.experiment_id)
    for curve in curves:
        print(f"curve {curve.camera.value}/{curve.lamp.value}: {len(curve.points)} points")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_ev(args: argparse.Namespace) -> int:
    try:
        aperture = float(args.aperture)
        iso = float(args.iso)
    except ValueError:
        print("error: aperture and iso must be numeric", file=sys.stderr)
        return EXIT_USAGE
    try:
        shutter = parse_shutter(args.shutter)
        setting = ExposureTuple(aperture_n=aperture, shutter_s=shutter, iso=iso)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    value = ev(setting)
    print(f"EV {value:.2f} (≈{round_ev(value)})")
    return EXIT_OK


def _cmd_catalog(args: argparse.Namespace) -> int:
    records = load_catalog(args.file)
    constraints = [parse_constraint(text) for text in args.filter]
    if constraints:
        records = filter_records(records, constraints)
    ranked = rank_by(records, args.rank_by, direction=args.direction)
    print(f"# rank by {args.rank_by} ({args.direction}); ranges compare by "
          f"{'minimum' if args.direction == 'asc' else 'maximum'}, variants by cheapest")
    for position, entry in enumerate(ranked, start=1):
        record = entry.record
        product = record.specs.get("product", record.id)
        if entry.missing:
            print(f"{position:>3}  {product}  [{args.rank_by} missing]")
        else:
            print(f"{position:>3}  {product}  {args.rank_by}={entry.sort_value:g}")
    return EXIT_OK


def _parse_suite_size(text: str) -> int:
    """Suite sizes are square; accept '64' or '64x64'."""
    low = text.lower()
    if "x" in low:
        w, _, h = low.partition("x")
        if w != h:
            raise DomainError(f"suite images are square, got {text!r}")
        low = w
    try:
        size = int(low)
    except ValueError as exc:
        raise DomainError(f"suite size must be an integer, got {text!r}") from exc
    if size < 1:
        raise DomainError(f"suite size must be >= 1, got {size}")
    return size


def _cmd_fixtures(args: argparse.Namespace) -> int:
    spec_text = args.spec.strip()
    out = Path(args.out)
    parts = spec_text.split(":")
    if parts[0] == "background-suite":
        if len(parts) > 2:
            raise DomainError(f"background-suite takes at most a size, got {spec_text!r}")
        size = _parse_suite_size(parts[1]) if len(parts) > 1 else 64
        manifest_path = write_background_suite(out, size=size)
    elif parts[0] == "exposure-suite":
        if len(parts) > 3:
            raise DomainError(f"exposure-suite takes size and seed, got {spec_text!r}")
        size = _parse_suite_size(parts[1]) if len(parts) > 1 else 256
        try:
            seed = int(parts[2]) if len(parts) > 2 else 11
        except ValueError as exc:
            raise DomainError(f"suite seed must be an integer, got {parts[2]!r}") from exc
        manifest_path = write_exposure_suite(out, size=size, seed=seed)
    else:
        scene = parse_scene_spec(spec_text)
        out.mkdir(parents=True, exist_ok=True)
        image_path = out / f"{parts[0]}.pgm"
        image_path.write_bytes(encode_raster(generate(scene)))
        print(f"wrote {image_path}")
        return EXIT_OK
    print(f"wrote {manifest_path}")
    return EXIT_OK


_HANDLERS = {
    "ingest-validate": _cmd_ingest_validate,
    "background-rank": _cmd_background_rank,
    "exposure-curve": _cmd_exposure_curve,
    "ev": _cmd_ev,
    "catalog": _cmd_catalog,
    "fixtures": _cmd_fixtures,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors; usage is 1 here.
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        return _HANDLERS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_IO
    except IsADirectoryError as exc:
        print(f"error: expected a file: {exc}", file=sys.stderr)
        return EXIT_IO
    except PermissionError as exc:
        print(f"error: permission denied: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ManifestError, CatalogError, QueryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AnalysisError, IngestError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except SpacelabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
