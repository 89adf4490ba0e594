"""Image-quality analysis toolkit for space-lab image acquisition.

Scores candidate backgrounds by how featureless they photograph,
charts how exposure error degrades image similarity, and ranks the
equipment catalog entries that feed those experiments.
"""

from .analysis import (
    SYMMETRY_PAIRS,
    BackgroundScore,
    CurvePoint,
    DegradationCurve,
    background_rank,
    exposure_curve,
    symmetry_index,
)
from .catalog import (
    Constraint,
    EquipmentRecord,
    RankedRecord,
    ValueRange,
    dumps_catalog,
    filter_records,
    load_catalog,
    loads_catalog,
    parse_constraint,
    rank_by,
    shipped_catalog_path,
    write_catalog,
)
from .dataset import (
    REFERENCE_EX0_PER_GROUP,
    REFERENCE_SYNTHETIC_BLACK,
    WHITE_BALANCE_GAINS,
    Background,
    Camera,
    CaptureConfig,
    ExperimentKind,
    Finding,
    Lamp,
    LightAngle,
    LightIntensity,
    LightPosition,
    Manifest,
    ParsedCaptureName,
    ValidationReport,
    intensity_percent,
    load_captures,
    load_manifest,
    parse_capture_name,
    parse_manifest,
    render_capture_name,
    render_manifest,
    validate,
)
from .errors import (
    AnalysisError,
    BoundsError,
    CatalogError,
    DegenerateReference,
    DomainError,
    EmptyInput,
    IngestError,
    ManifestError,
    NameConventionError,
    ParseError,
    QueryError,
    ShapeError,
    SpacelabError,
    UnsupportedFormat,
)
from .exposure import (
    EXPOSURE_TABLE,
    STOP_OFFSET,
    ExposureLabel,
    ExposureTuple,
    ev,
    ladder_ev,
    parse_shutter,
    round_ev,
    simulate_exposure,
    stops_between,
)
from .fixtures import (
    Checker,
    CompositeScene,
    Flat,
    LinearGradient,
    SceneSpec,
    exposure_sweep,
    generate,
    hash_unit,
    parse_scene_spec,
    quantize,
    write_background_suite,
    write_exposure_suite,
)
from .imaging import CropRect, Image, crop, decode_raster, encode_raster, to_luma
from .metrics import (
    MetricId,
    MetricScore,
    WindowStats,
    ms_ssim,
    ssim,
    uqi_raw,
    uqi_stabilized,
    window_stats,
)
from .report import (
    ReportBundle,
    emit_background_report,
    emit_exposure_report,
    format_number,
    line_chart,
    write_bundle,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "Background",
    "BackgroundScore",
    "BoundsError",
    "Camera",
    "CaptureConfig",
    "CatalogError",
    "Checker",
    "CompositeScene",
    "Constraint",
    "CropRect",
    "CurvePoint",
    "DegenerateReference",
    "DegradationCurve",
    "DomainError",
    "EmptyInput",
    "EquipmentRecord",
    "EXPOSURE_TABLE",
    "ExperimentKind",
    "ExposureLabel",
    "ExposureTuple",
    "Finding",
    "Flat",
    "Image",
    "IngestError",
    "Lamp",
    "LightAngle",
    "LightIntensity",
    "LightPosition",
    "LinearGradient",
    "Manifest",
    "ManifestError",
    "MetricId",
    "MetricScore",
    "NameConventionError",
    "ParseError",
    "ParsedCaptureName",
    "QueryError",
    "RankedRecord",
    "REFERENCE_EX0_PER_GROUP",
    "REFERENCE_SYNTHETIC_BLACK",
    "ReportBundle",
    "STOP_OFFSET",
    "SceneSpec",
    "ShapeError",
    "SpacelabError",
    "SYMMETRY_PAIRS",
    "UnsupportedFormat",
    "ValidationReport",
    "ValueRange",
    "WHITE_BALANCE_GAINS",
    "WindowStats",
    "background_rank",
    "crop",
    "decode_raster",
    "dumps_catalog",
    "emit_background_report",
    "emit_exposure_report",
    "encode_raster",
    "ev",
    "exposure_curve",
    "exposure_sweep",
    "filter_records",
    "format_number",
    "generate",
    "hash_unit",
    "intensity_percent",
    "ladder_ev",
    "line_chart",
    "load_captures",
    "load_catalog",
    "load_manifest",
    "loads_catalog",
    "ms_ssim",
    "parse_capture_name",
    "parse_constraint",
    "parse_manifest",
    "parse_scene_spec",
    "parse_shutter",
    "quantize",
    "rank_by",
    "render_capture_name",
    "render_manifest",
    "round_ev",
    "shipped_catalog_path",
    "simulate_exposure",
    "ssim",
    "stops_between",
    "symmetry_index",
    "to_luma",
    "uqi_raw",
    "uqi_stabilized",
    "validate",
    "window_stats",
    "write_background_suite",
    "write_bundle",
    "write_catalog",
    "write_exposure_suite",
]
