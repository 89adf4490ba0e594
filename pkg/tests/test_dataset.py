"""Capture-name grammar, manifest parsing/validation, and image ingestion."""

import numpy as np
import pytest

from spacelab_iqa import (
    REFERENCE_EX0_PER_GROUP,
    REFERENCE_SYNTHETIC_BLACK,
    WHITE_BALANCE_GAINS,
    Background,
    Camera,
    CaptureConfig,
    CropRect,
    ExperimentKind,
    ExposureLabel,
    Image,
    IngestError,
    Lamp,
    LightAngle,
    LightIntensity,
    LightPosition,
    Manifest,
    ManifestError,
    NameConventionError,
    encode_raster,
    intensity_percent,
    load_captures,
    load_manifest,
    parse_capture_name,
    parse_manifest,
    render_capture_name,
    render_manifest,
    validate,
)


def write_pgm(path, level=0.1, size=8):
    path.write_bytes(encode_raster(Image(luma=np.full((size, size), level))))


def cap(name="BG0_LIH_LAMP0_LA0_EX0", **overrides) -> CaptureConfig:
    fields = dict(
        name=name,
        camera=Camera.LQ,
        background=Background.BG0,
        lamp=Lamp.LAMP0,
        intensity=LightIntensity.LIH,
        exposure=ExposureLabel.EX0,
        image_path="a.pgm",
        light_angle=LightAngle.LA0,
    )
    fields.update(overrides)
    return CaptureConfig(**fields)


@pytest.fixture
def image_dir(tmp_path):
    write_pgm(tmp_path / "a.pgm")
    write_pgm(tmp_path / "b.pgm")
    return tmp_path


def background_manifest(base_dir, captures, reference=REFERENCE_SYNTHETIC_BLACK):
    return Manifest(
        experiment_id="exp",
        kind=ExperimentKind.BACKGROUND_TEST,
        reference=reference,
        captures=tuple(captures),
        base_dir=base_dir,
    )


# --- capture-name grammar -------------------------------------------------


def test_parse_name_recovers_condition_fields():
    parsed = parse_capture_name("CP0_LIH_EX0_LA0")
    assert parsed.intensity is LightIntensity.LIH
    assert parsed.exposure is ExposureLabel.EX0
    assert parsed.light_angle is LightAngle.LA0
    assert parsed.camera is None
    assert "CP0" in parsed.recognized
    assert parsed.unrecognized == ()


def test_parse_name_with_light_position():
    parsed = parse_capture_name("CP0_LIL_EEO_LP4")
    assert parsed.intensity is LightIntensity.LIL
    assert parsed.exposure is ExposureLabel.EEO
    assert parsed.light_position is LightPosition.LP4


def test_parse_name_collects_unknown_tokens():
    parsed = parse_capture_name("LQ_WEIRD_EX0")
    assert parsed.camera is Camera.LQ
    assert parsed.unrecognized == ("WEIRD",)


def test_parse_name_later_duplicate_wins():
    assert parse_capture_name("LA0_LA3").light_angle is LightAngle.LA3


def test_parse_name_nothing_recognizable_rejected():
    with pytest.raises(NameConventionError):
        parse_capture_name("foo_bar")


def test_name_round_trip():
    name = "LQ_BG1_LAMP2_LIL_EX0_LA2"
    assert render_capture_name(parse_capture_name(name)) == name


def test_render_name_needs_at_least_one_field():
    parsed = parse_capture_name("CP0")  # recognized, but carries no field
    with pytest.raises(NameConventionError):
        render_capture_name(parsed)


def test_light_position_metadata():
    assert LightPosition.LP0.style == "Loop"
    assert LightPosition.LP0.degrees == 30
    assert LightPosition.LP7.style == "Top"
    assert LightPosition.LP7.degrees is None
    assert LightAngle.LA4.degrees == 10


def test_intensity_percent_depends_on_lamp_only_for_reference_level():
    assert intensity_percent(LightIntensity.LIL, Lamp.LAMP0) == 10.0
    assert intensity_percent(LightIntensity.LIH, Lamp.LAMP2) == 100.0
    assert intensity_percent(LightIntensity.LI0, Lamp.LAMP0) == 75.0
    assert intensity_percent(LightIntensity.LI0, Lamp.LAMP1) == 25.0
    assert intensity_percent(LightIntensity.LI0, Lamp.LAMP2) == 30.0


# --- manifest grammar -------------------------------------------------------


MANIFEST_TEXT = """\
# equipment trial
experiment_id = "trial-7"   # id comment
kind = "BackgroundTest"

[capture]
name = "BG0_LIH_LAMP0_LA0_EX0"
camera = LQ                 # bare values allowed
background = "BG0"
lamp = "LAMP0"
intensity = "LIH"
light_angle = "LA0"
exposure = "EX0"
image = "a.pgm"
wb_red = 1.4883
wb_blue = 1.2539

[[capture]]
camera = "LQ"
background = "BG1"
lamp = "LAMP0"
intensity = "LIH"
light_angle = "LA1"
exposure = "EX0"
image = "b.pgm"
crop = "1,1,4,4"
"""


def test_parse_manifest_full_grammar(tmp_path):
    manifest = parse_manifest(MANIFEST_TEXT, base_dir=tmp_path)
    assert manifest.experiment_id == "trial-7"
    assert manifest.kind is ExperimentKind.BACKGROUND_TEST
    assert manifest.reference == REFERENCE_SYNTHETIC_BLACK
    assert len(manifest.captures) == 2

    first, second = manifest.captures
    assert first.name == "BG0_LIH_LAMP0_LA0_EX0"
    assert first.camera is Camera.LQ
    assert first.wb_gains == (1.4883, 1.2539)
    assert first.crop is None

    assert second.name == "b"  # defaults to the image stem
    assert second.background is Background.BG1
    assert second.crop == CropRect(1, 1, 4, 4)


def test_parse_manifest_exposure_reference_default():
    text = 'experiment_id = "e"\nkind = "ExposureTest"\n'
    assert parse_manifest(text).reference == REFERENCE_EX0_PER_GROUP


def test_parse_manifest_explicit_reference_wins():
    text = 'experiment_id = "e"\nkind = "LightingTest"\nreference = "capture:base"\n'
    assert parse_manifest(text).reference == "capture:base"


def test_manifest_round_trip(tmp_path):
    manifest = parse_manifest(MANIFEST_TEXT, base_dir=tmp_path)
    again = parse_manifest(render_manifest(manifest), base_dir=tmp_path)
    assert again == manifest


def test_load_manifest_resolves_paths_against_file(tmp_path, image_dir):
    path = image_dir / "m.toml"
    path.write_text(MANIFEST_TEXT, encoding="utf-8")
    manifest = load_manifest(path)
    assert manifest.base_dir == image_dir
    assert manifest.resolve_image_path(manifest.captures[0]) == image_dir / "a.pgm"


def test_parse_manifest_duplicate_key_rejected():
    text = 'experiment_id = "e"\nexperiment_id = "f"\nkind = "BackgroundTest"\n'
    with pytest.raises(ManifestError, match="line 2: duplicate key"):
        parse_manifest(text)


def test_parse_manifest_unknown_section_rejected():
    text = 'experiment_id = "e"\nkind = "BackgroundTest"\n[lighting]\n'
    with pytest.raises(ManifestError, match=r"line 3: unknown section \[lighting\]"):
        parse_manifest(text)


def test_parse_manifest_requires_experiment_id():
    with pytest.raises(ManifestError, match="experiment_id"):
        parse_manifest('kind = "BackgroundTest"\n')


def test_parse_manifest_requires_kind():
    with pytest.raises(ManifestError, match="must declare kind"):
        parse_manifest('experiment_id = "e"\n')


def test_parse_manifest_unknown_kind_rejected():
    with pytest.raises(ManifestError, match="unknown experiment kind 'FocusTest'"):
        parse_manifest('experiment_id = "e"\nkind = "FocusTest"\n')


def test_parse_manifest_unbalanced_quotes_rejected():
    with pytest.raises(ManifestError, match="unbalanced quotes"):
        parse_manifest('experiment_id = "e\nkind = "BackgroundTest"\n')


def test_parse_manifest_bare_line_rejected():
    with pytest.raises(ManifestError, match="expected 'key = value'"):
        parse_manifest('experiment_id = "e"\nkind = "BackgroundTest"\njust words\n')


def test_parse_manifest_empty_key_rejected():
    with pytest.raises(ManifestError, match="empty key"):
        parse_manifest('= "e"\n')


def test_parse_manifest_hash_inside_quotes_is_data():
    text = 'experiment_id = "exp #9"\nkind = "BackgroundTest"\n'
    assert parse_manifest(text).experiment_id == "exp #9"


def test_capture_missing_required_key_names_capture():
    text = (
        'experiment_id = "e"\nkind = "BackgroundTest"\n'
        '[capture]\nname = "c1"\ncamera = "LQ"\nbackground = "BG0"\n'
        'intensity = "LIH"\nexposure = "EX0"\nimage = "a.pgm"\n'
    )
    with pytest.raises(ManifestError, match="c1: missing required key 'lamp'"):
        parse_manifest(text)


def test_capture_bad_enum_token_rejected():
    text = (
        'experiment_id = "e"\nkind = "BackgroundTest"\n'
        '[capture]\ncamera = "DSLR"\nbackground = "BG0"\nlamp = "LAMP0"\n'
        'intensity = "LIH"\nexposure = "EX0"\nimage = "a.pgm"\n'
    )
    with pytest.raises(ManifestError, match="bad camera token 'DSLR'"):
        parse_manifest(text)


def test_capture_lopsided_white_balance_rejected():
    text = (
        'experiment_id = "e"\nkind = "BackgroundTest"\n'
        '[capture]\ncamera = "LQ"\nbackground = "BG0"\nlamp = "LAMP0"\n'
        'intensity = "LIH"\nexposure = "EX0"\nimage = "a.pgm"\nwb_red = 1.5\n'
    )
    with pytest.raises(ManifestError, match="missing required key 'wb_blue'"):
        parse_manifest(text)


def test_capture_non_numeric_white_balance_rejected():
    text = (
        'experiment_id = "e"\nkind = "BackgroundTest"\n'
        '[capture]\ncamera = "LQ"\nbackground = "BG0"\nlamp = "LAMP0"\n'
        'intensity = "LIH"\nexposure = "EX0"\nimage = "a.pgm"\n'
        'wb_red = "warm"\nwb_blue = 1.0\n'
    )
    with pytest.raises(ManifestError, match="white-balance gains must be numeric"):
        parse_manifest(text)


def test_capture_bad_crop_arity_rejected():
    text = (
        'experiment_id = "e"\nkind = "BackgroundTest"\n'
        '[capture]\ncamera = "LQ"\nbackground = "BG0"\nlamp = "LAMP0"\n'
        'intensity = "LIH"\nexposure = "EX0"\nimage = "a.pgm"\ncrop = "1,1,4"\n'
    )
    with pytest.raises(ManifestError, match="crop must be 'x0,y0,width,height'"):
        parse_manifest(text)


def test_capture_negative_crop_rejected():
    text = (
        'experiment_id = "e"\nkind = "BackgroundTest"\n'
        '[capture]\ncamera = "LQ"\nbackground = "BG0"\nlamp = "LAMP0"\n'
        'intensity = "LIH"\nexposure = "EX0"\nimage = "a.pgm"\ncrop = "-1,0,4,4"\n'
    )
    with pytest.raises(ManifestError, match="bad crop rectangle"):
        parse_manifest(text)


# --- validation ---------------------------------------------------------------


def test_conformant_background_manifest_is_clean(image_dir):
    captures = [
        cap(wb_gains=WHITE_BALANCE_GAINS[Camera.LQ]),
        cap(name="BG1_LIH_LAMP0_LA0_EX0", background=Background.BG1, image_path="b.pgm"),
    ]
    report = validate(background_manifest(image_dir, captures))
    assert report.ok
    assert report.findings == ()


def test_empty_manifest_is_fatal(tmp_path):
    report = validate(background_manifest(tmp_path, []))
    assert not report.ok
    assert any("no captures" in f.message for f in report.fatal)


def test_duplicate_capture_names_are_fatal(image_dir):
    report = validate(background_manifest(image_dir, [cap(), cap()]))
    assert any("duplicate capture name" in f.message for f in report.fatal)


def test_background_requires_synthetic_black_reference(image_dir):
    report = validate(
        background_manifest(image_dir, [cap()], reference=REFERENCE_EX0_PER_GROUP)
    )
    assert any("requires reference 'synthetic-black'" in f.message for f in report.fatal)


def test_background_capture_needs_angle_and_rejects_position(image_dir):
    no_angle = cap(light_angle=None)
    with_position = cap(
        name="BG0_LIH_LAMP0_LA1_EX0",
        light_angle=LightAngle.LA1,
        light_position=LightPosition.LP0,
        image_path="b.pgm",
    )
    report = validate(background_manifest(image_dir, [no_angle, with_position]))
    messages = [f.message for f in report.fatal]
    assert any("need light_angle" in m for m in messages)
    assert any("must not set light_position" in m for m in messages)


def test_missing_image_file_is_fatal(image_dir):
    report = validate(background_manifest(image_dir, [cap(image_path="gone.pgm")]))
    assert any("image file not found" in f.message for f in report.fatal)


def test_undecodable_image_is_fatal(image_dir):
    (image_dir / "junk.pgm").write_bytes(b"not an anymap at all")
    report = validate(background_manifest(image_dir, [cap(image_path="junk.pgm")]))
    assert any("image not decodable" in f.message for f in report.fatal)


def test_crop_exceeding_bounds_is_fatal(image_dir):
    report = validate(
        background_manifest(image_dir, [cap(crop=CropRect(4, 4, 8, 8))])
    )
    assert any("exceeds image bounds" in f.message for f in report.fatal)


def test_wrong_white_balance_is_fatal(image_dir):
    report = validate(background_manifest(image_dir, [cap(wb_gains=(1.0, 1.0))]))
    assert any("do not match LQ calibration" in f.message for f in report.fatal)


def exposure_manifest(base_dir, captures, reference=REFERENCE_EX0_PER_GROUP):
    return Manifest(
        experiment_id="exp",
        kind=ExperimentKind.EXPOSURE_TEST,
        reference=reference,
        captures=tuple(captures),
        base_dir=base_dir,
    )


def expo_cap(name, exposure, **overrides):
    fields = dict(
        intensity=LightIntensity.LI0,
        light_angle=None,
        light_position=LightPosition.LP0,
    )
    fields.update(overrides)
    return cap(name=name, exposure=exposure, **fields)


def test_conformant_exposure_manifest_is_clean(image_dir):
    captures = [
        expo_cap("c1", ExposureLabel.EX0),
        expo_cap("c2", ExposureLabel.EO1, image_path="b.pgm"),
    ]
    report = validate(exposure_manifest(image_dir, captures))
    assert report.ok
    assert report.findings == ()


def test_exposure_capture_needs_position_and_rejects_angle(image_dir):
    bad = cap(
        name="c1",
        intensity=LightIntensity.LI0,
        light_angle=LightAngle.LA0,
        light_position=None,
    )
    report = validate(exposure_manifest(image_dir, [bad]))
    messages = [f.message for f in report.fatal]
    assert any("ExposureTest captures need light_position" in m for m in messages)
    assert any("must not set light_angle" in m for m in messages)


def test_exposure_off_reference_intensity_warns(image_dir):
    captures = [
        expo_cap("c1", ExposureLabel.EX0),
        expo_cap("c2", ExposureLabel.EO1, intensity=LightIntensity.LIH, image_path="b.pgm"),
    ]
    report = validate(exposure_manifest(image_dir, captures))
    assert report.ok  # warning, not fatal
    assert any(
        f.severity == "warning" and "LI0 reference intensity" in f.message
        for f in report.findings
    )


def test_exposure_group_without_reference_capture_is_fatal(image_dir):
    report = validate(exposure_manifest(image_dir, [expo_cap("c1", ExposureLabel.EO1)]))
    assert any(
        "group (LQ, LAMP0) has no EX0 reference capture" in f.message
        for f in report.fatal
    )


def test_exposure_group_with_two_references_is_fatal(image_dir):
    captures = [
        expo_cap("c1", ExposureLabel.EX0),
        expo_cap("c2", ExposureLabel.EX0, image_path="b.pgm"),
    ]
    report = validate(exposure_manifest(image_dir, captures))
    assert any("has 2 EX0 captures" in f.message for f in report.fatal)


def test_capture_reference_must_exist(image_dir):
    manifest = Manifest(
        experiment_id="exp",
        kind=ExperimentKind.LIGHTING_TEST,
        reference="capture:base",
        captures=(expo_cap("c1", ExposureLabel.EX0),),
        base_dir=image_dir,
    )
    report = validate(manifest)
    assert any(
        "reference capture 'base' not present" in f.message for f in report.fatal
    )


def test_unknown_reference_spec_is_fatal(image_dir):
    report = validate(
        background_manifest(image_dir, [cap()], reference="golden-frame")
    )
    assert any("unknown reference spec" in f.message for f in report.fatal)


def test_validation_is_order_independent(image_dir):
    captures = [
        cap(light_angle=None),
        cap(name="c2", wb_gains=(9.0, 9.0), image_path="b.pgm"),
        cap(name="c3", image_path="gone.pgm"),
    ]
    forward = validate(background_manifest(image_dir, captures))
    backward = validate(background_manifest(image_dir, list(reversed(captures))))
    assert forward.findings == backward.findings
    assert not forward.ok


def test_findings_are_sorted(image_dir):
    captures = [
        cap(name="zed", image_path="gone.pgm"),
        cap(name="abe", light_angle=None, image_path="b.pgm"),
    ]
    report = validate(background_manifest(image_dir, captures))
    keys = [(f.capture or "", f.severity, f.message) for f in report.findings]
    assert keys == sorted(keys)


# --- load_captures -------------------------------------------------------------


def test_load_captures_preserves_order_and_applies_crop(image_dir):
    captures = [
        cap(crop=CropRect(2, 2, 4, 3)),
        cap(name="c2", image_path="b.pgm"),
    ]
    manifest = background_manifest(image_dir, captures)
    loaded = load_captures(manifest)
    assert [c.name for c, _ in loaded] == ["BG0_LIH_LAMP0_LA0_EX0", "c2"]
    assert loaded[0][1].luma.shape == (3, 4)
    assert loaded[1][1].luma.shape == (8, 8)
    assert all(image.rgb is None for _, image in loaded)


def test_load_captures_wraps_decode_failures(image_dir):
    (image_dir / "junk.pgm").write_bytes(b"P5 garbage")
    manifest = background_manifest(image_dir, [cap(name="broken", image_path="junk.pgm")])
    with pytest.raises(IngestError, match="capture 'broken'"):
        load_captures(manifest)


def test_load_captures_wraps_missing_files(image_dir):
    manifest = background_manifest(image_dir, [cap(name="lost", image_path="gone.pgm")])
    with pytest.raises(IngestError, match="capture 'lost'"):
        load_captures(manifest)


def test_load_captures_reduces_rgb_to_luma(image_dir):
    rgb = np.zeros((4, 4, 3))
    rgb[..., 1] = 1.0
    luma = np.clip(rgb @ np.array([0.299, 0.587, 0.114]), 0.0, 1.0)
    (image_dir / "c.ppm").write_bytes(encode_raster(Image(luma=luma, rgb=rgb)))
    manifest = background_manifest(image_dir, [cap(name="c", image_path="c.ppm")])
    (config, image), = load_captures(manifest)
    assert image.rgb is None
    assert image.luma[0, 0] == pytest.approx(0.587, abs=1e-12)
