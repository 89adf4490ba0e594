"""Equipment catalog: typed CSV loading, ranking, and filtering.

Catalog files are UTF-8 CSV with a header row.  Columns ``id`` and
``kind`` are mandatory; everything else is a spec field.  Quantity
columns carry a small value grammar:

* empty cell            -> missing (the record simply lacks the key)
* ``42.4``              -> scalar (fractions like ``1/8000`` allowed)
* ``100-102400``        -> closed range [lo, hi]
* ``max 20`` / ``min 5``-> half-open range (one endpoint unknown)
* ``100ml:52.74;1L:263.90`` -> labelled cost variants

Remaining columns are free text and preserved verbatim.

Ranking and filtering over non-scalar values follow documented rules:
ascending rank compares a range by its minimum, descending by its
maximum; variant lists rank by their cheapest entry; a ``<=`` filter
requires the whole range to satisfy the bound (range maximum <= v),
``>=`` the minimum, and a variant list passes if any variant does.
Records that lack the key are never silently dropped by rank_by: they
are appended after the ranked ones and flagged missing.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .errors import CatalogError, QueryError

_NUMERIC_COLUMNS = frozenset(
    {
        "reflectivity_pct",
        "cost_eur",
        "focal_length_mm",
        "shutter_range_s",
        "iso_range",
        "max_resolution_mpx",
        "pixel_size_um",
        "weight_g",
        "volume_cm3",
        "color_temp_k",
        "luminous_flux_lm",
        "power_w",
        "luminous_efficiency_lpw",
        "beam_angle_deg",
    }
)

_KINDS = ("background", "camera", "lamp")


@dataclass(frozen=True)
class ValueRange:
    """A numeric interval; one endpoint may be unknown (None)."""

    lo: float | None
    hi: float | None

    def __post_init__(self) -> None:
        if self.lo is None and self.hi is None:
            raise CatalogError("range needs at least one endpoint")
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise CatalogError(f"range minimum {self.lo} exceeds maximum {self.hi}")


Variants = tuple[tuple[str, float], ...]
SpecValue = Union[float, ValueRange, Variants, str]


@dataclass(frozen=True)
class EquipmentRecord:
    """One catalog row: identity, kind, vendor, cost, and spec fields."""

    id: str
    kind: str
    vendor: str
    cost_eur: SpecValue | None = None
    specs: Mapping[str, SpecValue] = field(default_factory=dict)

    def value_for(self, key: str) -> SpecValue | None:
        if key == "cost_eur":
            return self.cost_eur
        if key == "id":
            return self.id
        if key == "kind":
            return self.kind
        if key == "vendor":
            return self.vendor
        return self.specs.get(key)


@dataclass(frozen=True)
class RankedRecord:
    """A rank_by result row; missing means the record lacked the key."""

    record: EquipmentRecord
    sort_value: float | None
    missing: bool


def _parse_number(text: str) -> float:
    raw = text.strip()
    if "/" in raw:
        num, den = raw.split("/", 1)
        return float(num) / float(den)
    return float(raw)


def _parse_value(text: str) -> SpecValue | None:
    raw = text.strip()
    if not raw:
        return None
    if ";" in raw or (":" in raw):
        pairs = []
        for chunk in raw.split(";"):
            label, _, value = chunk.strip().partition(":")
            if not _ or not label.strip():
                raise ValueError(f"malformed variant chunk {chunk!r}")
            pairs.append((label.strip(), _parse_number(value)))
        return tuple(pairs)
    lowered = raw.lower()
    if lowered.startswith("max "):
        return ValueRange(lo=None, hi=_parse_number(raw[4:]))
    if lowered.startswith("min "):
        return ValueRange(lo=_parse_number(raw[4:]), hi=None)
    if "-" in raw:
        lo, hi = raw.split("-", 1)
        return ValueRange(lo=_parse_number(lo), hi=_parse_number(hi))
    return _parse_number(raw)


def _format_number(value: float) -> str:
    text = repr(float(value))
    # scientific notation would collide with the range separator on
    # reload (1e-06 splits at '-'), so expand it; Decimal keeps repr's
    # round-trip digits intact
    if "e" in text:
        text = format(Decimal(text), "f")
    return text[:-2] if text.endswith(".0") else text


def _format_value(value: SpecValue | None) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, ValueRange):
        if value.lo is None:
            return f"max {_format_number(value.hi)}"
        if value.hi is None:
            return f"min {_format_number(value.lo)}"
        return f"{_format_number(value.lo)}-{_format_number(value.hi)}"
    if isinstance(value, tuple):
        return ";".join(f"{label}:{_format_number(v)}" for label, v in value)
    return _format_number(value)


def _endpoints(value: SpecValue) -> list[float]:
    if isinstance(value, ValueRange):
        return [v for v in (value.lo, value.hi) if v is not None]
    if isinstance(value, tuple):
        return [v for _, v in value]
    if isinstance(value, float):
        return [value]
    return []


def _validate_record(record: EquipmentRecord) -> None:
    if record.kind not in _KINDS:
        raise CatalogError(f"record {record.id!r}: unknown kind {record.kind!r}")
    if record.cost_eur is not None:
        if isinstance(record.cost_eur, str):
            raise CatalogError(f"record {record.id!r}: cost_eur must be numeric")
        if any(v < 0 for v in _endpoints(record.cost_eur)):
            raise CatalogError(f"record {record.id!r}: negative cost")
    reflectivity = record.specs.get("reflectivity_pct")
    if reflectivity is not None and not isinstance(reflectivity, str):
        for v in _endpoints(reflectivity):
            if not 0 < v <= 100:
                raise CatalogError(
                    f"record {record.id!r}: reflectivity {v} outside (0, 100]"
                )


def load_catalog(path: str | Path) -> list[EquipmentRecord]:
    """Load and validate one catalog file.

    A file with no data rows yields an empty list.  Schema violations
    (missing id/kind, bad quantity syntax, duplicate ids, out-of-domain
    values) raise CatalogError naming the offending row and field.
    """
    text = Path(path).read_text(encoding="utf-8")
    return loads_catalog(text)


def loads_catalog(text: str) -> list[EquipmentRecord]:
    reader = csv.DictReader(io.StringIO(text))
    records: list[EquipmentRecord] = []
    seen: set[str] = set()
    if reader.fieldnames is None:
        return []
    if "id" not in reader.fieldnames or "kind" not in reader.fieldnames:
        raise CatalogError("catalog header must include 'id' and 'kind' columns")
    for line_no, row in enumerate(reader, start=2):
        rid = (row.get("id") or "").strip()
        kind = (row.get("kind") or "").strip()
        if not rid:
            raise CatalogError(f"row {line_no}: missing id")
        if rid in seen:
            raise CatalogError(f"row {line_no}: duplicate id {rid!r}")
        seen.add(rid)
        specs: dict[str, SpecValue] = {}
        cost: SpecValue | None = None
        vendor = ""
        for key, cell in row.items():
            if key in ("id", "kind") or key is None or cell is None:
                continue
            cell = cell.strip()
            if key == "vendor":
                vendor = cell
                continue
            if not cell:
                continue
            if key in _NUMERIC_COLUMNS:
                try:
                    value = _parse_value(cell)
                except (ValueError, ZeroDivisionError) as exc:
                    raise CatalogError(
                        f"row {line_no} ({rid}), field {key!r}: bad quantity {cell!r}"
                    ) from exc
            else:
                value = cell
            if key == "cost_eur":
                cost = value
            elif value is not None:
                specs[key] = value
        record = EquipmentRecord(id=rid, kind=kind, vendor=vendor, cost_eur=cost, specs=specs)
        _validate_record(record)
        records.append(record)
    return records


def write_catalog(records: Sequence[EquipmentRecord], path: str | Path) -> None:
    """Serialize records back to catalog CSV (load_catalog round-trips)."""
    Path(path).write_text(dumps_catalog(records), encoding="utf-8", newline="")


def dumps_catalog(records: Sequence[EquipmentRecord]) -> str:
    keys: set[str] = set()
    for record in records:
        keys.update(record.specs.keys())
    columns = ["id", "kind", "vendor", "cost_eur", *sorted(keys)]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        row = [record.id, record.kind, record.vendor, _format_value(record.cost_eur)]
        row.extend(_format_value(record.specs.get(key)) for key in sorted(keys))
        writer.writerow(row)
    return out.getvalue()


def _ensure_key_exists(records: Iterable[EquipmentRecord], key: str) -> None:
    if not any(r.value_for(key) is not None for r in records):
        raise QueryError(f"key {key!r} present in no record")


def _rank_value(value: SpecValue | None, direction: str) -> float | None:
    if value is None or isinstance(value, str):
        return None
    if isinstance(value, ValueRange):
        if direction == "asc":
            return value.lo if value.lo is not None else value.hi
        return value.hi if value.hi is not None else value.lo
    if isinstance(value, tuple):
        return min(v for _, v in value)
    return float(value)


def rank_by(
    records: Sequence[EquipmentRecord], key: str, direction: str = "asc"
) -> list[RankedRecord]:
    """Stable sort by a spec key; key-less records are appended, flagged.

    Ranges compare by their minimum when ascending and maximum when
    descending; variant lists always compare by their cheapest entry.
    """
    if direction not in ("asc", "desc"):
        raise QueryError(f"direction must be asc|desc, got {direction!r}")
    if records:
        _ensure_key_exists(records, key)
    keyed: list[RankedRecord] = []
    missing: list[RankedRecord] = []
    for record in records:
        sort_value = _rank_value(record.value_for(key), direction)
        if sort_value is None:
            missing.append(RankedRecord(record=record, sort_value=None, missing=True))
        else:
            keyed.append(RankedRecord(record=record, sort_value=sort_value, missing=False))
    keyed.sort(key=lambda r: r.sort_value, reverse=(direction == "desc"))
    return keyed + missing


@dataclass(frozen=True)
class Constraint:
    """One filter clause: key, operator (<=, >=, ==), and bound."""

    key: str
    op: str
    value: float | str

    def __post_init__(self) -> None:
        if self.op not in ("<=", ">=", "=="):
            raise QueryError(f"unsupported filter operator {self.op!r}")


def parse_constraint(text: str) -> Constraint:
    """Parse CLI filter syntax: ``key<=value``, ``key>=value``, ``key=value``."""
    for op in ("<=", ">=", "==", "="):
        if op in text:
            key, _, raw = text.partition(op)
            key = key.strip()
            raw = raw.strip()
            if not key or not raw:
                raise QueryError(f"malformed filter expression {text!r}")
            value: float | str
            try:
                value = _parse_number(raw)
            except (ValueError, ZeroDivisionError):
                value = raw
            return Constraint(key=key, op="==" if op == "=" else op, value=value)
    raise QueryError(f"filter expression {text!r} has no operator (use <=, >=, =)")


def _satisfies(value: SpecValue | None, constraint: Constraint) -> bool:
    if value is None:
        return False
    bound = constraint.value
    if isinstance(bound, str):
        return constraint.op == "==" and isinstance(value, str) and value == bound
    if isinstance(value, str):
        return False
    if isinstance(value, tuple):
        return any(_satisfies(v, constraint) for _, v in value)
    if isinstance(value, ValueRange):
        # Containment semantics: the whole range must satisfy the bound.
        if constraint.op == "<=":
            return value.hi is not None and value.hi <= bound
        if constraint.op == ">=":
            return value.lo is not None and value.lo >= bound
        return value.lo == bound and value.hi == bound
    if constraint.op == "<=":
        return value <= bound
    if constraint.op == ">=":
        return value >= bound
    return value == bound


def filter_records(
    records: Sequence[EquipmentRecord], constraints: Sequence[Constraint]
) -> list[EquipmentRecord]:
    """Records satisfying every constraint (records lacking a key fail it)."""
    for constraint in constraints:
        if records:
            _ensure_key_exists(records, constraint.key)
    return [
        record
        for record in records
        if all(_satisfies(record.value_for(c.key), c) for c in constraints)
    ]


def shipped_catalog_path(kind: str) -> Path:
    """Path of a catalog file shipped with the package (by kind, plural)."""
    from importlib.resources import files

    name = {"background": "backgrounds", "camera": "cameras", "lamp": "lamps"}.get(
        kind.rstrip("s"), kind
    )
    resource = files("spacelab_iqa").joinpath("data", f"{name}.csv")
    return Path(str(resource))
