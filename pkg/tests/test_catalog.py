"""Catalog loading, value grammar, ranking, filtering, and shipped data."""

import pytest

from spacelab_iqa import (
    CatalogError,
    Constraint,
    EquipmentRecord,
    QueryError,
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


@pytest.fixture(scope="module")
def backgrounds():
    return load_catalog(shipped_catalog_path("background"))


@pytest.fixture(scope="module")
def cameras():
    return load_catalog(shipped_catalog_path("camera"))


@pytest.fixture(scope="module")
def lamps():
    return load_catalog(shipped_catalog_path("lamp"))


# --- shipped data ---------------------------------------------------------


def test_shipped_record_counts(backgrounds, cameras, lamps):
    assert len(backgrounds) == 8
    assert len(cameras) == 8
    assert len(lamps) == 6


def test_lowest_reflectivity_background_ranks_first(backgrounds):
    ranked = rank_by(backgrounds, "reflectivity_pct", "asc")
    first = ranked[0]
    assert first.record.specs["product"] == "Black Velvet"
    assert first.sort_value == 0.1
    assert not first.missing


def test_reflectivity_rank_order_and_missing_tail(backgrounds):
    ranked = rank_by(backgrounds, "reflectivity_pct", "asc")
    products = [r.record.specs["product"] for r in ranked if not r.missing]
    assert products == [
        "Black Velvet",
        "Musou Paint",
        "Fineshut KIWAMY",
        "Flock Sheet",
        "Fineshut SP",
        "Black3.0",
    ]
    tail = [r for r in ranked if r.missing]
    assert {r.record.specs["product"] for r in tail} == {
        "Neewer Background",
        "Background Paper",
    }
    assert all(r.sort_value is None for r in tail)


def test_most_expensive_camera_ranks_first(cameras):
    ranked = rank_by(cameras, "cost_eur", "desc")
    assert ranked[0].record.specs["product"] == "Sony A7RIII"
    assert ranked[0].sort_value == 3200.0


def test_low_power_lamp_filter(lamps):
    kept = filter_records(lamps, [parse_constraint("power_w<=100")])
    products = {r.specs["product"] for r in kept}
    # the 60-200 W lamp fails a strict whole-range bound
    assert products == {"Small Reflectors", "Medium Reflectors", "Aputure LS 60d"}


def test_cheap_camera_filter(cameras):
    kept = filter_records(cameras, [parse_constraint("cost_eur<=60")])
    assert {r.id for r in kept} == {"cam-rpi-hq", "cam-rpi-lq"}


def test_impossible_constraint_gives_empty_list(cameras):
    assert filter_records(cameras, [parse_constraint("cost_eur<=0.5")]) == []


def test_conjunction_of_constraints(cameras):
    kept = filter_records(
        cameras,
        [parse_constraint("cost_eur<=600"), parse_constraint("max_resolution_mpx>=12")],
    )
    assert {r.id for r in kept} == {"cam-canon-eos-m200", "cam-rpi-hq"}


def test_variant_cost_passes_if_any_variant_does(backgrounds):
    kept = filter_records(backgrounds, [parse_constraint("cost_eur<=53")])
    # Musou Paint's cheapest container (52.74) qualifies; so does the
    # 30.95 paint tin
    assert {r.specs["product"] for r in kept} == {"Musou Paint", "Black3.0"}


# --- value grammar -----------------------------------------------------------


def rec(cell: str, key: str = "power_w") -> EquipmentRecord:
    text = f"id,kind,{key}\nx,lamp,{cell}\n"
    return loads_catalog(text)[0]


def test_scalar_value():
    assert rec("42.5").specs["power_w"] == 42.5


def test_fraction_scalar():
    assert rec("1/8000", key="shutter_range_s").specs["shutter_range_s"] == 1 / 8000


def test_closed_range():
    value = rec("60-200").specs["power_w"]
    assert value == ValueRange(lo=60.0, hi=200.0)


def test_half_open_ranges():
    assert rec("max 20").specs["power_w"] == ValueRange(lo=None, hi=20.0)
    assert rec("min 5").specs["power_w"] == ValueRange(lo=5.0, hi=None)


def test_variant_list():
    value = rec("100ml:52.74;1L:263.90", key="cost_eur").cost_eur
    assert value == (("100ml", 52.74), ("1L", 263.9))


def test_empty_cell_means_missing():
    record = rec("")
    assert "power_w" not in record.specs
    assert record.value_for("power_w") is None


def test_free_text_column_preserved_verbatim():
    text = "id,kind,notes\nx,lamp,keeps; punctuation: intact\n"
    record = loads_catalog(text)[0]
    assert record.specs["notes"] == "keeps; punctuation: intact"


def test_bad_quantity_names_row_and_field():
    text = "id,kind,power_w\nlamp-1,lamp,watts\n"
    with pytest.raises(CatalogError, match=r"row 2 \(lamp-1\), field 'power_w'"):
        loads_catalog(text)


def test_inverted_range_rejected():
    with pytest.raises(CatalogError, match="exceeds maximum"):
        ValueRange(lo=10.0, hi=5.0)
    with pytest.raises(CatalogError, match="at least one endpoint"):
        ValueRange(lo=None, hi=None)


# --- schema validation ---------------------------------------------------------


def test_empty_file_yields_empty_list(tmp_path):
    path = tmp_path / "none.csv"
    path.write_text("")
    assert load_catalog(path) == []


def test_header_only_yields_empty_list():
    assert loads_catalog("id,kind\n") == []


def test_missing_mandatory_columns_rejected():
    with pytest.raises(CatalogError, match="must include 'id' and 'kind'"):
        loads_catalog("name,vendor\nx,y\n")


def test_missing_id_names_row():
    with pytest.raises(CatalogError, match="row 3: missing id"):
        loads_catalog("id,kind\na,lamp\n,lamp\n")


def test_duplicate_id_rejected():
    with pytest.raises(CatalogError, match="row 3: duplicate id 'a'"):
        loads_catalog("id,kind\na,lamp\na,camera\n")


def test_unknown_kind_rejected():
    with pytest.raises(CatalogError, match="unknown kind 'tripod'"):
        loads_catalog("id,kind\nx,tripod\n")


def test_negative_cost_rejected():
    # a bare minus never parses as a quantity; a variant entry does,
    # so it reaches the explicit cost check
    with pytest.raises(CatalogError, match=r"field 'cost_eur': bad quantity '-5'"):
        loads_catalog("id,kind,cost_eur\nx,lamp,-5\n")
    with pytest.raises(CatalogError, match="negative cost"):
        loads_catalog("id,kind,cost_eur\nx,lamp,unit:-5\n")


def test_out_of_domain_reflectivity_rejected():
    with pytest.raises(CatalogError, match="outside"):
        loads_catalog("id,kind,reflectivity_pct\nx,background,0\n")
    with pytest.raises(CatalogError, match="outside"):
        loads_catalog("id,kind,reflectivity_pct\nx,background,150\n")


# --- round trip -----------------------------------------------------------------


def test_write_load_round_trip(tmp_path, backgrounds, cameras, lamps):
    for name, records in (("b", backgrounds), ("c", cameras), ("l", lamps)):
        path = tmp_path / f"{name}.csv"
        write_catalog(records, path)
        assert load_catalog(path) == records


def test_dumps_formats_values_back_to_grammar():
    text = "id,kind,power_w,cost_eur\nx,lamp,60-200,max 20\n"
    records = loads_catalog(text)
    out = dumps_catalog(records)
    assert "60-200" in out and "max 20" in out
    assert loads_catalog(out) == records


# --- ranking and filtering edge cases ---------------------------------------------


def test_rank_single_record_is_itself(lamps):
    one = [lamps[0]]
    ranked = rank_by(one, "power_w")
    assert len(ranked) == 1 and ranked[0].record is lamps[0]


def test_rank_is_stable_for_ties():
    text = "id,kind,power_w\nfirst,lamp,10\nsecond,lamp,10\nthird,lamp,5\n"
    records = loads_catalog(text)
    ranked = rank_by(records, "power_w", "asc")
    assert [r.record.id for r in ranked] == ["third", "first", "second"]


def test_range_ranks_by_min_asc_and_max_desc():
    text = "id,kind,power_w\nwide,lamp,5-300\nmid,lamp,50\n"
    records = loads_catalog(text)
    assert [r.record.id for r in rank_by(records, "power_w", "asc")] == ["wide", "mid"]
    assert [r.record.id for r in rank_by(records, "power_w", "desc")] == ["wide", "mid"]


def test_rank_unknown_key_rejected(lamps):
    with pytest.raises(QueryError, match="present in no record"):
        rank_by(lamps, "warranty_years")


def test_rank_bad_direction_rejected(lamps):
    with pytest.raises(QueryError, match="asc|desc"):
        rank_by(lamps, "power_w", "up")


def test_filter_unknown_key_rejected(lamps):
    with pytest.raises(QueryError, match="present in no record"):
        filter_records(lamps, [parse_constraint("warranty_years<=2")])


def test_filter_on_text_equality(backgrounds):
    kept = filter_records(backgrounds, [Constraint(key="material", op="==", value="Paint")])
    assert {r.specs["product"] for r in kept} == {"Musou Paint", "Black3.0"}


def test_parse_constraint_forms():
    c = parse_constraint("power_w<=100")
    assert (c.key, c.op, c.value) == ("power_w", "<=", 100.0)
    c = parse_constraint("iso_range>=100")
    assert (c.key, c.op, c.value) == ("iso_range", ">=", 100.0)
    c = parse_constraint("material=Paint")
    assert (c.key, c.op, c.value) == ("material", "==", "Paint")


def test_parse_constraint_rejects_malformed():
    with pytest.raises(QueryError, match="no operator"):
        parse_constraint("power_w")
    with pytest.raises(QueryError, match="malformed"):
        parse_constraint("<=100")
    with pytest.raises(QueryError, match="malformed"):
        parse_constraint("power_w<=")


def test_constraint_rejects_unknown_operator():
    with pytest.raises(QueryError, match="unsupported filter operator"):
        Constraint(key="power_w", op="<", value=10.0)
