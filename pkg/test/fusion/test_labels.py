from polyfuse.core import PolyfuseException, StatusCode
from polyfuse.fusion import ClassTable, LabelMap, VOID_ID
import json
import numpy as np
import pytest


def _entries(**overrides):
    amap = ClassTable.default().to_json_serializable()
    for entry in amap["classes"]:
        if entry["name"] in overrides:
            entry["id"] = overrides[entry["name"]]
    return amap


def test_default_table():
    table = ClassTable.default()
    assert table.road == 0
    assert table.water_hazard == 7
    assert table.void == VOID_ID
    assert table.name_of(4) == "sky"
    assert table.colors_by_name()["road"] == (128, 64, 128)
    lut = table.palette()
    assert lut.shape == (256, 3)
    assert tuple(lut[7]) == (0, 0, 255)
    assert tuple(lut[100]) == (0, 0, 0)


def test_unknown_names_and_ids():
    table = ClassTable.default()
    with pytest.raises(PolyfuseException) as excinfo:
        table.id_of("boat")
    assert excinfo.value.code == StatusCode.UNKNOWN_CLASS_ID
    with pytest.raises(PolyfuseException) as excinfo:
        table.name_of(42)
    assert excinfo.value.code == StatusCode.UNKNOWN_CLASS_ID


def test_table_validation():
    with pytest.raises(PolyfuseException) as excinfo:
        ClassTable.from_dict(_entries(sidewalk=0))
    assert excinfo.value.code == StatusCode.INVALID_CLASS_TABLE
    with pytest.raises(PolyfuseException) as excinfo:
        ClassTable.from_dict(_entries(void=8))
    assert excinfo.value.code == StatusCode.INVALID_CLASS_TABLE
    amap = _entries()
    amap["classes"] = [c for c in amap["classes"] if c["name"] != "water_hazard"]
    with pytest.raises(PolyfuseException) as excinfo:
        ClassTable.from_dict(amap)
    assert excinfo.value.code == StatusCode.INVALID_CLASS_TABLE
    with pytest.raises(PolyfuseException) as excinfo:
        ClassTable.from_dict({"classes": [{"id": 1}]})
    assert excinfo.value.code == StatusCode.INVALID_CLASS_TABLE


def test_table_from_json(tmp_path):
    amap = _entries()
    amap["classes"].append({"id": 20, "name": "puddle_edge", "color": [1, 2, 3]})
    path = tmp_path / "classes.json"
    path.write_text(json.dumps(amap))
    table = ClassTable.from_json(path)
    assert table.id_of("puddle_edge") == 20
    path.write_text("{")
    with pytest.raises(PolyfuseException) as excinfo:
        ClassTable.from_json(path)
    assert excinfo.value.code == StatusCode.INVALID_CLASS_TABLE
    with pytest.raises(PolyfuseException) as excinfo:
        ClassTable.from_json(tmp_path / "missing.json")
    assert excinfo.value.code == StatusCode.IO_ERROR


def test_label_map():
    labels = LabelMap(np.array([[0, 1, 255], [7, 4, 6]]))
    assert labels.class_id.dtype == np.uint8
    assert labels.shape == (2, 3)
    assert labels.width == 3 and labels.height == 2
    labels.validate(ClassTable.default())

    copy = labels.copy()
    copy.class_id[0, 0] = 1
    assert labels.class_id[0, 0] == 0

    with pytest.raises(PolyfuseException) as excinfo:
        LabelMap(np.array([[0, 40]])).validate(ClassTable.default())
    assert excinfo.value.code == StatusCode.UNKNOWN_CLASS_ID
    with pytest.raises(PolyfuseException) as excinfo:
        LabelMap(np.array([[0, 300]]))
    assert excinfo.value.code == StatusCode.UNKNOWN_CLASS_ID
    with pytest.raises(PolyfuseException) as excinfo:
        LabelMap(np.zeros(4))
    assert excinfo.value.code == StatusCode.DIMENSION_MISMATCH
