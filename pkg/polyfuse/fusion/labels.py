from __future__ import annotations
from dataclasses import dataclass, field
from os.path import dirname, join
from pathlib import Path
from typing import Dict, List, Tuple
import json

import numpy as np

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure

VOID_ID = 255
REQUIRED_CLASSES = (
    "road", "sidewalk", "terrain", "vegetation", "sky", "person", "car", "water_hazard", "void"
)


def default_class_table_path() -> str:
    curdir = dirname(dirname(__file__))
    return join(curdir, "data", "class_table.json")


@dataclass(frozen=True)
class ClassEntry(JsonPrintable):
    id: int
    name: str
    color: Tuple[int, int, int]


@dataclass(eq=False)
class ClassTable(JsonPrintable):
    classes: List[ClassEntry] = field(default_factory=list)

    def __post_init__(self):
        ids = [c.id for c in self.classes]
        names = [c.name for c in self.classes]
        ensure(len(set(ids)) == len(ids), StatusCode.INVALID_CLASS_TABLE,
               "class ids must be unique: {}", ids)
        ensure(len(set(names)) == len(names), StatusCode.INVALID_CLASS_TABLE,
               "class names must be unique: {}", names)
        ensure(all(0 <= i <= 255 for i in ids), StatusCode.INVALID_CLASS_TABLE,
               "class ids must fit in 8 bits: {}", ids)
        missing = [n for n in REQUIRED_CLASSES if n not in names]
        ensure(not missing, StatusCode.INVALID_CLASS_TABLE, "class table lacks {}", missing)
        ensure(self.id_of("void") == VOID_ID, StatusCode.INVALID_CLASS_TABLE,
               "void must use id {}", VOID_ID)

    def id_of(self, name: str) -> int:
        for entry in self.classes:
            if entry.name == name:
                return entry.id
        bail(StatusCode.UNKNOWN_CLASS_ID, "no class named '{}'", name)

    def name_of(self, class_id: int) -> str:
        for entry in self.classes:
            if entry.id == class_id:
                return entry.name
        bail(StatusCode.UNKNOWN_CLASS_ID, "no class with id {}", class_id)

    @property
    def road(self) -> int:
        return self.id_of("road")

    @property
    def water_hazard(self) -> int:
        return self.id_of("water_hazard")

    @property
    def void(self) -> int:
        return VOID_ID

    def ids(self) -> List[int]:
        return [c.id for c in self.classes]

    def palette(self) -> np.ndarray:
        # 256 x 3 lookup, unknown ids black
        lut = np.zeros((256, 3), dtype=np.uint8)
        for entry in self.classes:
            lut[entry.id] = entry.color
        return lut

    def colors_by_name(self) -> Dict[str, Tuple[int, int, int]]:
        return {c.name: c.color for c in self.classes}

    @classmethod
    def from_dict(cls, amap) -> ClassTable:
        try:
            entries = [
                ClassEntry(int(c["id"]), str(c["name"]), tuple(int(x) for x in c["color"]))
                for c in amap["classes"]
            ]
        except (KeyError, TypeError, ValueError) as err:
            bail(StatusCode.INVALID_CLASS_TABLE, "bad class table: {}", err)
        for entry in entries:
            ensure(len(entry.color) == 3 and all(0 <= x <= 255 for x in entry.color),
                   StatusCode.INVALID_CLASS_TABLE, "bad color for class {}", entry.name)
        return cls(entries)

    @classmethod
    def from_json(cls, path) -> ClassTable:
        path = Path(path)
        try:
            amap = json.loads(path.read_text())
        except OSError as err:
            bail(StatusCode.IO_ERROR, "cannot read class table {}: {}", path, err)
        except json.JSONDecodeError as err:
            bail(StatusCode.INVALID_CLASS_TABLE, "class table {} is not JSON: {}", path, err)
        return cls.from_dict(amap)

    @classmethod
    def default(cls) -> ClassTable:
        return cls.from_json(default_class_table_path())


# Per-pixel class ids aligned to the left color camera.
@dataclass(eq=False)
class LabelMap:
    class_id: np.ndarray

    def __post_init__(self):
        class_id = np.asarray(self.class_id)
        ensure(class_id.ndim == 2, StatusCode.DIMENSION_MISMATCH,
               "label map must be 2-D, got {}", class_id.shape)
        ensure(np.all((class_id >= 0) & (class_id <= 255)), StatusCode.UNKNOWN_CLASS_ID,
               "label ids must fit in 8 bits")
        self.class_id = class_id.astype(np.uint8)

    @property
    def width(self) -> int:
        return self.class_id.shape[1]

    @property
    def height(self) -> int:
        return self.class_id.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.class_id.shape

    def copy(self) -> LabelMap:
        return LabelMap(self.class_id.copy())

    def validate(self, table: ClassTable):
        unknown = np.setdiff1d(np.unique(self.class_id), table.ids())
        ensure(unknown.size == 0, StatusCode.UNKNOWN_CLASS_ID,
               "label map uses ids {} missing from the class table", unknown.tolist())
