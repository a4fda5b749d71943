from dataclasses import fields, is_dataclass
from enum import Enum
from pathlib import PurePath
import json

import numpy as np


class JsonPrintable:

    def to_json_serializable(self):
        if not is_dataclass(self):
            raise TypeError(f"{type(self)} should implemente to_json_serializable method!")

        amap = {}
        for field in fields(self):
            if field.metadata.get("json", True) is False:
                continue
            obj = getattr(self, field.name)
            amap[field.name] = JsonPrintable._to_json_obj(obj)
        return amap

    @staticmethod
    def _to_json_obj(obj):
        if hasattr(obj, "to_json_serializable"):
            return obj.to_json_serializable()
        elif obj is None or isinstance(obj, (bool, str)):
            return obj
        elif isinstance(obj, Enum):
            return obj.name.lower()
        elif isinstance(obj, (int, np.integer)):
            return int(obj)
        elif isinstance(obj, (float, np.floating)):
            value = float(obj)
            # NaN is not valid JSON
            return value if np.isfinite(value) else None
        elif isinstance(obj, np.ndarray):
            return JsonPrintable._to_json_obj(obj.tolist())
        elif isinstance(obj, PurePath):
            return str(obj)
        elif is_dataclass(obj):
            return {f.name: JsonPrintable._to_json_obj(getattr(obj, f.name)) for f in fields(obj)}
        elif isinstance(obj, dict):
            return {JsonPrintable._to_str(k): JsonPrintable._to_json_obj(v)\
                    for k, v in obj.items()}
        elif isinstance(obj, (list, tuple)):
            return [JsonPrintable._to_json_obj(x) for x in obj]
        elif isinstance(obj, set):
            return [JsonPrintable._to_json_obj(x) for x in sorted(obj)]
        else:
            return obj.__str__()

    @staticmethod
    def _to_str(obj):
        if isinstance(obj, Enum):
            return obj.name.lower()
        return obj.__str__()

    def __str__(self):
        return self.__class__.__qualname__ + self.to_json(indent=4)

    def to_json(self, sort_keys=False, indent=4):
        amap = self.to_json_serializable()
        return json.dumps(amap, sort_keys=sort_keys, indent=indent)
