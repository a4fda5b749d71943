from __future__ import annotations
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Tuple
import json
import logging

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure
from polyfuse.fusion import DEFAULT_DELTA, LookupMode
from polyfuse.polarization import DEFAULT_EPSILON, DemosaicMode, MosaicLayout
from polyfuse.stereo import Z_MAX, Z_MIN

logger = logging.getLogger(__name__)

INPUT_NAMES = ("left", "right", "mosaic", "annular", "labels")
STAGE_NAMES = ("depth", "dolp", "unwrap", "fuse")


@dataclass(frozen=True)
class StageToggles(JsonPrintable):
    depth: bool = True
    dolp: bool = True
    unwrap: bool = True
    fuse: bool = True

    def enabled(self) -> List[str]:
        return [name for name in STAGE_NAMES if getattr(self, name)]


# One frame of input files. Missing modalities are None.
@dataclass(frozen=True)
class FrameInputs(JsonPrintable):
    name: str = ""
    left: Optional[Path] = None
    right: Optional[Path] = None
    mosaic: Optional[Path] = None
    annular: Optional[Path] = None
    labels: Optional[Path] = None

    @classmethod
    def from_dict(cls, amap, base: Path, name: str = "") -> FrameInputs:
        unknown = set(amap) - set(INPUT_NAMES) - {"name"}
        ensure(not unknown, StatusCode.INVALID_CONFIG, "unknown inputs {}", sorted(unknown))
        paths = {k: (base / amap[k]) if amap.get(k) else None for k in INPUT_NAMES}
        return cls(name=str(amap.get("name", name)), **paths)


@dataclass(frozen=True)
class PipelineParams(JsonPrintable):
    block_radius: int = 5
    d_range: Tuple[int, int] = (0, 64)
    z_range: Tuple[float, float] = (Z_MIN, Z_MAX)
    texture_threshold: float = 4.0
    delta: float = DEFAULT_DELTA
    demosaic: DemosaicMode = DemosaicMode.SUPERPIXEL
    lookup: LookupMode = LookupMode.NEAREST
    epsilon: float = DEFAULT_EPSILON
    unwrap_width: Optional[int] = None
    unwrap_interp: str = "bilinear"
    fill_depth: Optional[int] = None
    overlay_alpha: float = 0.5
    mosaic_layout: MosaicLayout = field(default_factory=MosaicLayout)

    def __post_init__(self):
        ensure(self.block_radius >= 0, StatusCode.INVALID_CONFIG, "block_radius must be >= 0")
        ensure(self.unwrap_interp in ("nearest", "bilinear"), StatusCode.INVALID_CONFIG,
               "unwrap_interp must be nearest or bilinear")
        if not 0.0 <= self.delta <= 1.0:
            bail(StatusCode.INVALID_THRESHOLD, "delta {} outside [0, 1]", self.delta)
        d_min, d_max = self.d_range
        ensure(0 <= d_min <= d_max, StatusCode.INVALID_RANGE, "bad d_range {}", self.d_range)

    @classmethod
    def from_dict(cls, amap) -> PipelineParams:
        defaults = cls()
        try:
            layout = amap.get("mosaic_layout")
            return cls(
                block_radius=int(amap.get("block_radius", defaults.block_radius)),
                d_range=tuple(int(x) for x in amap.get("d_range", defaults.d_range)),
                z_range=tuple(float(x) for x in amap.get("z_range", defaults.z_range)),
                texture_threshold=float(amap.get("texture_threshold",
                                                 defaults.texture_threshold)),
                delta=float(amap.get("delta", defaults.delta)),
                demosaic=DemosaicMode.parse(amap.get("demosaic", "superpixel")),
                lookup=LookupMode.parse(amap.get("lookup", "nearest")),
                epsilon=float(amap.get("epsilon", defaults.epsilon)),
                unwrap_width=amap.get("unwrap_width"),
                unwrap_interp=str(amap.get("unwrap_interp", defaults.unwrap_interp)),
                fill_depth=amap.get("fill_depth"),
                overlay_alpha=float(amap.get("overlay_alpha", defaults.overlay_alpha)),
                mosaic_layout=MosaicLayout.from_json_obj(layout) if layout else MosaicLayout(),
            )
        except (TypeError, ValueError) as err:
            bail(StatusCode.INVALID_CONFIG, "bad pipeline parameters: {}", err)


@dataclass(frozen=True)
class PipelineConfig(JsonPrintable):
    calibration: Path
    output_dir: Path
    frames: List[FrameInputs]
    stages: StageToggles = field(default_factory=StageToggles)
    params: PipelineParams = field(default_factory=PipelineParams)
    class_table: Optional[Path] = None
    unwrap_table: Optional[Path] = None
    jobs: int = 1

    # Enabled stages must have their inputs; fuse also needs depth and dolp.
    def validate(self):
        stages = self.stages
        ensure(self.frames, StatusCode.MISSING_INPUT, "no input frames configured")
        if stages.fuse:
            ensure(stages.depth and stages.dolp, StatusCode.INVALID_CONFIG,
                   "fuse needs the depth and dolp stages")
        required = {
            "depth": ("left", "right"),
            "dolp": ("mosaic",),
            "unwrap": ("annular",),
            "fuse": ("labels", "left", "mosaic"),
        }
        for frame in self.frames:
            for stage in stages.enabled():
                for name in required[stage]:
                    ensure(getattr(frame, name) is not None, StatusCode.MISSING_INPUT,
                           "stage {} needs input '{}' for frame '{}'", stage, name, frame.name)
        ensure(self.jobs >= 1, StatusCode.INVALID_CONFIG, "jobs must be at least 1")
        return self

    def with_overrides(self, **kwargs) -> PipelineConfig:
        params = {k: v for k, v in kwargs.items() if v is not None and k != "jobs"}
        config = replace(self, params=replace(self.params, **params))
        if kwargs.get("jobs") is not None:
            config = replace(config, jobs=int(kwargs["jobs"]))
        return config

    @classmethod
    def from_dict(cls, amap, base: Path = Path(".")) -> PipelineConfig:
        try:
            if "frames" in amap:
                frames = [FrameInputs.from_dict(f, base, "frame{:03d}".format(i))
                          for i, f in enumerate(amap["frames"])]
            else:
                frames = [FrameInputs.from_dict(amap.get("inputs", {}), base)]
            stages = amap.get("stages", {})
            unknown = set(stages) - set(STAGE_NAMES)
            ensure(not unknown, StatusCode.INVALID_CONFIG, "unknown stages {}", sorted(unknown))
            table = amap.get("class_table")
            remap = amap.get("unwrap_table")
            return cls(
                calibration=base / amap["calibration"],
                output_dir=base / amap.get("output_dir", "out"),
                frames=frames,
                stages=StageToggles(**{k: bool(v) for k, v in stages.items()}),
                params=PipelineParams.from_dict(amap.get("params", {})),
                class_table=base / table if table else None,
                unwrap_table=base / remap if remap else None,
                jobs=int(amap.get("jobs", 1)),
            )
        except KeyError as err:
            bail(StatusCode.INVALID_CONFIG, "pipeline config is missing {}", err)

    @classmethod
    def from_json(cls, path) -> PipelineConfig:
        path = Path(path)
        try:
            amap = json.loads(path.read_text())
        except OSError as err:
            bail(StatusCode.IO_ERROR, "cannot read config {}: {}", path, err)
        except json.JSONDecodeError as err:
            bail(StatusCode.INVALID_CONFIG, "config {} is not JSON: {}", path, err)
        return cls.from_dict(amap, path.parent)


# "median:5" -> 5
def parse_fill_depth(text: Optional[str]) -> Optional[int]:
    if text is None:
        return None
    kind, _, size = text.partition(":")
    if kind != "median" or not size.isdigit():
        bail(StatusCode.INVALID_CONFIG, "--fill-depth expects median:k, got '{}'", text)
    return int(size)
