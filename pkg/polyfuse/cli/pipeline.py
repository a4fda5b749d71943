from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple
import json
import logging
import time

import numpy as np

from polyfuse.cli.calibration import CalibrationFile, load_calibration
from polyfuse.cli.config import STAGE_NAMES, FrameInputs, PipelineConfig
from polyfuse.core import JsonPrintable, PolyfuseException, StatusCode, ensure
from polyfuse.fusion import (
    ClassTable, LabelMap, detect_water, hazard_summary, overlay_visualization
)
from polyfuse.imaging import (
    dolp_colormap, dolp_gray, read_image, read_label_png, read_mosaic_png, to_gray, to_rgb,
    to_uint8, write_depth_png, write_image, write_label_png
)
from polyfuse.panoramic import UnwrapMapping, build_unwrap, load_unwrap_table, unwrap_image
from polyfuse.panoramic.unwrap_table import save_unwrap_table
from polyfuse.polarization import MosaicFrame, PolarizationFrame, polarization_frame
from polyfuse.stereo import DepthMap, fill_depth_median, stereo_depth
from polyfuse.version import version

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"


@dataclass
class StageReport(JsonPrintable):
    name: str
    wall_ms: float
    stats: dict = field(default_factory=dict)


@dataclass
class FrameReport(JsonPrintable):
    name: str
    stages: List[StageReport] = field(default_factory=list)
    artifacts: List[str] = field(default_factory=list)
    error: Optional[str] = None


# In-memory inputs of one frame.
@dataclass(eq=False)
class FrameData:
    left: Optional[np.ndarray] = None
    right: Optional[np.ndarray] = None
    mosaic: Optional[MosaicFrame] = None
    annular: Optional[np.ndarray] = None
    labels: Optional[LabelMap] = None


@dataclass(eq=False)
class FrameResult:
    depth: Optional[DepthMap] = None
    polar: Optional[PolarizationFrame] = None
    panorama: Optional[np.ndarray] = None
    fused: Optional[LabelMap] = None
    overlay: Optional[np.ndarray] = None


def read_frame(frame: FrameInputs, config: PipelineConfig) -> FrameData:
    data = FrameData()
    if frame.left is not None:
        data.left = read_image(frame.left)
    if frame.right is not None:
        data.right = read_image(frame.right)
    if frame.mosaic is not None:
        data.mosaic = MosaicFrame(read_mosaic_png(frame.mosaic), config.params.mosaic_layout)
    if frame.annular is not None:
        data.annular = read_image(frame.annular)
    if frame.labels is not None:
        data.labels = LabelMap(read_label_png(frame.labels))
    return data


# Shared per-run state: calibration, class table and the (possibly cached) PAL remap table.
@dataclass(eq=False)
class PipelineContext:
    config: PipelineConfig
    calib: CalibrationFile
    table: ClassTable
    mapping: Optional[UnwrapMapping] = None

    @classmethod
    def create(cls, config: PipelineConfig, calib: Optional[CalibrationFile] = None
               ) -> PipelineContext:
        calib = calib or load_calibration(config.calibration)
        table = ClassTable.from_json(config.class_table) if config.class_table \
            else ClassTable.default()
        skipped = [name for name in STAGE_NAMES if name not in config.stages.enabled()]
        if skipped:
            logger.info("[pipeline] stages disabled: %s", ", ".join(skipped))
        mapping = None
        if config.stages.unwrap:
            ensure(calib.pal is not None, StatusCode.INVALID_CONFIG,
                   "unwrap stage needs a PAL model in the calibration")
            mapping = unwrap_mapping(calib, config.params.unwrap_width, config.unwrap_table)
        return cls(config, calib, table, mapping)


def unwrap_mapping(calib: CalibrationFile, width: Optional[int], table_path: Optional[Path]
                   ) -> UnwrapMapping:
    if table_path is not None and Path(table_path).is_file():
        return load_unwrap_table(table_path, calib.pal)
    mapping = build_unwrap(calib.pal, width)
    if table_path is not None:
        save_unwrap_table(table_path, mapping)
    return mapping


def stage_depth(ctx: PipelineContext, data: FrameData) -> DepthMap:
    p = ctx.config.params
    c = ctx.calib
    depth = stereo_depth(to_gray(data.left), to_gray(data.right), c.K_left, c.K_right,
                         c.T_left_to_right, p.block_radius, p.d_range, p.z_range,
                         p.texture_threshold)
    if p.fill_depth:
        depth = fill_depth_median(depth, p.fill_depth)
    return depth


def stage_dolp(ctx: PipelineContext, data: FrameData) -> PolarizationFrame:
    p = ctx.config.params
    ensure(data.mosaic.intensity.shape == ctx.calib.K_polar.shape, StatusCode.DIMENSION_MISMATCH,
           "mosaic {} does not match the polarization camera {}", data.mosaic.intensity.shape,
           ctx.calib.K_polar.shape)
    return polarization_frame(data.mosaic, p.demosaic, p.epsilon)


def stage_unwrap(ctx: PipelineContext, data: FrameData) -> np.ndarray:
    return unwrap_image(data.annular, ctx.mapping, ctx.config.params.unwrap_interp)


def stage_fuse(ctx: PipelineContext, data: FrameData, result: FrameResult):
    p = ctx.config.params
    rig = ctx.calib.registration_rig(p.demosaic)
    data.labels.validate(ctx.table)
    fused = detect_water(data.labels, result.depth, result.polar.dolp, rig, p.delta, p.lookup,
                         ctx.table)
    overlay = overlay_visualization(to_rgb(data.left), fused, ctx.table, p.overlay_alpha)
    return fused, overlay


def _fuse_stats(ctx, data, result) -> dict:
    summary = hazard_summary(data.labels, result.fused, result.depth, ctx.table)
    return {"hazard": summary.to_json_serializable()}


def _panorama_stats(panorama: np.ndarray) -> dict:
    valid = np.isfinite(panorama)
    if panorama.ndim == 3:
        valid = valid.all(axis=-1)
    return {"width": panorama.shape[1], "height": panorama.shape[0],
            "valid_fraction": float(valid.mean())}


# Runs the enabled stages on one frame in dependency order. `on_stage(name, result)` is called
# after each stage, which is where artifacts get written; timings cover the computation only.
def run_stages(ctx: PipelineContext, data: FrameData,
               on_stage: Optional[Callable[[str, FrameResult], None]] = None
               ) -> Tuple[FrameResult, List[StageReport]]:
    stages = ctx.config.stages
    result = FrameResult()
    reports = []

    def timed(name, fn):
        start = time.perf_counter()
        try:
            value = fn()
        except PolyfuseException as err:
            err.stage = name
            raise
        return value, (time.perf_counter() - start) * 1000.0

    if stages.depth:
        result.depth, ms = timed("depth", lambda: stage_depth(ctx, data))
        reports.append(StageReport("depth", ms, result.depth.stats()))
        if on_stage:
            on_stage("depth", result)
    if stages.dolp:
        result.polar, ms = timed("dolp", lambda: stage_dolp(ctx, data))
        reports.append(StageReport("dolp", ms, result.polar.stats()))
        if on_stage:
            on_stage("dolp", result)
    if stages.unwrap:
        result.panorama, ms = timed("unwrap", lambda: stage_unwrap(ctx, data))
        reports.append(StageReport("unwrap", ms, _panorama_stats(result.panorama)))
        if on_stage:
            on_stage("unwrap", result)
    if stages.fuse:
        (result.fused, result.overlay), ms = timed("fuse", lambda: stage_fuse(ctx, data, result))
        reports.append(StageReport("fuse", ms, _fuse_stats(ctx, data, result)))
        if on_stage:
            on_stage("fuse", result)
    return result, reports


class ArtifactWriter:

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.written: List[str] = []

    def _path(self, name: str) -> Path:
        self.written.append(name)
        return self.out_dir / name

    def __call__(self, stage: str, result: FrameResult):
        if stage == "depth":
            write_depth_png(self._path("depth.png"), result.depth.z)
        elif stage == "dolp":
            write_image(self._path("dolp.png"), dolp_gray(result.polar.dolp))
            write_image(self._path("dolp_color.png"), dolp_colormap(result.polar.dolp))
        elif stage == "unwrap":
            write_image(self._path("panorama.png"), to_uint8(result.panorama))
        elif stage == "fuse":
            write_label_png(self._path("labels_fused.png"), result.fused.class_id)
            write_image(self._path("overlay.png"), result.overlay)


def _frame_dir(config: PipelineConfig, frame: FrameInputs) -> Path:
    if len(config.frames) == 1 and not frame.name:
        return config.output_dir
    return config.output_dir / (frame.name or "frame")


def run_frame(ctx: PipelineContext, frame: FrameInputs
              ) -> Tuple[FrameReport, Optional[PolyfuseException]]:
    out_dir = _frame_dir(ctx.config, frame)
    out_dir.mkdir(parents=True, exist_ok=True)
    writer = ArtifactWriter(out_dir)
    report = FrameReport(frame.name)
    failure = None
    try:
        data = read_frame(frame, ctx.config)
        _, report.stages = run_stages(ctx, data, writer)
    except PolyfuseException as err:
        if err.stage is None:
            err.stage = "read"
        report.error = str(err)
        failure = err
        logger.error("[pipeline] frame '%s' failed: %s", frame.name, err)
    report.artifacts = writer.written
    logger.info("[pipeline] frame '%s' wrote %s", frame.name, ", ".join(writer.written) or "nothing")
    return report, failure


def write_report(path: Path, reports: List[FrameReport], error: Optional[str] = None):
    amap: Dict = {
        "version": version,
        "frames": [r.to_json_serializable() for r in reports],
    }
    if error:
        amap["error"] = error
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(amap, indent=4))


# Validates the config, then processes every frame (up to config.jobs at a time) and writes
# report.json into the output directory. Artifacts of completed stages are kept when a later
# stage fails; the first failure is re-raised after the report is written.
def run_pipeline(config: PipelineConfig) -> List[FrameReport]:
    config.validate()
    for frame in config.frames:
        for name in ("left", "right", "mosaic", "annular", "labels"):
            path = getattr(frame, name)
            ensure(path is None or Path(path).is_file(), StatusCode.IO_ERROR,
                   "input {} of frame '{}' not found: {}", name, frame.name, path)
    ctx = PipelineContext.create(config)

    reports: List[FrameReport] = []
    failure: Optional[PolyfuseException] = None
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        futures = [pool.submit(run_frame, ctx, frame) for frame in config.frames]
        for future in futures:
            report, err = future.result()
            reports.append(report)
            failure = failure or err

    write_report(config.output_dir / REPORT_NAME, reports,
                 str(failure) if failure else None)
    if failure is not None:
        raise failure
    return reports
