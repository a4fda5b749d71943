from __future__ import annotations
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple
import logging
import time

import numpy as np

from polyfuse.cli.calibration import CalibrationFile
from polyfuse.cli.config import STAGE_NAMES, FrameInputs, PipelineConfig, StageToggles
from polyfuse.cli.pipeline import FrameData, PipelineContext, run_stages
from polyfuse.core import JsonPrintable, StatusCode, bail, ensure
from polyfuse.synth import demo_scene, render_scene

logger = logging.getLogger(__name__)

RESOLUTIONS = {
    "320x240": (320, 240),
    "640x480": (640, 480),
}
MIN_FRAMES = 10
WARMUP_FRAMES = 1


@dataclass
class StageTiming(JsonPrintable):
    name: str
    mean_ms: float
    median_ms: float
    p95_ms: float

    @classmethod
    def of(cls, name: str, samples: List[float]) -> StageTiming:
        arr = np.asarray(samples, dtype=np.float64)
        return cls(name, float(arr.mean()), float(np.median(arr)), float(np.percentile(arr, 95)))


@dataclass
class BenchReport(JsonPrintable):
    resolution: str
    frames: int
    stages: List[StageTiming] = field(default_factory=list)
    frame: Optional[StageTiming] = None
    fps: float = 0.0

    def format(self) -> str:
        lines = ["resolution {}  frames {}".format(self.resolution, self.frames)]
        rows = self.stages + ([self.frame] if self.frame else [])
        for row in rows:
            lines.append("  {:<8} mean {:8.2f} ms  median {:8.2f} ms  p95 {:8.2f} ms".format(
                row.name, row.mean_ms, row.median_ms, row.p95_ms))
        lines.append("  fps {:.2f}".format(self.fps))
        return "\n".join(lines)


def parse_resolution(text: str) -> Tuple[int, int]:
    if text not in RESOLUTIONS:
        bail(StatusCode.INVALID_PARAMETER, "resolution must be one of {}, got '{}'",
             ", ".join(RESOLUTIONS), text)
    return RESOLUTIONS[text]


def _bench_config(config: Optional[PipelineConfig], width: int) -> PipelineConfig:
    if config is None:
        config = PipelineConfig(Path("calibration.json"), Path("."), [FrameInputs("bench")])
        # disparities of the demo street scale with the image width
        params = replace(config.params, d_range=(0, width // 5))
        config = replace(config, params=params)
    return replace(config, stages=StageToggles(), frames=[FrameInputs("bench")],
                   unwrap_table=None)


# Runs every stage on an in-memory synthetic street scene `frames` times and reports per-stage
# latency and end-to-end throughput. Rendering and file I/O happen outside the timed region.
def benchmark(config: Optional[PipelineConfig] = None, frames: int = MIN_FRAMES,
              resolution: str = "320x240") -> BenchReport:
    ensure(frames >= MIN_FRAMES, StatusCode.INVALID_PARAMETER,
           "benchmark needs at least {} frames, got {}", MIN_FRAMES, frames)
    width, height = parse_resolution(resolution)
    spec = demo_scene(width, height, pal_size=2 * height)
    render = render_scene(spec)
    calib = CalibrationFile.from_rig(spec.rig)
    ctx = PipelineContext.create(_bench_config(config, width), calib)
    data = FrameData(render.left, render.right, render.mosaic, render.annulus,
                     render.truth.labels)

    for _ in range(WARMUP_FRAMES):
        run_stages(ctx, data)

    samples: Dict[str, List[float]] = {name: [] for name in STAGE_NAMES}
    totals = []
    for _ in range(frames):
        start = time.perf_counter()
        _, reports = run_stages(ctx, data)
        totals.append((time.perf_counter() - start) * 1000.0)
        for stage in reports:
            samples[stage.name].append(stage.wall_ms)

    report = BenchReport(resolution, frames)
    report.stages = [StageTiming.of(name, samples[name]) for name in STAGE_NAMES]
    report.frame = StageTiming.of("frame", totals)
    report.fps = 1000.0 * frames / float(np.sum(totals))
    logger.info("[bench] %s: %.2f fps over %d frames", resolution, report.fps, frames)
    return report
