from polyfuse.cli.calibration import CalibrationFile, load_calibration, save_calibration
from polyfuse.cli.config import (
    FrameInputs, PipelineConfig, PipelineParams, StageToggles, parse_fill_depth
)
from polyfuse.cli.pipeline import (
    FrameData, FrameReport, PipelineContext, StageReport, run_frame, run_pipeline, run_stages
)
from polyfuse.cli.bench import BenchReport, StageTiming, benchmark
from polyfuse.cli.synth_io import write_synth_frame
