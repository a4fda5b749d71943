from pathlib import Path
import json
import logging

from polyfuse.cli.calibration import CalibrationFile, save_calibration
from polyfuse.imaging import (
    to_uint8, write_depth_png, write_image, write_label_png, write_mosaic_png
)
from polyfuse.synth import SceneRender, SceneSpec

logger = logging.getLogger(__name__)

CALIBRATION_NAME = "calibration.json"
CONFIG_NAME = "config.json"


# Writes one rendered frame set as files `polyfuse run` can consume:
#   left.png, right.png      8-bit grayscale stereo pair
#   mosaic.png               16-bit polarizer mosaic
#   annular.png              RGB PAL image (only when the rig has a PAL)
#   labels.png               8-bit class ids of the left camera
#   gt_depth.png             16-bit millimetres, left camera
#   gt_dolp.png              16-bit DoLP on the superpixel grid, 65535 = 1.0
#   gt_water.png             8-bit, 255 where the left camera sees a water hazard
# plus calibration.json and a config.json with every applicable stage enabled.
def write_synth_frame(render: SceneRender, spec: SceneSpec, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    truth = render.truth

    write_image(out_dir / "left.png", to_uint8(render.left))
    write_image(out_dir / "right.png", to_uint8(render.right))
    write_mosaic_png(out_dir / "mosaic.png", render.mosaic.intensity)
    write_label_png(out_dir / "labels.png", truth.labels.class_id)
    write_depth_png(out_dir / "gt_depth.png", truth.depth)
    if truth.dolp is not None:
        write_mosaic_png(out_dir / "gt_dolp.png", truth.dolp)
    write_label_png(out_dir / "gt_water.png", truth.water_mask * 255)

    inputs = {
        "left": "left.png",
        "right": "right.png",
        "mosaic": "mosaic.png",
        "labels": "labels.png",
    }
    has_pal = render.annulus is not None
    if has_pal:
        write_image(out_dir / "annular.png", render.annulus)
        inputs["annular"] = "annular.png"

    save_calibration(out_dir / CALIBRATION_NAME, CalibrationFile.from_rig(spec.rig))
    config = {
        "calibration": CALIBRATION_NAME,
        "output_dir": "out",
        "inputs": inputs,
        "stages": {"depth": True, "dolp": True, "unwrap": has_pal, "fuse": True},
        "params": {"d_range": [0, spec.rig.K_left.width // 5]},
    }
    (out_dir / CONFIG_NAME).write_text(json.dumps(config, indent=4))
    logger.info("[synth] wrote frame set to %s", out_dir)
    return out_dir / CONFIG_NAME
