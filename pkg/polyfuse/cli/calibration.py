from __future__ import annotations
from dataclasses import dataclass
from pathlib import Path
from typing import Optional
import json
import logging

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure
from polyfuse.fusion import RegistrationRig
from polyfuse.geometry import CameraIntrinsics, RigidTransform, superpixel_intrinsics
from polyfuse.panoramic import PalModel
from polyfuse.polarization import DemosaicMode

logger = logging.getLogger(__name__)

BASELINE_TOLERANCE = 1e-6
ROTATION_TOLERANCE = 1e-6


# Everything the pipeline needs to know about the sensor rig.
#
# `baseline` repeats |T_left_to_right.t| and must agree with it; rotations are cleaned up by
# polar decomposition on load.
@dataclass(frozen=True, eq=False)
class CalibrationFile(JsonPrintable):
    K_left: CameraIntrinsics
    K_right: CameraIntrinsics
    K_polar: CameraIntrinsics
    T_left_to_right: RigidTransform
    T_left_to_polar: RigidTransform
    baseline: float
    pal: Optional[PalModel] = None

    def __post_init__(self):
        err = abs(self.baseline - self.T_left_to_right.baseline)
        ensure(err <= BASELINE_TOLERANCE, StatusCode.CALIBRATION_MISMATCH,
               "baseline {} disagrees with |t| = {} by {}", self.baseline,
               self.T_left_to_right.baseline, err)

    # Rig for registering left color pixels into the DoLP plane of the given demosaic mode.
    def registration_rig(self, mode=DemosaicMode.SUPERPIXEL) -> RegistrationRig:
        mode = DemosaicMode.parse(mode)
        K_dolp = superpixel_intrinsics(self.K_polar) if mode == DemosaicMode.SUPERPIXEL \
            else self.K_polar
        return RegistrationRig(self.K_left, K_dolp, self.T_left_to_polar)

    @classmethod
    def from_dict(cls, amap) -> CalibrationFile:
        try:
            T_lr = RigidTransform.from_dict(amap["T_left_to_right"], ROTATION_TOLERANCE)
            pal = amap.get("pal")
            return cls(
                K_left=CameraIntrinsics.from_dict(amap["K_left"]),
                K_right=CameraIntrinsics.from_dict(amap["K_right"]),
                K_polar=CameraIntrinsics.from_dict(amap["K_polar"]),
                T_left_to_right=T_lr,
                T_left_to_polar=RigidTransform.from_dict(amap["T_left_to_polar"],
                                                         ROTATION_TOLERANCE),
                baseline=float(amap.get("baseline", T_lr.baseline)),
                pal=PalModel.from_dict(pal) if pal is not None else None,
            )
        except KeyError as err:
            bail(StatusCode.INVALID_CONFIG, "calibration is missing {}", err)

    @classmethod
    def from_rig(cls, rig) -> CalibrationFile:
        return cls(rig.K_left, rig.K_right, rig.K_polar, rig.T_left_to_right,
                   rig.T_left_to_polar, rig.T_left_to_right.baseline, rig.pal)

    def to_json_serializable(self):
        amap = {
            "K_left": self.K_left.to_json_serializable(),
            "K_right": self.K_right.to_json_serializable(),
            "K_polar": self.K_polar.to_json_serializable(),
            "T_left_to_right": self.T_left_to_right.to_json_serializable(),
            "T_left_to_polar": self.T_left_to_polar.to_json_serializable(),
            "baseline": self.baseline,
        }
        if self.pal is not None:
            amap["pal"] = self.pal.to_json_serializable()
        return amap


def load_calibration(path) -> CalibrationFile:
    path = Path(path)
    try:
        amap = json.loads(path.read_text())
    except OSError as err:
        bail(StatusCode.IO_ERROR, "cannot read calibration {}: {}", path, err)
    except json.JSONDecodeError as err:
        bail(StatusCode.INVALID_CONFIG, "calibration {} is not JSON: {}", path, err)
    calib = CalibrationFile.from_dict(amap)
    logger.info("[calib] loaded %s, baseline %.4f m", path, calib.baseline)
    return calib


def save_calibration(path, calib: CalibrationFile):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(calib.to_json())
