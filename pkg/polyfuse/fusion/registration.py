from __future__ import annotations
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from polyfuse.core import JsonPrintable, StatusCode, bail
from polyfuse.geometry import (
    CameraIntrinsics, Pixel, RigidTransform, backproject, backproject_pixels, project,
    project_points, transform_point, transform_points
)


@dataclass(frozen=True, eq=False)
class RegistrationRig(JsonPrintable):
    K_color: CameraIntrinsics
    K_polar: CameraIntrinsics
    T_color_to_polar: RigidTransform


# Color pixel with optical-axis depth z -> continuous pixel of the polarization image.
# No bounds clamping; membership is the caller's test.
def reproject_pixel(rig: RegistrationRig, u_color: Pixel, z: float) -> Pixel:
    p = transform_point(rig.T_color_to_polar, backproject(rig.K_color, u_color, z))
    if not p.z > 0:
        bail(StatusCode.BEHIND_CAMERA, "pixel ({}, {}) at z={} lands behind the polarization "
             "camera", u_color.u, u_color.v, z)
    return project(rig.K_polar, p)


# Element-wise reproject_pixel. `ok` is False where z is not positive or the point ends up
# behind the polarization camera; coordinates there are NaN.
def reproject_pixels(rig: RegistrationRig, u, v, z) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        ok = z > 0
    x, y, zc = backproject_pixels(rig.K_color, u, v, z)
    xp, yp, zp = transform_points(rig.T_color_to_polar, x, y, zc)
    with np.errstate(invalid="ignore"):
        ok = ok & (zp > 0)
    up, vp = project_points(rig.K_polar, xp, yp, zp)
    up = np.where(ok, up, np.nan)
    vp = np.where(ok, vp, np.nan)
    return up, vp, ok
