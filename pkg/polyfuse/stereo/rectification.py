from __future__ import annotations
from dataclasses import dataclass, field
import logging

import numpy as np

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure
from polyfuse.geometry import (
    CameraIntrinsics, RigidTransform, check_rotation, pixel_rays, project_points, rotation_sqrt
)
from polyfuse.imaging import sample_bilinear, sample_nearest

logger = logging.getLogger(__name__)

DEGENERATE_BASELINE = 1e-9
# coordinates this close to a pixel centre are snapped onto it
SNAP_TOLERANCE = 1e-9


# Rotations that take each camera's coordinates into the common rectified frame,
# together with the shared rectified intrinsics.
#
# With P_r = R P_l + t, the left camera coordinates are turned by R^(1/2) and the right by
# R^(-1/2) (rotating the camera bodies by R^(-1/2) and R^(1/2) respectively), after which
# R_rect lines the x axis up with the baseline.
@dataclass(frozen=True, eq=False)
class RectificationResult(JsonPrintable):
    R_left: np.ndarray
    R_right: np.ndarray
    K_rect: CameraIntrinsics
    baseline: float
    R_rect: np.ndarray = field(default=None, metadata={"json": False})

    def __post_init__(self):
        check_rotation(np.asarray(self.R_left))
        check_rotation(np.asarray(self.R_right))
        ensure(self.baseline > 0, StatusCode.DEGENERATE_BASELINE,
               "baseline must be positive, got {}", self.baseline)

    def to_json_serializable(self):
        return {
            "R_left": self.R_left.tolist(),
            "R_right": self.R_right.tolist(),
            "K_rect": self.K_rect.to_json_serializable(),
            "baseline": self.baseline,
        }


def build_rectification(
    K_l: CameraIntrinsics,
    K_r: CameraIntrinsics,
    T_lr: RigidTransform,
) -> RectificationResult:
    norm_t = float(np.linalg.norm(T_lr.t))
    if norm_t < DEGENERATE_BASELINE:
        bail(StatusCode.DEGENERATE_BASELINE, "baseline length {} is degenerate", norm_t)

    half = rotation_sqrt(T_lr.R)
    # right camera centre in left coordinates, then in the half-way frame
    centre_r = -(T_lr.R.T @ T_lr.t)
    b = half @ centre_r
    e1 = b / np.linalg.norm(b)
    e2 = np.cross(np.array([0.0, 0.0, 1.0]), e1)
    n2 = np.linalg.norm(e2)
    if n2 < DEGENERATE_BASELINE:
        bail(StatusCode.DEGENERATE_BASELINE, "baseline is parallel to the optical axis")
    e2 = e2 / n2
    e3 = np.cross(e1, e2)
    R_rect = np.stack([e1, e2, e3])

    R_left = R_rect @ half
    R_right = R_rect @ half.T
    logger.debug("[stereo] rectification baseline %.6f m, half angle %.6f rad",
                 norm_t, np.arccos(np.clip((np.trace(half) - 1) / 2, -1, 1)))
    return RectificationResult(R_left, R_right, K_l, norm_t, R_rect)


def _snap(x: np.ndarray) -> np.ndarray:
    r = np.round(x)
    return np.where(np.abs(x - r) < SNAP_TOLERANCE, r, x)


# For every pixel of the K_to grid, where it lands in the K_from image after turning its
# ray by R^T (R maps `from` coordinates into `to` coordinates).
def _source_coordinates(R: np.ndarray, K_from: CameraIntrinsics, K_to: CameraIntrinsics):
    rays = pixel_rays(K_to)
    x, y, z = rays[..., 0], rays[..., 1], rays[..., 2]
    xo = R[0, 0] * x + R[1, 0] * y + R[2, 0] * z
    yo = R[0, 1] * x + R[1, 1] * y + R[2, 1] * z
    zo = R[0, 2] * x + R[1, 2] * y + R[2, 2] * z
    u, v = project_points(K_from, xo, yo, zo)
    behind = ~(zo > 0)
    u[behind] = np.nan
    v[behind] = np.nan
    return _snap(u), _snap(v), zo


def rectify_image(
    img,
    R_cam: np.ndarray,
    K_orig: CameraIntrinsics,
    K_rect: CameraIntrinsics,
    fill: float = np.nan,
) -> np.ndarray:
    img = np.asarray(img)
    ensure(img.shape[:2] == K_orig.shape, StatusCode.DIMENSION_MISMATCH,
           "image {} does not match intrinsics {}", img.shape[:2], K_orig.shape)
    R_cam = np.asarray(R_cam, dtype=np.float64)
    check_rotation(R_cam)
    u, v, _ = _source_coordinates(R_cam, K_orig, K_rect)
    return sample_bilinear(img, u, v, fill)


# Depth computed in the rectified left frame, resampled onto the original left image grid
# and converted to the original optical axis (z_orig = z_rect / ray_z).
def unrectify_depth(
    depth_rect: np.ndarray,
    R_left: np.ndarray,
    K_left: CameraIntrinsics,
    K_rect: CameraIntrinsics,
) -> np.ndarray:
    depth_rect = np.asarray(depth_rect, dtype=np.float64)
    ensure(depth_rect.shape == K_rect.shape, StatusCode.DIMENSION_MISMATCH,
           "depth {} does not match rectified intrinsics {}", depth_rect.shape, K_rect.shape)
    R_left = np.asarray(R_left, dtype=np.float64)
    # pixel of K_left -> rectified frame is R_left, so the sampling rotation is R_left^T
    u, v, zr = _source_coordinates(R_left.T, K_rect, K_left)
    z_rect = sample_nearest(depth_rect, u, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        return z_rect / zr
