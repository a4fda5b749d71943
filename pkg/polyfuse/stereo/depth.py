from __future__ import annotations
from dataclasses import dataclass
from typing import Tuple
import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from polyfuse.core import StatusCode, bail, ensure
from polyfuse.geometry import CameraIntrinsics, RigidTransform
from polyfuse.stereo.matching import DisparityMap, match_disparity, DEFAULT_BLOCK_RADIUS
from polyfuse.stereo.rectification import build_rectification, rectify_image, unrectify_depth

logger = logging.getLogger(__name__)

Z_MIN = 0.15
Z_MAX = 12.0


# Metric depth along the optical axis, NaN for unmatched pixels.
@dataclass(eq=False)
class DepthMap:
    z: np.ndarray
    z_min: float = Z_MIN
    z_max: float = Z_MAX

    @property
    def width(self) -> int:
        return self.z.shape[1]

    @property
    def height(self) -> int:
        return self.z.shape[0]

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.z)

    def stats(self) -> dict:
        valid = self.valid
        count = int(np.count_nonzero(valid))
        amap = {
            "valid_pixels": count,
            "valid_fraction": count / self.z.size if self.z.size else 0.0,
        }
        if count:
            zs = self.z[valid]
            amap.update(z_min=float(zs.min()), z_median=float(np.median(zs)),
                        z_max=float(zs.max()))
        return amap


def _check_range(z_range: Tuple[float, float]):
    z_min, z_max = z_range
    if not (0 <= z_min < z_max):
        bail(StatusCode.INVALID_RANGE, "depth range [{}, {}] is invalid", z_min, z_max)
    return float(z_min), float(z_max)


# z = f * baseline / d. Pixels with d <= 0 or a depth outside z_range become invalid.
def disparity_to_depth(
    disp: DisparityMap,
    f: float,
    baseline: float,
    z_range: Tuple[float, float] = (Z_MIN, Z_MAX),
) -> DepthMap:
    ensure(f > 0, StatusCode.INVALID_PARAMETER, "focal length must be positive, got {}", f)
    ensure(baseline > 0, StatusCode.INVALID_PARAMETER,
           "baseline must be positive, got {}", baseline)
    z_min, z_max = _check_range(z_range)
    d = np.asarray(disp.d if isinstance(disp, DisparityMap) else disp, dtype=np.float64)
    z = np.full(d.shape, np.nan)
    with np.errstate(invalid="ignore"):
        ok = d > 0
    z[ok] = f * baseline / d[ok]
    with np.errstate(invalid="ignore"):
        z[(z < z_min) | (z > z_max)] = np.nan
    return DepthMap(z, z_min, z_max)


# k x k median of the valid neighbours, written into invalid pixels only.
def fill_depth_median(depth: DepthMap, k: int) -> DepthMap:
    ensure(k >= 3 and k % 2 == 1, StatusCode.INVALID_PARAMETER,
           "median window must be odd and at least 3, got {}", k)
    z = depth.z
    r = k // 2
    padded = np.pad(z, r, mode="constant", constant_values=np.nan)
    holes = ~np.isfinite(z)
    if not holes.any():
        return DepthMap(z.copy(), depth.z_min, depth.z_max)
    windows = sliding_window_view(padded, (k, k))[holes]
    filled = z.copy()
    # all-NaN windows stay NaN
    with np.errstate(all="ignore"):
        values = np.full(len(windows), np.nan)
        has_any = np.isfinite(windows).any(axis=(1, 2))
        values[has_any] = np.nanmedian(windows[has_any].reshape(int(has_any.sum()), -1), axis=1)
    filled[holes] = values
    logger.warning("[stereo] median %dx%d infill: %d of %d holes filled",
                k, k, int(np.count_nonzero(np.isfinite(values))), int(holes.sum()))
    return DepthMap(filled, depth.z_min, depth.z_max)


# Rectify, match, triangulate and bring the depth back onto the left camera grid.
def stereo_depth(
    left,
    right,
    K_left: CameraIntrinsics,
    K_right: CameraIntrinsics,
    T_left_to_right: RigidTransform,
    block_radius: int = DEFAULT_BLOCK_RADIUS,
    d_range: Tuple[int, int] = (0, 64),
    z_range: Tuple[float, float] = (Z_MIN, Z_MAX),
    texture_threshold: float = 4.0,
) -> DepthMap:
    rect = build_rectification(K_left, K_right, T_left_to_right)
    left_r = rectify_image(left, rect.R_left, K_left, rect.K_rect)
    right_r = rectify_image(right, rect.R_right, K_right, rect.K_rect)
    disp = match_disparity(left_r, right_r, block_radius, d_range, texture_threshold)
    depth_rect = disparity_to_depth(disp, rect.K_rect.fx, rect.baseline, z_range)
    z = unrectify_depth(depth_rect.z, rect.R_left, K_left, rect.K_rect)
    with np.errstate(invalid="ignore"):
        z[(z < depth_rect.z_min) | (z > depth_rect.z_max)] = np.nan
    return DepthMap(z, depth_rect.z_min, depth_rect.z_max)
