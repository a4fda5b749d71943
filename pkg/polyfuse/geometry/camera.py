from __future__ import annotations
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure


# Continuous image coordinate: u is the column, v the row, origin at the centre of the
# top-left pixel.
@dataclass(frozen=True)
class Pixel(JsonPrintable):
    u: float
    v: float

    def __post_init__(self):
        ensure(np.isfinite(self.u) and np.isfinite(self.v), StatusCode.INVALID_PARAMETER,
               "pixel coordinates must be finite, got ({}, {})", self.u, self.v)


# Camera-frame point in meters, z along the optical axis.
@dataclass(frozen=True)
class Point3(JsonPrintable):
    x: float
    y: float
    z: float

    def __post_init__(self):
        ensure(np.isfinite(self.x) and np.isfinite(self.y) and np.isfinite(self.z),
               StatusCode.INVALID_PARAMETER, "point coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @classmethod
    def from_array(cls, arr) -> Point3:
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))


# Ideal pinhole intrinsics: zero skew, no lens distortion.
@dataclass(frozen=True)
class CameraIntrinsics(JsonPrintable):
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        ensure(self.fx > 0 and self.fy > 0, StatusCode.INVALID_INTRINSICS,
               "focal lengths must be positive, got fx={} fy={}", self.fx, self.fy)
        ensure(self.width > 0 and self.height > 0, StatusCode.INVALID_INTRINSICS,
               "image size must be positive, got {}x{}", self.width, self.height)
        ensure(0 <= self.cx < self.width and 0 <= self.cy < self.height,
               StatusCode.INVALID_INTRINSICS,
               "principal point ({}, {}) outside {}x{} image", self.cx, self.cy,
               self.width, self.height)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    def matrix(self) -> np.ndarray:
        return np.array([
            [self.fx, 0.0, self.cx],
            [0.0, self.fy, self.cy],
            [0.0, 0.0, 1.0],
        ])

    def scaled(self, scale: float) -> CameraIntrinsics:
        # Pixel centres scale about the top-left corner of the image, which sits at -0.5.
        return CameraIntrinsics(
            self.fx * scale, self.fy * scale,
            (self.cx + 0.5) * scale - 0.5, (self.cy + 0.5) * scale - 0.5,
            int(round(self.width * scale)), int(round(self.height * scale)),
        )

    def contains(self, u, v):
        return (u >= 0) & (u <= self.width - 1) & (v >= 0) & (v <= self.height - 1)

    @classmethod
    def from_dict(cls, amap) -> CameraIntrinsics:
        try:
            return cls(float(amap["fx"]), float(amap["fy"]), float(amap["cx"]),
                       float(amap["cy"]), int(amap["width"]), int(amap["height"]))
        except (KeyError, TypeError, ValueError) as err:
            bail(StatusCode.INVALID_CONFIG, "bad camera intrinsics {}: {}", amap, err)


# Intrinsics of the half-resolution grid produced by 2x2 superpixel demosaicing.
# Superpixel (i, j) is centred on full-resolution coordinate (2j + 0.5, 2i + 0.5).
def superpixel_intrinsics(K: CameraIntrinsics) -> CameraIntrinsics:
    return CameraIntrinsics(
        K.fx / 2, K.fy / 2, (K.cx - 0.5) / 2, (K.cy - 0.5) / 2, K.width // 2, K.height // 2
    )


def project(K: CameraIntrinsics, p: Point3) -> Pixel:
    if not p.z > 0:
        bail(StatusCode.NON_POSITIVE_DEPTH, "cannot project point with z={}", p.z)
    return Pixel(K.fx * p.x / p.z + K.cx, K.fy * p.y / p.z + K.cy)


def backproject(K: CameraIntrinsics, u: Pixel, z: float) -> Point3:
    if not z > 0:
        bail(StatusCode.NON_POSITIVE_DEPTH, "cannot backproject with depth {}", z)
    return Point3((u.u - K.cx) * z / K.fx, (u.v - K.cy) * z / K.fy, z)


# Vectorised forms. The arithmetic is written in the same order as the scalar functions
# so the results agree bit for bit.

def project_points(K: CameraIntrinsics, x, y, z) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = K.fx * x / z + K.cx
        v = K.fy * y / z + K.cy
    return u, v


def backproject_pixels(K: CameraIntrinsics, u, v, z) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    return (u - K.cx) * z / K.fx, (v - K.cy) * z / K.fy, z


def pixel_grid(width: int, height: int) -> Tuple[np.ndarray, np.ndarray]:
    v, u = np.mgrid[0:height, 0:width]
    return u.astype(np.float64), v.astype(np.float64)


def pixel_rays(K: CameraIntrinsics) -> np.ndarray:
    # H x W x 3 ray directions with unit z component
    u, v = pixel_grid(K.width, K.height)
    x, y, z = backproject_pixels(K, u, v, np.ones_like(u))
    return np.stack([x, y, z], axis=-1)


def depth_to_points(K: CameraIntrinsics, depth: np.ndarray) -> np.ndarray:
    depth = np.asarray(depth, dtype=np.float64)
    ensure(depth.shape == K.shape, StatusCode.DIMENSION_MISMATCH,
           "depth map {} does not match intrinsics {}", depth.shape, K.shape)
    u, v = pixel_grid(K.width, K.height)
    valid = np.isfinite(depth) & (depth > 0)
    x, y, z = backproject_pixels(K, u[valid], v[valid], depth[valid])
    return np.stack([x, y, z], axis=-1)
