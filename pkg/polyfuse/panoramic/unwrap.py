from __future__ import annotations
from dataclasses import dataclass
from typing import Optional, Tuple
import logging
import math

import numpy as np

from polyfuse.core import StatusCode, bail, ensure
from polyfuse.imaging import sample
from polyfuse.panoramic.pal_model import PalModel

logger = logging.getLogger(__name__)


# Remap table: output pixel (row, col) reads the annular image at (src_u, src_v).
@dataclass(eq=False)
class UnwrapMapping:
    out_width: int
    out_height: int
    src_u: np.ndarray
    src_v: np.ndarray
    r_inner: float = 0.0
    r_outer: float = 0.0
    azimuth_zero: float = 0.0

    def __post_init__(self):
        shape = (self.out_height, self.out_width)
        ensure(np.shape(self.src_u) == shape and np.shape(self.src_v) == shape,
               StatusCode.MALFORMED_TABLE, "remap table does not match {}x{}",
               self.out_width, self.out_height)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.out_height, self.out_width)


# Rows run from theta_min (top) to theta_max, columns sweep the azimuth counter-clockwise
# in image coordinates starting at azimuth_zero.
def build_unwrap(model: PalModel, out_width: Optional[int] = None) -> UnwrapMapping:
    if out_width is None:
        out_width = model.default_width()
    ensure(out_width >= 1, StatusCode.INVALID_PARAMETER,
           "unwrapped width must be at least 1, got {}", out_width)
    r_inner, r_outer = model.r_inner, model.r_outer
    out_height = int(round(r_outer - r_inner))
    ensure(out_height >= 2, StatusCode.INVALID_RANGE,
           "annulus is only {:.2f} px thick", r_outer - r_inner)

    rows = np.arange(out_height, dtype=np.float64)
    cols = np.arange(out_width, dtype=np.float64)
    radius = r_inner + rows * (r_outer - r_inner) / (out_height - 1)
    azimuth = model.azimuth_zero + 2 * math.pi * cols / out_width
    src_u = model.center.u + radius[:, None] * np.cos(azimuth)[None, :]
    src_v = model.center.v + radius[:, None] * np.sin(azimuth)[None, :]
    logger.debug("[pal] unwrap table %dx%d, radii %.2f..%.2f", out_width, out_height,
                 r_inner, r_outer)
    return UnwrapMapping(out_width, out_height, src_u, src_v, r_inner, r_outer,
                         model.azimuth_zero)


def unwrap_image(annular, mapping: UnwrapMapping, interp: str = "bilinear",
                 fill: float = np.nan) -> np.ndarray:
    annular = np.asarray(annular)
    height, width = annular.shape[:2]
    if (np.min(mapping.src_u) < -1 or np.max(mapping.src_u) > width
            or np.min(mapping.src_v) < -1 or np.max(mapping.src_v) > height):
        bail(StatusCode.DIMENSION_MISMATCH, "{}x{} image does not cover the annulus",
             width, height)
    return sample(annular, mapping.src_u, mapping.src_v, interp, fill)


# Inverse of unwrap_image: paints the annulus of an image of `shape` from a panorama.
# Columns wrap around the seam; pixels outside the annulus get `fill`.
def wrap_image(unwrapped, model: PalModel, mapping: UnwrapMapping, shape: Tuple[int, int],
               interp: str = "bilinear", fill: float = np.nan) -> np.ndarray:
    unwrapped = np.asarray(unwrapped)
    ensure(unwrapped.shape[:2] == mapping.shape, StatusCode.DIMENSION_MISMATCH,
           "panorama {} does not match remap table {}", unwrapped.shape[:2], mapping.shape)
    height, width = shape
    v, u = np.mgrid[0:height, 0:width].astype(np.float64)
    du = u - model.center.u
    dv = v - model.center.v
    radius = np.hypot(du, dv)
    row = (radius - mapping.r_inner) * (mapping.out_height - 1) / (mapping.r_outer - mapping.r_inner)
    az = np.mod(np.arctan2(dv, du) - mapping.azimuth_zero, 2 * math.pi)
    col = az * mapping.out_width / (2 * math.pi)
    # repeat column 0 after the last column so the seam interpolates
    extended = np.concatenate([unwrapped, unwrapped[:, :1]], axis=1)
    out = sample(extended, col, row, interp, fill)
    return out
