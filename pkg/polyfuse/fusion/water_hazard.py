from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from typing import Optional
import logging

import numpy as np

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure
from polyfuse.fusion.labels import ClassTable, LabelMap
from polyfuse.fusion.registration import RegistrationRig, reproject_pixels
from polyfuse.geometry import Pixel, pixel_grid
from polyfuse.imaging import sample_nearest
from polyfuse.stereo import DepthMap

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 0.6


class LookupMode(Enum):
    NEAREST = 1
    BILINEAR = 2

    @classmethod
    def parse(cls, name) -> LookupMode:
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            bail(StatusCode.INVALID_CONFIG, "unknown lookup mode '{}'", name)


def _bilinear_with_fallback(plane: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    height, width = plane.shape
    x0 = np.minimum(np.floor(u).astype(np.intp), max(width - 2, 0))
    y0 = np.minimum(np.floor(v).astype(np.intp), max(height - 2, 0))
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    ax = u - x0
    ay = v - y0

    taps = np.stack([plane[y0, x0], plane[y0, x1], plane[y1, x0], plane[y1, x1]])
    valid = np.isfinite(taps)
    complete = valid.all(axis=0)

    out = np.full(u.shape, np.nan)
    top = taps[0] + ax * (taps[1] - taps[0])
    bottom = taps[2] + ax * (taps[3] - taps[2])
    with np.errstate(invalid="ignore"):
        top = np.where(ax == 0, taps[0], np.where(ax == 1, taps[1], top))
        bottom = np.where(ax == 0, taps[2], np.where(ax == 1, taps[3], bottom))
        blend = top + ay * (bottom - top)
        blend = np.where(ay == 0, top, np.where(ay == 1, bottom, blend))
    out[complete] = blend[complete]

    # any missing tap: the closest valid tap wins, first in tap order on ties
    partial = ~complete & valid.any(axis=0)
    if partial.any():
        dist = np.stack([
            ax * ax + ay * ay,
            (1 - ax) ** 2 + ay * ay,
            ax * ax + (1 - ay) ** 2,
            (1 - ax) ** 2 + (1 - ay) ** 2,
        ])
        dist = np.where(valid, dist, np.inf)
        pick = np.argmin(dist, axis=0)
        chosen = np.take_along_axis(taps, pick[None], axis=0)[0]
        out[partial] = chosen[partial]
    return out


# DoLP at continuous polarization-image coordinates, vectorised. Coordinates must already
# lie inside [0, W-1] x [0, H-1].
def dolp_lookup_many(dolp_plane, u, v, mode=LookupMode.NEAREST) -> np.ndarray:
    mode = LookupMode.parse(mode)
    plane = np.asarray(dolp_plane, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if mode == LookupMode.NEAREST:
        return sample_nearest(plane, u, v)
    return _bilinear_with_fallback(plane, u, v)


def dolp_lookup(dolp_plane, u: Pixel, mode=LookupMode.NEAREST) -> float:
    plane = np.asarray(dolp_plane, dtype=np.float64)
    height, width = plane.shape
    if not (0 <= u.u <= width - 1 and 0 <= u.v <= height - 1):
        bail(StatusCode.OUT_OF_BOUNDS, "({}, {}) is outside the {}x{} DoLP plane", u.u, u.v,
             width, height)
    return float(dolp_lookup_many(plane, np.array([u.u]), np.array([u.v]), mode)[0])


def _check_delta(delta: float):
    if not (0.0 <= delta <= 1.0):
        bail(StatusCode.INVALID_THRESHOLD, "DoLP threshold {} outside [0, 1]", delta)


# Road pixels with valid depth whose reprojection lands inside the polarization image at a
# DoLP of at least delta become water_hazard. Everything else is copied through.
def detect_water(
    labels: LabelMap,
    depth,
    dolp_plane,
    rig: RegistrationRig,
    delta: float = DEFAULT_DELTA,
    lookup=LookupMode.NEAREST,
    table: Optional[ClassTable] = None,
) -> LabelMap:
    _check_delta(delta)
    table = table or ClassTable.default()
    z = np.asarray(depth.z if isinstance(depth, DepthMap) else depth, dtype=np.float64)
    plane = np.asarray(dolp_plane, dtype=np.float64)
    ensure(labels.shape == z.shape, StatusCode.DIMENSION_MISMATCH,
           "labels {} and depth {} differ in size", labels.shape, z.shape)
    ensure(labels.shape == rig.K_color.shape, StatusCode.DIMENSION_MISMATCH,
           "labels {} do not match the color camera {}", labels.shape, rig.K_color.shape)
    ensure(plane.shape == rig.K_polar.shape, StatusCode.DIMENSION_MISMATCH,
           "DoLP plane {} does not match the polarization camera {}", plane.shape,
           rig.K_polar.shape)

    out = labels.copy()
    with np.errstate(invalid="ignore"):
        candidates = (labels.class_id == table.road) & np.isfinite(z) & (z > 0)
    if not candidates.any():
        return out

    u, v = pixel_grid(labels.width, labels.height)
    up, vp, ok = reproject_pixels(rig, u[candidates], v[candidates], z[candidates])
    inside = ok & rig.K_polar.contains(up, vp)
    values = np.full(up.shape, np.nan)
    values[inside] = dolp_lookup_many(plane, up[inside], vp[inside], lookup)
    with np.errstate(invalid="ignore"):
        hazard = inside & (values >= delta)

    rows, cols = np.nonzero(candidates)
    out.class_id[rows[hazard], cols[hazard]] = table.water_hazard
    logger.info("[fusion] %d road pixels checked, %d registered, %d flagged as water",
                int(candidates.sum()), int(inside.sum()), int(hazard.sum()))
    return out


@dataclass
class HazardSummary(JsonPrintable):
    pixels: int
    depth_min: Optional[float] = None
    depth_median: Optional[float] = None


# Pixels newly flagged as water hazard and how far away they are.
def hazard_summary(before: LabelMap, after: LabelMap, depth, table: Optional[ClassTable] = None
                   ) -> HazardSummary:
    table = table or ClassTable.default()
    z = np.asarray(depth.z if isinstance(depth, DepthMap) else depth, dtype=np.float64)
    ensure(before.shape == after.shape == z.shape, StatusCode.DIMENSION_MISMATCH,
           "label maps and depth differ in size")
    water = table.water_hazard
    flagged = (after.class_id == water) & (before.class_id != water)
    zs = z[flagged]
    zs = zs[np.isfinite(zs)]
    if zs.size == 0:
        return HazardSummary(int(flagged.sum()))
    return HazardSummary(int(flagged.sum()), float(zs.min()), float(np.median(zs)))
