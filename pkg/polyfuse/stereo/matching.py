from __future__ import annotations
from dataclasses import dataclass
from typing import Tuple
import logging

import numpy as np

from polyfuse.core import StatusCode, bail, ensure

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_RADIUS = 5
DEFAULT_TEXTURE_THRESHOLD = 4.0
DEFAULT_CONSISTENCY = 1.0


# Disparity d = x_left - x_right per left pixel, NaN where no match was accepted.
@dataclass(eq=False)
class DisparityMap:
    d: np.ndarray
    min_disparity: float
    max_disparity: float

    @property
    def width(self) -> int:
        return self.d.shape[1]

    @property
    def height(self) -> int:
        return self.d.shape[0]

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.d)

    def valid_fraction(self) -> float:
        return float(np.mean(self.valid)) if self.d.size else 0.0


# Sums over (2r+1) x (2r+1) windows, aligned to window centres. Centres whose window
# leaves the array get +inf.
def box_sum(a: np.ndarray, r: int) -> np.ndarray:
    height, width = a.shape
    k = 2 * r + 1
    out = np.full((height, width), np.inf)
    if height < k or width < k:
        return out
    ii = np.zeros((height + 1, width + 1))
    ii[1:, 1:] = np.cumsum(np.cumsum(a, axis=0), axis=1)
    out[r:height - r, r:width - r] = ii[k:, k:] - ii[:-k, k:] - ii[k:, :-k] + ii[:-k, :-k]
    return out


def block_variance(img: np.ndarray, r: int) -> np.ndarray:
    n = float((2 * r + 1) ** 2)
    mean = box_sum(img, r) / n
    with np.errstate(invalid="ignore"):
        return box_sum(img * img, r) / n - mean * mean


def _check_inputs(left, right, block_radius: int, d_range: Tuple[int, int]):
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    ensure(left.ndim == 2 and right.ndim == 2, StatusCode.DIMENSION_MISMATCH,
           "block matching needs grayscale images, got {} and {}", left.shape, right.shape)
    ensure(left.shape == right.shape, StatusCode.DIMENSION_MISMATCH,
           "left {} and right {} differ in size", left.shape, right.shape)
    ensure(block_radius >= 0, StatusCode.INVALID_PARAMETER,
           "block radius must be non-negative, got {}", block_radius)
    d_min, d_max = d_range
    if d_min > d_max:
        bail(StatusCode.INVALID_RANGE, "disparity range [{}, {}] is empty", d_min, d_max)
    ensure(d_min >= 0, StatusCode.INVALID_RANGE, "minimum disparity {} is negative", d_min)
    return left, right, int(d_min), int(d_max)


# SAD block matching over rectified images.
#
# For each left pixel the integer disparity with the lowest sum of absolute differences
# over the block wins (ties go to the smaller disparity). A match is kept when
# - the block has at least `texture_threshold` intensity variance (0-255 scale),
# - matching right-to-left returns to within `consistency` pixels,
# - the next larger disparity was searchable too, unless d is the top of the range,
# after which a parabola through the costs at d-1, d, d+1 gives the sub-pixel offset.
def match_disparity(
    left,
    right,
    block_radius: int = DEFAULT_BLOCK_RADIUS,
    d_range: Tuple[int, int] = (0, 64),
    texture_threshold: float = DEFAULT_TEXTURE_THRESHOLD,
    consistency: float = DEFAULT_CONSISTENCY,
) -> DisparityMap:
    left, right, d_min, d_max = _check_inputs(left, right, block_radius, d_range)
    height, width = left.shape
    shape = (height, width)

    # pixels outside the rectified source are NaN; blocks touching them never match
    hole_l = ~np.isfinite(left)
    hole_r = ~np.isfinite(right)
    left = np.where(hole_l, 0.0, left)
    right = np.where(hole_r, 0.0, right)

    best = np.full(shape, np.inf)
    best_d = np.full(shape, -1, dtype=np.intp)
    cost_minus = np.full(shape, np.inf)
    cost_plus = np.full(shape, np.inf)
    prev = np.full(shape, np.inf)
    best_r = np.full(shape, np.inf)
    best_dr = np.full(shape, -1, dtype=np.intp)

    for d in range(d_min, d_max + 1):
        cost = np.full(shape, np.inf)
        cost_r = np.full(shape, np.inf)
        if d < width:
            window = box_sum(np.abs(left[:, d:] - right[:, :width - d]), block_radius)
            holes = hole_l[:, d:] | hole_r[:, :width - d]
            if holes.any():
                window[box_sum(holes.astype(np.float64), block_radius) > 0] = np.inf
            cost[:, d:] = window
            cost_r[:, :width - d] = window

        after_best = best_d == d - 1
        cost_plus[after_best] = cost[after_best]
        better = cost < best
        cost_minus[better] = prev[better]
        cost_plus[better] = np.inf
        best[better] = cost[better]
        best_d[better] = d
        prev = cost

        better_r = cost_r < best_r
        best_r[better_r] = cost_r[better_r]
        best_dr[better_r] = d

    valid = np.isfinite(best)

    rows, cols = np.indices(shape)
    back = np.clip(cols - best_d, 0, width - 1)
    reverse = best_dr[rows, back]
    valid &= (cols - best_d >= 0) & (reverse >= 0)
    valid &= np.abs(best_d - reverse) <= consistency
    # a winner whose d+1 block falls off the left border sits on a clipped bound
    valid &= (best_d == d_max) | np.isfinite(cost_plus)

    with np.errstate(invalid="ignore"):
        valid &= block_variance(left, block_radius) >= texture_threshold

    offset = np.zeros(shape)
    with np.errstate(invalid="ignore", divide="ignore"):
        denom = cost_minus - 2.0 * best + cost_plus
        fit = valid & np.isfinite(denom) & (denom > 0)
        offset[fit] = (cost_minus[fit] - cost_plus[fit]) / (2.0 * denom[fit])
    offset = np.clip(offset, -0.5, 0.5)

    d = np.clip(best_d + offset, d_min, d_max)
    d[~valid] = np.nan
    result = DisparityMap(d, float(d_min), float(d_max))
    logger.debug("[stereo] matched %dx%d over [%d, %d], %.1f%% valid",
                 width, height, d_min, d_max, 100.0 * result.valid_fraction())
    return result
