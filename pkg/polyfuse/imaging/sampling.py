from typing import Tuple

import numpy as np
from scipy import ndimage

from polyfuse.core import StatusCode, bail

INTERPOLATION_ORDERS = {"nearest": 0, "bilinear": 1}


def interpolation_order(interp: str) -> int:
    try:
        return INTERPOLATION_ORDERS[interp]
    except KeyError:
        bail(StatusCode.INVALID_PARAMETER, "unknown interpolation '{}', expected one of {}",
             interp, sorted(INTERPOLATION_ORDERS))


def _prepare(img, u, v) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    img = np.asarray(img)
    u, v = np.broadcast_arrays(np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64))
    height, width = img.shape[:2]
    inside = (u >= 0) & (u <= width - 1) & (v >= 0) & (v <= height - 1)
    return img, u, v, inside


# Spline remap of every channel at (u, v). Edge pixels are replicated; out-of-range
# coordinates are the caller's business.
def _remap(img: np.ndarray, u: np.ndarray, v: np.ndarray, order: int) -> np.ndarray:
    src = img.astype(np.float64, copy=False)
    coords = np.stack([v.ravel(), u.ravel()])
    if src.ndim == 2:
        out = ndimage.map_coordinates(src, coords, order=order, mode="nearest")
        return out.reshape(u.shape)
    channels = [ndimage.map_coordinates(src[..., c], coords, order=order, mode="nearest")
                for c in range(src.shape[2])]
    return np.stack(channels, axis=-1).reshape(u.shape + (src.shape[2],))


def _sample(img, u, v, order: int, fill: float) -> np.ndarray:
    img, u, v, inside = _prepare(img, u, v)
    out = _remap(img, np.where(inside, u, 0.0), np.where(inside, v, 0.0), order)
    if img.ndim == 3:
        inside = inside[..., None]
    return np.where(inside, out, fill)


# Bilinear sampling at continuous (u, v). Samples outside [0, W-1] x [0, H-1] get `fill`.
def sample_bilinear(img, u, v, fill: float = np.nan) -> np.ndarray:
    return _sample(img, u, v, 1, fill)


# Nearest-neighbour sampling with round-half-up indexing.
def sample_nearest(img, u, v, fill: float = np.nan) -> np.ndarray:
    return _sample(img, u, v, 0, fill)


# Bilinear sampling with border replication.
def sample_clamped(img, u, v) -> np.ndarray:
    img = np.asarray(img)
    height, width = img.shape[:2]
    u, v = np.broadcast_arrays(np.clip(np.asarray(u, dtype=np.float64), 0, width - 1),
                               np.clip(np.asarray(v, dtype=np.float64), 0, height - 1))
    return _remap(img, u, v, 1)


def sample(img, u, v, interp: str = "bilinear", fill: float = np.nan) -> np.ndarray:
    return _sample(img, u, v, interpolation_order(interp), fill)
