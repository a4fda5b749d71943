import numpy as np

from polyfuse.imaging.image_io import to_uint8


# Linear blue (0) to red (1) ramp for DoLP planes; invalid pixels are black.
def dolp_colormap(dolp) -> np.ndarray:
    dolp = np.asarray(dolp, dtype=np.float64)
    valid = np.isfinite(dolp)
    d = np.clip(np.where(valid, dolp, 0.0), 0.0, 1.0)
    rgb = np.stack([d, np.zeros_like(d), 1.0 - d], axis=-1)
    rgb[~valid] = 0.0
    return to_uint8(rgb, 255.0)


def dolp_gray(dolp) -> np.ndarray:
    dolp = np.clip(np.asarray(dolp, dtype=np.float64), 0.0, 1.0)
    return to_uint8(dolp, 255.0)


# Near is red, far is blue; invalid is black.
def depth_colormap(depth, z_min: float, z_max: float) -> np.ndarray:
    depth = np.asarray(depth, dtype=np.float64)
    valid = np.isfinite(depth)
    t = np.clip((np.where(valid, depth, z_max) - z_min) / (z_max - z_min), 0.0, 1.0)
    rgb = np.stack([1.0 - t, np.zeros_like(t), t], axis=-1)
    rgb[~valid] = 0.0
    return to_uint8(rgb, 255.0)
