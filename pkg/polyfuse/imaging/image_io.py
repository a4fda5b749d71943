from pathlib import Path
import logging

import cv2
import numpy as np

from polyfuse.core import StatusCode, bail, ensure

logger = logging.getLogger(__name__)

DEPTH_SCALE_MM = 1000.0
DEPTH_MAX_MM = 65535


def _check_readable(path) -> Path:
    path = Path(path)
    ensure(path.is_file(), StatusCode.IO_ERROR, "cannot read {}: no such file", path)
    return path


# Reads a PNG in RGB channel order (OpenCV keeps BGR internally).
def read_image(path) -> np.ndarray:
    path = _check_readable(path)
    img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        bail(StatusCode.BAD_IMAGE, "cannot decode image {}", path)
    if img.ndim == 3:
        if img.shape[2] == 4:
            img = cv2.cvtColor(img, cv2.COLOR_BGRA2RGB)
        else:
            img = cv2.cvtColor(img, cv2.COLOR_BGR2RGB)
    return img


def write_image(path, img: np.ndarray):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img = np.asarray(img)
    ensure(img.dtype in (np.uint8, np.uint16), StatusCode.BAD_IMAGE,
           "PNG export needs uint8 or uint16 pixels, got {}", img.dtype)
    if img.ndim == 3:
        img = cv2.cvtColor(img, cv2.COLOR_RGB2BGR)
    if not cv2.imwrite(str(path), img):
        bail(StatusCode.IO_ERROR, "cannot write {}", path)
    logger.debug("[io] wrote %s %s", path, img.shape)


def to_gray(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        return img
    ensure(img.ndim == 3 and img.shape[2] >= 3, StatusCode.BAD_IMAGE,
           "cannot convert image of shape {} to grayscale", img.shape)
    return 0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2]


def to_rgb(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim == 2:
        return np.stack([img] * 3, axis=-1)
    return img[..., :3]


def to_uint8(img, scale: float = 1.0) -> np.ndarray:
    img = np.nan_to_num(np.asarray(img, dtype=np.float64) * scale, nan=0.0)
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def encode_depth_mm(depth) -> np.ndarray:
    depth = np.asarray(depth, dtype=np.float64)
    valid = np.isfinite(depth) & (depth > 0)
    mm = np.floor(np.where(valid, depth, 0.0) * DEPTH_SCALE_MM + 0.5)
    mm = np.clip(mm, 0, DEPTH_MAX_MM).astype(np.uint16)
    mm[~valid] = 0
    return mm


def decode_depth_mm(mm) -> np.ndarray:
    mm = np.asarray(mm)
    depth = mm.astype(np.float64) / DEPTH_SCALE_MM
    depth[mm == 0] = np.nan
    return depth


# 16-bit millimetres, 0 = invalid
def write_depth_png(path, depth):
    write_image(path, encode_depth_mm(depth))


def read_depth_png(path) -> np.ndarray:
    mm = read_image(path)
    ensure(mm.ndim == 2 and mm.dtype == np.uint16, StatusCode.BAD_IMAGE,
           "depth PNG {} must be 16-bit single channel", path)
    return decode_depth_mm(mm)


def write_label_png(path, labels):
    labels = np.asarray(labels)
    ensure(labels.ndim == 2, StatusCode.BAD_IMAGE, "label map must be single channel")
    write_image(path, labels.astype(np.uint8))


def read_label_png(path) -> np.ndarray:
    labels = read_image(path)
    ensure(labels.ndim == 2 and labels.dtype == np.uint8, StatusCode.BAD_IMAGE,
           "label PNG {} must be 8-bit single channel", path)
    return labels


def write_mosaic_png(path, intensity):
    intensity = np.clip(np.asarray(intensity, dtype=np.float64), 0.0, 1.0)
    write_image(path, np.floor(intensity * 65535 + 0.5).astype(np.uint16))


# Raw polarizer mosaics are stored as 8- or 16-bit grayscale; intensities come back in [0, 1].
def read_mosaic_png(path) -> np.ndarray:
    raw = read_image(path)
    ensure(raw.ndim == 2, StatusCode.BAD_IMAGE, "mosaic {} must be single channel", path)
    if raw.dtype == np.uint16:
        return raw.astype(np.float64) / 65535.0
    return raw.astype(np.float64) / 255.0
