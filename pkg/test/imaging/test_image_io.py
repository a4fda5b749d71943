from polyfuse.core import PolyfuseException, StatusCode
from polyfuse.imaging import (
    decode_depth_mm, depth_colormap, dolp_colormap, dolp_gray, encode_depth_mm, read_depth_png,
    read_image, read_label_png, read_mosaic_png, to_gray, to_rgb, to_uint8, write_depth_png,
    write_image, write_label_png, write_mosaic_png
)
import numpy as np
import pytest


def test_rgb_png_round_trip(tmp_path, rng):
    img = rng.integers(0, 256, (12, 16, 3)).astype(np.uint8)
    write_image(tmp_path / "x.png", img)
    assert np.array_equal(read_image(tmp_path / "x.png"), img)


def test_depth_png(tmp_path, rng):
    depth = rng.uniform(0.15, 12.0, (10, 10))
    depth[0, 0] = np.nan
    depth[0, 1] = 70.0
    write_depth_png(tmp_path / "d.png", depth)
    back = read_depth_png(tmp_path / "d.png")
    assert np.isnan(back[0, 0])
    assert back[0, 1] == 65.535
    mask = np.isfinite(depth) & (depth < 65)
    assert np.max(np.abs(back[mask] - depth[mask])) <= 0.0005


def test_depth_encoding():
    mm = encode_depth_mm(np.array([1.0, 0.0, -2.0, np.nan, 0.0004, 0.0006]))
    assert mm.dtype == np.uint16
    assert mm.tolist() == [1000, 0, 0, 0, 0, 1]
    assert np.isnan(decode_depth_mm(np.array([0], dtype=np.uint16))[0])


def test_label_and_mosaic_png(tmp_path, rng):
    labels = rng.integers(0, 8, (6, 8)).astype(np.uint8)
    write_label_png(tmp_path / "l.png", labels)
    assert np.array_equal(read_label_png(tmp_path / "l.png"), labels)
    mosaic = rng.uniform(0, 1, (6, 8))
    write_mosaic_png(tmp_path / "m.png", mosaic)
    assert np.max(np.abs(read_mosaic_png(tmp_path / "m.png") - mosaic)) <= 0.5 / 65535 + 1e-12
    write_image(tmp_path / "m8.png", np.full((4, 4), 255, dtype=np.uint8))
    assert np.all(read_mosaic_png(tmp_path / "m8.png") == 1.0)


def test_read_errors(tmp_path):
    with pytest.raises(PolyfuseException) as excinfo:
        read_image(tmp_path / "missing.png")
    assert excinfo.value.code == StatusCode.IO_ERROR
    (tmp_path / "junk.png").write_bytes(b"not a png")
    with pytest.raises(PolyfuseException) as excinfo:
        read_image(tmp_path / "junk.png")
    assert excinfo.value.code == StatusCode.BAD_IMAGE
    write_image(tmp_path / "rgb.png", np.zeros((2, 2, 3), dtype=np.uint8))
    with pytest.raises(PolyfuseException) as excinfo:
        read_label_png(tmp_path / "rgb.png")
    assert excinfo.value.code == StatusCode.BAD_IMAGE
    with pytest.raises(PolyfuseException) as excinfo:
        write_image(tmp_path / "f.png", np.zeros((2, 2)))
    assert excinfo.value.code == StatusCode.BAD_IMAGE


def test_conversions():
    rgb = np.array([[[255, 0, 0], [0, 255, 0]]], dtype=np.uint8)
    assert to_gray(rgb).tolist() == [[0.299 * 255, 0.587 * 255]]
    assert to_rgb(np.array([[7]])).tolist() == [[[7, 7, 7]]]
    assert to_uint8(np.array([np.nan, 0.5, 254.6, 300])).tolist() == [0, 1, 255, 255]


def test_colormaps():
    rgb = dolp_colormap(np.array([[0.0, 1.0, np.nan]]))
    assert rgb.tolist() == [[[0, 0, 255], [255, 0, 0], [0, 0, 0]]]
    assert dolp_gray(np.array([0.0, 0.5, 1.0, 2.0])).tolist() == [0, 128, 255, 255]
    depth = depth_colormap(np.array([[1.0, 5.0, np.nan]]), 1.0, 5.0)
    assert depth.tolist() == [[[255, 0, 0], [0, 0, 255], [0, 0, 0]]]
