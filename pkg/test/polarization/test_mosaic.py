from polyfuse.core import PolyfuseException, StatusCode
from polyfuse.polarization import (
    DEFAULT_LAYOUT, DemosaicMode, MosaicFrame, MosaicLayout, demosaic, malus_intensity
)
import math
import numpy as np
import pytest


def test_constant_mosaic_both_modes():
    frame = MosaicFrame(np.full((8, 10), 0.5))
    for mode in DemosaicMode:
        planes = demosaic(frame, mode)
        assert sorted(planes) == [0, 45, 90, 135]
        for plane in planes.values():
            assert np.all(plane == 0.5)
    assert demosaic(frame, "superpixel")[0].shape == (4, 5)
    assert demosaic(frame, "bilinear")[0].shape == (8, 10)


def test_superpixel_layout_read_off():
    planes = demosaic(MosaicFrame(np.array([[0.9, 0.45], [0.135, 0.0]])))
    assert planes[90].tolist() == [[0.9]]
    assert planes[45].tolist() == [[0.45]]
    assert planes[135].tolist() == [[0.135]]
    assert planes[0].tolist() == [[0.0]]


def test_custom_layout():
    layout = MosaicLayout(((0, 45), (135, 90)))
    planes = demosaic(MosaicFrame(np.array([[0.9, 0.45], [0.135, 0.0]]), layout))
    assert planes[0].tolist() == [[0.9]]
    assert planes[90].tolist() == [[0.0]]
    assert MosaicLayout.from_json_obj(layout.to_json_serializable()) == layout


def test_layout_validation():
    assert DEFAULT_LAYOUT.offset(0) == (1, 1)
    assert DEFAULT_LAYOUT.offset(90) == (0, 0)
    with pytest.raises(PolyfuseException) as excinfo:
        MosaicLayout(((0, 0), (90, 135)))
    assert excinfo.value.code == StatusCode.INVALID_CONFIG
    with pytest.raises(PolyfuseException) as excinfo:
        DEFAULT_LAYOUT.offset(30)
    assert excinfo.value.code == StatusCode.INVALID_PARAMETER


def test_frame_validation():
    with pytest.raises(PolyfuseException) as excinfo:
        MosaicFrame(np.zeros((3, 4)))
    assert excinfo.value.code == StatusCode.ODD_DIMENSIONS
    with pytest.raises(PolyfuseException) as excinfo:
        MosaicFrame(np.full((2, 2), 1.5))
    assert excinfo.value.code == StatusCode.INVALID_RANGE
    with pytest.raises(PolyfuseException) as excinfo:
        demosaic(MosaicFrame(np.zeros((2, 2))), "nearest")
    assert excinfo.value.code == StatusCode.INVALID_CONFIG


def _analytic_field(u, v):
    S0 = 0.6 + 0.2 * np.sin(u / 23.0) * np.cos(v / 31.0)
    p = 0.3 + 0.2 * np.cos(u / 41.0 + v / 37.0)
    psi = 0.5 + 0.01 * u - 0.015 * v
    return S0, S0 * p * np.cos(2 * psi), S0 * p * np.sin(2 * psi)


def test_bilinear_matches_smooth_field():
    v, u = np.mgrid[0:96, 0:128].astype(np.float64)
    S0, S1, S2 = _analytic_field(u, v)
    mosaic = np.zeros(u.shape)
    truth = {}
    for angle in (0, 45, 90, 135):
        truth[angle] = malus_intensity(S0, S1, S2, math.radians(angle))
        oy, ox = DEFAULT_LAYOUT.offset(angle)
        mosaic[oy::2, ox::2] = truth[angle][oy::2, ox::2]
    planes = demosaic(MosaicFrame(mosaic), DemosaicMode.BILINEAR)
    for angle, plane in planes.items():
        rms = np.sqrt(np.mean((plane - truth[angle]) ** 2))
        assert rms / np.sqrt(np.mean(truth[angle] ** 2)) < 0.02
        oy, ox = DEFAULT_LAYOUT.offset(angle)
        # samples on the orientation's own lattice are reproduced exactly
        assert np.array_equal(plane[oy::2, ox::2], truth[angle][oy::2, ox::2])


def test_parse():
    assert DemosaicMode.parse("Bilinear") == DemosaicMode.BILINEAR
    assert DemosaicMode.parse(DemosaicMode.SUPERPIXEL) == DemosaicMode.SUPERPIXEL
