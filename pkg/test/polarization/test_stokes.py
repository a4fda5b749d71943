from polyfuse.core import PolyfuseException, StatusCode
from polyfuse.polarization import (
    DemosaicMode, MosaicFrame, dolp, malus_intensity, polarization_frame, stokes_from_planes
)
import math
import numpy as np
import pytest


def _stokes(i0, i45, i90, i135):
    return [float(x) for x in stokes_from_planes(*(np.array([v]) for v in (i0, i45, i90, i135)))]


def test_stokes_examples():
    assert _stokes(0.5, 0.5, 0.5, 0.5) == [1.0, 0.0, 0.0, 0.0]
    assert _stokes(1.0, 0.5, 0.0, 0.5) == [1.0, 1.0, 0.0, 0.0]
    assert _stokes(0.5, 1.0, 0.5, 0.0) == [1.0, 0.0, 1.0, 0.0]


def test_residual():
    S0, _, _, residual = stokes_from_planes(np.array([0.6]), np.array([0.2]), np.array([0.2]),
                                            np.array([0.2]))
    assert S0[0] == pytest.approx(0.8)
    assert residual[0] == pytest.approx(0.4)


def test_dolp_examples():
    one = np.array([1.0])
    assert dolp(one, one, np.array([0.0]))[0] == 1.0
    assert dolp(one, np.array([0.0]), np.array([0.0]))[0] == 0.0
    assert dolp(one, np.array([0.6]), np.array([0.8]))[0] == pytest.approx(1.0, abs=1e-15)
    # dark pixels are invalid
    assert np.isnan(dolp(np.array([1e-5]), np.array([0.0]), np.array([0.0]))[0])
    # noise can push the ratio over one
    assert dolp(one, np.array([1.2]), np.array([0.0]))[0] == 1.0


def test_dimension_mismatch():
    with pytest.raises(PolyfuseException) as excinfo:
        stokes_from_planes(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)))
    assert excinfo.value.code == StatusCode.DIMENSION_MISMATCH
    with pytest.raises(PolyfuseException) as excinfo:
        dolp(np.zeros(3), np.zeros(3), np.zeros(4))
    assert excinfo.value.code == StatusCode.DIMENSION_MISMATCH
    with pytest.raises(PolyfuseException) as excinfo:
        dolp(np.ones(3), np.zeros(3), np.zeros(3), epsilon=0.0)
    assert excinfo.value.code == StatusCode.INVALID_PARAMETER


def test_scaling_leaves_dolp_unchanged(rng):
    planes = [rng.uniform(0.05, 0.5, (5, 5)) for _ in range(4)]
    base = dolp(*stokes_from_planes(*planes)[:3])
    scaled = dolp(*stokes_from_planes(*(2.5 * p for p in planes))[:3])
    assert np.allclose(base, scaled, atol=1e-12)


def test_malus_round_trip(rng):
    S0 = rng.uniform(0.1, 1.0, 50)
    p = rng.uniform(0, 1, 50)
    psi = rng.uniform(0, math.pi, 50)
    S1 = S0 * p * np.cos(2 * psi)
    S2 = S0 * p * np.sin(2 * psi)
    I = [malus_intensity(S0, S1, S2, math.radians(a)) for a in (0, 45, 90, 135)]
    r0, r1, r2, _ = stokes_from_planes(*I)
    assert np.allclose(r0, S0, atol=1e-12)
    assert np.allclose(r1, S1, atol=1e-12)
    assert np.allclose(r2, S2, atol=1e-12)
    assert np.allclose(dolp(r0, r1, r2), p, atol=1e-9)


def test_polarization_frame():
    # superpixels: unpolarized gray, fully horizontal
    mosaic = np.array([
        [0.25, 0.25, 0.0, 0.5],
        [0.25, 0.25, 0.5, 1.0],
    ])
    frame = polarization_frame(mosaic)
    assert (frame.width, frame.height) == (2, 1)
    assert frame.dolp.tolist() == [[0.0, 1.0]]
    assert frame.mode == DemosaicMode.SUPERPIXEL
    assert np.all(frame.residual == 0.0)
    stats = frame.stats()
    assert stats["valid_pixels"] == 2
    assert stats["dolp_mean"] == 0.5
    full = polarization_frame(MosaicFrame(np.full((4, 4), 0.3)), DemosaicMode.BILINEAR)
    assert full.dolp.shape == (4, 4)
    assert np.allclose(full.dolp, 0.0)
