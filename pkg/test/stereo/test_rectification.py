from polyfuse.core import PolyfuseException, StatusCode
from polyfuse.geometry import (
    CameraIntrinsics, RigidTransform, axis_angle, project_points, rotation_angle
)
from polyfuse.stereo import build_rectification, rectify_image, unrectify_depth
import math
import numpy as np
import pytest

K = CameraIntrinsics(300.0, 300.0, 159.5, 119.5, 320, 240)


def _rectified_rows(rect, T, points):
    left = points @ rect.R_left.T
    right = (points @ T.R.T + T.t) @ rect.R_right.T
    _, v_l = project_points(rect.K_rect, left[:, 0], left[:, 1], left[:, 2])
    _, v_r = project_points(rect.K_rect, right[:, 0], right[:, 1], right[:, 2])
    return v_l, v_r


def test_ideal_pair_is_already_rectified():
    T = RigidTransform(np.eye(3), [-0.1, 0, 0])
    rect = build_rectification(K, K, T)
    assert np.allclose(rect.R_left, np.eye(3), atol=1e-15)
    assert np.allclose(rect.R_right, np.eye(3), atol=1e-15)
    assert rect.baseline == pytest.approx(0.1)
    assert rect.K_rect == K


def test_row_alignment_rotation_about_y(rng):
    T = RigidTransform(axis_angle([0, 1, 0], math.radians(10)), [-0.12, 0.01, 0.005])
    rect = build_rectification(K, K, T)
    points = np.stack([rng.uniform(-2, 2, 1000), rng.uniform(-1.5, 1.5, 1000),
                       rng.uniform(1, 10, 1000)], axis=-1)
    v_l, v_r = _rectified_rows(rect, T, points)
    assert np.max(np.abs(v_l - v_r)) < 1e-6


def test_row_alignment_random_rigs(rng):
    aligned = 0
    total = 0
    for _ in range(20):
        R = axis_angle(rng.normal(size=3), rng.uniform(0, math.radians(15)))
        t = np.array([-0.1, 0, 0]) + rng.normal(scale=0.01, size=3)
        T = RigidTransform(R, t)
        rect = build_rectification(K, K, T)
        points = np.stack([rng.uniform(-2, 2, 100), rng.uniform(-1.5, 1.5, 100),
                           rng.uniform(1, 10, 100)], axis=-1)
        v_l, v_r = _rectified_rows(rect, T, points)
        aligned += int(np.count_nonzero(np.abs(v_l - v_r) < 0.1))
        total += len(points)
        # both rectified cameras share one orientation
        relative = rect.R_right @ T.R @ rect.R_left.T
        assert np.max(np.abs(relative - np.eye(3))) < 1e-6
    assert aligned >= 0.99 * total


def test_rotation_split_is_symmetric():
    T = RigidTransform(axis_angle([0.2, 1, 0.1], math.radians(12)), [-0.1, 0, 0])
    rect = build_rectification(K, K, T)
    left = rotation_angle(rect.R_rect.T @ rect.R_left)
    right = rotation_angle(rect.R_rect.T @ rect.R_right)
    assert left == pytest.approx(right, abs=1e-9)
    assert left == pytest.approx(math.radians(6), abs=1e-9)


def test_degenerate_baseline():
    with pytest.raises(PolyfuseException) as excinfo:
        build_rectification(K, K, RigidTransform(np.eye(3), [0, 0, 0]))
    assert excinfo.value.code == StatusCode.DEGENERATE_BASELINE
    with pytest.raises(PolyfuseException) as excinfo:
        build_rectification(K, K, RigidTransform(np.eye(3), [0, 0, 0.2]))
    assert excinfo.value.code == StatusCode.DEGENERATE_BASELINE


def test_identity_remap_is_exact(rng):
    img = rng.uniform(0, 255, K.shape)
    assert np.array_equal(rectify_image(img, np.eye(3), K, K), img)
    rgb = rng.integers(0, 256, K.shape + (3,)).astype(np.uint8)
    assert np.array_equal(rectify_image(rgb, np.eye(3), K, K), rgb.astype(np.float64))


def test_small_rotation_preserves_columns():
    u = np.tile(np.arange(K.width, dtype=np.float64), (K.height, 1))
    out = rectify_image(u, axis_angle([1, 0, 0], math.radians(0.2)), K, K)
    valid = np.isfinite(out)
    assert valid.mean() > 0.95
    assert np.max(np.abs(out[valid] - u[valid])) <= 1e-3 * (K.width - 1)


def test_magnified_checkerboard():
    v, u = np.mgrid[0:K.height, 0:K.width]
    board = (((u // 8) + (v // 8)) % 2 * 255).astype(np.float64)
    K2 = K.scaled(2.0)
    out = rectify_image(board, np.eye(3), K, K2)
    assert out.shape == K2.shape
    v2, u2 = np.mgrid[0:K2.height, 0:K2.width]
    us = (u2 + 0.5) / 2 - 0.5
    vs = (v2 + 0.5) / 2 - 0.5
    # squares are 16 px wide after magnification; away from the edges the value is pure
    inner = ((np.abs(us - (np.round((us + 0.5) / 8) * 8 - 0.5)) > 1)
             & (np.abs(vs - (np.round((vs + 0.5) / 8) * 8 - 0.5)) > 1)
             & (us <= K.width - 1) & (vs <= K.height - 1) & (us >= 0) & (vs >= 0))
    expected = ((np.floor(us + 0.5) // 8 + np.floor(vs + 0.5) // 8) % 2) * 255
    assert inner.sum() > 1000
    assert np.allclose(out[inner], expected[inner], atol=1e-9)


def test_rectify_dimension_mismatch():
    with pytest.raises(PolyfuseException) as excinfo:
        rectify_image(np.zeros((10, 10)), np.eye(3), K, K)
    assert excinfo.value.code == StatusCode.DIMENSION_MISMATCH


def test_unrectify_identity():
    depth = np.full(K.shape, 2.5)
    depth[10, 20] = np.nan
    out = unrectify_depth(depth, np.eye(3), K, K)
    assert np.array_equal(out, depth, equal_nan=True)
