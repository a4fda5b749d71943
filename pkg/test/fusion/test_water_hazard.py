from polyfuse.core import PolyfuseException, StatusCode
from polyfuse.fusion import (
    ClassTable, LabelMap, LookupMode, RegistrationRig, detect_water, dolp_lookup,
    dolp_lookup_many, hazard_summary
)
from polyfuse.geometry import CameraIntrinsics, Pixel, RigidTransform, axis_angle
from polyfuse.stereo import DepthMap
import numpy as np
import pytest

TABLE = ClassTable.default()
ROAD = TABLE.road
WATER = TABLE.water_hazard
SIZE = 64


def _random_frame(rng):
    K_color = CameraIntrinsics(60.0, 60.0, 31.5, 31.5, SIZE, SIZE)
    K_polar = CameraIntrinsics(72.0, 72.0, 31.5, 31.5, SIZE, SIZE)
    R = axis_angle(rng.normal(size=3), rng.uniform(0, np.radians(5)))
    rig = RegistrationRig(K_color, K_polar, RigidTransform(R, rng.uniform(-0.1, 0.1, 3)))
    ids = rng.choice([ROAD, ROAD, 1, 4, 6], size=(SIZE, SIZE))
    z = rng.uniform(0.5, 20, (SIZE, SIZE))
    z[rng.random((SIZE, SIZE)) < 0.1] = np.nan
    dolp = rng.random((SIZE, SIZE))
    return LabelMap(ids), z, dolp, rig


def _camera_matrix(K):
    return np.array([[K.fx, 0.0, K.cx], [0.0, K.fy, K.cy], [0.0, 0.0, 1.0]])


# Straight from the camera matrices: back-project with K_color^-1, move with [R | t],
# project with K_polar, then a round-half-up lookup inside inclusive bounds.
def _reference(labels, z, dolp, rig, delta):
    T = rig.T_color_to_polar
    P = _camera_matrix(rig.K_polar) @ np.hstack([np.asarray(T.R), np.reshape(T.t, (3, 1))])
    K_inv = np.linalg.inv(_camera_matrix(rig.K_color))
    out = labels.class_id.copy()
    height, width = dolp.shape
    for v in range(labels.height):
        for u in range(labels.width):
            depth = z[v, u]
            if labels.class_id[v, u] != ROAD or not depth > 0:
                continue
            x, y, w = P @ np.append(depth * (K_inv @ [u, v, 1.0]), 1.0)
            if not w > 0:
                continue
            up, vp = x / w, y / w
            if not (0 <= up <= width - 1 and 0 <= vp <= height - 1):
                continue
            if dolp[int(np.floor(vp + 0.5)), int(np.floor(up + 0.5))] >= delta:
                out[v, u] = WATER
    return out


def test_matches_per_pixel_reference(rng):
    for _ in range(100):
        labels, z, dolp, rig = _random_frame(rng)
        fused = detect_water(labels, z, dolp, rig, 0.6)
        assert np.array_equal(fused.class_id, _reference(labels, z, dolp, rig, 0.6))


def test_only_road_becomes_water(rng):
    for _ in range(10):
        labels, z, dolp, rig = _random_frame(rng)
        fused = detect_water(labels, z, dolp, rig, 0.3)
        changed = fused.class_id != labels.class_id
        assert np.all(labels.class_id[changed] == ROAD)
        assert np.all(fused.class_id[changed] == WATER)
        assert not np.any(changed & ~np.isfinite(z))


def test_higher_threshold_flags_a_subset(rng):
    labels, z, dolp, rig = _random_frame(rng)
    previous = None
    for delta in np.linspace(0.0, 1.0, 11):
        flagged = detect_water(labels, z, dolp, rig, delta).class_id == WATER
        if previous is not None:
            assert np.all(previous | ~flagged)
        previous = flagged


def test_threshold_edges(rng):
    labels, z, dolp, rig = _random_frame(rng)
    for delta in (-0.01, 1.01):
        with pytest.raises(PolyfuseException) as excinfo:
            detect_water(labels, z, dolp, rig, delta)
        assert excinfo.value.code == StatusCode.INVALID_THRESHOLD
    # a DoLP of exactly delta counts
    ones = np.ones_like(dolp)
    fused = detect_water(labels, z, ones, rig, 1.0)
    assert (fused.class_id == WATER).any()


def test_registered_colocated_frame():
    K = CameraIntrinsics(30.0, 30.0, 15.5, 15.5, SIZE, SIZE)
    rig = RegistrationRig(K, K, RigidTransform.identity())
    ids = np.full((SIZE, SIZE), ROAD)
    ids[:, :4] = 4
    dolp = np.zeros((SIZE, SIZE))
    dolp[10:20, 10:20] = 0.9
    depth = DepthMap(np.full((SIZE, SIZE), 3.0))
    fused = detect_water(LabelMap(ids), depth, dolp, rig, 0.6, LookupMode.BILINEAR)
    expected = np.where(dolp >= 0.6, WATER, ids)
    assert np.array_equal(fused.class_id, expected)


def test_no_road_is_a_copy():
    K = CameraIntrinsics(30.0, 30.0, 15.5, 15.5, SIZE, SIZE)
    rig = RegistrationRig(K, K, RigidTransform.identity())
    labels = LabelMap(np.full((SIZE, SIZE), 4))
    fused = detect_water(labels, np.ones((SIZE, SIZE)), np.ones((SIZE, SIZE)), rig)
    assert np.array_equal(fused.class_id, labels.class_id)
    assert fused is not labels


def test_dimension_checks(rng):
    labels, z, dolp, rig = _random_frame(rng)
    with pytest.raises(PolyfuseException) as excinfo:
        detect_water(labels, z[:-1], dolp, rig)
    assert excinfo.value.code == StatusCode.DIMENSION_MISMATCH
    with pytest.raises(PolyfuseException) as excinfo:
        detect_water(labels, z, dolp[:, :-2], rig)
    assert excinfo.value.code == StatusCode.DIMENSION_MISMATCH


def test_dolp_lookup():
    plane = np.array([[0.0, 1.0], [2.0, 3.0]])
    assert dolp_lookup(plane, Pixel(0.4, 0.6)) == 2.0
    assert dolp_lookup(plane, Pixel(0.5, 0.5), LookupMode.NEAREST) == 3.0
    assert dolp_lookup(plane, Pixel(0.5, 0.5), LookupMode.BILINEAR) == pytest.approx(1.5)
    assert dolp_lookup(plane, Pixel(1.0, 0.0), LookupMode.BILINEAR) == 1.0
    with pytest.raises(PolyfuseException) as excinfo:
        dolp_lookup(plane, Pixel(1.5, 0.0))
    assert excinfo.value.code == StatusCode.OUT_OF_BOUNDS
    with pytest.raises(PolyfuseException) as excinfo:
        dolp_lookup(plane, Pixel(0.0, -0.1))
    assert excinfo.value.code == StatusCode.OUT_OF_BOUNDS


def test_bilinear_falls_back_to_nearest_valid_tap():
    plane = np.array([[np.nan, 1.0], [2.0, 3.0]])
    out = dolp_lookup_many(plane, np.array([0.2, 0.4, 0.8]), np.array([0.1, 0.45, 0.9]),
                           LookupMode.BILINEAR)
    assert out.tolist() == [1.0, 2.0, 3.0]
    all_nan = np.full((2, 2), np.nan)
    assert np.isnan(dolp_lookup_many(all_nan, np.array([0.5]), np.array([0.5]), "bilinear")[0])


def test_hazard_summary():
    before = LabelMap(np.array([[ROAD, ROAD, ROAD], [4, WATER, ROAD]]))
    after = LabelMap(np.array([[WATER, WATER, ROAD], [4, WATER, WATER]]))
    z = np.array([[2.0, 4.0, 1.0], [1.0, 0.5, np.nan]])
    summary = hazard_summary(before, after, z)
    assert summary.pixels == 3
    assert summary.depth_min == 2.0
    assert summary.depth_median == 3.0
    empty = hazard_summary(before, before, z)
    assert empty.pixels == 0 and empty.depth_min is None
    assert empty.to_json_serializable() == {"pixels": 0, "depth_min": None,
                                            "depth_median": None}
