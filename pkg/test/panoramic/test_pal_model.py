from polyfuse.core import PolyfuseException, StatusCode
from polyfuse.geometry import Pixel
from polyfuse.panoramic import (
    DEFAULT_PIXEL_PITCH, PalModel, pal_project, pal_radius, pal_ray, pal_rays
)
import logging
import math
import numpy as np
import pytest

MODEL = PalModel(f=2.13, pixel_pitch=0.003, center=Pixel(1200.0, 1200.0))


def test_f_theta_examples():
    r30 = pal_radius(MODEL, math.radians(30))
    assert r30 * MODEL.pixel_pitch == pytest.approx(1.1153, abs=1e-4)
    assert r30 == pytest.approx(371.755, abs=0.01)
    r95 = pal_radius(MODEL, math.radians(95))
    assert r95 * MODEL.pixel_pitch == pytest.approx(3.5317, abs=1e-4)
    assert r95 == pytest.approx(1177.2, abs=0.1)
    assert MODEL.r_inner == r30 and MODEL.r_outer == r95


def test_f_theta_is_linear():
    for deg in (30, 35, 40, 45):
        theta = math.radians(deg)
        assert pal_radius(MODEL, 2 * theta) == pytest.approx(2 * pal_radius(MODEL, theta),
                                                             rel=1e-14)
    thetas = np.radians(np.linspace(30, 95, 100))
    radii = [pal_radius(MODEL, t) for t in thetas]
    assert np.all(np.diff(radii) > 0)


def test_theta_out_of_fov():
    for deg in (29.9, 95.1):
        with pytest.raises(PolyfuseException) as excinfo:
            pal_radius(MODEL, math.radians(deg))
        assert excinfo.value.code == StatusCode.THETA_OUT_OF_FOV
    with pytest.raises(PolyfuseException) as excinfo:
        pal_project(MODEL, [0.0, 0.0, 1.0])
    assert excinfo.value.code == StatusCode.THETA_OUT_OF_FOV


def test_pal_ray_examples():
    r45 = pal_radius(MODEL, math.radians(45))
    ray = pal_ray(MODEL, Pixel(MODEL.center.u + r45, MODEL.center.v))
    assert np.allclose(ray, [math.sqrt(0.5), 0.0, math.sqrt(0.5)], atol=1e-12)
    with pytest.raises(PolyfuseException) as excinfo:
        pal_ray(MODEL, MODEL.center)
    assert excinfo.value.code == StatusCode.OUTSIDE_ANNULUS


def test_ray_round_trip(rng):
    for _ in range(1000):
        theta = rng.uniform(MODEL.theta_min, MODEL.theta_max)
        az = rng.uniform(-math.pi, math.pi)
        d = np.array([math.sin(theta) * math.cos(az), math.sin(theta) * math.sin(az),
                      math.cos(theta)])
        back = pal_ray(MODEL, pal_project(MODEL, d))
        assert np.linalg.norm(back - d) < 1e-9


def test_vectorised_rays_match():
    u = np.array([MODEL.center.u + 500.0, MODEL.center.u, MODEL.center.u - 900.0])
    v = np.array([MODEL.center.v, MODEL.center.v, MODEL.center.v + 100.0])
    x, y, z, inside = pal_rays(MODEL, u, v)
    assert inside.tolist() == [True, False, True]
    for i in (0, 2):
        ray = pal_ray(MODEL, Pixel(u[i], v[i]))
        assert np.allclose(ray, [x[i], y[i], z[i]], atol=1e-15)


def test_distortion_inverse():
    model = PalModel(f=2.13, pixel_pitch=0.003, center=Pixel(0.0, 0.0),
                     distortion=(-0.02, 0.001))
    thetas = np.radians(np.linspace(30, 95, 50))
    radii = model.radius_of_theta(thetas)
    assert np.allclose(model.theta_of_radius(radii), thetas, atol=1e-12)
    assert np.all(np.diff(radii) > 0)


def test_model_validation():
    with pytest.raises(PolyfuseException) as excinfo:
        PalModel(f=2.13, pixel_pitch=0.003, center=Pixel(0, 0), theta_min=1.0, theta_max=0.5)
    assert excinfo.value.code == StatusCode.INVALID_RANGE
    with pytest.raises(PolyfuseException) as excinfo:
        PalModel(f=0.0, pixel_pitch=0.003, center=Pixel(0, 0))
    assert excinfo.value.code == StatusCode.INVALID_PARAMETER


def test_from_dict(caplog):
    amap = {"f": 2.13, "center": [640, 480], "theta_min_deg": 30, "theta_max_deg": 95}
    with caplog.at_level(logging.WARNING):
        model = PalModel.from_dict(amap)
    assert model.pixel_pitch == DEFAULT_PIXEL_PITCH
    assert "pixel_pitch missing" in caplog.text
    assert model.f_number == 3.2
    again = PalModel.from_dict(model.to_json_serializable())
    assert again.theta_max == pytest.approx(model.theta_max, abs=1e-15)
    assert again.center == model.center
    with pytest.raises(PolyfuseException) as excinfo:
        PalModel.from_dict({"f": 2.13})
    assert excinfo.value.code == StatusCode.INVALID_CONFIG


def test_default_width():
    assert MODEL.default_width() == int(round(2 * math.pi * (MODEL.r_inner + MODEL.r_outer) / 2))
