from __future__ import annotations
from dataclasses import dataclass, field
from typing import Tuple
import logging
import math

import numpy as np

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure
from polyfuse.geometry import Pixel

logger = logging.getLogger(__name__)

DEFAULT_PIXEL_PITCH = 0.003
DEFAULT_THETA_MIN = math.radians(30.0)
DEFAULT_THETA_MAX = math.radians(95.0)
DEFAULT_F_NUMBER = 3.2
# slack on the FOV test so boundary rays survive a project / unproject round trip
FOV_SLACK = 1e-12
NEWTON_ITERATIONS = 50


# Panoramic annular lens under the f-theta law: image height f * theta, converted to pixels
# by the pixel pitch. theta is measured from the lens axis; theta_max may pass pi/2 because
# the lens sees slightly below the horizon.
#
# `distortion` holds optional odd polynomial terms (k1, k2, ...) so that
# height = f * (theta + k1 theta^3 + k2 theta^5 + ...). Empty means pure f-theta.
@dataclass(frozen=True)
class PalModel(JsonPrintable):
    f: float
    pixel_pitch: float
    center: Pixel
    theta_min: float = DEFAULT_THETA_MIN
    theta_max: float = DEFAULT_THETA_MAX
    azimuth_zero: float = 0.0
    f_number: float = DEFAULT_F_NUMBER
    distortion: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ensure(self.f > 0, StatusCode.INVALID_PARAMETER, "PAL focal length must be positive")
        ensure(self.pixel_pitch > 0, StatusCode.INVALID_PARAMETER,
               "PAL pixel pitch must be positive")
        if not (0 < self.theta_min < self.theta_max < math.pi):
            bail(StatusCode.INVALID_RANGE, "PAL field of view [{}, {}] is invalid",
                 self.theta_min, self.theta_max)
        object.__setattr__(self, "distortion", tuple(float(k) for k in self.distortion))
        ensure(self._height_mm(self.theta_min) < self._height_mm(self.theta_max),
               StatusCode.INVALID_RANGE, "PAL inner radius must be below the outer radius")

    def _height_mm(self, theta):
        poly = theta
        power = theta
        for k in self.distortion:
            power = power * theta * theta
            poly = poly + k * power
        return self.f * poly

    def _height_slope(self, theta):
        slope = 1.0
        power = 1.0
        for i, k in enumerate(self.distortion):
            power = power * theta * theta
            slope = slope + (2 * i + 3) * k * power
        return self.f * slope

    def theta_of_radius(self, radius):
        theta = np.asarray(radius, dtype=np.float64) * self.pixel_pitch / self.f
        if not self.distortion:
            return theta
        target = np.asarray(radius, dtype=np.float64) * self.pixel_pitch
        for _ in range(NEWTON_ITERATIONS):
            theta = theta - (self._height_mm(theta) - target) / self._height_slope(theta)
        return theta

    def radius_of_theta(self, theta):
        return self._height_mm(theta) / self.pixel_pitch

    @property
    def r_inner(self) -> float:
        return float(self.radius_of_theta(self.theta_min))

    @property
    def r_outer(self) -> float:
        return float(self.radius_of_theta(self.theta_max))

    @property
    def r_mid(self) -> float:
        return 0.5 * (self.r_inner + self.r_outer)

    def default_width(self) -> int:
        return int(round(2 * math.pi * self.r_mid))

    def in_fov(self, theta):
        return (theta >= self.theta_min - FOV_SLACK) & (theta <= self.theta_max + FOV_SLACK)

    @classmethod
    def from_dict(cls, amap) -> PalModel:
        try:
            pitch = amap.get("pixel_pitch")
            if pitch is None:
                logger.warning("[pal] pixel_pitch missing, using %.4f mm", DEFAULT_PIXEL_PITCH)
                pitch = DEFAULT_PIXEL_PITCH
            center = amap["center"]
            return cls(
                f=float(amap["f"]),
                pixel_pitch=float(pitch),
                center=Pixel(float(center[0]), float(center[1])),
                theta_min=math.radians(float(amap.get("theta_min_deg", 30.0))),
                theta_max=math.radians(float(amap.get("theta_max_deg", 95.0))),
                azimuth_zero=math.radians(float(amap.get("azimuth_zero_deg", 0.0))),
                f_number=float(amap.get("f_number", DEFAULT_F_NUMBER)),
                distortion=tuple(amap.get("distortion", ())),
            )
        except (KeyError, TypeError, ValueError, IndexError) as err:
            bail(StatusCode.INVALID_CONFIG, "bad PAL model {}: {}", amap, err)

    def to_json_serializable(self):
        return {
            "f": self.f,
            "pixel_pitch": self.pixel_pitch,
            "center": [self.center.u, self.center.v],
            "theta_min_deg": math.degrees(self.theta_min),
            "theta_max_deg": math.degrees(self.theta_max),
            "azimuth_zero_deg": math.degrees(self.azimuth_zero),
            "f_number": self.f_number,
            "distortion": list(self.distortion),
        }


def pal_radius(model: PalModel, theta: float) -> float:
    if not model.theta_min <= theta <= model.theta_max:
        bail(StatusCode.THETA_OUT_OF_FOV, "theta {} outside [{}, {}]", theta,
             model.theta_min, model.theta_max)
    return float(model.radius_of_theta(theta))


# Unit direction in the PAL frame (z along the lens axis) seen by an annulus pixel.
def pal_ray(model: PalModel, u: Pixel) -> np.ndarray:
    du = u.u - model.center.u
    dv = u.v - model.center.v
    theta = float(model.theta_of_radius(math.hypot(du, dv)))
    if not model.in_fov(theta):
        bail(StatusCode.OUTSIDE_ANNULUS, "pixel ({}, {}) lies outside the annulus", u.u, u.v)
    az = math.atan2(dv, du)
    s = math.sin(theta)
    return np.array([s * math.cos(az), s * math.sin(az), math.cos(theta)])


def pal_project(model: PalModel, direction) -> Pixel:
    x, y, z = (float(c) for c in direction)
    theta = math.atan2(math.hypot(x, y), z)
    if not model.in_fov(theta):
        bail(StatusCode.THETA_OUT_OF_FOV, "direction at theta {} is outside the field of view",
             theta)
    az = math.atan2(y, x)
    r = float(model.radius_of_theta(theta))
    return Pixel(model.center.u + r * math.cos(az), model.center.v + r * math.sin(az))


# Vectorised pal_ray over pixel arrays: returns (x, y, z) and an in-annulus mask.
def pal_rays(model: PalModel, u, v):
    du = np.asarray(u, dtype=np.float64) - model.center.u
    dv = np.asarray(v, dtype=np.float64) - model.center.v
    theta = model.theta_of_radius(np.hypot(du, dv))
    az = np.arctan2(dv, du)
    s = np.sin(theta)
    return s * np.cos(az), s * np.sin(az), np.cos(theta), model.in_fov(theta)
