from __future__ import annotations
from dataclasses import dataclass
from typing import Tuple
import math

import numpy as np

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure

ZERO_REFLECTANCE = 1e-15


# Amplitude reflection and transmission ratios for s (perpendicular) and p (parallel)
# polarization. r_p takes the sign convention where both ratios agree at normal incidence.
@dataclass(frozen=True)
class FresnelCoefficients(JsonPrintable):
    r_s: float
    r_p: float
    t_s: float
    t_p: float
    theta_t: float

    @property
    def R_s(self) -> float:
        return self.r_s * self.r_s

    @property
    def R_p(self) -> float:
        return self.r_p * self.r_p


def _check_indices(n1, n2):
    ensure(n1 > 0 and n2 > 0, StatusCode.INVALID_PARAMETER,
           "refractive indices must be positive, got n1={} n2={}", n1, n2)


def _check_incidence(theta_i):
    theta = np.asarray(theta_i, dtype=np.float64)
    ensure(np.all((theta >= 0) & (theta < math.pi / 2)), StatusCode.INVALID_RANGE,
           "incidence angle must lie in [0, pi/2), got {}", theta_i)


def _cos_transmitted(n1, n2, theta_i):
    sin_t = n1 * np.sin(theta_i) / n2
    if np.any(sin_t > 1.0):
        bail(StatusCode.TOTAL_INTERNAL_REFLECTION,
             "no transmitted ray for n1={} n2={} theta_i={}", n1, n2, theta_i)
    return np.sqrt(1.0 - sin_t * sin_t), sin_t


def fresnel(n1: float, n2: float, theta_i: float) -> FresnelCoefficients:
    _check_indices(n1, n2)
    _check_incidence(theta_i)
    cos_i = math.cos(theta_i)
    cos_t, sin_t = _cos_transmitted(n1, n2, theta_i)
    cos_t = float(cos_t)
    s_den = n1 * cos_i + n2 * cos_t
    p_den = n2 * cos_i + n1 * cos_t
    return FresnelCoefficients(
        r_s=(n1 * cos_i - n2 * cos_t) / s_den,
        r_p=(n1 * cos_t - n2 * cos_i) / p_den,
        t_s=2 * n1 * cos_i / s_den,
        t_p=2 * n1 * cos_i / p_den,
        theta_t=math.asin(float(sin_t)),
    )


# Power reflectances R_s, R_p element-wise over incidence angles.
def fresnel_reflectance(n1: float, n2: float, theta_i) -> Tuple[np.ndarray, np.ndarray]:
    _check_indices(n1, n2)
    _check_incidence(theta_i)
    theta_i = np.asarray(theta_i, dtype=np.float64)
    cos_i = np.cos(theta_i)
    cos_t, _ = _cos_transmitted(n1, n2, theta_i)
    r_s = (n1 * cos_i - n2 * cos_t) / (n1 * cos_i + n2 * cos_t)
    r_p = (n1 * cos_t - n2 * cos_i) / (n2 * cos_i + n1 * cos_t)
    return r_s * r_s, r_p * r_p


# DoLP of the reflected beam for unpolarized incident light: |R_s - R_p| / (R_s + R_p).
def reflection_dolp(n1: float, n2: float, theta_i: float) -> float:
    c = fresnel(n1, n2, theta_i)
    total = c.R_s + c.R_p
    if total < ZERO_REFLECTANCE:
        bail(StatusCode.ZERO_REFLECTANCE, "no reflected light for n1={} n2={}", n1, n2)
    return abs(c.R_s - c.R_p) / total


def brewster_angle(n1: float, n2: float) -> float:
    _check_indices(n1, n2)
    return math.atan(n2 / n1)
