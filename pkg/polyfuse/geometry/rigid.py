from __future__ import annotations
from dataclasses import dataclass, field
from typing import Tuple
import logging
import math

import numpy as np
from scipy.linalg import polar
from scipy.spatial.transform import Rotation

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure
from polyfuse.geometry.camera import Point3

logger = logging.getLogger(__name__)

ORTHONORMAL_TOLERANCE = 1e-9
CLEANUP_TOLERANCE = 1e-6
ROUNDOFF = 1e-12
# rotation_sqrt refuses angles this close to pi
HALF_TURN_MARGIN = 1e-9


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def check_rotation(R: np.ndarray, tolerance: float = ORTHONORMAL_TOLERANCE):
    ensure(R.shape == (3, 3), StatusCode.NON_ORTHONORMAL_ROTATION,
           "rotation must be 3x3, got {}", R.shape)
    ensure(np.all(np.isfinite(R)), StatusCode.NON_ORTHONORMAL_ROTATION, "rotation is not finite")
    err = np.max(np.abs(R.T @ R - np.eye(3)))
    ensure(err <= tolerance, StatusCode.NON_ORTHONORMAL_ROTATION,
           "R^T R deviates from identity by {}", err)
    det = np.linalg.det(R)
    ensure(abs(det - 1.0) <= tolerance, StatusCode.NON_ORTHONORMAL_ROTATION,
           "rotation determinant is {}", det)


# Rotation R and translation t relating two camera frames: p' = R p + t.
@dataclass(frozen=True, eq=False)
class RigidTransform(JsonPrintable):
    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = _frozen(self.R)
        t = _frozen(self.t).reshape(3)
        check_rotation(R)
        ensure(np.all(np.isfinite(t)), StatusCode.INVALID_PARAMETER, "translation is not finite")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls) -> RigidTransform:
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_dict(cls, amap, tolerance: float = CLEANUP_TOLERANCE) -> RigidTransform:
        try:
            R = np.array(amap["R"], dtype=np.float64)
            t = np.array(amap["t"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as err:
            bail(StatusCode.INVALID_CONFIG, "bad rigid transform {}: {}", amap, err)
        ensure(R.shape == (3, 3) and t.shape == (3,), StatusCode.INVALID_CONFIG,
               "rigid transform needs a 3x3 R and a 3-vector t")
        return cls(nearest_rotation(R, tolerance), t)

    def to_json_serializable(self):
        return {"R": self.R.tolist(), "t": self.t.tolist()}

    def matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.R
        T[:3, 3] = self.t
        return T

    @property
    def baseline(self) -> float:
        return float(np.linalg.norm(self.t))


def transform_point(T: RigidTransform, p: Point3) -> Point3:
    R, t = T.R, T.t
    return Point3(
        float(R[0, 0] * p.x + R[0, 1] * p.y + R[0, 2] * p.z + t[0]),
        float(R[1, 0] * p.x + R[1, 1] * p.y + R[1, 2] * p.z + t[1]),
        float(R[2, 0] * p.x + R[2, 1] * p.y + R[2, 2] * p.z + t[2]),
    )


# Same evaluation order as transform_point, element-wise over arrays.
def transform_points(T: RigidTransform, x, y, z) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    R, t = T.R, T.t
    return (
        R[0, 0] * x + R[0, 1] * y + R[0, 2] * z + t[0],
        R[1, 0] * x + R[1, 1] * y + R[1, 2] * z + t[1],
        R[2, 0] * x + R[2, 1] * y + R[2, 2] * z + t[2],
    )


# compose(T2, T1) applies T1 first.
def compose(T2: RigidTransform, T1: RigidTransform) -> RigidTransform:
    return RigidTransform(T2.R @ T1.R, T2.R @ T1.t + T2.t)


def inverse(T: RigidTransform) -> RigidTransform:
    return RigidTransform(T.R.T, -(T.R.T @ T.t))


def axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(axis)
    ensure(norm > 0, StatusCode.INVALID_PARAMETER, "rotation axis must be non-zero")
    return Rotation.from_rotvec(axis / norm * angle).as_matrix()


def rotation_angle(R: np.ndarray) -> float:
    # clip guards acos against rounding just outside [-1, 1]
    c = (np.trace(R) - 1.0) / 2.0
    return math.acos(min(1.0, max(-1.0, c)))


def rotation_sqrt(R: np.ndarray) -> np.ndarray:
    R = np.asarray(R, dtype=np.float64)
    check_rotation(R)
    rotvec = Rotation.from_matrix(R).as_rotvec()
    angle = float(np.linalg.norm(rotvec))
    if abs(angle - math.pi) < HALF_TURN_MARGIN:
        bail(StatusCode.DEGENERATE_ROTATION, "rotation angle {} is a half turn", angle)
    return Rotation.from_rotvec(rotvec / 2).as_matrix()


# Nearest rotation by polar decomposition. Calibration files carry rounded values, so
# small deviations are cleaned up; anything beyond `tolerance` is rejected.
def nearest_rotation(M, tolerance: float = CLEANUP_TOLERANCE) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    ensure(M.shape == (3, 3) and np.all(np.isfinite(M)), StatusCode.NON_ORTHONORMAL_ROTATION,
           "rotation must be a finite 3x3 matrix")
    U, _ = polar(M)
    ensure(np.linalg.det(U) > 0, StatusCode.NON_ORTHONORMAL_ROTATION,
           "matrix is a reflection, not a rotation")
    correction = float(np.max(np.abs(U - M)))
    ensure(correction <= tolerance, StatusCode.NON_ORTHONORMAL_ROTATION,
           "rotation needs a correction of {} (limit {})", correction, tolerance)
    if correction > ROUNDOFF:
        logger.warning("[geometry] rotation re-orthonormalised, correction %.3g", correction)
    return U
