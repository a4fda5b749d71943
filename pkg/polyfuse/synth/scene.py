from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple
import json
import math

import numpy as np

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure
from polyfuse.fusion import ClassTable
from polyfuse.geometry import CameraIntrinsics, Pixel, RigidTransform, axis_angle
from polyfuse.panoramic import PalModel

TEXTURE_COMPONENTS = (1.0, 1.6, 2.3)


def _vec3(obj, what: str) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=np.float64).reshape(3)
    except (TypeError, ValueError) as err:
        bail(StatusCode.INVALID_CONFIG, "{} must be a 3-vector: {}", what, err)
    ensure(np.all(np.isfinite(arr)), StatusCode.INVALID_CONFIG, "{} is not finite", what)
    return arr


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    n = np.linalg.norm(v)
    ensure(n > 0, StatusCode.INVALID_CONFIG, "{} must be non-zero", what)
    return v / n


class MaterialKind(Enum):
    DIFFUSE = 1
    SPECULAR = 2


@dataclass(frozen=True)
class Material(JsonPrintable):
    kind: MaterialKind = MaterialKind.DIFFUSE
    n2: float = 1.0

    def __post_init__(self):
        if self.kind == MaterialKind.SPECULAR:
            ensure(self.n2 > 1.0, StatusCode.INVALID_CONFIG,
                   "specular material needs n2 > 1, got {}", self.n2)

    @property
    def specular(self) -> bool:
        return self.kind == MaterialKind.SPECULAR

    @classmethod
    def from_dict(cls, amap) -> Material:
        kind = str(amap.get("kind", "diffuse")).upper()
        if kind not in MaterialKind.__members__:
            bail(StatusCode.INVALID_CONFIG, "unknown material '{}'", kind.lower())
        return cls(MaterialKind[kind], float(amap.get("n2", 1.0)))


# Band-limited albedo: a few seeded sinusoids in patch coordinates, frequencies in cycles
# per meter.
@dataclass(frozen=True)
class Texture(JsonPrintable):
    base: float = 0.5
    amplitude: float = 0.3
    frequency: float = 8.0
    seed: int = 0

    def __post_init__(self):
        ensure(0 <= self.base <= 1 and self.amplitude >= 0, StatusCode.INVALID_CONFIG,
               "texture base must lie in [0, 1] and amplitude be non-negative")
        ensure(self.frequency >= 0, StatusCode.INVALID_CONFIG,
               "texture frequency must be non-negative")

    def albedo(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        angles = rng.uniform(0, math.pi, len(TEXTURE_COMPONENTS))
        phases = rng.uniform(0, 2 * math.pi, len(TEXTURE_COMPONENTS))
        wave = np.zeros(np.shape(s))
        for scale, angle, phase in zip(TEXTURE_COMPONENTS, angles, phases):
            k = 2 * math.pi * self.frequency * scale
            wave = wave + np.cos(k * (math.cos(angle) * s + math.sin(angle) * t) + phase)
        return np.clip(self.base + self.amplitude * wave / len(TEXTURE_COMPONENTS), 0.0, 1.0)

    @classmethod
    def from_dict(cls, amap) -> Texture:
        return cls(float(amap.get("base", 0.5)), float(amap.get("amplitude", 0.3)),
                   float(amap.get("frequency", 8.0)), int(amap.get("seed", 0)))


# Rectangle in left-camera coordinates: `extent` is (width along s, height along t), where
# t is `up` made orthogonal to the normal and s = t x n.
@dataclass(frozen=True, eq=False)
class Patch(JsonPrintable):
    center: np.ndarray
    normal: np.ndarray
    up: np.ndarray
    extent: Tuple[float, float]
    label: str = "road"
    material: Material = field(default_factory=Material)
    texture: Texture = field(default_factory=Texture)

    def __post_init__(self):
        n = _unit(_vec3(self.normal, "patch normal"), "patch normal")
        up = _vec3(self.up, "patch up")
        t = up - np.dot(up, n) * n
        ensure(np.linalg.norm(t) > 1e-9, StatusCode.INVALID_CONFIG,
               "patch up vector is parallel to its normal")
        object.__setattr__(self, "center", _vec3(self.center, "patch center"))
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "up", _unit(t, "patch up"))
        ensure(self.extent[0] > 0 and self.extent[1] > 0, StatusCode.INVALID_CONFIG,
               "patch extent must be positive, got {}", self.extent)
        object.__setattr__(self, "extent", (float(self.extent[0]), float(self.extent[1])))

    @property
    def side(self) -> np.ndarray:
        return np.cross(self.up, self.normal)

    def to_json_serializable(self):
        return {
            "center": self.center.tolist(),
            "normal": self.normal.tolist(),
            "up": self.up.tolist(),
            "extent": list(self.extent),
            "label": self.label,
            "material": {"kind": self.material.kind.name.lower(), "n2": self.material.n2},
            "texture": self.texture.to_json_serializable(),
        }

    @classmethod
    def from_dict(cls, amap) -> Patch:
        try:
            return cls(
                center=amap["center"], normal=amap["normal"], up=amap.get("up", [0, -1, 0]),
                extent=tuple(amap["extent"]), label=str(amap.get("label", "road")),
                material=Material.from_dict(amap.get("material", {})),
                texture=Texture.from_dict(amap.get("texture", {})),
            )
        except (KeyError, TypeError, ValueError, IndexError) as err:
            bail(StatusCode.INVALID_CONFIG, "bad patch {}: {}", amap, err)


# Distant unpolarized source plus ambient term. `direction` points from the scene towards
# the light; `sky_radiance` is what specular patches mirror; `background` is what rays that
# miss every patch see.
@dataclass(frozen=True, eq=False)
class Light(JsonPrintable):
    direction: np.ndarray = field(default_factory=lambda: np.array([0.3, -1.0, -0.4]))
    intensity: float = 0.7
    ambient: float = 0.3
    sky_radiance: float = 1.0
    background: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "direction",
                           _unit(_vec3(self.direction, "light direction"), "light direction"))
        ensure(self.intensity >= 0 and self.ambient >= 0 and self.sky_radiance >= 0,
               StatusCode.INVALID_CONFIG, "light terms must be non-negative")
        ensure(0 <= self.background <= 1, StatusCode.INVALID_CONFIG,
               "background must lie in [0, 1]")

    @classmethod
    def from_dict(cls, amap) -> Light:
        default = cls()
        return cls(np.array(amap.get("direction", default.direction)),
                   float(amap.get("intensity", default.intensity)),
                   float(amap.get("ambient", default.ambient)),
                   float(amap.get("sky_radiance", default.sky_radiance)),
                   float(amap.get("background", default.background)))


# Additive Gaussian sigmas: stereo on the 0-255 scale, mosaic on linear [0, 1] intensity,
# annulus on the 0-255 scale.
@dataclass(frozen=True)
class NoiseModel(JsonPrintable):
    stereo: float = 0.0
    mosaic: float = 0.0
    annulus: float = 0.0

    def __post_init__(self):
        ensure(self.stereo >= 0 and self.mosaic >= 0 and self.annulus >= 0,
               StatusCode.INVALID_CONFIG, "noise sigmas must be non-negative")

    @classmethod
    def from_dict(cls, amap) -> NoiseModel:
        return cls(float(amap.get("stereo", 0.0)), float(amap.get("mosaic", 0.0)),
                   float(amap.get("annulus", 0.0)))


@dataclass(frozen=True, eq=False)
class SyntheticRig(JsonPrintable):
    K_left: CameraIntrinsics
    K_right: CameraIntrinsics
    T_left_to_right: RigidTransform
    K_polar: CameraIntrinsics
    T_left_to_polar: RigidTransform
    pal: Optional[PalModel] = None
    annulus_size: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.K_polar.width % 2 or self.K_polar.height % 2:
            bail(StatusCode.ODD_DIMENSIONS, "polarization camera {}x{} has odd size",
                 self.K_polar.width, self.K_polar.height)
        if self.pal is not None:
            ensure(self.annulus_size[0] > 0 and self.annulus_size[1] > 0,
                   StatusCode.INVALID_CONFIG, "PAL rig needs an annulus_size")

    @property
    def baseline(self) -> float:
        return self.T_left_to_right.baseline

    @classmethod
    def from_dict(cls, amap) -> SyntheticRig:
        try:
            pal = amap.get("pal")
            return cls(
                K_left=CameraIntrinsics.from_dict(amap["K_left"]),
                K_right=CameraIntrinsics.from_dict(amap["K_right"]),
                T_left_to_right=RigidTransform.from_dict(amap["T_left_to_right"]),
                K_polar=CameraIntrinsics.from_dict(amap["K_polar"]),
                T_left_to_polar=RigidTransform.from_dict(amap["T_left_to_polar"]),
                pal=PalModel.from_dict(pal) if pal is not None else None,
                annulus_size=tuple(amap.get("annulus_size", (0, 0))),
            )
        except KeyError as err:
            bail(StatusCode.INVALID_CONFIG, "rig is missing {}", err)


class PalShading(Enum):
    CONSTANT = 1
    AZIMUTH_HUE = 2
    SPOKES = 3
    SKY = 4


@dataclass(eq=False)
class SceneSpec(JsonPrintable):
    patches: List[Patch]
    rig: SyntheticRig
    light: Light = field(default_factory=Light)
    noise: NoiseModel = field(default_factory=NoiseModel)
    seed: int = 0
    background_label: str = "sky"
    pal_shading: PalShading = PalShading.SKY
    class_table: ClassTable = field(default=None, metadata={"json": False})

    def __post_init__(self):
        if self.class_table is None:
            self.class_table = ClassTable.default()
        for patch in self.patches:
            self.class_table.id_of(patch.label)
        self.class_table.id_of(self.background_label)

    @classmethod
    def from_dict(cls, amap) -> SceneSpec:
        try:
            shading = str(amap.get("pal_shading", "sky")).upper()
            if shading not in PalShading.__members__:
                bail(StatusCode.INVALID_CONFIG, "unknown PAL shading '{}'", shading.lower())
            return cls(
                patches=[Patch.from_dict(p) for p in amap.get("patches", [])],
                rig=SyntheticRig.from_dict(amap["rig"]),
                light=Light.from_dict(amap.get("light", {})),
                noise=NoiseModel.from_dict(amap.get("noise", {})),
                seed=int(amap.get("seed", 0)),
                background_label=str(amap.get("background_label", "sky")),
                pal_shading=PalShading[shading],
            )
        except KeyError as err:
            bail(StatusCode.INVALID_CONFIG, "scene is missing {}", err)

    @classmethod
    def from_json(cls, path) -> SceneSpec:
        path = Path(path)
        try:
            amap = json.loads(path.read_text())
        except OSError as err:
            bail(StatusCode.IO_ERROR, "cannot read scene {}: {}", path, err)
        except json.JSONDecodeError as err:
            bail(StatusCode.INVALID_CONFIG, "scene {} is not JSON: {}", path, err)
        return cls.from_dict(amap)


def _pitched(R: np.ndarray, patch: Patch) -> Patch:
    return Patch(R @ patch.center, R @ patch.normal, R @ patch.up, patch.extent, patch.label,
                 patch.material, patch.texture)


# Street scene at the requested resolution: a road with a puddle, a sidewalk strip, a car
# and a hedge, seen by a stereo pair pitched 15 degrees down, a narrower polarization
# camera looking a little further down, and a PAL annulus.
def demo_scene(width: int = 320, height: int = 240, seed: int = 0, pal_size: int = 480
               ) -> SceneSpec:
    ensure(width % 2 == 0 and height % 2 == 0, StatusCode.ODD_DIMENSIONS,
           "demo resolution must be even, got {}x{}", width, height)
    fx = 0.875 * width
    K = CameraIntrinsics(fx, fx, width / 2 - 0.5, height / 2 - 0.5, width, height)
    K_polar = CameraIntrinsics(1.3 * fx, 1.3 * fx, width / 2 - 0.5, height / 2 - 0.5,
                               width, height)
    baseline = 0.12
    T_lr = RigidTransform(np.eye(3), np.array([-baseline, 0.0, 0.0]))
    T_lp = RigidTransform(axis_angle([1, 0, 0], math.radians(8.0)), np.array([-0.04, 0.03, 0.0]))

    # texture period of roughly 8 px at the given range
    def tex(z, base, s):
        return Texture(base=base, amplitude=0.35, frequency=fx / (8.0 * z), seed=seed * 97 + s)

    h = 1.2
    ground = dict(normal=[0, -1, 0], up=[0, 0, 1])
    world = [
        Patch(center=[0.0, h, 6.0], extent=(5.0, 10.0), label="road",
              texture=tex(3.0, 0.45, 1), **ground),
        Patch(center=[0.0, h - 0.001, 2.1], extent=(1.4, 1.0), label="road",
              material=Material(MaterialKind.SPECULAR, 1.33), texture=tex(2.0, 0.4, 2), **ground),
        Patch(center=[3.25, h - 0.15, 6.0], extent=(1.5, 10.0), label="sidewalk",
              texture=tex(4.0, 0.6, 3), **ground),
        Patch(center=[-0.8, h - 0.8, 7.0], normal=[0, 0, -1], up=[0, -1, 0], extent=(1.8, 1.6),
              label="car", texture=tex(7.0, 0.35, 4)),
        Patch(center=[4.5, h - 1.5, 9.0], normal=[0, 0, -1], up=[0, -1, 0], extent=(6.0, 3.0),
              label="vegetation", texture=tex(9.0, 0.3, 5)),
    ]
    pitch = axis_angle([1, 0, 0], math.radians(15.0))
    patches = [_pitched(pitch, p) for p in world]

    pal = PalModel(f=2.13, pixel_pitch=0.003 * 1177.3 / (0.45 * pal_size),
                   center=Pixel(pal_size / 2 - 0.5, pal_size / 2 - 0.5))
    rig = SyntheticRig(K, K, T_lr, K_polar, T_lp, pal, (pal_size, pal_size))
    return SceneSpec(patches, rig, Light(), NoiseModel(), seed)
