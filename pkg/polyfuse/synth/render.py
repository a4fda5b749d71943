from __future__ import annotations
from dataclasses import dataclass
from typing import Optional, Tuple
import logging
import math

import cv2
import numpy as np

from polyfuse.core import StatusCode, bail
from polyfuse.fusion import LabelMap
from polyfuse.geometry import CameraIntrinsics, RigidTransform, pixel_rays, superpixel_intrinsics
from polyfuse.panoramic import pal_rays
from polyfuse.polarization import DEFAULT_LAYOUT, MosaicFrame, fresnel_reflectance
from polyfuse.synth.scene import PalShading, SceneSpec

logger = logging.getLogger(__name__)

SPOKE_SPACING_DEG = 10.0
SPOKE_HALF_WIDTH_PX = 1.0
CONSTANT_SHADE = 128


# Ray-cast result per pixel: camera-frame depth z (rays have unit z component), index of
# the patch hit (-1 for none) and the hit point in left-camera coordinates.
@dataclass(eq=False)
class Hits:
    z: np.ndarray
    patch: np.ndarray
    points: np.ndarray
    rays_left: np.ndarray


@dataclass(eq=False)
class GroundTruth:
    depth: np.ndarray
    disparity: np.ndarray
    labels: LabelMap
    water_mask: np.ndarray
    dolp: Optional[np.ndarray] = None


@dataclass(eq=False)
class SceneRender:
    left: np.ndarray
    right: np.ndarray
    mosaic: MosaicFrame
    annulus: Optional[np.ndarray]
    truth: GroundTruth


def _require_patches(spec: SceneSpec):
    if not spec.patches:
        bail(StatusCode.EMPTY_SCENE, "scene has no patches")


# Casts camera rays (unit z in the camera frame) against every patch; nearest hit wins.
def cast_rays(spec: SceneSpec, T_left_to_cam: RigidTransform, rays_cam: np.ndarray) -> Hits:
    R, t = T_left_to_cam.R, T_left_to_cam.t
    origin = -(R.T @ t)
    rays_left = rays_cam @ R
    shape = rays_cam.shape[:-1]
    best = np.full(shape, np.inf)
    index = np.full(shape, -1, dtype=np.intp)
    for i, patch in enumerate(spec.patches):
        denom = rays_left @ patch.normal
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.dot(patch.center - origin, patch.normal) / denom
        hit = origin + s[..., None] * rays_left
        rel = hit - patch.center
        inside = ((np.abs(rel @ patch.side) <= patch.extent[0] / 2)
                  & (np.abs(rel @ patch.up) <= patch.extent[1] / 2))
        closer = inside & np.isfinite(s) & (s > 0) & (s < best)
        best[closer] = s[closer]
        index[closer] = i
    best[index < 0] = np.nan
    points = origin + np.where(index[..., None] >= 0, best[..., None], 0.0) * rays_left
    return Hits(best, index, points, rays_left)


# Lambertian radiance in [0, 1]; misses get the background level.
def _diffuse_radiance(spec: SceneSpec, hits: Hits) -> np.ndarray:
    light = spec.light
    radiance = np.full(hits.z.shape, light.background)
    for i, patch in enumerate(spec.patches):
        mask = hits.patch == i
        if not mask.any():
            continue
        n = patch.normal
        # light only counts on the side facing the viewer
        facing = np.where(hits.rays_left[mask] @ n < 0, 1.0, -1.0)
        lambert = np.maximum(0.0, facing * np.dot(n, light.direction))
        shade = light.ambient + light.intensity * lambert
        radiance[mask] = np.clip(_albedo_one(patch, hits.points[mask]) * shade, 0.0, 1.0)
    return radiance


def _albedo_one(patch, points):
    rel = points - patch.center
    return patch.texture.albedo(rel @ patch.side, rel @ patch.up)


def _camera_image(spec: SceneSpec, K: CameraIntrinsics, T: RigidTransform, sigma: float,
                  rng) -> Tuple[np.ndarray, Hits]:
    hits = cast_rays(spec, T, pixel_rays(K))
    img = 255.0 * _diffuse_radiance(spec, hits)
    if sigma > 0:
        img = img + rng.normal(0.0, sigma, img.shape)
    return np.clip(img, 0.0, 255.0), hits


def _labels(spec: SceneSpec, hits: Hits) -> LabelMap:
    table = spec.class_table
    # index -1 (no hit) picks the trailing background entry
    ids = [table.id_of(p.label) for p in spec.patches] + [table.id_of(spec.background_label)]
    lut = np.array(ids, dtype=np.uint8)
    return LabelMap(lut[hits.patch])


def _water_mask(spec: SceneSpec, hits: Hits) -> np.ndarray:
    water = np.zeros(hits.z.shape, dtype=bool)
    for i, patch in enumerate(spec.patches):
        if patch.material.specular and patch.label == "road":
            water |= hits.patch == i
    return water


# Left/right grayscale images on the 0-255 scale plus left-camera depth, disparity and labels.
def render_stereo(spec: SceneSpec, rng=None):
    _require_patches(spec)
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    rig = spec.rig
    left, hits = _camera_image(spec, rig.K_left, RigidTransform.identity(), spec.noise.stereo, rng)
    right, _ = _camera_image(spec, rig.K_right, rig.T_left_to_right, spec.noise.stereo, rng)
    depth = hits.z.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        disparity = rig.K_left.fx * rig.baseline / depth
    truth = GroundTruth(depth, disparity, _labels(spec, hits), _water_mask(spec, hits))
    return left, right, truth


# Splits Stokes (S0, S1, S2) into analyser intensities so that I0 + I90 and I45 + I135 both
# reproduce S0 exactly: the larger of each pair is rounded once, the smaller is S0 minus it.
def _analyser_pair(S0: np.ndarray, S: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    larger = 0.5 * (S0 + np.abs(S))
    smaller = S0 - larger
    plus = np.where(S >= 0, larger, smaller)
    minus = np.where(S >= 0, smaller, larger)
    return plus, minus


# Polarizer mosaic of the polarization camera. All four analysers of a superpixel see the
# ray through the superpixel centre. Diffuse patches are unpolarized; specular patches
# mirror unpolarized sky light through the Fresnel reflectances, polarized along the
# s direction (perpendicular to the plane of incidence).
def render_mosaic(spec: SceneSpec, rng=None) -> Tuple[MosaicFrame, np.ndarray]:
    _require_patches(spec)
    rng = rng if rng is not None else np.random.default_rng(spec.seed + 1)
    rig = spec.rig
    K_sp = superpixel_intrinsics(rig.K_polar)
    rays = pixel_rays(K_sp)
    hits = cast_rays(spec, rig.T_left_to_polar, rays)

    S0 = _diffuse_radiance(spec, hits)
    S1 = np.zeros_like(S0)
    S2 = np.zeros_like(S0)
    truth = np.zeros_like(S0)
    for i, patch in enumerate(spec.patches):
        mask = hits.patch == i
        if not patch.material.specular or not mask.any():
            continue
        d = rays[mask]
        d_unit = d / np.linalg.norm(d, axis=-1, keepdims=True)
        n_cam = rig.T_left_to_polar.R @ patch.normal
        cos_i = np.clip(np.abs(d_unit @ n_cam), 0.0, 1.0)
        Rs, Rp = fresnel_reflectance(1.0, patch.material.n2, np.arccos(cos_i))
        total = Rs + Rp
        s0 = np.clip(spec.light.sky_radiance * total / 2, 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            p = np.where(total > 0, (Rs - Rp) / total, 0.0)
        s_dir = np.cross(d_unit, n_cam)
        psi = np.arctan2(s_dir[:, 1], s_dir[:, 0])
        S0[mask] = s0
        S1[mask] = s0 * p * np.cos(2 * psi)
        S2[mask] = s0 * p * np.sin(2 * psi)
        truth[mask] = p

    I0, I90 = _analyser_pair(S0, S1)
    I45, I135 = _analyser_pair(S0, S2)
    planes = {0: I0, 45: I45, 90: I90, 135: I135}
    layout = DEFAULT_LAYOUT
    mosaic = np.zeros((rig.K_polar.height, rig.K_polar.width))
    for angle, plane in planes.items():
        oy, ox = layout.offset(angle)
        mosaic[oy::2, ox::2] = plane
    if spec.noise.mosaic > 0:
        mosaic = mosaic + rng.normal(0.0, spec.noise.mosaic, mosaic.shape)
    return MosaicFrame(np.clip(mosaic, 0.0, 1.0), layout), truth


def _hue_rgb(az: np.ndarray) -> np.ndarray:
    hue = np.mod(np.floor(np.mod(az, 2 * math.pi) * 90.0 / math.pi + 0.5), 180).astype(np.uint8)
    hsv = np.stack([hue, np.full_like(hue, 255), np.full_like(hue, 255)], axis=-1)
    return cv2.cvtColor(hsv, cv2.COLOR_HSV2RGB)


# Annular PAL image, RGB uint8. Pixels outside the annulus are black.
def render_annulus(spec: SceneSpec, rng=None) -> np.ndarray:
    _require_patches(spec)
    rig = spec.rig
    if rig.pal is None:
        bail(StatusCode.INVALID_CONFIG, "scene rig has no PAL model")
    rng = rng if rng is not None else np.random.default_rng(spec.seed + 2)
    model = rig.pal
    width, height = rig.annulus_size
    v, u = np.mgrid[0:height, 0:width].astype(np.float64)
    x, y, z, inside = pal_rays(model, u, v)
    az = np.arctan2(v - model.center.v, u - model.center.u)

    shading = spec.pal_shading
    if shading == PalShading.AZIMUTH_HUE:
        rgb = _hue_rgb(az).astype(np.float64)
    else:
        if shading == PalShading.CONSTANT:
            gray = np.full(az.shape, float(CONSTANT_SHADE))
        elif shading == PalShading.SPOKES:
            step = math.radians(SPOKE_SPACING_DEG)
            offset = np.mod(az + step / 2, step) - step / 2
            radius = np.hypot(u - model.center.u, v - model.center.v)
            gray = np.where(np.abs(radius * np.sin(offset)) <= SPOKE_HALF_WIDTH_PX, 255.0, 0.0)
        else:
            theta = np.arctan2(np.hypot(x, y), z)
            gray = 255.0 * (0.5 + 0.2 * np.cos(3 * az) + 0.15 * np.sin(2 * az + 1.0)
                            + 0.1 * np.cos(4.0 * (theta - model.theta_min)))
        rgb = np.repeat(gray[..., None], 3, axis=-1)
    if spec.noise.annulus > 0:
        rgb = rgb + rng.normal(0.0, spec.noise.annulus, rgb.shape)
    rgb[~inside] = 0.0
    return np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)


def render_scene(spec: SceneSpec) -> SceneRender:
    _require_patches(spec)
    rng = np.random.default_rng(spec.seed)
    left, right, truth = render_stereo(spec, rng)
    mosaic, dolp_truth = render_mosaic(spec, rng)
    truth.dolp = dolp_truth
    annulus = render_annulus(spec, rng) if spec.rig.pal is not None else None
    logger.debug("[synth] rendered %d patches, seed %d", len(spec.patches), spec.seed)
    return SceneRender(left, right, mosaic, annulus, truth)
