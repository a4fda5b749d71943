from __future__ import annotations
from dataclasses import dataclass
from typing import Tuple
import logging

import numpy as np

from polyfuse.core import StatusCode, ensure
from polyfuse.polarization.mosaic import (
    DemosaicMode, MosaicFrame, MosaicLayout, demosaic
)

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-4


def _same_shape(*planes):
    shape = np.shape(planes[0])
    for p in planes[1:]:
        ensure(np.shape(p) == shape, StatusCode.DIMENSION_MISMATCH,
               "Stokes planes differ in size: {} and {}", shape, np.shape(p))


# S0 = I0 + I90, S1 = I0 - I90, S2 = I45 - I135. The second S0 identity is kept as the
# residual |(I0 + I90) - (I45 + I135)|.
def stokes_from_planes(I0, I45, I90, I135) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    _same_shape(I0, I45, I90, I135)
    I0, I45, I90, I135 = (np.asarray(p, dtype=np.float64) for p in (I0, I45, I90, I135))
    S0 = I0 + I90
    S1 = I0 - I90
    S2 = I45 - I135
    residual = np.abs(S0 - (I45 + I135))
    return S0, S1, S2, residual


# sqrt(S1^2 + S2^2) / max(S0, epsilon) clamped to [0, 1]; NaN where S0 < epsilon.
def dolp(S0, S1, S2, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    _same_shape(S0, S1, S2)
    ensure(epsilon > 0, StatusCode.INVALID_PARAMETER, "epsilon must be positive, got {}", epsilon)
    S0, S1, S2 = (np.asarray(p, dtype=np.float64) for p in (S0, S1, S2))
    d = np.sqrt(S1 * S1 + S2 * S2) / np.maximum(S0, epsilon)
    d = np.clip(d, 0.0, 1.0)
    return np.where(S0 < epsilon, np.nan, d)


def malus_intensity(S0, S1, S2, phi):
    return 0.5 * (S0 + S1 * np.cos(2 * phi) + S2 * np.sin(2 * phi))


@dataclass(eq=False)
class PolarizationFrame:
    S0: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    dolp: np.ndarray
    residual: np.ndarray
    mode: DemosaicMode = DemosaicMode.SUPERPIXEL

    @property
    def width(self) -> int:
        return self.dolp.shape[1]

    @property
    def height(self) -> int:
        return self.dolp.shape[0]

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.dolp)

    def stats(self) -> dict:
        valid = self.valid
        count = int(np.count_nonzero(valid))
        amap = {
            "width": self.width,
            "height": self.height,
            "valid_pixels": count,
            "residual_max": float(self.residual.max()) if self.residual.size else 0.0,
        }
        if count:
            amap["dolp_mean"] = float(self.dolp[valid].mean())
            amap["dolp_max"] = float(self.dolp[valid].max())
        return amap


def polarization_frame(
    mosaic,
    mode=DemosaicMode.SUPERPIXEL,
    epsilon: float = DEFAULT_EPSILON,
    layout: MosaicLayout = None,
) -> PolarizationFrame:
    if not isinstance(mosaic, MosaicFrame):
        mosaic = MosaicFrame(mosaic, layout or MosaicLayout())
    elif layout is not None:
        mosaic = MosaicFrame(mosaic.intensity, layout)
    mode = DemosaicMode.parse(mode)
    planes = demosaic(mosaic, mode)
    S0, S1, S2, residual = stokes_from_planes(planes[0], planes[45], planes[90], planes[135])
    frame = PolarizationFrame(S0, S1, S2, dolp(S0, S1, S2, epsilon), residual, mode)
    logger.debug("[polar] %s demosaic %dx%d -> %dx%d", mode.name.lower(), mosaic.width,
                 mosaic.height, frame.width, frame.height)
    return frame
