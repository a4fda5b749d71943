from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple
import logging

import numpy as np

from polyfuse.core import JsonPrintable, StatusCode, bail, ensure
from polyfuse.geometry import pixel_grid
from polyfuse.imaging import sample_clamped

logger = logging.getLogger(__name__)

ORIENTATIONS = (0, 45, 90, 135)


class DemosaicMode(Enum):
    SUPERPIXEL = 1
    BILINEAR = 2

    @classmethod
    def parse(cls, name) -> DemosaicMode:
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            bail(StatusCode.INVALID_CONFIG, "unknown demosaic mode '{}'", name)


# Polarizer orientation (degrees) at each position of the 2x2 superpixel, row major.
# The default is the Sony polarsens arrangement: 90/45 over 135/0.
@dataclass(frozen=True)
class MosaicLayout(JsonPrintable):
    rows: Tuple[Tuple[int, int], Tuple[int, int]] = ((90, 45), (135, 0))

    def __post_init__(self):
        rows = tuple(tuple(int(a) for a in row) for row in self.rows)
        ensure(len(rows) == 2 and all(len(r) == 2 for r in rows), StatusCode.INVALID_CONFIG,
               "mosaic layout must be 2x2, got {}", self.rows)
        ensure(sorted(a for r in rows for a in r) == list(ORIENTATIONS),
               StatusCode.INVALID_CONFIG,
               "mosaic layout must hold each of 0/45/90/135 once, got {}", rows)
        object.__setattr__(self, "rows", rows)

    def offset(self, angle: int) -> Tuple[int, int]:
        for i, row in enumerate(self.rows):
            for j, a in enumerate(row):
                if a == angle:
                    return i, j
        bail(StatusCode.INVALID_PARAMETER, "no polarizer at {} degrees", angle)

    def to_json_serializable(self):
        return [list(r) for r in self.rows]

    @classmethod
    def from_json_obj(cls, obj) -> MosaicLayout:
        try:
            return cls(tuple(tuple(r) for r in obj))
        except TypeError as err:
            bail(StatusCode.INVALID_CONFIG, "bad mosaic layout {}: {}", obj, err)


DEFAULT_LAYOUT = MosaicLayout()


# Raw division-of-focal-plane frame, linear intensities in [0, 1].
@dataclass(eq=False)
class MosaicFrame:
    intensity: np.ndarray
    layout: MosaicLayout = field(default_factory=MosaicLayout)

    def __post_init__(self):
        self.intensity = np.asarray(self.intensity, dtype=np.float64)
        ensure(self.intensity.ndim == 2, StatusCode.BAD_IMAGE,
               "mosaic must be single channel, got {}", self.intensity.shape)
        height, width = self.intensity.shape
        if height % 2 or width % 2:
            bail(StatusCode.ODD_DIMENSIONS, "mosaic {}x{} has incomplete superpixels",
                 width, height)
        ensure(np.all((self.intensity >= 0) & (self.intensity <= 1)), StatusCode.INVALID_RANGE,
               "mosaic intensities must lie in [0, 1]")

    @property
    def width(self) -> int:
        return self.intensity.shape[1]

    @property
    def height(self) -> int:
        return self.intensity.shape[0]


def _lattice(mosaic: MosaicFrame, angle: int) -> Tuple[np.ndarray, int, int]:
    oy, ox = mosaic.layout.offset(angle)
    return mosaic.intensity[oy::2, ox::2], oy, ox


# Splits a mosaic into one plane per analyser orientation, keyed 0/45/90/135.
#
# superpixel: every 2x2 block gives one sample per orientation (half resolution).
# bilinear: full resolution, each orientation interpolated on its own stride-2 lattice
# with border replication.
def demosaic(mosaic: MosaicFrame, mode=DemosaicMode.SUPERPIXEL) -> Dict[int, np.ndarray]:
    mode = DemosaicMode.parse(mode)
    planes = {}
    if mode == DemosaicMode.SUPERPIXEL:
        for angle in ORIENTATIONS:
            planes[angle] = _lattice(mosaic, angle)[0].copy()
        return planes

    u, v = pixel_grid(mosaic.width, mosaic.height)
    for angle in ORIENTATIONS:
        lattice, oy, ox = _lattice(mosaic, angle)
        planes[angle] = sample_clamped(lattice, (u - ox) / 2.0, (v - oy) / 2.0)
    return planes
