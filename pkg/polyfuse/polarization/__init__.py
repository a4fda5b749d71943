from polyfuse.polarization.mosaic import (
    DemosaicMode, MosaicLayout, MosaicFrame, demosaic, DEFAULT_LAYOUT, ORIENTATIONS
)
from polyfuse.polarization.stokes import (
    PolarizationFrame, stokes_from_planes, dolp, malus_intensity, polarization_frame,
    DEFAULT_EPSILON
)
from polyfuse.polarization.fresnel import (
    FresnelCoefficients, fresnel, fresnel_reflectance, reflection_dolp, brewster_angle
)
