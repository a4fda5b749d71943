from polyfuse.fusion.labels import ClassEntry, ClassTable, LabelMap, VOID_ID
from polyfuse.fusion.registration import RegistrationRig, reproject_pixel, reproject_pixels
from polyfuse.fusion.water_hazard import (
    LookupMode, HazardSummary, dolp_lookup, dolp_lookup_many, detect_water, hazard_summary,
    DEFAULT_DELTA
)
from polyfuse.fusion.overlay import overlay_visualization, label_colors
