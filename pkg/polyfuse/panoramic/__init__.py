from polyfuse.panoramic.pal_model import (
    PalModel, pal_radius, pal_ray, pal_rays, pal_project, DEFAULT_PIXEL_PITCH
)
from polyfuse.panoramic.unwrap import UnwrapMapping, build_unwrap, unwrap_image, wrap_image
from polyfuse.panoramic.unwrap_table import (
    UnwrapTableHeader, serialize_unwrap_table, deserialize_unwrap_table, save_unwrap_table,
    load_unwrap_table
)
