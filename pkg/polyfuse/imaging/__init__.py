from polyfuse.imaging.sampling import sample, sample_bilinear, sample_nearest, sample_clamped
from polyfuse.imaging.image_io import (
    read_image, write_image, to_gray, to_rgb, to_uint8, encode_depth_mm, decode_depth_mm,
    write_depth_png, read_depth_png, write_label_png, read_label_png, write_mosaic_png,
    read_mosaic_png
)
from polyfuse.imaging.colormap import dolp_colormap, dolp_gray, depth_colormap
