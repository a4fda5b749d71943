from polyfuse.geometry.camera import (
    CameraIntrinsics, Pixel, Point3, project, backproject, project_points, backproject_pixels,
    pixel_grid, pixel_rays, superpixel_intrinsics, depth_to_points
)
from polyfuse.geometry.rigid import (
    RigidTransform, transform_point, transform_points, compose, inverse, axis_angle,
    rotation_angle, rotation_sqrt, nearest_rotation, check_rotation
)
