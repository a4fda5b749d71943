from polyfuse.stereo.rectification import (
    RectificationResult, build_rectification, rectify_image, unrectify_depth
)
from polyfuse.stereo.matching import DisparityMap, match_disparity, box_sum, block_variance
from polyfuse.stereo.depth import (
    DepthMap, disparity_to_depth, fill_depth_median, stereo_depth, Z_MIN, Z_MAX
)
