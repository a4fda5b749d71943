import numpy as np

from polyfuse.core import StatusCode, bail, ensure
from polyfuse.fusion.labels import ClassTable, LabelMap, VOID_ID
from polyfuse.imaging import to_rgb


# alpha * class color + (1 - alpha) * image, rounded half up; void pixels pass through.
def overlay_visualization(image, labels: LabelMap, table: ClassTable, alpha: float = 0.5
                          ) -> np.ndarray:
    if not 0.0 <= alpha <= 1.0:
        bail(StatusCode.INVALID_PARAMETER, "overlay alpha {} outside [0, 1]", alpha)
    rgb = to_rgb(np.asarray(image)).astype(np.float64)
    ensure(rgb.shape[:2] == labels.shape, StatusCode.DIMENSION_MISMATCH,
           "image {} and labels {} differ in size", rgb.shape[:2], labels.shape)
    colors = table.palette()[labels.class_id].astype(np.float64)
    blended = np.floor(alpha * colors + (1.0 - alpha) * rgb + 0.5)
    void = labels.class_id == VOID_ID
    blended[void] = rgb[void]
    return np.clip(blended, 0, 255).astype(np.uint8)


def label_colors(labels: LabelMap, table: ClassTable) -> np.ndarray:
    return table.palette()[labels.class_id]
