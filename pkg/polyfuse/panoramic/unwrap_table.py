from pathlib import Path
from typing import Optional
import logging

from canoser import Cursor, Struct, Uint32
import numpy as np

from polyfuse.core import StatusCode, bail, ensure
from polyfuse.panoramic.pal_model import PalModel
from polyfuse.panoramic.unwrap import UnwrapMapping

logger = logging.getLogger(__name__)


# Binary remap table.
#
# magic "PALW", then out_width and out_height as little-endian u32, then out_width *
# out_height (src_u, src_v) pairs as little-endian f32, row major.
class UnwrapTableConstants:
    MAGIC = b"PALW"
    MAGIC_SIZE = 4
    HEADER_SIZE = MAGIC_SIZE + 8


class UnwrapTableHeader(Struct):
    _fields = [
        ('out_width', Uint32),
        ('out_height', Uint32),
    ]


def serialize_unwrap_table(mapping: UnwrapMapping) -> bytes:
    header = UnwrapTableHeader(out_width=mapping.out_width, out_height=mapping.out_height)
    coords = np.stack([mapping.src_u, mapping.src_v], axis=-1).astype("<f4")
    return UnwrapTableConstants.MAGIC + header.serialize() + coords.tobytes()


def deserialize_unwrap_table(blob: bytes, model: Optional[PalModel] = None) -> UnwrapMapping:
    if len(blob) < UnwrapTableConstants.HEADER_SIZE:
        bail(StatusCode.MALFORMED_TABLE, "remap table truncated at {} bytes", len(blob))
    cursor = Cursor(blob)
    magic = cursor.read_bytes(UnwrapTableConstants.MAGIC_SIZE)
    if magic != UnwrapTableConstants.MAGIC:
        bail(StatusCode.BAD_MAGIC, "bad remap table magic {}", magic)
    header = UnwrapTableHeader.decode(cursor)
    width, height = header.out_width, header.out_height
    payload = blob[UnwrapTableConstants.HEADER_SIZE:]
    expected = width * height * 2 * 4
    ensure(len(payload) == expected, StatusCode.MALFORMED_TABLE,
           "remap table {}x{} needs {} payload bytes, found {}", width, height, expected,
           len(payload))
    coords = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(height, width, 2)
    mapping = UnwrapMapping(width, height, coords[..., 0].copy(), coords[..., 1].copy())
    if model is not None:
        mapping.r_inner = model.r_inner
        mapping.r_outer = model.r_outer
        mapping.azimuth_zero = model.azimuth_zero
    return mapping


def save_unwrap_table(path, mapping: UnwrapMapping):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_bytes(serialize_unwrap_table(mapping))
    except OSError as err:
        bail(StatusCode.IO_ERROR, "cannot write remap table {}: {}", path, err)
    logger.info("[pal] saved %dx%d remap table to %s", mapping.out_width, mapping.out_height, path)


def load_unwrap_table(path, model: Optional[PalModel] = None) -> UnwrapMapping:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as err:
        bail(StatusCode.IO_ERROR, "cannot read remap table {}: {}", path, err)
    return deserialize_unwrap_table(blob, model)
