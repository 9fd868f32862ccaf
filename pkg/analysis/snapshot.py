"""
Export a single frame as an RGB PNG for visual inspection.
"""
import logging

import numpy as np
from PIL import Image

from mvstego.exceptions import InvalidParams

logger = logging.getLogger(__name__)


def frame_to_rgb(frame):
    """Full-range BT.601 conversion with nearest-neighbour chroma upsampling."""
    height, width = frame.height, frame.width
    y = frame.y.astype(np.float64)
    cb = np.repeat(np.repeat(frame.cb, 2, axis=0), 2, axis=1)[:height, :width].astype(np.float64) - 128
    cr = np.repeat(np.repeat(frame.cr, 2, axis=0), 2, axis=1)[:height, :width].astype(np.float64) - 128
    rgb = np.stack([
        y + 1.402 * cr,
        y - 0.344136 * cb - 0.714136 * cr,
        y + 1.772 * cb,
    ], axis=-1)
    return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)


def export_frame_png(video, index, path):
    if not 0 <= index < len(video):
        raise InvalidParams(f'frame {index} is out of range for a {len(video)}-frame video')
    image = Image.fromarray(frame_to_rgb(video[index]))
    image.save(path, format='PNG')
    logger.info(f"Wrote frame {index} to {path}")
    return image
