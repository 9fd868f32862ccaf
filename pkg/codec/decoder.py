"""
Video decoder: entropy decode each frame's macroblock stream, predict,
add the dequantised residual and crop back to the display size.

Tap contracts::

    mb_tap(frame_index, frame_type, mb_index, mode, mv)
    coeff_tap(frame_index, mb_index, levels)

mb_tap sees every macroblock (mv is None for SKIP and INTRA); coeff_tap
sees the first luma block of every INTER macroblock.
"""
import logging

import numpy as np

from formats.container import FrameType
from formats.video import RawVideo
from mvstego.exceptions import CorruptContainer
from .encoder import predict_blocks, reconstruct_frame
from .frames import crop_frame, partition
from .macroblock import decode_frame_records
from .motion import MacroblockMode

logger = logging.getLogger(__name__)


def iter_macroblocks(container):
    """
    Yield ``(frame_index, frame_type, records)`` per frame without
    reconstructing any pixels.
    """
    header = container.header
    count = len(partition(header.coded_width, header.coded_height))
    for frame_index, frame in enumerate(container.frames):
        records = decode_frame_records(frame.data, count)
        if frame.frame_type == FrameType.I:
            for mb_index, record in enumerate(records):
                if record.mode != MacroblockMode.INTRA:
                    raise CorruptContainer(
                        f'frame {frame_index} mb {mb_index}: I-frames hold only INTRA macroblocks'
                    )
        yield frame_index, frame.frame_type, records


def decode_video(container, mb_tap=None, coeff_tap=None, crop=True):
    header = container.header
    coded_w, coded_h = header.coded_width, header.coded_height
    origins = partition(coded_w, coded_h)

    frames = []
    reference = None
    for frame_index, frame_type, records in iter_macroblocks(container):
        pts = container.frames[frame_index].pts
        if frame_type == FrameType.P and reference is None:
            raise CorruptContainer(f'P-frame {frame_index} has no reference')

        for mb_index, record in enumerate(records):
            if mb_tap is not None:
                mb_tap(frame_index, frame_type, mb_index, record.mode, record.mv)
            if coeff_tap is not None and record.has_motion_vector:
                coeff_tap(frame_index, mb_index, record.levels[0])

        predictions = predict_blocks(reference, records, origins)
        levels = np.stack([record.levels for record in records])
        reference = reconstruct_frame(predictions, levels, header.qp, coded_w, coded_h, pts)
        frames.append(reference)

    logger.info(f"Decoded {len(frames)} frames at {coded_w}x{coded_h}")
    if crop:
        frames = [crop_frame(f, header.display_width, header.display_height) for f in frames]
        width, height = header.display_width, header.display_height
    else:
        width, height = coded_w, coded_h
    return RawVideo(width=width, height=height, fps_num=header.fps_num,
                    fps_den=header.fps_den, frames=frames)
