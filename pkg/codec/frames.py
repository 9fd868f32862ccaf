"""
Macroblock geometry: partitioning, edge padding, cropping and the
conversion between planes and stacks of 8x8 blocks.
"""
import numpy as np

from formats.container import coded_size
from formats.video import Frame
from mvstego.exceptions import InvalidDims
from .params import BLOCK_SIZE, BLOCKS_PER_MB, MB_SIZE


def partition(coded_width, coded_height):
    """Raster-order macroblock origins ``(x, y)`` in pixels."""
    if coded_width % MB_SIZE or coded_height % MB_SIZE or coded_width <= 0 or coded_height <= 0:
        raise InvalidDims(f'{coded_width}x{coded_height} is not a multiple of {MB_SIZE}')
    return [
        (mb_x, mb_y)
        for mb_y in range(0, coded_height, MB_SIZE)
        for mb_x in range(0, coded_width, MB_SIZE)
    ]


def pad_frame(frame, coded_width=None, coded_height=None):
    """Edge-replicate a frame out to whole macroblocks."""
    coded_width = coded_width or coded_size(frame.width)
    coded_height = coded_height or coded_size(frame.height)
    if coded_width < frame.width or coded_height < frame.height:
        raise InvalidDims('coded size smaller than the frame')

    def pad(plane, width, height):
        rows, cols = plane.shape
        if (cols, rows) == (width, height):
            return plane.copy()
        return np.pad(plane, ((0, height - rows), (0, width - cols)), mode='edge')

    return Frame(
        y=pad(frame.y, coded_width, coded_height),
        cb=pad(frame.cb, coded_width // 2, coded_height // 2),
        cr=pad(frame.cr, coded_width // 2, coded_height // 2),
        pts=frame.pts,
    )


def crop_frame(frame, width, height):
    c_width, c_height = (width + 1) // 2, (height + 1) // 2
    return Frame(
        y=frame.y[:height, :width].copy(),
        cb=frame.cb[:c_height, :c_width].copy(),
        cr=frame.cr[:c_height, :c_width].copy(),
        pts=frame.pts,
    )


def _tile(plane, size):
    rows, cols = plane.shape
    return (plane.reshape(rows // size, size, cols // size, size)
            .transpose(0, 2, 1, 3)
            .reshape(-1, size, size))


def _untile(tiles, rows, cols):
    size = tiles.shape[-1]
    return (tiles.reshape(rows // size, cols // size, size, size)
            .transpose(0, 2, 1, 3)
            .reshape(rows, cols))


def split_blocks(frame):
    """
    Coded frame -> array of shape (macroblocks, 6, 8, 8).

    Block order per macroblock is Y00, Y01, Y10, Y11, Cb, Cr.
    """
    luma = _tile(frame.y, MB_SIZE)
    luma = (luma.reshape(-1, 2, BLOCK_SIZE, 2, BLOCK_SIZE)
            .transpose(0, 1, 3, 2, 4)
            .reshape(-1, 4, BLOCK_SIZE, BLOCK_SIZE))
    cb = _tile(frame.cb, BLOCK_SIZE)[:, None]
    cr = _tile(frame.cr, BLOCK_SIZE)[:, None]
    return np.concatenate([luma, cb, cr], axis=1)


def join_blocks(blocks, coded_width, coded_height, pts=0):
    """Inverse of split_blocks; ``blocks`` must already be uint8."""
    count = blocks.shape[0]
    assert blocks.shape[1] == BLOCKS_PER_MB
    luma = (blocks[:, :4].reshape(count, 2, 2, BLOCK_SIZE, BLOCK_SIZE)
            .transpose(0, 1, 3, 2, 4)
            .reshape(count, MB_SIZE, MB_SIZE))
    return Frame(
        y=_untile(luma, coded_height, coded_width),
        cb=_untile(blocks[:, 4], coded_height // 2, coded_width // 2),
        cr=_untile(blocks[:, 5], coded_height // 2, coded_width // 2),
        pts=pts,
    )
