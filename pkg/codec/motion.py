"""
Temporal model: integer-pel full-search motion estimation and motion
compensation.

Motion vectors are stored in quarter-pel units. The search only produces
whole-pel displacements, so bits 0-1 of a searched component are zero
and bit 2 is the integer-pel least significant bit.
"""
import logging
from typing import NamedTuple, Optional

import numpy as np
from django.db import models

from .params import MB_SIZE

logger = logging.getLogger(__name__)

UNREACHABLE = np.iinfo(np.int64).max
# int16 differences evaluated per pass of the frame search
SEARCH_CHUNK_ELEMENTS = 1 << 23


class MacroblockMode(models.IntegerChoices):
    INTER = 0, 'inter'
    INTRA = 1, 'intra'
    SKIP = 2, 'skip'


class MotionVector(NamedTuple):
    dx: int
    dy: int

    @classmethod
    def from_pels(cls, px, py):
        return cls(int(px) * 4, int(py) * 4)

    @property
    def pels(self):
        return self.dx >> 2, self.dy >> 2

    def negated(self):
        return MotionVector(-self.dx, -self.dy)


ZERO_MV = MotionVector(0, 0)


class MotionDecision(NamedTuple):
    mode: int
    mv: Optional[MotionVector]
    sad: int


def candidate_offsets(search_range):
    """
    Every displacement in [-r, r]^2, in tie-break order: smaller |dx|+|dy|,
    then smaller dy, then smaller dx.
    """
    span = range(-search_range, search_range + 1)
    return sorted(
        ((px, py) for py in span for px in span),
        key=lambda offset: (abs(offset[0]) + abs(offset[1]), offset[1], offset[0]),
    )


def _decide(best_sad, mv, params):
    mode = MacroblockMode.INTRA if best_sad > params.intra_sad_threshold else MacroblockMode.INTER
    return MotionDecision(mode=mode, mv=mv if mode == MacroblockMode.INTER else None, sad=int(best_sad))


def motion_estimate(cur_y, ref_y, origin, params):
    """Full search for one macroblock at ``origin`` (x, y)."""
    height, width = ref_y.shape
    mb_x, mb_y = origin
    block = cur_y[mb_y:mb_y + MB_SIZE, mb_x:mb_x + MB_SIZE].astype(np.int64)

    best_sad, best = None, None
    for px, py in candidate_offsets(params.search_range):
        x, y = mb_x + px, mb_y + py
        if x < 0 or y < 0 or x + MB_SIZE > width or y + MB_SIZE > height:
            continue
        sad = int(np.abs(block - ref_y[y:y + MB_SIZE, x:x + MB_SIZE]).sum())
        if best_sad is None or sad < best_sad:
            best_sad, best = sad, (px, py)
    return _decide(best_sad, MotionVector.from_pels(*best), params)


def estimate_frame_motion(cur_y, ref_y, params, max_elements=SEARCH_CHUNK_ELEMENTS):
    """
    Full search for every macroblock of a frame at once.

    Returns MotionDecisions in raster order, identical to calling
    motion_estimate per macroblock. Candidates sharing a vertical offset are
    evaluated together, at most ``max_elements`` differences at a time, and
    only the running best per macroblock is kept.
    """
    height, width = cur_y.shape
    rows, cols = height // MB_SIZE, width // MB_SIZE
    radius = params.search_range
    span = 2 * radius + 1
    offsets = candidate_offsets(radius)

    # rank of each displacement in tie-break order, indexed [py + r, px + r]
    rank = np.empty((span, span), dtype=np.int64)
    for index, (px, py) in enumerate(offsets):
        rank[py + radius, px + radius] = index
    stride = len(offsets)

    cur = cur_y.astype(np.int16)
    ref = np.pad(ref_y, radius, mode='edge').astype(np.int16)
    mb_xs = np.arange(cols) * MB_SIZE
    mb_ys = np.arange(rows) * MB_SIZE
    chunk = max(1, min(span, max_elements // (height * width)))
    diff = np.empty((height, chunk, width), dtype=np.int16)

    best_key = np.full((rows, cols), UNREACHABLE, dtype=np.int64)
    for py in range(-radius, radius + 1):
        valid_y = (mb_ys + py >= 0) & (mb_ys + py + MB_SIZE <= height)
        if not valid_y.any():
            continue
        band = np.lib.stride_tricks.sliding_window_view(ref[radius + py:radius + py + height], width, axis=1)
        for start in range(0, span, chunk):
            stop = min(start + chunk, span)
            n = stop - start
            block = diff[:, :n]
            np.subtract(band[:, start:stop], cur[:, None, :], out=block)
            np.abs(block, out=block)
            # |a - b| <= 255, so 16 rows fit in int16
            strips = block.reshape(rows, MB_SIZE, n, width).sum(axis=1, dtype=np.int16)
            sads = strips.reshape(rows, n, cols, MB_SIZE).sum(axis=3, dtype=np.int64)

            pxs = np.arange(start, stop) - radius
            valid_x = (mb_xs[None, :] + pxs[:, None] >= 0) & (mb_xs[None, :] + pxs[:, None] + MB_SIZE <= width)
            keys = sads * stride + rank[py + radius, start:stop][None, :, None]
            keys[~(valid_y[:, None, None] & valid_x[None, :, :])] = UNREACHABLE
            np.minimum(best_key, keys.min(axis=1), out=best_key)

    decisions = []
    for row in range(rows):
        for col in range(cols):
            sad, index = divmod(int(best_key[row, col]), stride)
            px, py = offsets[index]
            decisions.append(_decide(sad, MotionVector.from_pels(px, py), params))
    return decisions


def _chroma_offset(pels):
    # halve, rounding toward zero
    return int(pels / 2)


def _displaced_block(plane, x, y, size):
    height, width = plane.shape
    rows = np.clip(np.arange(y, y + size), 0, height - 1)
    cols = np.clip(np.arange(x, x + size), 0, width - 1)
    return plane[np.ix_(rows, cols)]


def motion_compensate(ref, mv, origin):
    """
    Predict the macroblock at ``origin`` from reference frame ``ref``.

    Returns (luma 16x16, cb 8x8, cr 8x8). Reads outside the plane clamp to
    the nearest edge sample.
    """
    mb_x, mb_y = origin
    px, py = mv.pels
    cx, cy = mb_x // 2, mb_y // 2
    qx, qy = _chroma_offset(px), _chroma_offset(py)
    half = MB_SIZE // 2
    return (
        _displaced_block(ref.y, mb_x + px, mb_y + py, MB_SIZE),
        _displaced_block(ref.cb, cx + qx, cy + qy, half),
        _displaced_block(ref.cr, cx + qx, cy + qy, half),
    )
