"""
Peak signal-to-noise ratio between frames and between whole sequences.
"""
import math
from typing import NamedTuple

import numpy as np

from mvstego.exceptions import InvalidDims

PEAK = 255
INF = math.inf
PLANES = ('y', 'cb', 'cr')


class PlanePsnr(NamedTuple):
    y: float
    cb: float
    cr: float


def _mse(a, b):
    if a.shape != b.shape:
        raise InvalidDims(f'cannot compare planes of shape {a.shape} and {b.shape}')
    diff = a.astype(np.float64) - b.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr_from_mse(mse):
    return INF if mse == 0 else 10 * math.log10(PEAK ** 2 / mse)


def psnr(a, b):
    """Per-plane PSNR of two frames in dB; identical planes give INF."""
    return PlanePsnr(*(psnr_from_mse(_mse(getattr(a, p), getattr(b, p))) for p in PLANES))


def _paired(a, b):
    if len(a) != len(b):
        raise InvalidDims(f'sequences hold {len(a)} and {len(b)} frames')
    if len(a) == 0:
        raise InvalidDims('cannot compare empty sequences')
    return zip(a.frames, b.frames)


def sequence_psnr(a, b, plane='y'):
    """PSNR of the MSE pooled over every frame of one plane."""
    errors = [_mse(getattr(fa, plane), getattr(fb, plane)) for fa, fb in _paired(a, b)]
    return psnr_from_mse(float(np.mean(errors)))


def mean_frame_psnr(a, b, plane='y'):
    """Average of per-frame PSNRs, ignoring frames that match exactly."""
    values = [
        psnr_from_mse(_mse(getattr(fa, plane), getattr(fb, plane))) for fa, fb in _paired(a, b)
    ]
    finite = [value for value in values if value != INF]
    return float(np.mean(finite)) if finite else INF
