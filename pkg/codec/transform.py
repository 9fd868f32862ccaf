"""
Spatial model: orthonormal 8x8 DCT-II, uniform scalar quantisation and
the zigzag scan used by the entropy coder.
"""
import numpy as np
from scipy import fft

from .params import BLOCK_SIZE

INTRA_PREDICTOR = 128


def _zigzag_order(size=BLOCK_SIZE):
    cells = [(row, col) for row in range(size) for col in range(size)]
    cells.sort(key=lambda rc: (rc[0] + rc[1], rc[0] if (rc[0] + rc[1]) % 2 else rc[1]))
    return np.array([row * size + col for row, col in cells])


# ZIGZAG[k] is the raster index of the k-th coefficient in scan order
ZIGZAG = _zigzag_order()


def dct8(samples, predictor=0):
    """DCT of ``samples - predictor``; works on any stack of 8x8 blocks."""
    residual = np.asarray(samples, dtype=np.float64) - predictor
    return fft.dctn(residual, type=2, norm='ortho', axes=(-2, -1))


def idct8(coeffs):
    return fft.idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm='ortho', axes=(-2, -1))


def quantise(coeffs, qp):
    """Round half away from zero of ``coeffs / qp``."""
    scaled = np.asarray(coeffs, dtype=np.float64) / qp
    return (np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)).astype(np.int64)


def dequantise(levels, qp):
    return np.asarray(levels, dtype=np.int64) * qp


def reconstruct_residuals(levels, qp):
    """
    Integer pixel residuals for a whole frame of quantised blocks.

    Encoder and decoder both call this with the full (macroblocks, 6, 8, 8)
    level array of a frame so their reconstructions agree bit for bit.
    """
    return np.rint(idct8(dequantise(levels, qp))).astype(np.int64)


def to_scan(block):
    return np.asarray(block).reshape(-1)[ZIGZAG]


def from_scan(scan):
    block = np.zeros(BLOCK_SIZE * BLOCK_SIZE, dtype=np.int64)
    block[ZIGZAG] = scan
    return block.reshape(BLOCK_SIZE, BLOCK_SIZE)


def first_nonzero_ac(levels):
    """Scan position of the first nonzero AC level, or None."""
    scan = to_scan(levels)
    nonzero = np.flatnonzero(scan[1:])
    return int(nonzero[0]) + 1 if nonzero.size else None
