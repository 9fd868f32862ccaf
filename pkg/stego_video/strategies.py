"""
Embedding strategies, one per EmbedMode.

A strategy owns the bits it still has to place. Its encoder hooks write
them into eligible slots in coded order; ``read`` walks decoded macroblock
records in the same order and returns the bits found there. Both sides
agree on eligibility because modes, vectors and levels are coded
losslessly.
"""
import logging
from collections import defaultdict

import numpy as np

from codec.transform import ZIGZAG, first_nonzero_ac, quantise
from .modes import EmbedMode

logger = logging.getLogger(__name__)

STRATEGIES = {}

# payload bits occupy the integer-pel LSB of a quarter-pel component
MV_BIT = 2


def mv_embed_bit(component, bit):
    """Set bit 2 of ``|component|`` to ``bit``, keeping the sign."""
    magnitude = (abs(int(component)) & ~(1 << MV_BIT)) | ((bit & 1) << MV_BIT)
    return -magnitude if component < 0 else magnitude


def mv_extract_bit(component):
    return (abs(int(component)) >> MV_BIT) & 1


def level_embed_bit(level, bit):
    """Give ``|level|`` the parity ``bit``, growing the magnitude if it must change."""
    level = int(level)
    if abs(level) & 1 == bit:
        return level
    return level + 1 if level >= 0 else level - 1


def level_extract_bit(level):
    return abs(int(level)) & 1


def register(cls):
    for mode in cls.modes:
        STRATEGIES[mode] = cls
    return cls


def get_strategy(mode, bits=(), **kwargs):
    return STRATEGIES[EmbedMode(mode)](EmbedMode(mode), bits, **kwargs)


class EmbedStrategy:
    modes = ()

    def __init__(self, mode, bits=()):
        self.mode = mode
        self.bits = list(bits)
        self.placed = 0
        self.slots = defaultdict(int)

    @property
    def capacity(self):
        """Eligible slots seen during the last encode."""
        return sum(self.slots.values())

    @property
    def remaining(self):
        return len(self.bits) - self.placed

    def _next_bit(self):
        if self.placed >= len(self.bits):
            return None
        bit = self.bits[self.placed]
        self.placed += 1
        return bit

    def encoder_hooks(self):
        raise NotImplementedError

    def read_records(self, records):
        raise NotImplementedError

    def read(self, walk):
        """Bits carried by a ``codec.decoder.iter_macroblocks`` walk."""
        bits = []
        for _frame_index, _frame_type, records in walk:
            bits.extend(self.read_records(records))
        return bits


@register
class MotionVectorStrategy(EmbedStrategy):
    modes = (EmbedMode.FIRST_MB_X, EmbedMode.FIRST_MB_Y, EmbedMode.ALL_MB_X, EmbedMode.ALL_MB_Y)

    def __init__(self, mode, bits=()):
        super().__init__(mode, bits)
        self.axis = 0 if mode in (EmbedMode.FIRST_MB_X, EmbedMode.ALL_MB_X) else 1
        self.first_only = mode in (EmbedMode.FIRST_MB_X, EmbedMode.FIRST_MB_Y)
        self._last_frame = None

    def mb_hook(self, frame_index, frame_type, mb_index, mode, mv):
        if self.first_only:
            if frame_index == self._last_frame:
                return mv
            self._last_frame = frame_index
        self.slots[frame_index] += 1
        bit = self._next_bit()
        if bit is None:
            return mv
        components = list(mv)
        components[self.axis] = mv_embed_bit(components[self.axis], bit)
        return type(mv)(*components)

    def encoder_hooks(self):
        return {'mb_hook': self.mb_hook}

    def read_records(self, records):
        bits = []
        for record in records:
            if not record.has_motion_vector:
                continue
            bits.append(mv_extract_bit(record.mv[self.axis]))
            if self.first_only:
                break
        return bits


@register
class CoefficientStrategy(EmbedStrategy):
    """
    One bit per INTER macroblock whose first luma block has a nonzero AC
    level: the parity of the first such level in zigzag order.

    With ``pre_quant`` the bit is written into the rounded raw coefficient
    at that position before quantisation, where rounding can destroy it.
    """
    modes = (EmbedMode.COEFF,)

    def __init__(self, mode, bits=(), pre_quant=False, qp=None):
        super().__init__(mode, bits)
        self.pre_quant = pre_quant
        self.qp = qp

    def coeff_hook(self, frame_index, mb_index, block, pre_quant):
        if pre_quant:
            return self._embed_raw(frame_index, block)
        position = first_nonzero_ac(block)
        if position is None:
            return block
        self.slots[frame_index] += 1
        bit = self._next_bit()
        if bit is not None:
            flat = block.reshape(-1)
            flat[ZIGZAG[position]] = level_embed_bit(flat[ZIGZAG[position]], bit)
        return block

    def _embed_raw(self, frame_index, coeffs):
        position = first_nonzero_ac(quantise(coeffs, self.qp))
        if position is None:
            return coeffs
        self.slots[frame_index] += 1
        bit = self._next_bit()
        if bit is not None:
            flat = coeffs.reshape(-1)
            index = ZIGZAG[position]
            rounded = int(np.sign(flat[index]) * np.floor(abs(flat[index]) + 0.5))
            flat[index] = level_embed_bit(rounded, bit)
        return coeffs

    def encoder_hooks(self):
        return {'coeff_hook': self.coeff_hook, 'pre_quant': self.pre_quant}

    def read_records(self, records):
        bits = []
        for record in records:
            if not record.has_motion_vector:
                continue
            position = first_nonzero_ac(record.levels[0])
            if position is not None:
                bits.append(level_extract_bit(record.levels[0].reshape(-1)[ZIGZAG[position]]))
        return bits
