"""
Macroblock records and their entropy coding.

Layout of one macroblock::

    mode ue | [INTER: dx se, dy se] |
    6 x (nnz ue, nnz x (zigzag index delta ue, level se))

SKIP macroblocks are the single codeword ue(2).
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from formats.bits import BitReader, BitWriter
from mvstego.exceptions import CorruptContainer, TruncatedInput
from .motion import MacroblockMode, MotionVector
from .params import BLOCK_SIZE, BLOCKS_PER_MB
from .transform import from_scan, to_scan

COEFFS_PER_BLOCK = BLOCK_SIZE * BLOCK_SIZE


def zero_levels():
    return np.zeros((BLOCKS_PER_MB, BLOCK_SIZE, BLOCK_SIZE), dtype=np.int64)


@dataclass(eq=False)
class MacroblockRecord:
    mode: int
    mv: Optional[MotionVector] = None
    levels: np.ndarray = field(default_factory=zero_levels)

    def __post_init__(self):
        if self.mode == MacroblockMode.INTER:
            if self.mv is None:
                raise ValueError('INTER macroblocks need a motion vector')
            self.mv = MotionVector(int(self.mv[0]), int(self.mv[1]))
        elif self.mv is not None:
            raise ValueError(f'{MacroblockMode(self.mode).label} macroblocks carry no motion vector')
        if self.mode == MacroblockMode.SKIP and np.any(self.levels):
            raise ValueError('SKIP macroblocks carry no residual')

    @property
    def has_motion_vector(self):
        return self.mode == MacroblockMode.INTER

    def __eq__(self, other):
        if not isinstance(other, MacroblockRecord):
            return NotImplemented
        return (self.mode == other.mode and self.mv == other.mv
                and np.array_equal(self.levels, other.levels))

    def __repr__(self):
        return f'MacroblockRecord({MacroblockMode(self.mode).label}, mv={self.mv}, nnz={np.count_nonzero(self.levels)})'


def write_macroblock(writer, record):
    writer.write_ue(int(record.mode))
    if record.mode == MacroblockMode.SKIP:
        return
    if record.mode == MacroblockMode.INTER:
        writer.write_se(record.mv.dx)
        writer.write_se(record.mv.dy)
    for block in record.levels:
        scan = to_scan(block)
        positions = np.flatnonzero(scan)
        writer.write_ue(len(positions))
        previous = -1
        for position in positions:
            writer.write_ue(int(position) - previous - 1)
            writer.write_se(int(scan[position]))
            previous = int(position)


def read_macroblock(reader):
    try:
        mode = reader.read_ue()
        if mode not in MacroblockMode.values:
            raise CorruptContainer(f'unknown macroblock mode {mode}')
        if mode == MacroblockMode.SKIP:
            return MacroblockRecord(mode=MacroblockMode.SKIP)

        mv = None
        if mode == MacroblockMode.INTER:
            mv = MotionVector(reader.read_se(), reader.read_se())

        levels = zero_levels()
        for index in range(BLOCKS_PER_MB):
            count = reader.read_ue()
            if count > COEFFS_PER_BLOCK:
                raise CorruptContainer(f'{count} coefficients in one block')
            scan = np.zeros(COEFFS_PER_BLOCK, dtype=np.int64)
            position = -1
            for _ in range(count):
                position += reader.read_ue() + 1
                if position >= COEFFS_PER_BLOCK:
                    raise CorruptContainer(f'zigzag index {position} out of range')
                level = reader.read_se()
                if level == 0:
                    raise CorruptContainer('zero level coded explicitly')
                scan[position] = level
            levels[index] = from_scan(scan)
    except TruncatedInput as e:
        raise CorruptContainer(f'macroblock stream ended early: {e}')
    return MacroblockRecord(mode=MacroblockMode(mode), mv=mv, levels=levels)


def encode_macroblock(record):
    """Encode a single macroblock to a bit string."""
    writer = BitWriter()
    write_macroblock(writer, record)
    return writer.to_bitstring()


def decode_macroblock(bits):
    return read_macroblock(BitReader.from_bitstring(bits))


def encode_frame_records(records):
    writer = BitWriter()
    for record in records:
        write_macroblock(writer, record)
    return writer.to_bytes()


def decode_frame_records(data, count):
    reader = BitReader(data)
    records = [read_macroblock(reader) for _ in range(count)]
    if reader.remaining >= 8:
        raise CorruptContainer(f'{reader.remaining} unused bits after the last macroblock')
    return records
