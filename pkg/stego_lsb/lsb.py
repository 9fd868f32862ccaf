"""
Least significant bit substitution over a lossless byte stream (PNM pixel
bytes or WAV sample bytes).

The payload is prefixed with its length as a big-endian u32 and written
MSB first, one bit per cover byte.
"""
import logging
import struct

import numpy as np

from mvstego.exceptions import CorruptPayload, InsufficientCapacity

logger = logging.getLogger(__name__)

LENGTH_PREFIX = struct.Struct('>I')


def lsb_capacity(cover_length):
    """Largest payload, in bytes, a cover of ``cover_length`` bytes can hold."""
    return max(0, cover_length // 8 - LENGTH_PREFIX.size)


def lsb_embed(cover, payload):
    cover = np.frombuffer(bytes(cover), dtype=np.uint8)
    payload = bytes(payload)
    if len(payload) > lsb_capacity(len(cover)):
        raise InsufficientCapacity(
            placed=0, required=8 * (len(payload) + LENGTH_PREFIX.size),
            message=f'cover holds {lsb_capacity(len(cover))} payload bytes, {len(payload)} given',
        )
    bits = np.unpackbits(np.frombuffer(LENGTH_PREFIX.pack(len(payload)) + payload, dtype=np.uint8))
    stego = cover.copy()
    stego[:len(bits)] = (stego[:len(bits)] & 0xFE) | bits
    logger.info(f"Embedded {len(payload)} bytes in the LSBs of {len(bits)} cover bytes")
    return stego.tobytes()


def lsb_extract(stego):
    stego = np.frombuffer(bytes(stego), dtype=np.uint8)
    prefix_bits = LENGTH_PREFIX.size * 8
    if len(stego) < prefix_bits:
        raise CorruptPayload(f'{len(stego)} bytes cannot hold a length prefix')
    (length,) = LENGTH_PREFIX.unpack(np.packbits(stego[:prefix_bits] & 1).tobytes())
    if length > lsb_capacity(len(stego)):
        raise CorruptPayload(f'declared length {length} exceeds capacity {lsb_capacity(len(stego))}')
    end = prefix_bits + 8 * length
    return np.packbits(stego[prefix_bits:end] & 1).tobytes()
