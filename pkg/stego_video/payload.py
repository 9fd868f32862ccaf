"""
Payload framing carried inside the covert channel. Big-endian, MSB first::

    magic "ST" | version u8 | flags u8 (bit0 encrypted) | mode u8 |
    length u32 | [nonce 16 bytes] | body | crc32 u32

The checksum is computed over the plaintext body, so an encrypted frame
can only be verified after decryption.
"""
import logging
import struct
import zlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from crypto.aes import BLOCK_BYTES, ctr_transform, random_nonce
from mvstego.exceptions import CorruptPayload, InvalidParams, KeyRequired, NoPayloadFound
from .modes import EmbedMode

logger = logging.getLogger(__name__)

MAGIC = b'ST'
VERSION = 1
FLAG_ENCRYPTED = 0x01
MAX_BODY = 2 ** 32 - 1

HEADER = struct.Struct('>2sBBBI')
CRC = struct.Struct('>I')
HEADER_BITS = (HEADER.size + CRC.size) * 8


def to_bits(data):
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8)).tolist()


def from_bits(bits):
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


@dataclass(frozen=True)
class PayloadFrame:
    mode: int
    body: bytes
    crc: int
    nonce: Optional[bytes] = None
    version: int = VERSION

    @property
    def encrypted(self):
        return self.nonce is not None

    @property
    def flags(self):
        return FLAG_ENCRYPTED if self.encrypted else 0

    def to_bytes(self):
        return b''.join([
            HEADER.pack(MAGIC, self.version, self.flags, int(self.mode), len(self.body)),
            self.nonce or b'',
            self.body,
            CRC.pack(self.crc),
        ])

    def to_bits(self):
        return to_bits(self.to_bytes())

    def open(self, key=None):
        """Plaintext body, decrypted with ``key`` when the frame is encrypted."""
        if self.encrypted:
            if key is None:
                raise KeyRequired('payload is encrypted; a key is required')
            body = ctr_transform(key, self.nonce, self.body)
        else:
            body = self.body
        if zlib.crc32(body) != self.crc:
            raise CorruptPayload('payload checksum mismatch' + (' (wrong key?)' if self.encrypted else ''))
        return body


def seal_payload(plaintext, mode, key=None, nonce=None):
    """
    Build a PayloadFrame for ``plaintext``, encrypting it when a key is given.
    Without an explicit ``nonce`` a fresh one is drawn from system entropy.
    """
    plaintext = bytes(plaintext)
    if len(plaintext) > MAX_BODY:
        raise InvalidParams('payload body exceeds 2^32-1 bytes')
    crc = zlib.crc32(plaintext)
    if key is None:
        return PayloadFrame(mode=mode, body=plaintext, crc=crc)
    if nonce is None:
        nonce = random_nonce()
    # ctr_transform rejects nonces that are not one block long
    return PayloadFrame(mode=mode, body=ctr_transform(key, nonce, plaintext), crc=crc, nonce=bytes(nonce))


def frame_payload(body, mode, nonce=None, crc=None):
    """
    Bit sequence of a framed ``body``. The frame is marked encrypted when a
    nonce is given; ``crc`` defaults to the checksum of ``body``.
    """
    body = bytes(body)
    if len(body) > MAX_BODY:
        raise InvalidParams('payload body exceeds 2^32-1 bytes')
    frame = PayloadFrame(
        mode=mode, body=body, crc=zlib.crc32(body) if crc is None else crc,
        nonce=bytes(nonce) if nonce is not None else None,
    )
    return frame.to_bits()


def parse_payload(bits, expected_mode=None):
    """
    Parse a PayloadFrame from the front of a bit stream; trailing bits are
    ignored. Plaintext frames have their checksum verified here, encrypted
    ones when opened.
    """
    bits = list(bits)
    if len(bits) < HEADER.size * 8:
        raise NoPayloadFound('not enough bits for a payload header')
    magic, version, flags, mode, length = HEADER.unpack(from_bits(bits[:HEADER.size * 8]))
    if magic != MAGIC:
        raise NoPayloadFound('payload magic not found')
    if version != VERSION or flags & ~FLAG_ENCRYPTED or mode not in EmbedMode.values:
        raise NoPayloadFound('payload header fields out of range')
    if expected_mode is not None and mode != expected_mode:
        raise NoPayloadFound(f'payload declares mode {mode}, read as {int(expected_mode)}')

    nonce_bytes = BLOCK_BYTES if flags & FLAG_ENCRYPTED else 0
    total = HEADER.size + nonce_bytes + length + CRC.size
    if total * 8 > len(bits):
        raise NoPayloadFound(f'declared length {length} exceeds the {len(bits)} available bits')

    data = from_bits(bits[:total * 8])
    offset = HEADER.size
    nonce = data[offset:offset + nonce_bytes] if nonce_bytes else None
    offset += nonce_bytes
    body = data[offset:offset + length]
    (crc,) = CRC.unpack(data[offset + length:total])

    frame = PayloadFrame(mode=mode, body=body, crc=crc, nonce=nonce, version=version)
    if not frame.encrypted and zlib.crc32(body) != crc:
        raise CorruptPayload('payload checksum mismatch')
    return frame
