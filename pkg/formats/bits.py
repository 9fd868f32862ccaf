"""
Bit-level reader/writer and the order-0 Exp-Golomb codes used for every
symbol of the macroblock stream.

Bits are packed most significant bit first. Writers pad the final byte
with zero bits.
"""
from mvstego.exceptions import TruncatedInput


class BitWriter:
    """Accumulates bits and packs them into bytes."""

    def __init__(self):
        self._buffer = bytearray()
        self._acc = 0
        self._nbits = 0

    def __len__(self):
        return len(self._buffer) * 8 + self._nbits

    def write(self, value, nbits):
        if nbits <= 0:
            return
        self._acc = (self._acc << nbits) | (value & ((1 << nbits) - 1))
        self._nbits += nbits
        while self._nbits >= 8:
            self._nbits -= 8
            self._buffer.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    def write_bit(self, bit):
        self.write(1 if bit else 0, 1)

    def write_ue(self, n):
        if n < 0:
            raise ValueError(f"ue code needs n >= 0, got {n}")
        value = n + 1
        self.write(value, 2 * value.bit_length() - 1)

    def write_se(self, n):
        self.write_ue(signed_to_unsigned(n))

    def to_bytes(self):
        if self._nbits:
            return bytes(self._buffer) + bytes([(self._acc << (8 - self._nbits)) & 0xFF])
        return bytes(self._buffer)

    def to_bitstring(self):
        text = ''.join(f'{byte:08b}' for byte in self._buffer)
        if self._nbits:
            text += f'{self._acc:0{self._nbits}b}'
        return text


class BitReader:
    """Cursor over a byte buffer; reads never pass the end of the buffer."""

    def __init__(self, data, limit=None):
        self._data = bytes(data)
        self._limit = len(self._data) * 8 if limit is None else limit
        self.position = 0

    @classmethod
    def from_bitstring(cls, bits):
        writer = BitWriter()
        for char in bits:
            writer.write_bit(char == '1')
        return cls(writer.to_bytes(), limit=len(bits))

    @property
    def remaining(self):
        return self._limit - self.position

    def read_bit(self):
        if self.position >= self._limit:
            raise TruncatedInput('bit stream ended')
        pos = self.position
        self.position += 1
        return (self._data[pos >> 3] >> (7 - (pos & 7))) & 1

    def read(self, nbits):
        if nbits > self.remaining:
            raise TruncatedInput(f'need {nbits} bits, {self.remaining} left')
        value = 0
        for _ in range(nbits):
            value = (value << 1) | self.read_bit()
        return value

    def read_ue(self):
        zeros = 0
        while self.read_bit() == 0:
            zeros += 1
        return ((1 << zeros) | self.read(zeros)) - 1

    def read_se(self):
        return unsigned_to_signed(self.read_ue())


def signed_to_unsigned(n):
    """0, 1, -1, 2, -2, ... map to 0, 1, 2, 3, 4, ..."""
    return 2 * n - 1 if n > 0 else -2 * n


def unsigned_to_signed(k):
    return (k + 1) // 2 if k & 1 else -(k // 2)


def ue_encode(n):
    writer = BitWriter()
    writer.write_ue(n)
    return writer.to_bitstring()


def ue_decode(bits):
    return BitReader.from_bitstring(bits).read_ue()


def se_encode(n):
    writer = BitWriter()
    writer.write_se(n)
    return writer.to_bitstring()


def se_decode(bits):
    return BitReader.from_bitstring(bits).read_se()
