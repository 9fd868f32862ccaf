"""
AES block cipher (FIPS-197) with 128/192/256-bit keys, plus CTR mode.

The state is kept as a flat list of 16 bytes in input order, which is the
column-major layout of the standard: byte ``4*c + r`` is row r, column c.

Not constant time; this is for research use, not for protecting secrets
against an attacker who can measure timing.
"""
import secrets
from dataclasses import dataclass

from mvstego.exceptions import InvalidKey

BLOCK_BYTES = 16
ROUNDS = {16: 10, 24: 12, 32: 14}


def _xtime(a):
    a <<= 1
    return (a ^ 0x1B) & 0xFF if a & 0x100 else a


def _gmul(a, b):
    result = 0
    while b:
        if b & 1:
            result ^= a
        a = _xtime(a)
        b >>= 1
    return result


def _build_sboxes():
    sbox = [0] * 256
    for x in range(256):
        # multiplicative inverse is x^254; 0 maps to 0
        inverse = 1
        for _ in range(254):
            inverse = _gmul(inverse, x)
        b = inverse if x else 0
        s = b
        for shift in range(1, 5):
            s ^= ((b << shift) | (b >> (8 - shift))) & 0xFF
        sbox[x] = s ^ 0x63
    inv_sbox = [0] * 256
    for x, s in enumerate(sbox):
        inv_sbox[s] = x
    return sbox, inv_sbox


SBOX, INV_SBOX = _build_sboxes()
MUL = {factor: [_gmul(factor, x) for x in range(256)] for factor in (2, 3, 9, 11, 13, 14)}

RCON = [0x01]
while len(RCON) < 10:
    RCON.append(_xtime(RCON[-1]))

# ShiftRows: output byte i comes from input byte SHIFT[i]
SHIFT = [(r + 4 * ((c + r) % 4)) for c in range(4) for r in range(4)]
INV_SHIFT = [0] * 16
for _i, _j in enumerate(SHIFT):
    INV_SHIFT[_j] = _i


@dataclass(frozen=True)
class SymmetricKey:
    key: bytes

    def __post_init__(self):
        if len(self.key) not in ROUNDS:
            raise InvalidKey(f'AES keys are 16, 24 or 32 bytes, got {len(self.key)}')

    @classmethod
    def from_hex(cls, text):
        try:
            return cls(bytes.fromhex(text))
        except ValueError:
            raise InvalidKey('key is not valid hex')

    @property
    def rounds(self):
        return ROUNDS[len(self.key)]


@dataclass(frozen=True)
class RoundKeySchedule:
    words: tuple
    rounds: int

    def round_key(self, index):
        key = []
        for word in self.words[4 * index:4 * index + 4]:
            key.extend(word.to_bytes(4, 'big'))
        return key


def _sub_word(word):
    return int.from_bytes(bytes(SBOX[b] for b in word.to_bytes(4, 'big')), 'big')


def _rot_word(word):
    return ((word << 8) | (word >> 24)) & 0xFFFFFFFF


def expand_key(key):
    if not isinstance(key, SymmetricKey):
        key = SymmetricKey(bytes(key))
    nk = len(key.key) // 4
    rounds = key.rounds
    words = [int.from_bytes(key.key[4 * i:4 * i + 4], 'big') for i in range(nk)]
    for i in range(nk, 4 * (rounds + 1)):
        temp = words[i - 1]
        if i % nk == 0:
            temp = _sub_word(_rot_word(temp)) ^ (RCON[i // nk - 1] << 24)
        elif nk > 6 and i % nk == 4:
            temp = _sub_word(temp)
        words.append(words[i - nk] ^ temp)
    return RoundKeySchedule(words=tuple(words), rounds=rounds)


def _add_round_key(state, round_key):
    return [s ^ k for s, k in zip(state, round_key)]


def _mix_columns(state):
    m2, m3 = MUL[2], MUL[3]
    out = []
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = state[c:c + 4]
        out += [
            m2[a0] ^ m3[a1] ^ a2 ^ a3,
            a0 ^ m2[a1] ^ m3[a2] ^ a3,
            a0 ^ a1 ^ m2[a2] ^ m3[a3],
            m3[a0] ^ a1 ^ a2 ^ m2[a3],
        ]
    return out


def _inv_mix_columns(state):
    m9, m11, m13, m14 = MUL[9], MUL[11], MUL[13], MUL[14]
    out = []
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = state[c:c + 4]
        out += [
            m14[a0] ^ m11[a1] ^ m13[a2] ^ m9[a3],
            m9[a0] ^ m14[a1] ^ m11[a2] ^ m13[a3],
            m13[a0] ^ m9[a1] ^ m14[a2] ^ m11[a3],
            m11[a0] ^ m13[a1] ^ m9[a2] ^ m14[a3],
        ]
    return out


def encrypt_block(schedule, block):
    if len(block) != BLOCK_BYTES:
        raise ValueError(f'AES blocks are 16 bytes, got {len(block)}')
    state = _add_round_key(list(block), schedule.round_key(0))
    for round_index in range(1, schedule.rounds + 1):
        state = [SBOX[state[i]] for i in SHIFT]
        if round_index < schedule.rounds:
            state = _mix_columns(state)
        state = _add_round_key(state, schedule.round_key(round_index))
    return bytes(state)


def decrypt_block(schedule, block):
    if len(block) != BLOCK_BYTES:
        raise ValueError(f'AES blocks are 16 bytes, got {len(block)}')
    state = _add_round_key(list(block), schedule.round_key(schedule.rounds))
    for round_index in range(schedule.rounds - 1, -1, -1):
        state = [INV_SBOX[state[i]] for i in INV_SHIFT]
        state = _add_round_key(state, schedule.round_key(round_index))
        if round_index:
            state = _inv_mix_columns(state)
    return bytes(state)


def counter_block(nonce, index):
    """Nonce with ``index`` added to its last 8 bytes as a big-endian counter."""
    counter = (int.from_bytes(nonce[8:], 'big') + index) & 0xFFFFFFFFFFFFFFFF
    return bytes(nonce[:8]) + counter.to_bytes(8, 'big')


def ctr_transform(key, nonce, data):
    """Encrypt or decrypt ``data`` in counter mode; applying it twice is the identity."""
    if len(nonce) != BLOCK_BYTES:
        raise InvalidKey(f'CTR nonces are 16 bytes, got {len(nonce)}')
    schedule = key if isinstance(key, RoundKeySchedule) else expand_key(key)
    data = bytes(data)
    out = bytearray(len(data))
    for offset in range(0, len(data), BLOCK_BYTES):
        keystream = encrypt_block(schedule, counter_block(nonce, offset // BLOCK_BYTES))
        chunk = data[offset:offset + BLOCK_BYTES]
        out[offset:offset + len(chunk)] = bytes(a ^ b for a, b in zip(chunk, keystream))
    return bytes(out)


def random_nonce():
    return secrets.token_bytes(BLOCK_BYTES)
