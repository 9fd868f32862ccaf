import random

from django.test import SimpleTestCase

from mvstego.exceptions import InvalidKey
from .aes import (
    INV_SBOX, SBOX, SymmetricKey, counter_block, ctr_transform, decrypt_block, encrypt_block,
    expand_key,
)

PLAINTEXT = bytes.fromhex('00112233445566778899aabbccddeeff')


class SBoxTests(SimpleTestCase):

    def test_known_entries(self):
        self.assertEqual(SBOX[0x00], 0x63)
        self.assertEqual(SBOX[0x53], 0xED)
        self.assertEqual(SBOX[0xFF], 0x16)

    def test_inverse(self):
        for x in range(256):
            self.assertEqual(INV_SBOX[SBOX[x]], x)


class KeyExpansionTests(SimpleTestCase):

    def test_word_count(self):
        for length, rounds in ((16, 10), (24, 12), (32, 14)):
            schedule = expand_key(bytes(range(length)))
            self.assertEqual(schedule.rounds, rounds)
            self.assertEqual(len(schedule.words), 4 * (rounds + 1))

    def test_first_expanded_word(self):
        schedule = expand_key(bytes(range(16)))
        self.assertEqual(schedule.words[4], 0xD6AA74FD)

    def test_reference_key_schedule(self):
        schedule = expand_key(bytes.fromhex('2b7e151628aed2a6abf7158809cf4f3c'))
        self.assertEqual(schedule.words[4], 0xA0FAFE17)
        self.assertEqual(schedule.words[43], 0xB6630CA6)

    def test_bad_lengths(self):
        for length in (0, 8, 15, 17, 31, 33):
            with self.assertRaises(InvalidKey):
                expand_key(bytes(length))

    def test_bad_hex(self):
        with self.assertRaises(InvalidKey):
            SymmetricKey.from_hex('zz' * 16)


class BlockCipherTests(SimpleTestCase):

    def test_known_answers(self):
        vectors = [
            (16, '69c4e0d86a7b0430d8cdb78070b4c55a'),
            (24, 'dda97ca4864cdfe06eaf70a0ec0d7191'),
            (32, '8ea2b7ca516745bfeafc49904b496089'),
        ]
        for length, expected in vectors:
            with self.subTest(key_bytes=length):
                schedule = expand_key(bytes(range(length)))
                ciphertext = encrypt_block(schedule, PLAINTEXT)
                self.assertEqual(ciphertext.hex(), expected)
                self.assertEqual(decrypt_block(schedule, ciphertext), PLAINTEXT)

    def test_cipher_example(self):
        schedule = expand_key(bytes.fromhex('2b7e151628aed2a6abf7158809cf4f3c'))
        ciphertext = encrypt_block(schedule, bytes.fromhex('3243f6a8885a308d313198a2e0370734'))
        self.assertEqual(ciphertext.hex(), '3925841d02dc09fbdc118597196a0b32')

    def test_block_length(self):
        schedule = expand_key(bytes(16))
        with self.assertRaises(ValueError):
            encrypt_block(schedule, bytes(15))


class CounterModeTests(SimpleTestCase):

    def setUp(self):
        self.rng = random.Random(7)

    def test_involution(self):
        for length in (0, 1, 15, 16, 17, 100):
            key = self.rng.randbytes(32)
            nonce = self.rng.randbytes(16)
            data = self.rng.randbytes(length)
            self.assertEqual(ctr_transform(key, nonce, ctr_transform(key, nonce, data)), data)

    def test_first_block_is_encrypted_nonce(self):
        key = bytes(range(16))
        nonce = self.rng.randbytes(16)
        keystream = ctr_transform(key, nonce, bytes(16))
        self.assertEqual(keystream, encrypt_block(expand_key(key), nonce))

    def test_counter_wraps_low_half(self):
        nonce = bytes(8) + b'\xff' * 8
        self.assertEqual(counter_block(nonce, 1), bytes(16))
        self.assertEqual(counter_block(bytes(16), 258)[-2:], b'\x01\x02')

    def test_distinct_nonces_give_distinct_keystreams(self):
        key = self.rng.randbytes(16)
        for _ in range(100):
            a, b = self.rng.randbytes(16), self.rng.randbytes(16)
            self.assertNotEqual(ctr_transform(key, a, bytes(32)), ctr_transform(key, b, bytes(32)))

    def test_bad_nonce(self):
        with self.assertRaises(InvalidKey):
            ctr_transform(bytes(16), bytes(8), b'data')
