import random

from django.test import SimpleTestCase

from formats.pnm import PnmImage, read_pnm, write_pnm
from formats.wav import WavFormat, read_wav, write_wav
from mvstego.exceptions import CorruptPayload, InsufficientCapacity, ParseError
from .injection import extract_appended, inject_append
from .lsb import lsb_capacity, lsb_embed, lsb_extract


class LsbTests(SimpleTestCase):

    def setUp(self):
        self.rng = random.Random(11)
        self.cover = self.rng.randbytes(1024)

    def test_hello_touches_first_72_bytes_only(self):
        stego = lsb_embed(self.cover, b'Hello')
        self.assertEqual(len(stego), len(self.cover))
        self.assertEqual(stego[72:], self.cover[72:])
        for a, b in zip(stego[:72], self.cover[:72]):
            self.assertEqual(a >> 1, b >> 1)
        self.assertEqual(lsb_extract(stego), b'Hello')

    def test_prefix_and_bits(self):
        stego = lsb_embed(bytes(72), b'Hello')
        bits = ''.join(str(b & 1) for b in stego)
        self.assertEqual(bits[:32], format(5, '032b'))
        self.assertEqual(bits[32:40], format(ord('H'), '08b'))

    def test_matching_bits_leave_cover_unchanged(self):
        cover = lsb_embed(self.cover, b'same')
        self.assertEqual(lsb_embed(cover, b'same'), cover)

    def test_round_trip(self):
        for length in (0, 1, 17, lsb_capacity(len(self.cover))):
            payload = self.rng.randbytes(length)
            self.assertEqual(lsb_extract(lsb_embed(self.cover, payload)), payload)

    def test_capacity(self):
        self.assertEqual(lsb_capacity(1024), 124)
        self.assertEqual(lsb_capacity(16), 0)
        with self.assertRaises(InsufficientCapacity):
            lsb_embed(self.cover, bytes(125))

    def test_all_zero_cover(self):
        self.assertEqual(lsb_extract(bytes(256)), b'')

    def test_truncated_cover(self):
        stego = lsb_embed(self.cover, b'Hello')
        with self.assertRaises(CorruptPayload):
            lsb_extract(stego[:60])
        with self.assertRaises(CorruptPayload):
            lsb_extract(stego[:20])

    def test_pnm_pixels_round_trip(self):
        image = PnmImage(width=16, height=16, channels=3, pixels=self.rng.randbytes(16 * 16 * 3))
        stego = PnmImage(16, 16, 3, lsb_embed(image.pixels, b'in the picture'))
        self.assertEqual(lsb_extract(read_pnm(write_pnm(stego)).pixels), b'in the picture')


class InjectionTests(SimpleTestCase):

    def setUp(self):
        self.wav = write_wav(WavFormat.pcm(), bytes(range(200)))

    def test_round_trip(self):
        injected = inject_append(self.wav, b'after the end')
        self.assertEqual(extract_appended(injected), b'after the end')
        self.assertEqual(len(injected), len(self.wav) + len(b'after the end'))

    def test_original_bytes_untouched(self):
        injected = inject_append(self.wav, b'tail')
        self.assertEqual(injected[:len(self.wav)], self.wav)
        self.assertEqual(read_wav(injected)[:2], read_wav(self.wav)[:2])

    def test_empty_payload(self):
        self.assertEqual(inject_append(self.wav, b''), self.wav)

    def test_clean_wav(self):
        self.assertEqual(extract_appended(self.wav), b'')

    def test_odd_sample_count(self):
        pcm8 = WavFormat.pcm(bits_per_sample=8)
        wav = write_wav(pcm8, b'\x01\x02\x03')
        self.assertEqual(extract_appended(wav), b'')
        self.assertEqual(extract_appended(inject_append(wav, b'hi')), b'hi')

        unpadded = wav[:-1]
        injected = inject_append(unpadded, b'hi')
        self.assertEqual(injected, wav + b'hi')
        self.assertEqual(extract_appended(injected), b'hi')

    def test_not_a_wav(self):
        with self.assertRaises(ParseError):
            extract_appended(b'this is not a wav file at all')
        with self.assertRaises(ParseError):
            inject_append(b'nope', b'x')
