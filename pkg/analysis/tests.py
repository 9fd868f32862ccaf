import math
import os
import random
import tempfile
from pathlib import Path

from django.test import SimpleTestCase
from PIL import Image

from codec.decoder import iter_macroblocks
from codec.encoder import encode_video
from codec.motion import MacroblockMode
from codec.params import CodecParams
from codec.synthetic import moving_gradient
from crypto.aes import ctr_transform
from formats.video import Frame, RawVideo
from mvstego.exceptions import EmptyInput, InvalidComparison, InvalidDims, InvalidParams
from stego_lsb.lsb import lsb_embed
from stego_video.embedding import embed, invert_motion_vectors
from stego_video.modes import EmbedMode
from .histogram import Histogram256, ascii_histogram, lsb_stream_bytes
from .mv_diff import mv_diff_report
from .quality import INF, mean_frame_psnr, psnr, sequence_psnr
from .snapshot import export_frame_png, frame_to_rgb
from .stats import calibrate_threshold, chi_square_pvalue, chi_square_uniform

FIXTURE = Path(__file__).resolve().parent / 'fixtures' / 'english_2k.txt'
FAST = CodecParams(search_range=8)
LOWERCASE_AND_SPACE = [0x20] + list(range(0x61, 0x7B))


class LsbStreamTests(SimpleTestCase):

    def test_packs_msb_first(self):
        cover = bytes([0, 1, 0, 0, 1, 0, 0, 0])
        self.assertEqual(lsb_stream_bytes(cover), b'H')

    def test_even_cover(self):
        self.assertEqual(lsb_stream_bytes(bytes(range(0, 200, 2))), bytes(12))

    def test_length(self):
        for n in (0, 7, 8, 15, 16, 1001):
            self.assertEqual(len(lsb_stream_bytes(bytes(n))), n // 8)


class HistogramTests(SimpleTestCase):

    def test_empty(self):
        histogram = ascii_histogram(b'')
        self.assertEqual(histogram.total, 0)
        self.assertFalse(histogram.counts.any())

    def test_counts(self):
        histogram = ascii_histogram(b'abracadabra')
        self.assertEqual(histogram.counts[ord('a')], 5)
        self.assertEqual(histogram.counts[ord('r')], 2)
        self.assertEqual(histogram.total, 11)

    def test_csv_round_trip(self):
        histogram = ascii_histogram(random.Random(2).randbytes(3000))
        text = histogram.to_csv()
        lines = text.splitlines()
        self.assertEqual(lines[0], 'value,count')
        self.assertEqual(len(lines), 257)
        self.assertEqual(Histogram256.from_csv(text), histogram)


class ChiSquareTests(SimpleTestCase):

    def test_uniform(self):
        self.assertEqual(chi_square_uniform(ascii_histogram(bytes(range(256)) * 4)), 0.0)

    def test_single_value(self):
        self.assertAlmostEqual(chi_square_uniform(ascii_histogram(b'\x41' * 1000)), 1000 * 255)

    def test_empty(self):
        with self.assertRaises(EmptyInput):
            chi_square_uniform(ascii_histogram(b''))

    def test_pvalue(self):
        self.assertAlmostEqual(chi_square_pvalue(0.0), 1.0)
        self.assertLess(chi_square_pvalue(1000 * 255), 1e-12)

    def test_calibration_is_deterministic(self):
        first = calibrate_threshold(trials=20, length=512, seed=4)
        self.assertEqual(first, calibrate_threshold(trials=20, length=512, seed=4))
        # the statistic of random bytes concentrates around its 255 degrees of freedom
        self.assertTrue(255 < first < 400)


class TextDistributionTests(SimpleTestCase):

    def setUp(self):
        self.text = FIXTURE.read_bytes()
        rng = random.Random(2013)
        self.cover = rng.randbytes(8 * (4 + len(self.text)))
        self.key = bytes.fromhex('2b7e151628aed2a6abf7158809cf4f3c')
        self.nonce = bytes.fromhex('f0f1f2f3f4f5f6f7f8f9fafbfcfdfeff')

    def _histogram(self, payload):
        return ascii_histogram(lsb_stream_bytes(lsb_embed(self.cover, payload)))

    def test_fixture_size(self):
        self.assertGreaterEqual(len(self.text), 2048)

    def test_plain_text_is_skewed(self):
        histogram = self._histogram(self.text)
        self.assertEqual(histogram.total, 4 + len(self.text))
        self.assertGreater(histogram.share(LOWERCASE_AND_SPACE), 0.30)

    def test_encrypted_text_is_flat(self):
        histogram = self._histogram(ctr_transform(self.key, self.nonce, self.text))
        expected = histogram.total / 256
        self.assertLessEqual(histogram.counts.max(), 3 * expected)

    def test_detection_separates_plain_from_encrypted(self):
        plain = chi_square_uniform(self._histogram(self.text))
        encrypted = chi_square_uniform(self._histogram(ctr_transform(self.key, self.nonce, self.text)))
        threshold = calibrate_threshold(trials=100, length=4 + len(self.text), seed=2013)
        self.assertGreater(plain, threshold)
        self.assertGreater(threshold, encrypted)


class PsnrTests(SimpleTestCase):

    def test_identical(self):
        frame = Frame.blank(16, 16, value=90)
        self.assertEqual(psnr(frame, frame.copy()), (INF, INF, INF))

    def test_single_pixel(self):
        a = Frame.blank(16, 16, value=0)
        b = a.copy()
        b.y[3, 5] = 255
        self.assertAlmostEqual(psnr(a, b).y, 10 * math.log10(256), places=3)
        self.assertAlmostEqual(psnr(a, b).y, 24.082, places=3)
        self.assertEqual(psnr(a, b).cb, INF)

    def test_symmetric(self):
        video = moving_gradient(width=32, height=32, frames=2, noise=5)
        a, b = video.frames
        self.assertEqual(psnr(a, b), psnr(b, a))

    def test_dims(self):
        with self.assertRaises(InvalidDims):
            psnr(Frame.blank(16, 16), Frame.blank(32, 16))

    def test_sequences(self):
        a = RawVideo(16, 16, frames=[Frame.blank(16, 16, value=0), Frame.blank(16, 16, value=0)])
        b = RawVideo(16, 16, frames=[Frame.blank(16, 16, value=0), Frame.blank(16, 16, value=0)])
        b.frames[1].y[0, 0] = 255
        # pooled over two frames the MSE halves
        self.assertAlmostEqual(sequence_psnr(a, b), 10 * math.log10(512), places=6)
        self.assertAlmostEqual(mean_frame_psnr(a, b), 10 * math.log10(256), places=6)
        self.assertEqual(sequence_psnr(a, a), INF)
        with self.assertRaises(InvalidDims):
            sequence_psnr(a, RawVideo(16, 16, frames=a.frames[:1]))


class MvDiffTests(SimpleTestCase):

    def setUp(self):
        self.video = moving_gradient(width=96, height=64, frames=13, noise=3, seed=8)
        self.plain = encode_video(self.video, FAST)

    def test_self_comparison(self):
        report = mv_diff_report(self.plain, self.plain)
        self.assertEqual(len(report.entries), 13 * 24)
        self.assertEqual((report.max_ddx, report.max_ddy), (0, 0))
        self.assertEqual(report.changed(), [])

    def test_embedded_x_deltas(self):
        stego = embed(self.video, b'mv', EmbedMode.ALL_MB_X, FAST)
        report = mv_diff_report(self.plain, stego)
        # frame 1 is predicted from the same I-frame in both encodes
        first_p = [e for e in report.entries if e.frame == 1]
        self.assertTrue(any(e.ddx == 4 for e in first_p))
        for entry in first_p:
            self.assertEqual(entry.mode_a, entry.mode_b)
            self.assertIn(entry.ddx, (0, 4))
            self.assertEqual(entry.ddy, 0)

    def test_inverted_deltas(self):
        inverted = invert_motion_vectors(self.plain)
        report = mv_diff_report(self.plain, inverted)
        plain_records = [r for _, _, records in iter_macroblocks(self.plain) for r in records]
        for entry, record in zip(report.entries, plain_records):
            if record.mode == MacroblockMode.INTER:
                self.assertEqual(entry.ddx, 2 * abs(record.mv.dx))
                self.assertEqual(entry.ddy, 2 * abs(record.mv.dy))
            else:
                self.assertEqual((entry.ddx, entry.ddy), (0, 0))

    def test_structure_mismatch(self):
        shorter = self.plain.with_frames(self.plain.frames[:5])
        with self.assertRaises(InvalidComparison):
            mv_diff_report(self.plain, shorter)
        other = encode_video(moving_gradient(width=64, height=64, frames=13), FAST)
        with self.assertRaises(InvalidComparison):
            mv_diff_report(self.plain, other)

    def test_csv(self):
        lines = mv_diff_report(self.plain, self.plain).to_csv().splitlines()
        self.assertEqual(lines[0], 'frame,mb,mode_a,mode_b,ddx,ddy')
        self.assertEqual(len(lines), 1 + 13 * 24)
        self.assertEqual(lines[1], '0,0,intra,intra,0,0')


class SnapshotTests(SimpleTestCase):

    def test_grey_frame(self):
        rgb = frame_to_rgb(Frame.blank(17, 9, value=128))
        self.assertEqual(rgb.shape, (9, 17, 3))
        self.assertTrue((rgb == 128).all())

    def test_export(self):
        video = moving_gradient(width=48, height=32, frames=3)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'frame.png')
            export_frame_png(video, 2, path)
            with Image.open(path) as image:
                self.assertEqual(image.size, (48, 32))
                self.assertEqual(image.mode, 'RGB')
            with self.assertRaises(InvalidParams):
                export_frame_png(video, 3, path)
