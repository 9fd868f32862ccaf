import random

from django.test import SimpleTestCase

from analysis.quality import sequence_psnr
from codec.decoder import decode_video, iter_macroblocks
from codec.encoder import encode_video
from codec.motion import MacroblockMode, MotionVector
from codec.params import CodecParams
from codec.synthetic import moving_gradient, random_video, static_blocks
from formats.container import write_container
from mvstego.exceptions import CorruptPayload, InsufficientCapacity, InvalidKey, KeyRequired, NoPayloadFound
from .ber import measure_coeff_ber
from .embedding import embed, embed_coeff, estimate_capacity, extract, invert_motion_vectors
from .modes import EmbedMode
from .payload import HEADER_BITS, frame_payload, parse_payload, seal_payload
from .strategies import (
    CoefficientStrategy, MotionVectorStrategy, get_strategy, level_embed_bit, level_extract_bit,
    mv_embed_bit, mv_extract_bit,
)

FAST = CodecParams(search_range=8)
KEY = bytes(range(16))
NONCE = bytes(range(100, 116))


def gradient(**kwargs):
    options = {'width': 160, 'height': 128, 'frames': 13, 'noise': 3, 'seed': 1}
    options.update(kwargs)
    return moving_gradient(**options)


class EmbedModeTests(SimpleTestCase):

    def test_wire_values(self):
        self.assertEqual([int(m) for m in EmbedMode], [0, 1, 2, 3, 4])

    def test_from_label(self):
        self.assertEqual(EmbedMode.from_label('all-mb-y'), EmbedMode.ALL_MB_Y)
        self.assertEqual(EmbedMode.from_label('coeff'), EmbedMode.COEFF)

    def test_registry_covers_every_mode(self):
        for mode in EmbedMode:
            self.assertEqual(get_strategy(mode).mode, mode)
        self.assertIsInstance(get_strategy(EmbedMode.FIRST_MB_Y), MotionVectorStrategy)
        self.assertIsInstance(get_strategy(EmbedMode.COEFF), CoefficientStrategy)


class PayloadFramingTests(SimpleTestCase):

    def test_empty_body_is_header_only(self):
        bits = frame_payload(b'', EmbedMode.ALL_MB_X)
        self.assertEqual(len(bits), 104)
        self.assertEqual(HEADER_BITS, 104)

    def test_bits_are_msb_first(self):
        bits = frame_payload(b'', EmbedMode.ALL_MB_X)
        # 0x53 'S'
        self.assertEqual(bits[:8], [0, 1, 0, 1, 0, 0, 1, 1])

    def test_round_trip(self):
        rng = random.Random(3)
        for _ in range(20):
            body = rng.randbytes(rng.randrange(0, 80))
            mode = rng.choice(list(EmbedMode))
            frame = parse_payload(frame_payload(body, mode) + [1, 0, 1])
            self.assertEqual(frame.body, body)
            self.assertEqual(frame.mode, mode)
            self.assertFalse(frame.encrypted)

    def test_flipped_body_bit(self):
        bits = frame_payload(b'hidden', EmbedMode.COEFF)
        bits[72 + 5] ^= 1
        with self.assertRaises(CorruptPayload):
            parse_payload(bits)

    def test_bad_magic(self):
        bits = frame_payload(b'hidden', EmbedMode.COEFF)
        bits[0] ^= 1
        with self.assertRaises(NoPayloadFound):
            parse_payload(bits)

    def test_length_beyond_available_bits(self):
        bits = frame_payload(b'hidden', EmbedMode.COEFF)
        with self.assertRaises(NoPayloadFound):
            parse_payload(bits[:-1])

    def test_mode_mismatch(self):
        bits = frame_payload(b'x', EmbedMode.ALL_MB_X)
        with self.assertRaises(NoPayloadFound):
            parse_payload(bits, expected_mode=EmbedMode.ALL_MB_Y)

    def test_encrypted_frame(self):
        frame = seal_payload(b'attack at dawn', EmbedMode.ALL_MB_X, key=KEY, nonce=NONCE)
        self.assertEqual(len(frame.to_bits()), 104 + 128 + 8 * 14)
        self.assertNotEqual(frame.body, b'attack at dawn')

        parsed = parse_payload(frame.to_bits())
        self.assertTrue(parsed.encrypted)
        self.assertEqual(parsed.nonce, NONCE)
        self.assertEqual(parsed.open(KEY), b'attack at dawn')
        with self.assertRaises(KeyRequired):
            parsed.open()
        with self.assertRaises(CorruptPayload):
            parsed.open(bytes(16))

    def test_nonce_drawn_when_omitted(self):
        first = seal_payload(b'attack at dawn', EmbedMode.ALL_MB_X, key=KEY)
        second = seal_payload(b'attack at dawn', EmbedMode.ALL_MB_X, key=KEY)
        self.assertEqual(len(first.nonce), 16)
        self.assertNotEqual(first.nonce, second.nonce)
        self.assertEqual(parse_payload(first.to_bits()).open(KEY), b'attack at dawn')
        with self.assertRaises(InvalidKey):
            seal_payload(b'x', EmbedMode.ALL_MB_X, key=KEY, nonce=bytes(8))


class BitChannelTests(SimpleTestCase):

    def test_mv_examples(self):
        self.assertEqual(mv_embed_bit(16, 1), 20)
        self.assertEqual(mv_embed_bit(16, 0), 16)
        self.assertEqual(mv_embed_bit(-16, 1), -20)
        self.assertEqual(mv_embed_bit(0, 1), 4)
        self.assertEqual(mv_extract_bit(20), 1)
        self.assertEqual(mv_extract_bit(16), 0)

    def test_mv_embed_is_at_most_one_pel(self):
        for component in range(-64, 65, 4):
            for bit in (0, 1):
                self.assertLessEqual(abs(mv_embed_bit(component, bit) - component), 4)

    def test_mv_exhaustive(self):
        for component in range(-256, 257):
            for bit in (0, 1):
                self.assertEqual(mv_extract_bit(mv_embed_bit(component, bit)), bit)

    def test_level_parity(self):
        for level in range(-40, 41):
            if level == 0:
                continue
            for bit in (0, 1):
                embedded = level_embed_bit(level, bit)
                self.assertEqual(level_extract_bit(embedded), bit)
                self.assertGreaterEqual(abs(embedded), abs(level))
                self.assertEqual(embedded > 0, level > 0)


class EmbedExtractTests(SimpleTestCase):

    def test_all_mb_round_trips(self):
        video = gradient()
        payload = random.Random(5).randbytes(32)
        for mode in (EmbedMode.ALL_MB_X, EmbedMode.ALL_MB_Y):
            with self.subTest(mode=mode.label):
                container = embed(video, payload, mode, FAST)
                self.assertEqual(extract(container), payload)

    def test_coeff_round_trip(self):
        video = gradient()
        payload = random.Random(6).randbytes(32)
        self.assertEqual(extract(embed(video, payload, EmbedMode.COEFF, FAST)), payload)
        self.assertEqual(extract(embed_coeff(video, payload, FAST)), payload)

    def test_first_mb_round_trips(self):
        video = moving_gradient(width=32, height=32, frames=200, velocity=(1, 0), noise=3, seed=2)
        params = CodecParams(gop_size=255, search_range=4)
        for mode in (EmbedMode.FIRST_MB_X, EmbedMode.FIRST_MB_Y):
            with self.subTest(mode=mode.label):
                self.assertEqual(extract(embed(video, b'ok', mode, params)), b'ok')

    def test_header_only_payload(self):
        video = gradient(width=96, height=64)
        container = embed(video, b'', EmbedMode.ALL_MB_X, FAST)
        self.assertEqual(extract(container), b'')

    def test_full_size_round_trip(self):
        video = moving_gradient(width=320, height=240, frames=60, noise=3)
        payload = random.Random(64).randbytes(64)
        for mode in (EmbedMode.ALL_MB_X, EmbedMode.ALL_MB_Y, EmbedMode.COEFF):
            with self.subTest(mode=mode.label):
                self.assertEqual(extract(embed(video, payload, mode, CodecParams())), payload)

    def test_first_mb_capacity_on_short_clip(self):
        # 60 frames at gop 12 leave 55 P-frames, far fewer than 616 framed bits
        video = gradient(width=64, height=48, frames=60)
        with self.assertRaises(InsufficientCapacity) as caught:
            embed(video, bytes(64), EmbedMode.FIRST_MB_X, FAST)
        self.assertEqual(caught.exception.required, 616)
        self.assertLessEqual(caught.exception.placed, 55)

    def test_payload_larger_than_capacity(self):
        video = gradient(width=64, height=48)
        with self.assertRaises(InsufficientCapacity) as caught:
            embed(video, bytes(100), EmbedMode.ALL_MB_X, FAST)
        self.assertLess(caught.exception.placed, caught.exception.required)

    def test_encrypted_round_trip(self):
        video = gradient()
        container = embed(video, b'secret words', EmbedMode.ALL_MB_X, FAST, key=KEY, nonce=NONCE)
        self.assertEqual(extract(container, key=KEY), b'secret words')
        with self.assertRaises(KeyRequired):
            extract(container)
        with self.assertRaises(CorruptPayload):
            extract(container, key=bytes(16))

    def test_encrypted_without_explicit_nonce(self):
        container = embed(gradient(), b'secret words', EmbedMode.ALL_MB_X, FAST, key=KEY)
        self.assertEqual(extract(container, key=KEY), b'secret words')

    def test_plain_transcode_has_no_payload(self):
        with self.assertRaises(NoPayloadFound):
            extract(encode_video(gradient(), FAST))

    def test_hook_never_sees_skip_or_intra(self):
        for seed in range(10):
            video = random_video(seed)
            strategy = get_strategy(EmbedMode.ALL_MB_X, [random.Random(seed).randrange(2) for _ in range(500)])
            seen = []

            def hook(frame_index, frame_type, mb_index, mode, mv):
                seen.append(mode)
                return strategy.mb_hook(frame_index, frame_type, mb_index, mode, mv)

            encode_video(video, FAST, mb_hook=hook)
            self.assertTrue(all(mode == MacroblockMode.INTER for mode in seen))

    def test_first_p_frame_changes_only_x_by_one_pel(self):
        video = gradient()
        plain = encode_video(video, FAST)
        stego = embed(video, bytes(20), EmbedMode.ALL_MB_X, FAST)
        # frame 1 is predicted from the same I-frame in both encodes
        plain_records = list(iter_macroblocks(plain))[1][2]
        stego_records = list(iter_macroblocks(stego))[1][2]
        for a, b in zip(plain_records, stego_records):
            self.assertEqual(a.mode, b.mode)
            if a.mode == MacroblockMode.INTER:
                self.assertEqual(a.mv.dy, b.mv.dy)
                self.assertIn(abs(a.mv.dx - b.mv.dx), (0, 4))


class CapacityTests(SimpleTestCase):

    def test_static_video_has_no_capacity(self):
        video = static_blocks()
        for mode in EmbedMode:
            report = estimate_capacity(video, FAST, mode)
            self.assertEqual(report.estimated_bits, 0)
            self.assertTrue(report.caveat)

    def test_first_mb_bound(self):
        video = gradient(frames=25)
        report = estimate_capacity(video, FAST, EmbedMode.FIRST_MB_X)
        self.assertLessEqual(report.estimated_bits, 22)
        self.assertEqual(len(report.per_frame_bits), 25)
        self.assertEqual(report.per_frame_bits[0], 0)
        self.assertEqual(report.per_frame_bits[12], 0)
        self.assertEqual(report.per_frame_bits[24], 0)

    def test_all_mb_counts_inter_macroblocks(self):
        video = gradient()
        report = estimate_capacity(video, FAST, EmbedMode.ALL_MB_X)
        inter = sum(
            record.mode == MacroblockMode.INTER
            for _, _, records in iter_macroblocks(encode_video(video, FAST))
            for record in records
        )
        self.assertEqual(report.estimated_bits, inter)
        self.assertEqual(report.estimated_bits, sum(report.per_frame_bits))
        self.assertEqual(report.max_payload_bytes(), (inter - 104) // 8)

    def test_gop_one_has_no_mv_capacity(self):
        params = CodecParams(gop_size=1, search_range=8)
        video = gradient(width=64, height=48, frames=5)
        for mode in (EmbedMode.FIRST_MB_X, EmbedMode.FIRST_MB_Y, EmbedMode.ALL_MB_X, EmbedMode.ALL_MB_Y):
            self.assertEqual(estimate_capacity(video, params, mode).estimated_bits, 0)


class QualityTests(SimpleTestCase):

    def setUp(self):
        self.video = gradient(frames=25)
        self.plain = encode_video(self.video, FAST)
        self.plain_psnr = sequence_psnr(self.video, decode_video(self.plain))

    def test_embedding_is_transparent(self):
        report = estimate_capacity(self.video, FAST, EmbedMode.ALL_MB_X)
        payload = random.Random(9).randbytes(report.max_payload_bytes() // 2)
        stego = embed(self.video, payload, EmbedMode.ALL_MB_X, FAST)
        stego_psnr = sequence_psnr(self.video, decode_video(stego))
        self.assertLessEqual(self.plain_psnr - stego_psnr, 2.0)

    def test_inverted_vectors_are_visible(self):
        inverted = invert_motion_vectors(self.plain)
        inverted_psnr = sequence_psnr(self.video, decode_video(inverted))
        self.assertGreaterEqual(self.plain_psnr - inverted_psnr, 6.0)

    def test_inversion_is_an_involution(self):
        twice = invert_motion_vectors(invert_motion_vectors(self.plain))
        self.assertEqual(write_container(twice), write_container(self.plain))

    def test_inversion_of_static_video(self):
        plain = encode_video(static_blocks(), FAST)
        self.assertEqual(write_container(invert_motion_vectors(plain)), write_container(plain))

    def test_inversion_negates_vectors(self):
        inverted = invert_motion_vectors(self.plain)
        for (_, _, a), (_, _, b) in zip(iter_macroblocks(self.plain), iter_macroblocks(inverted)):
            for ra, rb in zip(a, b):
                self.assertEqual(ra.mode, rb.mode)
                if ra.mode == MacroblockMode.INTER:
                    self.assertEqual(rb.mv, MotionVector(-ra.mv.dx, -ra.mv.dy))


class CoefficientErrorRateTests(SimpleTestCase):

    def setUp(self):
        self.video = gradient(frames=20, noise=8, seed=4)
        rng = random.Random(1000)
        self.bits = [rng.randrange(2) for _ in range(1000)]

    def test_pre_quantisation_bits_are_destroyed(self):
        report = measure_coeff_ber(self.video, self.bits, CodecParams(qp=8, search_range=8), pre_quant=True)
        self.assertEqual(report.placed, 1000)
        self.assertGreater(report.ber, 0.10)

    def test_pre_quantisation_survives_fine_quantiser(self):
        report = measure_coeff_ber(self.video, self.bits, CodecParams(qp=1, search_range=8), pre_quant=True)
        self.assertLess(report.ber, 0.01)

    def test_post_quantisation_is_lossless(self):
        report = measure_coeff_ber(self.video, self.bits, CodecParams(qp=8, search_range=8))
        self.assertEqual(report.errors, 0)
        self.assertEqual(report.ber, 0.0)
