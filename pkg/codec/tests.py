import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from formats.container import FrameType, write_container
from formats.video import RawVideo
from mvstego.exceptions import CorruptContainer, HookRangeError, InvalidDims, InvalidParams, Unsupported
from .decoder import decode_video, iter_macroblocks
from .encoder import VideoEncoder, encode_video
from .frames import crop_frame, join_blocks, pad_frame, partition, split_blocks
from .macroblock import (
    MacroblockRecord, decode_macroblock, encode_macroblock, zero_levels,
)
from .motion import (
    MacroblockMode, MotionVector, estimate_frame_motion, motion_compensate, motion_estimate,
)
from .params import CodecParams
from .synthetic import moving_gradient, random_video, static_blocks
from formats.bits import se_encode, ue_encode
from .transform import ZIGZAG, dct8, dequantise, idct8, quantise


def luma_psnr(a, b):
    mse = np.mean([np.mean((fa.y.astype(float) - fb.y.astype(float)) ** 2) for fa, fb in zip(a, b)])
    return math.inf if mse == 0 else 10 * math.log10(255 ** 2 / mse)


class CodecParamsTests(SimpleTestCase):

    def test_defaults(self):
        params = CodecParams()
        self.assertEqual((params.gop_size, params.qp, params.search_range), (12, 8, 16))
        self.assertEqual(params.intra_sad_threshold, 3072)

    def test_invalid(self):
        with self.assertRaises(InvalidParams):
            CodecParams(qp=0)
        with self.assertRaises(InvalidParams):
            CodecParams(qp=64)
        with self.assertRaises(InvalidParams):
            CodecParams(gop_size=0)
        with self.assertRaises(InvalidParams):
            CodecParams(search_range=-1)

    @override_settings(MVSTEGO={'GOP_SIZE': 6, 'QP': 4, 'SEARCH_RANGE': 7, 'INTRA_SAD_THRESHOLD': 100})
    def test_from_settings(self):
        params = CodecParams.from_settings(qp=10, gop_size=None)
        self.assertEqual(params, CodecParams(gop_size=6, qp=10, search_range=7, intra_sad_threshold=100))


class GeometryTests(SimpleTestCase):

    def test_partition_counts(self):
        self.assertEqual(len(partition(1920, 1088)), 8160)
        self.assertEqual(partition(16, 16), [(0, 0)])
        self.assertEqual(len(partition(320, 240)), 300)

    def test_partition_raster_order(self):
        self.assertEqual(partition(32, 32), [(0, 0), (16, 0), (0, 16), (16, 16)])

    def test_partition_rejects_unaligned(self):
        with self.assertRaises(InvalidDims):
            partition(1920, 1080)

    def test_pad_aligned_is_unchanged(self):
        frame = static_blocks(32, 32, frames=1)[0]
        self.assertEqual(pad_frame(frame), frame)

    def test_pad_replicates_rows(self):
        video = moving_gradient(width=32, height=24, frames=1)
        padded = pad_frame(video[0])
        self.assertEqual(padded.y.shape, (32, 32))
        for row in range(24, 32):
            np.testing.assert_array_equal(padded.y[row], video[0].y[23])

    def test_crop_inverts_pad(self):
        frame = moving_gradient(width=30, height=18, frames=1)[0]
        self.assertEqual(crop_frame(pad_frame(frame), 30, 18), frame)

    def test_blocks_round_trip(self):
        frame = pad_frame(random_video(4, width=48, height=32, frames=1)[0])
        blocks = split_blocks(frame)
        self.assertEqual(blocks.shape, (6, 6, 8, 8))
        np.testing.assert_array_equal(blocks[1, 1], frame.y[0:8, 24:32])
        np.testing.assert_array_equal(blocks[1, 2], frame.y[8:16, 16:24])
        self.assertEqual(join_blocks(blocks, 48, 32), frame)


class MotionTests(SimpleTestCase):

    def setUp(self):
        pair = moving_gradient(width=96, height=80, frames=2, velocity=(4, 0))
        # content moves right by 4, so frame 0's blocks sit 4 pels to the right in frame 1
        self.cur, self.ref = pad_frame(pair[0]), pad_frame(pair[1])
        self.params = CodecParams(search_range=8)

    def test_identical_frames(self):
        decision = motion_estimate(self.cur.y, self.cur.y, (32, 32), self.params)
        self.assertEqual(decision.mode, MacroblockMode.INTER)
        self.assertEqual(decision.mv, MotionVector(0, 0))
        self.assertEqual(decision.sad, 0)

    def test_global_shift(self):
        decision = motion_estimate(self.cur.y, self.ref.y, (48, 32), self.params)
        self.assertEqual(decision.mv, MotionVector(16, 0))
        self.assertEqual(decision.sad, 0)

    def test_noise_goes_intra(self):
        rng = np.random.default_rng(5)
        noise = rng.integers(0, 256, (32, 32), dtype=np.uint8)
        flat = np.full((32, 32), 128, dtype=np.uint8)
        decision = motion_estimate(noise, flat, (16, 16), self.params)
        self.assertGreater(decision.sad, 3072)
        self.assertEqual(decision.mode, MacroblockMode.INTRA)
        self.assertIsNone(decision.mv)

    def test_tie_break_prefers_small_displacement(self):
        flat = np.full((48, 48), 90, dtype=np.uint8)
        decision = motion_estimate(flat, flat, (16, 16), self.params)
        self.assertEqual(decision.mv, MotionVector(0, 0))

    def test_candidates_stay_inside_plane(self):
        decision = motion_estimate(self.cur.y, self.ref.y, (0, 0), self.params)
        px, py = decision.mv.pels if decision.mv else (0, 0)
        self.assertGreaterEqual(px, 0)
        self.assertGreaterEqual(py, 0)

    def test_frame_search_matches_block_search(self):
        for seed in range(4):
            video = random_video(seed, width=48, height=32, frames=2)
            cur, ref = pad_frame(video[1]), pad_frame(video[0])
            params = CodecParams(search_range=4)
            expected = [motion_estimate(cur.y, ref.y, origin, params) for origin in partition(48, 32)]
            self.assertEqual(estimate_frame_motion(cur.y, ref.y, params), expected)
        self.assertEqual(
            estimate_frame_motion(self.cur.y, self.ref.y, self.params),
            [motion_estimate(self.cur.y, self.ref.y, o, self.params) for o in partition(96, 80)],
        )

    def test_frame_search_in_small_passes(self):
        video = random_video(9, width=48, height=32, frames=2)
        cur, ref = pad_frame(video[1]), pad_frame(video[0])
        for radius in (3, 20):
            params = CodecParams(search_range=radius)
            expected = [motion_estimate(cur.y, ref.y, origin, params) for origin in partition(48, 32)]
            for max_elements in (1, 48 * 32 * 5):
                with self.subTest(radius=radius, max_elements=max_elements):
                    self.assertEqual(estimate_frame_motion(cur.y, ref.y, params, max_elements), expected)

    def test_compensate_zero_is_colocated(self):
        luma, cb, cr = motion_compensate(self.ref, MotionVector(0, 0), (32, 16))
        np.testing.assert_array_equal(luma, self.ref.y[16:32, 32:48])
        np.testing.assert_array_equal(cb, self.ref.cb[8:16, 16:24])

    def test_compensate_shift_gives_zero_residual(self):
        luma, _, _ = motion_compensate(self.ref, MotionVector(16, 0), (48, 32))
        np.testing.assert_array_equal(luma, self.cur.y[32:48, 48:64])

    def test_one_pel_is_one_column(self):
        zero, _, _ = motion_compensate(self.ref, MotionVector(0, 0), (32, 32))
        one, _, _ = motion_compensate(self.ref, MotionVector(4, 0), (32, 32))
        np.testing.assert_array_equal(one[:, :-1], zero[:, 1:])

    def test_chroma_offset_rounds_toward_zero(self):
        _, cb_pos, _ = motion_compensate(self.ref, MotionVector(12, 0), (32, 32))
        _, cb_neg, _ = motion_compensate(self.ref, MotionVector(-12, 0), (32, 32))
        np.testing.assert_array_equal(cb_pos, self.ref.cb[16:24, 17:25])
        np.testing.assert_array_equal(cb_neg, self.ref.cb[16:24, 15:23])

    def test_out_of_bounds_reads_clamp(self):
        luma, _, _ = motion_compensate(self.ref, MotionVector(-8, -8), (0, 0))
        np.testing.assert_array_equal(luma[0, 2:], self.ref.y[0, 0:14])
        np.testing.assert_array_equal(luma[:, 0], luma[:, 1])


class TransformTests(SimpleTestCase):

    def test_constant_residual(self):
        coeffs = dct8(np.full((8, 8), 133), predictor=128)
        self.assertAlmostEqual(coeffs[0, 0], 40.0, places=9)
        coeffs[0, 0] = 0
        self.assertLess(np.abs(coeffs).max(), 1e-9)

    def test_zero_residual(self):
        self.assertFalse(np.any(np.abs(dct8(np.zeros((8, 8)))) > 0))

    def test_inverse(self):
        block = np.random.default_rng(6).integers(-255, 256, (8, 8))
        self.assertLess(np.abs(idct8(dct8(block)) - block).max(), 1e-9)

    def test_quantise_examples(self):
        self.assertEqual(quantise(0.0, 17), 0)
        self.assertEqual(quantise(150.0, 8), 19)
        self.assertEqual(dequantise(19, 8), 152)
        self.assertEqual(quantise(-12.0, 8), -2)
        self.assertEqual(quantise(4.0, 8), 1)

    def test_quantisation_error_bound(self):
        values = np.arange(-223, 151, dtype=np.float64)
        for qp in (1, 8, 32):
            error = np.abs(values - dequantise(quantise(values, qp), qp))
            self.assertLessEqual(error.max(), qp / 2)

    def test_zigzag_is_a_permutation(self):
        self.assertEqual(sorted(ZIGZAG.tolist()), list(range(64)))
        self.assertEqual(ZIGZAG[:6].tolist(), [0, 1, 8, 16, 9, 2])


class MacroblockCodingTests(SimpleTestCase):

    def test_skip_codeword(self):
        self.assertEqual(encode_macroblock(MacroblockRecord(mode=MacroblockMode.SKIP)), ue_encode(2))

    def test_inter_layout(self):
        record = MacroblockRecord(mode=MacroblockMode.INTER, mv=MotionVector(16, 0))
        expected = ue_encode(0) + se_encode(16) + se_encode(0) + ue_encode(0) * 6
        self.assertEqual(encode_macroblock(record), expected)

    def test_random_round_trip(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            mode = MacroblockMode(int(rng.integers(0, 3)))
            levels = zero_levels()
            if mode != MacroblockMode.SKIP:
                mask = rng.random(levels.shape) < 0.1
                levels[mask] = rng.integers(-40, 41, int(mask.sum()))
            mv = MotionVector(*(int(v) * 4 for v in rng.integers(-17, 18, 2))) \
                if mode == MacroblockMode.INTER else None
            record = MacroblockRecord(mode=mode, mv=mv, levels=levels)
            self.assertEqual(decode_macroblock(encode_macroblock(record)), record)

    def test_zero_level_is_corrupt(self):
        bits = ue_encode(1) + ue_encode(1) + ue_encode(0) + se_encode(0)
        with self.assertRaises(CorruptContainer):
            decode_macroblock(bits)

    def test_index_out_of_range_is_corrupt(self):
        bits = ue_encode(1) + ue_encode(1) + ue_encode(64) + se_encode(3)
        with self.assertRaises(CorruptContainer):
            decode_macroblock(bits)

    def test_truncated_is_corrupt(self):
        with self.assertRaises(CorruptContainer):
            decode_macroblock(ue_encode(0) + se_encode(4))

    def test_skip_and_intra_carry_no_vector(self):
        with self.assertRaises(ValueError):
            MacroblockRecord(mode=MacroblockMode.SKIP, mv=MotionVector(0, 0))
        with self.assertRaises(ValueError):
            MacroblockRecord(mode=MacroblockMode.INTRA, mv=MotionVector(4, 0))
        with self.assertRaises(ValueError):
            MacroblockRecord(mode=MacroblockMode.INTER)

    def test_only_inter_has_motion_vector(self):
        self.assertTrue(MacroblockRecord(mode=MacroblockMode.INTER, mv=MotionVector(0, 0)).has_motion_vector)
        self.assertFalse(MacroblockRecord(mode=MacroblockMode.INTRA).has_motion_vector)
        self.assertFalse(MacroblockRecord(mode=MacroblockMode.SKIP).has_motion_vector)


class VideoCodingTests(SimpleTestCase):

    def test_static_video_gop_structure(self):
        video = static_blocks(64, 48, frames=13)
        container = encode_video(video, CodecParams(gop_size=12, qp=8))
        types = [frame.frame_type for frame in container.frames]
        self.assertEqual(types, [FrameType.I] + [FrameType.P] * 11 + [FrameType.I])
        for frame_index, frame_type, records in iter_macroblocks(container):
            modes = {record.mode for record in records}
            if frame_type == FrameType.P:
                self.assertEqual(modes, {MacroblockMode.SKIP})
            else:
                self.assertEqual(modes, {MacroblockMode.INTRA})

    def test_static_video_decodes_exactly(self):
        video = static_blocks(64, 48, frames=4)
        self.assertEqual(decode_video(encode_video(video)), video)

    def test_quality_on_moving_gradient(self):
        video = moving_gradient(width=96, height=64, frames=13)
        decoded = decode_video(encode_video(video, CodecParams(qp=8, search_range=8)))
        self.assertGreaterEqual(luma_psnr(video, decoded), 30.0)

    def test_display_size_restored(self):
        video = moving_gradient(width=40, height=20, frames=3)
        decoded = decode_video(encode_video(video, CodecParams(search_range=4)))
        self.assertEqual((decoded.width, decoded.height), (40, 20))
        self.assertEqual([f.pts for f in decoded], [0, 1, 2])

    def test_frame_rate_beyond_header_range(self):
        source = moving_gradient(width=16, height=16, frames=2)
        video = RawVideo(16, 16, fps_num=120000, fps_den=1001, frames=source.frames)
        with self.assertRaises(Unsupported):
            encode_video(video, CodecParams(search_range=4))

    def test_flipping_vector_bit_still_decodes(self):
        video = moving_gradient(width=64, height=48, frames=6)
        seen = []

        def flip(frame_index, frame_type, mb_index, mode, mv):
            seen.append(mode)
            return MotionVector(mv.dx ^ 4, mv.dy)

        container = encode_video(video, CodecParams(search_range=8), mb_hook=flip)
        self.assertTrue(seen)
        self.assertEqual(set(seen), {MacroblockMode.INTER})
        self.assertEqual(len(decode_video(container)), 6)

    def test_hook_range_is_enforced(self):
        video = moving_gradient(width=32, height=32, frames=3)
        with self.assertRaises(HookRangeError):
            encode_video(video, CodecParams(search_range=4),
                         mb_hook=lambda *args: MotionVector(4 * 6, 0))

    def test_tap_sees_what_hook_emitted(self):
        video = moving_gradient(width=64, height=48, frames=8, noise=2)
        emitted, observed = [], []

        def hook(frame_index, frame_type, mb_index, mode, mv):
            new_mv = MotionVector(mv.dx | 4, mv.dy) if mb_index % 2 else mv
            emitted.append((frame_index, mb_index, new_mv))
            return new_mv

        def tap(frame_index, frame_type, mb_index, mode, mv):
            if mode == MacroblockMode.INTER:
                observed.append((frame_index, mb_index, mv))

        decode_video(encode_video(video, CodecParams(search_range=8), mb_hook=hook), mb_tap=tap)
        self.assertEqual(observed, emitted)

    def test_encoder_and_decoder_agree(self):
        for seed in range(25):
            video = random_video(seed)
            rng = np.random.default_rng(seed)
            params = CodecParams(gop_size=int(rng.integers(1, 5)), qp=int(rng.choice([1, 4, 8, 20])),
                                 search_range=int(rng.integers(0, 5)))
            encoder = VideoEncoder(params=params)
            container = encoder.encode(video)
            decoded = decode_video(container, crop=False)
            self.assertEqual(len(decoded), len(encoder.reconstructed))
            for ours, theirs in zip(encoder.reconstructed, decoded):
                self.assertEqual(ours, theirs, f'drift in random video {seed}')

    def test_decoding_is_deterministic(self):
        container = encode_video(moving_gradient(width=48, height=32, frames=5), CodecParams(search_range=4))
        self.assertEqual(decode_video(container), decode_video(container))

    def test_encoding_is_deterministic(self):
        video = random_video(11, width=48, height=32, frames=5)
        params = CodecParams(gop_size=3, search_range=4)
        self.assertEqual(write_container(encode_video(video, params)),
                         write_container(encode_video(video, params)))

    def test_gop_one_is_all_intra(self):
        video = moving_gradient(width=32, height=32, frames=4)
        calls = []
        container = encode_video(video, CodecParams(gop_size=1), mb_hook=lambda *a: calls.append(a) or a[-1])
        self.assertTrue(all(f.frame_type == FrameType.I for f in container.frames))
        self.assertEqual(calls, [])
