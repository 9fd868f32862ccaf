import struct

import numpy as np
from django.test import SimpleTestCase

from mvstego.exceptions import (
    CorruptContainer, EmptyInput, NotAStegoContainer, ParseError, TruncatedInput, Unsupported,
)
from .bits import BitReader, BitWriter, se_decode, se_encode, ue_decode, ue_encode
from .container import (
    ContainerHeader, EncodedFrame, FrameType, StegoContainer, read_container, write_container,
)
from .pnm import PnmImage, read_pnm, write_pnm
from .sizes import raw_frame_size
from .video import Frame, RawVideo
from .wav import WavFormat, read_wav, write_wav
from .y4m import read_y4m, stream_header, write_y4m


def random_video(rng, width=16, height=16, frames=2):
    return RawVideo(
        width=width, height=height, fps_num=25, fps_den=1,
        frames=[
            Frame(
                y=rng.integers(0, 256, (height, width), dtype=np.uint8),
                cb=rng.integers(0, 256, ((height + 1) // 2, (width + 1) // 2), dtype=np.uint8),
                cr=rng.integers(0, 256, ((height + 1) // 2, (width + 1) // 2), dtype=np.uint8),
                pts=i,
            )
            for i in range(frames)
        ],
    )


class Y4MTests(SimpleTestCase):

    def test_constant_frames(self):
        frame_bytes = b'FRAME\n' + bytes([128]) * 384
        data = b'YUV4MPEG2 W16 H16 F30:1 Ip A1:1 C420jpeg\n' + frame_bytes * 2
        video = read_y4m(data)
        self.assertEqual(len(video), 2)
        self.assertEqual([f.pts for f in video], [0, 1])
        for frame in video:
            self.assertTrue((frame.y == 128).all())
            self.assertTrue((frame.cb == 128).all())

    def test_header_fields(self):
        data = b'YUV4MPEG2 W320 H240 F30:1\n' + b'FRAME\n' + bytes(320 * 240 * 3 // 2)
        video = read_y4m(data)
        self.assertEqual((video.width, video.height), (320, 240))
        self.assertEqual((video.fps_num, video.fps_den), (30, 1))

    def test_truncated_frame(self):
        data = b'YUV4MPEG2 W16 H16 F30:1\n' + b'FRAME\n' + bytes(200)
        with self.assertRaises(TruncatedInput):
            read_y4m(data)

    def test_bad_signature(self):
        with self.assertRaises(ParseError):
            read_y4m(b'YUV4MPEG W16 H16\n')

    def test_unsupported_colourspace(self):
        with self.assertRaises(Unsupported):
            read_y4m(b'YUV4MPEG2 W16 H16 F30:1 C444\n')

    def test_round_trip(self):
        video = random_video(np.random.default_rng(1), width=18, height=14, frames=3)
        self.assertEqual(read_y4m(write_y4m(video)), video)

    def test_output_size(self):
        video = random_video(np.random.default_rng(2), frames=1)
        data = write_y4m(video)
        self.assertEqual(len(data), len(stream_header(video)) + len(b'FRAME\n') + 384)

    def test_empty_video(self):
        with self.assertRaises(EmptyInput):
            write_y4m(RawVideo(width=16, height=16))


class WavTests(SimpleTestCase):

    def setUp(self):
        self.fmt = WavFormat.pcm(channels=1, sample_rate=8000, bits_per_sample=16)
        self.samples = bytes(range(200))

    def test_canonical_file(self):
        data = write_wav(self.fmt, self.samples)
        self.assertEqual(len(data), 44 + len(self.samples))
        fmt, samples, trailing = read_wav(data)
        self.assertEqual(fmt, self.fmt)
        self.assertEqual(samples, self.samples)
        self.assertEqual(trailing, b'')

    def test_trailing_bytes_surface(self):
        data = write_wav(self.fmt, self.samples) + b'hello'
        _, samples, trailing = read_wav(data)
        self.assertEqual(samples, self.samples)
        self.assertEqual(trailing, b'hello')

    def test_declared_length_too_long(self):
        data = bytearray(write_wav(self.fmt, self.samples))
        struct.pack_into('<I', data, 40, 10_000)
        with self.assertRaises(ParseError):
            read_wav(bytes(data))

    def test_zero_samples(self):
        data = write_wav(self.fmt, b'')
        self.assertEqual(len(data), 44)
        self.assertEqual(read_wav(data), (self.fmt, b'', b''))

    def test_round_trip_with_trailing(self):
        parts = (self.fmt, self.samples, b'\x00tail\xff')
        self.assertEqual(read_wav(write_wav(*parts)), parts)

    def test_odd_data_chunk_is_padded(self):
        pcm8 = WavFormat.pcm(bits_per_sample=8)
        data = write_wav(pcm8, b'\x01\x02\x03')
        self.assertEqual(len(data), 44 + 3 + 1)
        self.assertEqual(data[-1:], b'\x00')
        self.assertEqual(struct.unpack_from('<I', data, 4)[0], len(data) - 8)
        self.assertEqual(read_wav(data), (pcm8, b'\x01\x02\x03', b''))
        self.assertEqual(read_wav(data + b'tail')[2], b'tail')

    def test_odd_data_chunk_without_pad(self):
        pcm8 = WavFormat.pcm(bits_per_sample=8)
        self.assertEqual(read_wav(write_wav(pcm8, b'\x01\x02\x03')[:-1]), (pcm8, b'\x01\x02\x03', b''))

    def test_missing_chunks(self):
        with self.assertRaises(ParseError):
            read_wav(b'RIFF\x04\x00\x00\x00WAVE')
        with self.assertRaises(ParseError):
            read_wav(b'not a wav file at all')


class PnmTests(SimpleTestCase):

    def test_white_ppm(self):
        image = read_pnm(b'P6\n2 1\n255\n' + b'\xff' * 6)
        self.assertEqual((image.width, image.height, image.channels), (2, 1, 3))
        self.assertEqual(image.pixels, b'\xff' * 6)

    def test_comments_in_header(self):
        image = read_pnm(b'P5\n# made by hand\n3 2\n255\n' + bytes(6))
        self.assertEqual((image.width, image.height, image.channels), (3, 2, 1))

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for channels in (1, 3):
            image = PnmImage(width=5, height=4, channels=channels,
                             pixels=rng.integers(0, 256, 20 * channels, dtype=np.uint8).tobytes())
            self.assertEqual(read_pnm(write_pnm(image)), image)

    def test_ascii_variant(self):
        with self.assertRaises(Unsupported):
            read_pnm(b'P3\n1 1\n255\n255 255 255\n')

    def test_maxval(self):
        with self.assertRaises(Unsupported):
            read_pnm(b'P5\n1 1\n65535\n\x00\x00')


class ExpGolombTests(SimpleTestCase):

    def test_unsigned_codewords(self):
        self.assertEqual(ue_encode(0), '1')
        self.assertEqual(ue_encode(1), '010')
        self.assertEqual(ue_encode(2), '011')
        self.assertEqual(ue_encode(3), '00100')

    def test_signed_codewords(self):
        self.assertEqual(se_encode(0), '1')
        self.assertEqual(se_encode(1), ue_encode(1))
        self.assertEqual(se_encode(-1), '011')
        self.assertEqual(se_encode(2), ue_encode(3))
        self.assertEqual(se_encode(-2), ue_encode(4))

    def test_unsigned_round_trip_exhaustive(self):
        writer = BitWriter()
        for n in range(1 << 16):
            writer.write_ue(n)
        reader = BitReader(writer.to_bytes(), limit=len(writer))
        for n in range(1 << 16):
            self.assertEqual(reader.read_ue(), n)
        self.assertEqual(reader.remaining, 0)

    def test_signed_round_trip_exhaustive(self):
        values = range(-(1 << 12), (1 << 12) + 1)
        writer = BitWriter()
        for n in values:
            writer.write_se(n)
        reader = BitReader(writer.to_bytes(), limit=len(writer))
        for n in values:
            self.assertEqual(reader.read_se(), n)

    def test_single_codeword_decode(self):
        self.assertEqual(ue_decode('00100'), 3)
        self.assertEqual(se_decode('011'), -1)

    def test_prefix_free(self):
        codes = sorted(ue_encode(n) for n in range(1 << 10))
        # in sorted order a prefix sorts directly before its extensions
        for a, b in zip(codes, codes[1:]):
            self.assertFalse(b.startswith(a), f'{a} is a prefix of {b}')

    def test_decode_past_end(self):
        with self.assertRaises(TruncatedInput):
            ue_decode('000')
        with self.assertRaises(TruncatedInput):
            BitReader(b'').read_bit()

    def test_writer_pads_with_zeros(self):
        writer = BitWriter()
        writer.write(0b101, 3)
        self.assertEqual(writer.to_bytes(), b'\xa0')


class ContainerTests(SimpleTestCase):

    def make_container(self, audio=None, frames=1):
        header = ContainerHeader(display_width=20, display_height=10, gop_size=12, qp=8)
        return StegoContainer(
            header=header,
            frames=[
                EncodedFrame(frame_type=FrameType.I if i == 0 else FrameType.P,
                             pts=i, data=bytes([i, 0xAB]))
                for i in range(frames)
            ],
            audio=audio,
        )

    def test_header_field_ranges(self):
        with self.assertRaises(Unsupported):
            ContainerHeader(display_width=16, display_height=16, fps_num=120000, fps_den=1001)
        with self.assertRaises(Unsupported):
            ContainerHeader(display_width=70000, display_height=16)
        with self.assertRaises(Unsupported):
            ContainerHeader(display_width=65521, display_height=16)
        header = ContainerHeader(display_width=65520, display_height=16, fps_num=60000, fps_den=1001)
        self.assertEqual(header.coded_width, 65520)

    def test_minimal_round_trip(self):
        container = self.make_container()
        data = write_container(container)
        self.assertEqual(data[:4], b'SVST')
        self.assertEqual(write_container(read_container(data)), data)

    def test_header_layout(self):
        data = write_container(self.make_container(frames=3))
        (magic, version, flags, dw, dh, cw, ch, fn, fd, gop, qp, count) = struct.unpack_from(
            '>4sBBHHHHHHBBI', data)
        self.assertEqual((magic, version, flags), (b'SVST', 1, 0))
        self.assertEqual((dw, dh, cw, ch), (20, 10, 32, 16))
        self.assertEqual((gop, qp, count), (12, 8, 3))

    def test_audio_passthrough(self):
        wav = write_wav(WavFormat.pcm(), bytes(range(100)))
        container = read_container(write_container(self.make_container(audio=wav, frames=2)))
        self.assertEqual(container.audio, wav)
        self.assertEqual(len(container.frames), 2)

    def test_audio_flag_without_audio(self):
        data = bytearray(write_container(self.make_container()))
        data[5] |= 1
        data[24:24] = struct.pack('>I', 0)
        with self.assertRaises(CorruptContainer):
            read_container(bytes(data))

    def test_bad_magic(self):
        with self.assertRaises(NotAStegoContainer):
            read_container(b'XXXX' + bytes(40))

    def test_bad_version(self):
        data = bytearray(write_container(self.make_container()))
        data[4] = 2
        with self.assertRaises(Unsupported):
            read_container(bytes(data))

    def test_frame_count_mismatch(self):
        data = bytearray(write_container(self.make_container(frames=2)))
        struct.pack_into('>I', data, 20, 3)
        with self.assertRaises(CorruptContainer):
            read_container(bytes(data))

    def test_pts_must_increase(self):
        container = self.make_container(frames=3)
        container.frames[2] = EncodedFrame(frame_type=FrameType.P, pts=1, data=b'')
        with self.assertRaises(CorruptContainer):
            write_container(container)

    def test_i_frame_positions(self):
        container = self.make_container(frames=2)
        container.frames[1] = EncodedFrame(frame_type=FrameType.I, pts=1, data=b'')
        with self.assertRaises(CorruptContainer):
            write_container(container)


class FrameSizeTests(SimpleTestCase):

    def test_full_hd(self):
        size = raw_frame_size(1920, 1080)
        self.assertEqual(size.pixels, 2_073_600)
        self.assertEqual(size.rgb_bytes, 6_220_800)
        self.assertEqual(size.yuv420_bytes, 3_110_400)

    def test_macroblock_sized(self):
        self.assertEqual(raw_frame_size(16, 16).yuv420_bytes, 384)
