import io
import tempfile
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from codec.synthetic import moving_gradient
from formats.container import FrameType, read_container
from formats.pnm import PnmImage, write_pnm
from formats.wav import WavFormat, write_wav
from formats.video import RawVideo
from formats.y4m import read_y4m, write_y4m
from .forms import EmbedForm, KeyForm
from .runner import run

KEY = '000102030405060708090a0b0c0d0e0f'


class CliTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)
        video = moving_gradient(width=96, height=64, frames=13, noise=3, seed=5)
        self.y4m = self.path('in.y4m')
        self.y4m.write_bytes(write_y4m(video))

    def tearDown(self):
        self._tmp.cleanup()

    def path(self, name):
        return self.dir / name

    def stego(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        code = run([str(a) for a in argv], stdout=out, stderr=err)
        return code, out.getvalue(), err.getvalue()


class VideoCommandTests(CliTestCase):

    def test_embed_then_extract(self):
        payload = self.path('p.bin')
        payload.write_bytes(b'\x00hi\xff')
        code, out, _ = self.stego('embed', '--in', self.y4m, '--payload', payload, '--mode', 'all-mb-x',
                                  '--out', self.path('s.svst'), '--search', 4)
        self.assertEqual(code, 0)
        self.assertIn('Embedded 4 bytes', out)

        code, _, _ = self.stego('extract', '--in', self.path('s.svst'), '--out', self.path('q.bin'))
        self.assertEqual(code, 0)
        self.assertEqual(self.path('q.bin').read_bytes(), payload.read_bytes())

    def test_encrypted_embed_echoes_nonce(self):
        payload = self.path('p.bin')
        payload.write_bytes(b'key test')
        large = self.path('large.y4m')
        large.write_bytes(write_y4m(moving_gradient(width=160, height=128, frames=13, noise=3, seed=5)))
        code, _, err = self.stego('embed', '--in', large, '--payload', payload, '--mode', 'all-mb-x',
                                  '--out', self.path('s.svst'), '--search', 4, '--key', KEY)
        self.assertEqual(code, 0)
        self.assertRegex(err, r'nonce: [0-9a-f]{32}')

        code, _, err = self.stego('extract', '--in', self.path('s.svst'), '--out', self.path('q.bin'))
        self.assertEqual(code, 1)
        self.assertIn('key', err)
        code, _, _ = self.stego('extract', '--in', self.path('s.svst'), '--out', self.path('q.bin'), '--key', KEY)
        self.assertEqual(code, 0)
        self.assertEqual(self.path('q.bin').read_bytes(), b'key test')

    def test_extract_from_plain_transcode(self):
        self.assertEqual(self.stego('transcode', '--in', self.y4m, '--out', self.path('t.svst'), '--search', 4)[0], 0)
        code, _, err = self.stego('extract', '--in', self.path('t.svst'), '--out', self.path('q.bin'))
        self.assertEqual(code, 1)
        self.assertIn('no payload found', err)
        self.assertFalse(self.path('q.bin').exists())

    def test_transcode_decode_quality(self):
        self.stego('transcode', '--in', self.y4m, '--out', self.path('t.svst'), '--search', 4)
        code, _, _ = self.stego('decode', '--in', self.path('t.svst'), '--out', self.path('d.y4m'))
        self.assertEqual(code, 0)
        decoded = read_y4m(self.path('d.y4m').read_bytes())
        self.assertEqual((decoded.width, decoded.height, len(decoded)), (96, 64, 13))

        code, out, _ = self.stego('psnr', '--in', self.path('d.y4m'), '--ref', self.y4m)
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], 'plane,psnr_db')
        plane, value = lines[1].split(',')
        self.assertEqual(plane, 'y')
        self.assertGreaterEqual(float(value), 30.0)

    def test_audio_passthrough(self):
        wav = write_wav(WavFormat.pcm(), bytes(range(256)) * 4)
        self.path('a.wav').write_bytes(wav)
        self.stego('transcode', '--in', self.y4m, '--out', self.path('t.svst'), '--search', 4,
                   '--audio', self.path('a.wav'))
        code, _, _ = self.stego('decode', '--in', self.path('t.svst'), '--out', self.path('d.y4m'),
                                '--audio-out', self.path('b.wav'))
        self.assertEqual(code, 0)
        self.assertEqual(self.path('b.wav').read_bytes(), wav)

    def test_gop_one(self):
        self.stego('transcode', '--in', self.y4m, '--out', self.path('t.svst'), '--gop', 1, '--search', 4)
        container = read_container(self.path('t.svst').read_bytes())
        self.assertTrue(all(f.frame_type == FrameType.I for f in container.frames))
        for mode in ('first-mb-x', 'first-mb-y', 'all-mb-x', 'all-mb-y'):
            code, out, _ = self.stego('capacity', '--in', self.y4m, '--mode', mode, '--gop', 1, '--search', 4)
            self.assertEqual(code, 0)
            self.assertIn(f'{mode}: 0 bits', out)

    def test_capacity_report(self):
        code, out, _ = self.stego('capacity', '--in', self.y4m, '--mode', 'first-mb-x', '--search', 4)
        self.assertEqual(code, 0)
        self.assertRegex(out, r'first-mb-x: \d+ bits')
        self.assertIn('estimate', out)

    def test_capacity_shortfall(self):
        payload = self.path('p.bin')
        payload.write_bytes(bytes(64))
        code, _, err = self.stego('embed', '--in', self.y4m, '--payload', payload, '--mode', 'first-mb-x',
                                  '--out', self.path('s.svst'), '--search', 4)
        self.assertEqual(code, 1)
        self.assertIn('insufficient capacity', err)

    def test_invert_and_compare(self):
        self.stego('transcode', '--in', self.y4m, '--out', self.path('t.svst'), '--search', 4)
        code, _, _ = self.stego('invert-mv', '--in', self.path('t.svst'), '--out', self.path('i.svst'))
        self.assertEqual(code, 0)
        code, out, err = self.stego('mv-diff', '--in', self.path('t.svst'), '--ref', self.path('i.svst'))
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], 'frame,mb,mode_a,mode_b,ddx,ddy')
        self.assertEqual(len(lines), 1 + 13 * 24)
        self.assertIn('macroblocks differ', err)

    def test_report_ber(self):
        code, out, _ = self.stego('embed-coeff', '--in', self.y4m, '--report-ber', '--bits', 50, '--search', 4)
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], 'sent,placed,errors,ber')
        self.assertEqual(lines[1].split(',')[0], '50')
        self.assertEqual(lines[1].split(',')[2], '0')

    def test_embed_coeff_needs_payload(self):
        code, _, _ = self.stego('embed-coeff', '--in', self.y4m)
        self.assertEqual(code, 2)

    def test_deterministic_output(self):
        for name in ('a.svst', 'b.svst'):
            self.stego('transcode', '--in', self.y4m, '--out', self.path(name), '--search', 4)
        self.assertEqual(self.path('a.svst').read_bytes(), self.path('b.svst').read_bytes())

    def test_snapshot(self):
        code, _, _ = self.stego('snapshot', '--in', self.y4m, '--frame', 3, '--out', self.path('f.png'))
        self.assertEqual(code, 0)
        self.assertEqual(self.path('f.png').read_bytes()[:8], b'\x89PNG\r\n\x1a\n')


class UsageTests(CliTestCase):

    def test_unknown_subcommand(self):
        self.assertEqual(self.stego('frobnicate')[0], 2)

    def test_missing_required_argument(self):
        self.assertEqual(self.stego('extract', '--in', self.path('x.svst'))[0], 2)

    def test_missing_file(self):
        code, _, err = self.stego('extract', '--in', self.path('missing.svst'), '--out', self.path('q.bin'))
        self.assertEqual(code, 2)
        self.assertIn('cannot read', err)

    def test_not_a_container(self):
        code, _, _ = self.stego('extract', '--in', self.y4m, '--out', self.path('q.bin'))
        self.assertEqual(code, 2)

    def test_bad_mode_and_key(self):
        payload = self.path('p.bin')
        payload.write_bytes(b'x')
        code, _, err = self.stego('embed', '--in', self.y4m, '--payload', payload, '--mode', 'sideways',
                                  '--out', self.path('s.svst'))
        self.assertEqual(code, 2)
        self.assertIn('--mode', err)
        code, _, err = self.stego('embed', '--in', self.y4m, '--payload', payload, '--mode', 'all-mb-x',
                                  '--out', self.path('s.svst'), '--key', 'abc')
        self.assertEqual(code, 2)
        self.assertIn('--key', err)
        self.assertFalse(self.path('s.svst').exists())

    def test_frame_rate_too_precise_for_container(self):
        source = moving_gradient(width=16, height=16, frames=2)
        self.path('fast.y4m').write_bytes(write_y4m(RawVideo(16, 16, 120000, 1001, source.frames)))
        code, _, err = self.stego('transcode', '--in', self.path('fast.y4m'), '--out', self.path('t.svst'))
        self.assertEqual(code, 2)
        self.assertIn('fps_num', err)
        self.assertFalse(self.path('t.svst').exists())

    def test_out_of_range_codec_options(self):
        code, _, _ = self.stego('transcode', '--in', self.y4m, '--out', self.path('t.svst'), '--qp', 0)
        self.assertEqual(code, 2)

    def test_frame_size(self):
        code, out, _ = self.stego('frame-size', '--width', 1920, '--height', 1080)
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines(), ['pixels,rgb_bytes,yuv420_bytes', '2073600,6220800,3110400'])

    def test_synth(self):
        code, _, _ = self.stego('synth', '--width', 40, '--height', 24, '--frames', 3, '--out', self.path('s.y4m'))
        self.assertEqual(code, 0)
        video = read_y4m(self.path('s.y4m').read_bytes())
        self.assertEqual((video.width, video.height, len(video)), (40, 24, 3))

    def test_call_command(self):
        out = io.StringIO()
        call_command('stego', 'frame-size', '--width', '16', '--height', '16', stdout=out)
        self.assertIn('256,768,384', out.getvalue())
        with self.assertRaises(CommandError):
            call_command('stego', 'extract', '--in', str(self.path('missing')), '--out', str(self.path('q')))


class LsbCommandTests(CliTestCase):

    def test_pgm_round_trip(self):
        self.path('c.pgm').write_bytes(write_pnm(PnmImage(32, 32, 1, bytes(range(256)) * 4)))
        self.path('p.txt').write_bytes(b'Hello')
        code, _, _ = self.stego('lsb-embed', '--in', self.path('c.pgm'), '--payload', self.path('p.txt'),
                                '--out', self.path('s.pgm'))
        self.assertEqual(code, 0)
        code, _, _ = self.stego('lsb-extract', '--in', self.path('s.pgm'), '--out', self.path('q.txt'))
        self.assertEqual(code, 0)
        self.assertEqual(self.path('q.txt').read_bytes(), b'Hello')

    def test_wav_round_trip_and_histogram(self):
        self.path('c.wav').write_bytes(write_wav(WavFormat.pcm(), bytes(4096)))
        self.path('p.txt').write_bytes(b'the quick brown fox jumps over the lazy dog')
        self.stego('lsb-embed', '--in', self.path('c.wav'), '--payload', self.path('p.txt'),
                   '--out', self.path('s.wav'))
        self.stego('lsb-extract', '--in', self.path('s.wav'), '--out', self.path('q.txt'))
        self.assertEqual(self.path('q.txt').read_bytes(), self.path('p.txt').read_bytes())

        code, out, _ = self.stego('hist-lsb', '--in', self.path('s.wav'))
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(len(lines), 257)
        self.assertEqual(lines[1 + ord('o')], f'{ord("o")},4')

        code, out, _ = self.stego('chi2', '--in', self.path('s.wav'), '--trials', 20)
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], 'statistic,p_value,threshold,verdict')
        self.assertTrue(out.splitlines()[1].endswith('non-uniform'))

    def test_lsb_capacity_shortfall(self):
        self.path('c.wav').write_bytes(write_wav(WavFormat.pcm(), bytes(64)))
        self.path('p.txt').write_bytes(b'far too long for this cover')
        code, _, _ = self.stego('lsb-embed', '--in', self.path('c.wav'), '--payload', self.path('p.txt'),
                                '--out', self.path('s.wav'))
        self.assertEqual(code, 1)

    def test_injection(self):
        wav = write_wav(WavFormat.pcm(), bytes(100))
        self.path('c.wav').write_bytes(wav)
        self.path('p.bin').write_bytes(b'appended')
        code, _, _ = self.stego('inject', '--in', self.path('c.wav'), '--payload', self.path('p.bin'),
                                '--out', self.path('s.wav'))
        self.assertEqual(code, 0)
        self.assertEqual(self.path('s.wav').read_bytes(), wav + b'appended')
        self.stego('extract-appended', '--in', self.path('s.wav'), '--out', self.path('q.bin'))
        self.assertEqual(self.path('q.bin').read_bytes(), b'appended')

    def test_unsupported_cover(self):
        self.path('c.bin').write_bytes(b'GIF89a' + bytes(100))
        self.path('p.txt').write_bytes(b'x')
        code, _, _ = self.stego('lsb-embed', '--in', self.path('c.bin'), '--payload', self.path('p.txt'),
                                '--out', self.path('s.bin'))
        self.assertEqual(code, 2)


class FormTests(SimpleTestCase):

    def test_key_lengths(self):
        for digits in (32, 48, 64):
            form = KeyForm(data={'key': 'ab' * (digits // 2)})
            self.assertTrue(form.is_valid())
            self.assertEqual(len(form.cleaned_data['key']), digits // 2)
        self.assertFalse(KeyForm(data={'key': 'ab' * 8}).is_valid())
        self.assertFalse(KeyForm(data={'key': 'zz' * 16}).is_valid())

    def test_nonce_needs_key(self):
        self.assertFalse(KeyForm(data={'nonce': '00' * 16}).is_valid())
        self.assertFalse(KeyForm(data={'key': KEY, 'nonce': '00' * 8}).is_valid())
        self.assertTrue(KeyForm(data={'key': KEY, 'nonce': '00' * 16}).is_valid())

    def test_embed_form(self):
        form = EmbedForm(data={'mode': 'first-mb-y', 'gop': 24})
        self.assertTrue(form.is_valid())
        params = form.params()
        self.assertEqual((params.gop_size, params.qp), (24, 8))
        self.assertFalse(EmbedForm(data={'mode': 'all-mb-z'}).is_valid())
