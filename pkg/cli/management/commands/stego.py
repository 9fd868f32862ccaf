import logging
import random
from dataclasses import replace
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from analysis.histogram import ascii_histogram, lsb_stream_bytes
from analysis.mv_diff import mv_diff_report
from analysis.quality import PLANES, sequence_psnr
from analysis.snapshot import export_frame_png
from analysis.stats import calibrate_threshold, chi_square_pvalue, chi_square_uniform
from cli.forms import (
    CalibrationForm, CapacityForm, CodecOptionsForm, EmbedCoeffForm, EmbedForm, FrameSizeForm,
    KeyForm, SnapshotForm, SynthForm, form_errors,
)
from codec.decoder import decode_video
from codec.encoder import encode_video
from codec.synthetic import moving_gradient
from crypto.aes import random_nonce
from formats.container import MAGIC as SVST_MAGIC, read_container, write_container
from formats.pnm import read_pnm, write_pnm
from formats.sizes import raw_frame_size
from formats.wav import read_wav, write_wav
from formats.y4m import read_y4m, write_y4m
from mvstego.exceptions import MvStegoError, ParseError, Unsupported
from stego_lsb.injection import extract_appended, inject_append
from stego_lsb.lsb import lsb_embed, lsb_extract
from stego_video.ber import measure_coeff_ber
from stego_video.embedding import embed, embed_coeff, estimate_capacity, extract, invert_motion_vectors
from stego_video.modes import EmbedMode

logger = logging.getLogger(__name__)

Y4M_MAGIC = b'YUV4MPEG2'
MODE_LABELS = ', '.join(EmbedMode.labels)


class Command(BaseCommand):
    help = 'Motion vector steganography toolkit: transcode, embed, extract and analyse.'
    requires_system_checks = []

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True, metavar='subcommand')

        def sub(name, help_text):
            return subparsers.add_parser(name, help=help_text)

        def codec_options(p):
            p.add_argument('--gop', type=int, help='I-frame period (default 12)')
            p.add_argument('--qp', type=int, help='quantiser step (default 8)')
            p.add_argument('--search', type=int, help='motion search range in pels (default 16)')

        def key_options(p):
            p.add_argument('--key', help='AES key, 32/48/64 hex digits')
            p.add_argument('--nonce', help='CTR nonce, 32 hex digits (random when omitted)')

        p = sub('transcode', 'encode a Y4M video into an SVST container')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--out', required=True)
        p.add_argument('--audio', help='WAV file carried through the container')
        codec_options(p)

        p = sub('decode', 'decode an SVST container back to Y4M')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--out', required=True)
        p.add_argument('--audio-out', help='write the carried WAV file here')

        p = sub('embed', 'hide a payload in motion vectors or coefficients while encoding')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--payload', required=True)
        p.add_argument('--mode', required=True, help=MODE_LABELS)
        p.add_argument('--out', required=True)
        p.add_argument('--audio')
        codec_options(p)
        key_options(p)

        p = sub('extract', 'recover a hidden payload from an SVST container')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--out', required=True)
        p.add_argument('--key')

        p = sub('capacity', 'estimate how many payload bits a video can carry')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--mode', required=True, help=MODE_LABELS)
        codec_options(p)

        p = sub('embed-coeff', 'hide a payload in quantised AC coefficients')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--payload')
        p.add_argument('--out')
        p.add_argument('--pre-quant', action='store_true', help='embed before quantisation')
        p.add_argument('--report-ber', action='store_true', help='measure the bit error rate of random bits')
        p.add_argument('--bits', type=int, help='random bits for --report-ber (default 1000)')
        p.add_argument('--seed', type=int)
        codec_options(p)
        key_options(p)

        p = sub('invert-mv', 'negate every motion vector of a container')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--out', required=True)

        p = sub('lsb-embed', 'LSB substitution in PNM pixels or WAV samples')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--payload', required=True)
        p.add_argument('--out', required=True)

        p = sub('lsb-extract', 'read an LSB payload from PNM pixels or WAV samples')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--out', required=True)

        p = sub('inject', 'append a payload after the WAV data chunk')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--payload', required=True)
        p.add_argument('--out', required=True)

        p = sub('extract-appended', 'read bytes appended after the WAV data chunk')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--out', required=True)

        p = sub('hist-lsb', 'byte histogram of the LSB string, as CSV')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--out')

        p = sub('chi2', 'chi-square uniformity test of the LSB string')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--trials', type=int)
        p.add_argument('--seed', type=int)

        p = sub('psnr', 'PSNR between two videos (Y4M or SVST), as CSV')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--ref', required=True)

        p = sub('mv-diff', 'compare the motion vectors of two containers, as CSV')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--ref', required=True)
        p.add_argument('--out')

        p = sub('synth', 'write a synthetic moving-gradient Y4M video')
        p.add_argument('--width', type=int, default=320)
        p.add_argument('--height', type=int, default=240)
        p.add_argument('--frames', type=int, default=60)
        p.add_argument('--noise', type=int, default=0)
        p.add_argument('--seed', type=int, default=0)
        p.add_argument('--out', required=True)

        p = sub('frame-size', 'raw frame sizes for a resolution')
        p.add_argument('--width', type=int, required=True)
        p.add_argument('--height', type=int, required=True)

        p = sub('snapshot', 'export one frame of a Y4M or SVST video as PNG')
        p.add_argument('--in', dest='input', required=True)
        p.add_argument('--frame', type=int, default=0)
        p.add_argument('--out', required=True)

    def handle(self, *args, **options):
        handler = getattr(self, 'handle_' + options['subcommand'].replace('-', '_'))
        logger.debug(f"Running subcommand {options['subcommand']}")
        try:
            handler(options)
        except MvStegoError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)

    # helpers

    def _validate(self, form_class, options, *fields):
        form = form_class(data={f: options.get(f) for f in fields if options.get(f) is not None})
        if not form.is_valid():
            raise CommandError(form_errors(form), returncode=2)
        return form

    def _read(self, path):
        try:
            return Path(path).read_bytes()
        except OSError as exc:
            raise CommandError(f'cannot read {path}: {exc.strerror}', returncode=2)

    def _write(self, path, data):
        try:
            Path(path).write_bytes(data)
        except OSError as exc:
            raise CommandError(f'cannot write {path}: {exc.strerror}', returncode=2)

    def _emit(self, text, path=None):
        if path:
            self._write(path, text.encode())
        else:
            self.stdout.write(text, ending='')

    def _load_video(self, path):
        data = self._read(path)
        if data.startswith(Y4M_MAGIC):
            return read_y4m(data)
        if data.startswith(SVST_MAGIC):
            return decode_video(read_container(data))
        raise ParseError(f'{path} is neither Y4M nor SVST')

    def _load_cover(self, path):
        """Cover byte stream plus a function that rebuilds the file around new bytes."""
        data = self._read(path)
        if data.startswith(b'RIFF'):
            wav_format, samples, trailing = read_wav(data)
            return samples, lambda stego: write_wav(wav_format, stego, trailing)
        if data[:2] in (b'P5', b'P6'):
            image = read_pnm(data)
            return image.pixels, lambda stego: write_pnm(replace(image, pixels=stego))
        raise Unsupported(f'{path} is neither WAV nor binary PNM')

    def _key_and_nonce(self, form):
        key, nonce = form.cleaned_data.get('key'), form.cleaned_data.get('nonce')
        if key is not None and nonce is None:
            nonce = random_nonce()
            self.stderr.write(f'nonce: {nonce.hex()}')
        return key, nonce

    def _audio(self, options):
        if not options.get('audio'):
            return None
        audio = self._read(options['audio'])
        read_wav(audio)
        return audio

    # subcommands

    def handle_transcode(self, options):
        params = self._validate(CodecOptionsForm, options, 'gop', 'qp', 'search').params()
        video = read_y4m(self._read(options['input']))
        container = encode_video(video, params, audio=self._audio(options))
        self._write(options['out'], write_container(container))
        self.stdout.write(self.style.SUCCESS(f'Transcoded {len(video)} frames to {options["out"]}'))

    def handle_decode(self, options):
        container = read_container(self._read(options['input']))
        self._write(options['out'], write_y4m(decode_video(container)))
        if options.get('audio_out'):
            if container.audio is None:
                self.stderr.write(self.style.WARNING('container carries no audio'))
            else:
                self._write(options['audio_out'], container.audio)
        self.stdout.write(self.style.SUCCESS(f'Decoded {container.frame_count} frames to {options["out"]}'))

    def handle_embed(self, options):
        form = self._validate(EmbedForm, options, 'gop', 'qp', 'search', 'mode', 'key', 'nonce')
        video = read_y4m(self._read(options['input']))
        payload = self._read(options['payload'])
        key, nonce = self._key_and_nonce(form)
        container = embed(
            video, payload, form.cleaned_data['mode'], form.params(),
            key=key, nonce=nonce, audio=self._audio(options),
        )
        self._write(options['out'], write_container(container))
        self.stdout.write(self.style.SUCCESS(
            f'Embedded {len(payload)} bytes ({form.cleaned_data["mode"].label}) in {options["out"]}'
        ))

    def handle_extract(self, options):
        form = self._validate(KeyForm, options, 'key')
        payload = extract(read_container(self._read(options['input'])), key=form.cleaned_data.get('key'))
        self._write(options['out'], payload)
        self.stdout.write(self.style.SUCCESS(f'Extracted {len(payload)} bytes to {options["out"]}'))

    def handle_capacity(self, options):
        form = self._validate(CapacityForm, options, 'gop', 'qp', 'search', 'mode')
        video = read_y4m(self._read(options['input']))
        report = estimate_capacity(video, form.params(), form.cleaned_data['mode'])
        self.stdout.write(
            f'{report.mode.label}: {report.estimated_bits} bits, '
            f'about {report.max_payload_bytes()} payload bytes'
        )
        self.stdout.write(self.style.WARNING(
            'This is an estimate: embedding changes reference frames and so later coding decisions.'
        ))

    def handle_embed_coeff(self, options):
        form = self._validate(EmbedCoeffForm, options, 'gop', 'qp', 'search', 'key', 'nonce', 'bits', 'seed')
        video = read_y4m(self._read(options['input']))
        params = form.params()
        pre_quant = options['pre_quant']

        if options['report_ber']:
            rng = random.Random(form.cleaned_data.get('seed') or 0)
            bits = [rng.randrange(2) for _ in range(form.cleaned_data.get('bits') or 1000)]
            report = measure_coeff_ber(video, bits, params, pre_quant=pre_quant)
            self.stdout.write('sent,placed,errors,ber')
            self.stdout.write(f'{report.sent},{report.placed},{report.errors},{report.ber:.4f}')
            if not (options.get('payload') and options.get('out')):
                return

        if not (options.get('payload') and options.get('out')):
            raise CommandError('embed-coeff needs --payload and --out (or --report-ber)', returncode=2)
        payload = self._read(options['payload'])
        key, nonce = self._key_and_nonce(form)
        container = embed_coeff(video, payload, params, pre_quant=pre_quant, key=key, nonce=nonce)
        self._write(options['out'], write_container(container))
        self.stdout.write(self.style.SUCCESS(
            f'Embedded {len(payload)} bytes in coefficients '
            f'({"pre" if pre_quant else "post"}-quantisation) in {options["out"]}'
        ))

    def handle_invert_mv(self, options):
        container = read_container(self._read(options['input']))
        self._write(options['out'], write_container(invert_motion_vectors(container)))
        self.stdout.write(self.style.SUCCESS(f'Inverted motion vectors written to {options["out"]}'))

    def handle_lsb_embed(self, options):
        cover, rebuild = self._load_cover(options['input'])
        payload = self._read(options['payload'])
        self._write(options['out'], rebuild(lsb_embed(cover, payload)))
        self.stdout.write(self.style.SUCCESS(f'Embedded {len(payload)} bytes in {options["out"]}'))

    def handle_lsb_extract(self, options):
        cover, _ = self._load_cover(options['input'])
        payload = lsb_extract(cover)
        self._write(options['out'], payload)
        self.stdout.write(self.style.SUCCESS(f'Extracted {len(payload)} bytes to {options["out"]}'))

    def handle_inject(self, options):
        payload = self._read(options['payload'])
        self._write(options['out'], inject_append(self._read(options['input']), payload))
        self.stdout.write(self.style.SUCCESS(f'Appended {len(payload)} bytes in {options["out"]}'))

    def handle_extract_appended(self, options):
        payload = extract_appended(self._read(options['input']))
        self._write(options['out'], payload)
        self.stdout.write(self.style.SUCCESS(f'Extracted {len(payload)} appended bytes to {options["out"]}'))

    def handle_hist_lsb(self, options):
        cover, _ = self._load_cover(options['input'])
        self._emit(ascii_histogram(lsb_stream_bytes(cover)).to_csv(), options.get('out'))

    def handle_chi2(self, options):
        form = self._validate(CalibrationForm, options, 'trials', 'seed')
        cover, _ = self._load_cover(options['input'])
        stream = lsb_stream_bytes(cover)
        statistic = chi_square_uniform(ascii_histogram(stream))
        threshold = calibrate_threshold(
            trials=form.cleaned_data.get('trials'), length=len(stream), seed=form.cleaned_data.get('seed'),
        )
        self.stdout.write('statistic,p_value,threshold,verdict')
        verdict = 'non-uniform' if statistic > threshold else 'uniform'
        self.stdout.write(f'{statistic:.3f},{chi_square_pvalue(statistic):.6g},{threshold:.3f},{verdict}')

    def handle_psnr(self, options):
        video = self._load_video(options['input'])
        reference = self._load_video(options['ref'])
        self.stdout.write('plane,psnr_db')
        for plane in PLANES:
            self.stdout.write(f'{plane},{sequence_psnr(video, reference, plane):.4f}')

    def handle_mv_diff(self, options):
        a = read_container(self._read(options['input']))
        b = read_container(self._read(options['ref']))
        report = mv_diff_report(a, b)
        self._emit(report.to_csv(), options.get('out'))
        self.stderr.write(
            f'{len(report.changed())} of {len(report.entries)} macroblocks differ; '
            f'mean |ddx| {report.mean_ddx:.3f}, mean |ddy| {report.mean_ddy:.3f}, '
            f'max {report.max_ddx}/{report.max_ddy} quarter-pels'
        )

    def handle_synth(self, options):
        form = self._validate(SynthForm, options, 'width', 'height', 'frames', 'noise', 'seed')
        video = moving_gradient(**{
            key: form.cleaned_data[key] for key in ('width', 'height', 'frames')
        }, noise=form.cleaned_data.get('noise') or 0, seed=form.cleaned_data.get('seed') or 0)
        self._write(options['out'], write_y4m(video))
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(video)} synthetic frames to {options["out"]}'))

    def handle_frame_size(self, options):
        form = self._validate(FrameSizeForm, options, 'width', 'height')
        size = raw_frame_size(form.cleaned_data['width'], form.cleaned_data['height'])
        self.stdout.write('pixels,rgb_bytes,yuv420_bytes')
        self.stdout.write(f'{size.pixels},{size.rgb_bytes},{size.yuv420_bytes}')

    def handle_snapshot(self, options):
        form = self._validate(SnapshotForm, options, 'frame')
        video = self._load_video(options['input'])
        export_frame_png(video, form.cleaned_data['frame'], options['out'])
        self.stdout.write(self.style.SUCCESS(f'Wrote frame {form.cleaned_data["frame"]} to {options["out"]}'))
