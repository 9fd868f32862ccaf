"""
RIFF/WAVE reader and writer.

The reader honours the declared size of the ``data`` chunk and hands back
whatever follows it separately, which is where injected payloads live.
"""
import struct
from dataclasses import dataclass

from mvstego.exceptions import ParseError

RIFF_HEADER = struct.Struct('<4sI4s')
CHUNK_HEADER = struct.Struct('<4sI')
FMT_BODY = struct.Struct('<HHIIHH')


@dataclass(frozen=True)
class WavFormat:
    audio_format: int = 1
    channels: int = 1
    sample_rate: int = 8000
    byte_rate: int = 16000
    block_align: int = 2
    bits_per_sample: int = 16
    extra: bytes = b''

    @classmethod
    def pcm(cls, channels=1, sample_rate=8000, bits_per_sample=16):
        block_align = channels * bits_per_sample // 8
        return cls(
            audio_format=1, channels=channels, sample_rate=sample_rate,
            byte_rate=sample_rate * block_align, block_align=block_align,
            bits_per_sample=bits_per_sample,
        )


def locate_data_chunk(data):
    """
    Find the sample bytes of a WAV file: ``(format, start, end)`` offsets of
    the ``data`` chunk body, pad byte excluded.

    Raises:
        ParseError: not RIFF/WAVE, a required chunk is missing, or the data
            chunk claims more bytes than the file holds.
    """
    if len(data) < RIFF_HEADER.size:
        raise ParseError('file too short for a RIFF header')
    riff, _, wave = RIFF_HEADER.unpack_from(data, 0)
    if riff != b'RIFF' or wave != b'WAVE':
        raise ParseError('not a RIFF/WAVE file')

    wav_format = None
    pos = RIFF_HEADER.size
    while pos + CHUNK_HEADER.size <= len(data):
        chunk_id, chunk_size = CHUNK_HEADER.unpack_from(data, pos)
        body_start = pos + CHUNK_HEADER.size
        body_end = body_start + chunk_size

        if chunk_id == b'fmt ':
            if chunk_size < FMT_BODY.size or body_end > len(data):
                raise ParseError('malformed fmt chunk')
            fields = FMT_BODY.unpack_from(data, body_start)
            wav_format = WavFormat(*fields, extra=data[body_start + FMT_BODY.size:body_end])
        elif chunk_id == b'data':
            if wav_format is None:
                raise ParseError('data chunk precedes fmt chunk')
            if body_end > len(data):
                raise ParseError(
                    f'data chunk declares {chunk_size} bytes, only {len(data) - body_start} present'
                )
            return wav_format, body_start, body_end

        # RIFF chunks are word aligned
        pos = body_end + (chunk_size & 1)

    raise ParseError('missing fmt or data chunk')


def read_wav(data):
    """
    Split a WAV file into (format, sample bytes, trailing bytes). The pad
    byte after an odd-sized data chunk belongs to neither.
    """
    data = bytes(data)
    wav_format, start, end = locate_data_chunk(data)
    return wav_format, data[start:end], data[end + ((end - start) & 1):]


def write_wav(wav_format, samples, trailing=b''):
    """Write a canonical WAV file; ``trailing`` is appended after the data chunk."""
    samples = bytes(samples)
    fmt_body = FMT_BODY.pack(
        wav_format.audio_format, wav_format.channels, wav_format.sample_rate,
        wav_format.byte_rate, wav_format.block_align, wav_format.bits_per_sample,
    ) + wav_format.extra
    pad = b'\x00' * (len(samples) & 1)
    riff_size = 4 + CHUNK_HEADER.size + len(fmt_body) + CHUNK_HEADER.size + len(samples) + len(pad)
    return b''.join([
        RIFF_HEADER.pack(b'RIFF', riff_size, b'WAVE'),
        CHUNK_HEADER.pack(b'fmt ', len(fmt_body)),
        fmt_body,
        CHUNK_HEADER.pack(b'data', len(samples)),
        samples,
        pad,
        bytes(trailing),
    ])
