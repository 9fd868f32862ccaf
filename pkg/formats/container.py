"""
SVST stego container, version 1. All integers are big-endian.

Layout::

    magic "SVST" | version u8 | flags u8 (bit0 audio) |
    display_w u16 | display_h u16 | coded_w u16 | coded_h u16 |
    fps_num u16 | fps_den u16 | gop_size u8 | qp u8 | frame_count u32 |
    [audio_len u32 | audio bytes] |
    frame_count x (frame_type u8 | pts u32 | data_len u32 | data)
"""
import logging
import struct
from dataclasses import dataclass, field, replace

from django.db import models

from mvstego.exceptions import CorruptContainer, NotAStegoContainer, Unsupported

logger = logging.getLogger(__name__)

MAGIC = b'SVST'
VERSION = 1
FLAG_AUDIO = 0x01
U16_MAX = 0xFFFF

HEADER = struct.Struct('>4sBBHHHHHHBBI')
AUDIO_LEN = struct.Struct('>I')
FRAME_RECORD = struct.Struct('>BII')


class FrameType(models.IntegerChoices):
    I = 0, 'I'
    P = 1, 'P'


def coded_size(value):
    """Round a display dimension up to a whole number of macroblocks."""
    return (value + 15) // 16 * 16


@dataclass(frozen=True)
class ContainerHeader:
    display_width: int
    display_height: int
    fps_num: int = 30
    fps_den: int = 1
    gop_size: int = 12
    qp: int = 8
    version: int = VERSION

    def __post_init__(self):
        for name in ('display_width', 'display_height', 'fps_num', 'fps_den'):
            value = getattr(self, name)
            if not 0 <= value <= U16_MAX:
                raise Unsupported(f'{name} {value} does not fit the 16-bit SVST header field')
        if self.coded_width > U16_MAX or self.coded_height > U16_MAX:
            raise Unsupported(
                f'{self.display_width}x{self.display_height} pads to '
                f'{self.coded_width}x{self.coded_height}, beyond the SVST limit of {U16_MAX}'
            )

    @property
    def coded_width(self):
        return coded_size(self.display_width)

    @property
    def coded_height(self):
        return coded_size(self.display_height)


@dataclass(frozen=True)
class EncodedFrame:
    frame_type: int
    pts: int
    data: bytes


@dataclass
class StegoContainer:
    header: ContainerHeader
    frames: list = field(default_factory=list)
    audio: bytes = None

    @property
    def frame_count(self):
        return len(self.frames)

    def with_frames(self, frames):
        return replace(self, frames=list(frames))

    def validate(self):
        """Check the structural invariants shared by reader and writer."""
        header = self.header
        if not 1 <= header.gop_size <= 255:
            raise CorruptContainer(f'gop_size {header.gop_size} out of range')
        if not 1 <= header.qp <= 63:
            raise CorruptContainer(f'qp {header.qp} out of range')
        if header.fps_den <= 0:
            raise CorruptContainer('fps denominator must be positive')
        if self.audio is not None and not self.audio:
            raise CorruptContainer('audio flag set with an empty audio block')

        previous = None
        for index, frame in enumerate(self.frames):
            if previous is not None and frame.pts <= previous:
                raise CorruptContainer(f'frame {index}: pts {frame.pts} not after {previous}')
            previous = frame.pts
            expected = FrameType.I if frame.pts % header.gop_size == 0 else FrameType.P
            if frame.frame_type != expected:
                raise CorruptContainer(
                    f'frame {index}: pts {frame.pts} must be a {FrameType(expected).label}-frame'
                )
        if self.frames and self.frames[0].frame_type != FrameType.I:
            raise CorruptContainer('first frame must be an I-frame')


def write_container(container):
    container.validate()
    header = container.header
    flags = FLAG_AUDIO if container.audio is not None else 0
    chunks = [HEADER.pack(
        MAGIC, header.version, flags,
        header.display_width, header.display_height,
        header.coded_width, header.coded_height,
        header.fps_num, header.fps_den,
        header.gop_size, header.qp, container.frame_count,
    )]
    if container.audio is not None:
        chunks.append(AUDIO_LEN.pack(len(container.audio)))
        chunks.append(bytes(container.audio))
    for frame in container.frames:
        chunks.append(FRAME_RECORD.pack(int(frame.frame_type), frame.pts, len(frame.data)))
        chunks.append(bytes(frame.data))
    return b''.join(chunks)


def read_container(data):
    data = bytes(data)
    if len(data) < HEADER.size or data[:4] != MAGIC:
        raise NotAStegoContainer('missing SVST magic')
    (_, version, flags, display_w, display_h, coded_w, coded_h,
     fps_num, fps_den, gop_size, qp, frame_count) = HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise Unsupported(f'SVST version {version} is not supported')

    header = ContainerHeader(
        display_width=display_w, display_height=display_h,
        fps_num=fps_num, fps_den=fps_den, gop_size=gop_size, qp=qp, version=version,
    )
    if (coded_w, coded_h) != (header.coded_width, header.coded_height):
        raise CorruptContainer(
            f'coded size {coded_w}x{coded_h} does not match display {display_w}x{display_h}'
        )

    pos = HEADER.size
    audio = None
    if flags & FLAG_AUDIO:
        if pos + AUDIO_LEN.size > len(data):
            raise CorruptContainer('audio block length is cut off')
        (audio_len,) = AUDIO_LEN.unpack_from(data, pos)
        pos += AUDIO_LEN.size
        if audio_len == 0:
            raise CorruptContainer('audio flag set with an empty audio block')
        if pos + audio_len > len(data):
            raise CorruptContainer('audio block is cut off')
        audio = data[pos:pos + audio_len]
        pos += audio_len

    frames = []
    while pos < len(data):
        if pos + FRAME_RECORD.size > len(data):
            raise CorruptContainer(f'frame record {len(frames)} is cut off')
        frame_type, pts, data_len = FRAME_RECORD.unpack_from(data, pos)
        pos += FRAME_RECORD.size
        if frame_type not in FrameType.values:
            raise CorruptContainer(f'unknown frame type {frame_type}')
        if pos + data_len > len(data):
            raise CorruptContainer(f'frame {len(frames)} data is cut off')
        frames.append(EncodedFrame(frame_type=frame_type, pts=pts, data=data[pos:pos + data_len]))
        pos += data_len

    if len(frames) != frame_count:
        raise CorruptContainer(f'header declares {frame_count} frames, found {len(frames)}')

    container = StegoContainer(header=header, frames=frames, audio=audio)
    container.validate()
    logger.debug(f"Read SVST container: {frame_count} frames, audio={'yes' if audio else 'no'}")
    return container
