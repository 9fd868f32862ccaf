"""
YUV4MPEG2 (Y4M) reader and writer for 8-bit 4:2:0 video.
"""
import logging

import numpy as np

from mvstego.exceptions import EmptyInput, ParseError, TruncatedInput, Unsupported
from .video import Frame, RawVideo, chroma_dims

logger = logging.getLogger(__name__)

SIGNATURE = b'YUV4MPEG2'
FRAME_MARKER = b'FRAME'
SUPPORTED_COLOURSPACES = ('420', '420jpeg', '420paldv', '420mpeg2')


def _parse_stream_header(line):
    tokens = line.split(b' ')
    if tokens[0] != SIGNATURE:
        raise ParseError('missing YUV4MPEG2 signature')

    headers = {}
    for token in tokens[1:]:
        if not token:
            continue
        text = token.decode('ascii', errors='replace')
        headers[text[0]] = text[1:]

    try:
        width = int(headers['W'])
        height = int(headers['H'])
    except (KeyError, ValueError):
        raise ParseError('Y4M header needs integer W and H fields')
    if width <= 0 or height <= 0:
        raise ParseError(f'invalid dimensions {width}x{height}')

    fps_num, fps_den = 30, 1
    if 'F' in headers:
        try:
            num, den = headers['F'].split(':')
            fps_num, fps_den = int(num), int(den)
        except ValueError:
            raise ParseError(f"malformed frame rate {headers['F']!r}")
        if fps_den <= 0 or fps_num <= 0:
            raise ParseError(f"invalid frame rate {headers['F']!r}")

    colourspace = headers.get('C', '420jpeg')
    if colourspace not in SUPPORTED_COLOURSPACES:
        raise Unsupported(f'colourspace {colourspace} is not 8-bit 4:2:0')

    return width, height, fps_num, fps_den


def read_y4m(data):
    """
    Parse a Y4M byte stream.

    Returns a RawVideo whose frames carry pts 0, 1, 2, ... in file order.
    """
    data = bytes(data)
    if not data.startswith(SIGNATURE):
        raise ParseError('stream does not begin with YUV4MPEG2')
    end = data.find(b'\n')
    if end < 0:
        raise ParseError('unterminated Y4M stream header')
    width, height, fps_num, fps_den = _parse_stream_header(data[:end])

    c_width, c_height = chroma_dims(width, height)
    luma_size = width * height
    chroma_size = c_width * c_height
    frame_size = luma_size + 2 * chroma_size

    frames = []
    pos = end + 1
    while pos < len(data):
        line_end = data.find(b'\n', pos)
        if line_end < 0:
            raise TruncatedInput(f'frame {len(frames)} header is cut off')
        if not data.startswith(FRAME_MARKER, pos):
            raise ParseError(f'expected FRAME marker at byte {pos}')
        payload_start = line_end + 1
        payload = data[payload_start:payload_start + frame_size]
        if len(payload) < frame_size:
            raise TruncatedInput(
                f'frame {len(frames)} has {len(payload)} of {frame_size} bytes'
            )
        samples = np.frombuffer(payload, dtype=np.uint8)
        frames.append(Frame(
            y=samples[:luma_size].reshape(height, width).copy(),
            cb=samples[luma_size:luma_size + chroma_size].reshape(c_height, c_width).copy(),
            cr=samples[luma_size + chroma_size:].reshape(c_height, c_width).copy(),
            pts=len(frames),
        ))
        pos = payload_start + frame_size

    logger.debug(f"Read Y4M {width}x{height} @ {fps_num}/{fps_den}, {len(frames)} frames")
    return RawVideo(width=width, height=height, fps_num=fps_num, fps_den=fps_den, frames=frames)


def stream_header(video):
    return (
        f'YUV4MPEG2 W{video.width} H{video.height} F{video.fps_num}:{video.fps_den} '
        f'Ip A1:1 C420jpeg\n'
    ).encode('ascii')


def write_y4m(video):
    if not video.frames:
        raise EmptyInput('cannot write a Y4M stream with no frames')

    chunks = [stream_header(video)]
    for frame in video.frames:
        chunks.append(FRAME_MARKER + b'\n')
        for plane in frame.planes:
            chunks.append(np.ascontiguousarray(plane, dtype=np.uint8).tobytes())
    return b''.join(chunks)
