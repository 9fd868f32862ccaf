"""
Binary PGM (P5) and PPM (P6) images with maxval 255.
"""
from dataclasses import dataclass

from mvstego.exceptions import ParseError, TruncatedInput, Unsupported

CHANNELS = {b'P5': 1, b'P6': 3}
MAGIC_FOR_CHANNELS = {1: b'P5', 3: b'P6'}


@dataclass(frozen=True)
class PnmImage:
    width: int
    height: int
    channels: int
    pixels: bytes

    def __post_init__(self):
        if self.channels not in MAGIC_FOR_CHANNELS:
            raise Unsupported(f'{self.channels} channels; PNM supports 1 or 3')
        expected = self.width * self.height * self.channels
        if len(self.pixels) != expected:
            raise ParseError(f'{len(self.pixels)} pixel bytes, expected {expected}')


def _header_tokens(data, count):
    """Read ``count`` whitespace separated header tokens, skipping comments."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise TruncatedInput('PNM header is cut off')
        if data[pos:pos + 1] == b'#':
            newline = data.find(b'\n', pos)
            if newline < 0:
                raise TruncatedInput('PNM comment is unterminated')
            pos = newline + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pnm(data):
    data = bytes(data)
    magic = data[:2]
    if magic in (b'P1', b'P2', b'P3'):
        raise Unsupported(f'ASCII PNM variant {magic.decode()} is not supported')
    if magic not in CHANNELS:
        raise ParseError('not a binary PGM/PPM file')

    tokens, raster_start = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(token) for token in tokens[1:])
    except ValueError:
        raise ParseError('PNM header fields must be integers')
    if maxval != 255:
        raise Unsupported(f'maxval {maxval}; only 255 is supported')

    channels = CHANNELS[magic]
    size = width * height * channels
    pixels = data[raster_start:raster_start + size]
    if len(pixels) < size:
        raise TruncatedInput(f'raster has {len(pixels)} of {size} bytes')
    return PnmImage(width=width, height=height, channels=channels, pixels=pixels)


def write_pnm(image):
    header = b'%s\n%d %d\n255\n' % (MAGIC_FOR_CHANNELS[image.channels], image.width, image.height)
    return header + bytes(image.pixels)
