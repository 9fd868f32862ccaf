"""Raw picture size arithmetic."""
from dataclasses import dataclass

from .video import chroma_dims


@dataclass(frozen=True)
class RawFrameSize:
    width: int
    height: int
    pixels: int
    rgb_bytes: int
    yuv420_bytes: int


def raw_frame_size(width, height):
    """
    Size of one uncompressed frame.

    A 1920x1080 frame holds 2,073,600 pixels: 6,220,800 bytes as RGB
    triples, 3,110,400 bytes as 8-bit 4:2:0.
    """
    pixels = width * height
    c_width, c_height = chroma_dims(width, height)
    return RawFrameSize(
        width=width,
        height=height,
        pixels=pixels,
        rgb_bytes=pixels * 3,
        yuv420_bytes=pixels + 2 * c_width * c_height,
    )
