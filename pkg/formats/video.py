"""
In-memory picture types shared by the Y4M reader, the codec and analysis.

Planes are 2-D ``numpy.uint8`` arrays indexed ``[row, column]``. Chroma is
4:2:0, so each chroma plane has ``ceil(width / 2) x ceil(height / 2)``
samples.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from mvstego.exceptions import InvalidDims


def chroma_dims(width, height):
    return (width + 1) // 2, (height + 1) // 2


@dataclass(eq=False)
class Frame:
    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray
    pts: int = 0

    def __post_init__(self):
        height, width = self.y.shape
        c_width, c_height = chroma_dims(width, height)
        for plane in (self.cb, self.cr):
            if plane.shape != (c_height, c_width):
                raise InvalidDims(
                    f"chroma plane {plane.shape} does not match luma {self.y.shape}"
                )

    @property
    def width(self):
        return self.y.shape[1]

    @property
    def height(self):
        return self.y.shape[0]

    @property
    def planes(self):
        return (self.y, self.cb, self.cr)

    @classmethod
    def blank(cls, width, height, value=128, pts=0):
        c_width, c_height = chroma_dims(width, height)
        return cls(
            y=np.full((height, width), value, dtype=np.uint8),
            cb=np.full((c_height, c_width), value, dtype=np.uint8),
            cr=np.full((c_height, c_width), value, dtype=np.uint8),
            pts=pts,
        )

    def copy(self, pts=None):
        return Frame(
            y=self.y.copy(), cb=self.cb.copy(), cr=self.cr.copy(),
            pts=self.pts if pts is None else pts,
        )

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.pts == other.pts and all(
            a.shape == b.shape and np.array_equal(a, b)
            for a, b in zip(self.planes, other.planes)
        )


@dataclass(eq=False)
class RawVideo:
    width: int
    height: int
    fps_num: int = 30
    fps_den: int = 1
    frames: list = field(default_factory=list)

    def __post_init__(self):
        if self.fps_den <= 0:
            raise InvalidDims("fps denominator must be positive")
        for frame in self.frames:
            if (frame.width, frame.height) != (self.width, self.height):
                raise InvalidDims(
                    f"frame {frame.pts} is {frame.width}x{frame.height}, "
                    f"video is {self.width}x{self.height}"
                )

    @property
    def fps(self):
        return Fraction(self.fps_num, self.fps_den)

    def __len__(self):
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, index):
        return self.frames[index]

    def __eq__(self, other):
        if not isinstance(other, RawVideo):
            return NotImplemented
        return (
            (self.width, self.height, self.fps_num, self.fps_den)
            == (other.width, other.height, other.fps_num, other.fps_den)
            and len(self.frames) == len(other.frames)
            and all(a == b for a, b in zip(self.frames, other.frames))
        )

    def check_timestamps(self):
        """Raise InvalidDims unless pts values are strictly increasing."""
        previous = None
        for frame in self.frames:
            if previous is not None and frame.pts <= previous:
                raise InvalidDims(f"pts {frame.pts} does not follow {previous}")
            previous = frame.pts
