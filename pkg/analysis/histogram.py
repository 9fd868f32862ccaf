"""
Byte-value histograms of the LSB string of a cover, for spotting the
skew an unencrypted text payload leaves behind.
"""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from mvstego.exceptions import ParseError


def lsb_stream_bytes(cover):
    """Pack successive LSBs of ``cover`` MSB-first into floor(n/8) bytes."""
    lsbs = np.frombuffer(bytes(cover), dtype=np.uint8) & 1
    usable = len(lsbs) // 8 * 8
    return np.packbits(lsbs[:usable]).tobytes()


@dataclass
class Histogram256:
    counts: np.ndarray = field(default_factory=lambda: np.zeros(256, dtype=np.int64))

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (256,):
            raise ValueError(f'a byte histogram has 256 counters, got shape {self.counts.shape}')

    @property
    def total(self):
        return int(self.counts.sum())

    def share(self, values):
        """Fraction of all observations falling on ``values``."""
        total = self.total
        return float(self.counts[list(values)].sum()) / total if total else 0.0

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(['value', 'count'])
        writer.writerows((value, int(count)) for value, count in enumerate(self.counts))
        return out.getvalue()

    @classmethod
    def from_csv(cls, text):
        counts = np.zeros(256, dtype=np.int64)
        reader = csv.DictReader(io.StringIO(text))
        try:
            for row in reader:
                counts[int(row['value'])] = int(row['count'])
        except (KeyError, ValueError, IndexError) as exc:
            raise ParseError(f'bad histogram CSV: {exc}')
        return cls(counts)

    def __eq__(self, other):
        if not isinstance(other, Histogram256):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)


def ascii_histogram(data):
    values = np.frombuffer(bytes(data), dtype=np.uint8)
    return Histogram256(np.bincount(values, minlength=256))
