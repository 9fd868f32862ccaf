"""
Side-by-side comparison of the motion vectors of two containers.
"""
import csv
import io
from dataclasses import dataclass, field
from typing import NamedTuple

from codec.decoder import iter_macroblocks
from codec.motion import MacroblockMode, ZERO_MV
from mvstego.exceptions import InvalidComparison


class MvDiffEntry(NamedTuple):
    frame: int
    mb: int
    mode_a: int
    mode_b: int
    ddx: int
    ddy: int


@dataclass
class MvDiffReport:
    entries: list = field(default_factory=list)

    @property
    def mean_ddx(self):
        return sum(e.ddx for e in self.entries) / len(self.entries) if self.entries else 0.0

    @property
    def mean_ddy(self):
        return sum(e.ddy for e in self.entries) / len(self.entries) if self.entries else 0.0

    @property
    def max_ddx(self):
        return max((e.ddx for e in self.entries), default=0)

    @property
    def max_ddy(self):
        return max((e.ddy for e in self.entries), default=0)

    def changed(self):
        return [e for e in self.entries if e.ddx or e.ddy or e.mode_a != e.mode_b]

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(['frame', 'mb', 'mode_a', 'mode_b', 'ddx', 'ddy'])
        for e in self.entries:
            writer.writerow([
                e.frame, e.mb, MacroblockMode(e.mode_a).label, MacroblockMode(e.mode_b).label, e.ddx, e.ddy,
            ])
        return out.getvalue()


def _mv(record):
    return record.mv if record.has_motion_vector else ZERO_MV


def mv_diff_report(a, b):
    """
    Pair macroblocks by position. Vectors are in quarter-pels; SKIP and
    INTRA macroblocks count as the zero vector.
    """
    ha, hb = a.header, b.header
    if (ha.coded_width, ha.coded_height, ha.gop_size) != (hb.coded_width, hb.coded_height, hb.gop_size):
        raise InvalidComparison('containers differ in coded size or GOP structure')
    if a.frame_count != b.frame_count:
        raise InvalidComparison(f'containers hold {a.frame_count} and {b.frame_count} frames')

    report = MvDiffReport()
    for (frame_index, _, records_a), (_, _, records_b) in zip(iter_macroblocks(a), iter_macroblocks(b)):
        for mb_index, (ra, rb) in enumerate(zip(records_a, records_b)):
            mva, mvb = _mv(ra), _mv(rb)
            report.entries.append(MvDiffEntry(
                frame=frame_index, mb=mb_index, mode_a=int(ra.mode), mode_b=int(rb.mode),
                ddx=abs(mva.dx - mvb.dx), ddy=abs(mva.dy - mvb.dy),
            ))
    return report
