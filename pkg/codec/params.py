from dataclasses import dataclass

from django.conf import settings

from mvstego.exceptions import InvalidParams

MB_SIZE = 16
BLOCK_SIZE = 8
BLOCKS_PER_MB = 6


@dataclass(frozen=True)
class CodecParams:
    gop_size: int = 12
    qp: int = 8
    search_range: int = 16
    intra_sad_threshold: int = MB_SIZE * MB_SIZE * 12

    def __post_init__(self):
        if not 1 <= self.gop_size <= 255:
            raise InvalidParams(f'gop_size must be 1..255, got {self.gop_size}')
        if not 1 <= self.qp <= 63:
            raise InvalidParams(f'qp must be 1..63, got {self.qp}')
        if self.search_range < 0:
            raise InvalidParams(f'search_range must be >= 0, got {self.search_range}')
        if self.intra_sad_threshold < 0:
            raise InvalidParams('intra_sad_threshold must be >= 0')

    @classmethod
    def from_settings(cls, **overrides):
        """Defaults from settings.MVSTEGO; keyword arguments that are not None win."""
        config = getattr(settings, 'MVSTEGO', {})
        values = {
            'gop_size': config.get('GOP_SIZE', cls.gop_size),
            'qp': config.get('QP', cls.qp),
            'search_range': config.get('SEARCH_RANGE', cls.search_range),
            'intra_sad_threshold': config.get('INTRA_SAD_THRESHOLD', cls.intra_sad_threshold),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)
