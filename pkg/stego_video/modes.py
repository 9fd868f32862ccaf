from django.db import models

from mvstego.exceptions import InvalidParams


class EmbedMode(models.IntegerChoices):
    FIRST_MB_X = 0, 'first-mb-x'
    FIRST_MB_Y = 1, 'first-mb-y'
    ALL_MB_X = 2, 'all-mb-x'
    ALL_MB_Y = 3, 'all-mb-y'
    COEFF = 4, 'coeff'

    @classmethod
    def from_label(cls, label):
        for mode in cls:
            if mode.label == label:
                return mode
        raise InvalidParams(f'unknown embed mode {label!r}, expected one of {", ".join(cls.labels)}')
