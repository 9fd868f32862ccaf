"""
Chi-square test of a byte histogram against the uniform distribution.
"""
import logging

import numpy as np
from django.conf import settings
from scipy.stats import chi2

from mvstego.exceptions import EmptyInput
from .histogram import ascii_histogram

logger = logging.getLogger(__name__)

DEGREES_OF_FREEDOM = 255


def chi_square_uniform(histogram):
    total = histogram.total
    if total == 0:
        raise EmptyInput('chi-square needs at least one observation')
    expected = total / 256
    return float(((histogram.counts - expected) ** 2).sum() / expected)


def chi_square_pvalue(statistic):
    """Probability of a statistic this large from uniformly random bytes."""
    return float(chi2.sf(statistic, df=DEGREES_OF_FREEDOM))


def calibrate_threshold(trials=None, length=2048, seed=None, percentile=99):
    """
    Detection threshold: the ``percentile`` of the statistic over ``trials``
    uniformly random streams of ``length`` bytes.
    """
    config = getattr(settings, 'MVSTEGO', {})
    trials = trials or config.get('CALIBRATION_TRIALS', 100)
    seed = config.get('CALIBRATION_SEED', 2013) if seed is None else seed

    rng = np.random.default_rng(seed)
    statistics = [
        chi_square_uniform(ascii_histogram(rng.integers(0, 256, length, dtype=np.uint8).tobytes()))
        for _ in range(trials)
    ]
    threshold = float(np.percentile(statistics, percentile))
    logger.info(f"Chi-square threshold {threshold:.1f} ({percentile}th percentile of {trials} trials)")
    return threshold
