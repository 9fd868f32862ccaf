"""
Bit error rate of the coefficient channel, before and after quantisation.
"""
import logging
from dataclasses import dataclass

from codec.decoder import iter_macroblocks
from codec.encoder import VideoEncoder
from codec.params import CodecParams
from .modes import EmbedMode
from .strategies import get_strategy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BitErrorReport:
    sent: int
    placed: int
    errors: int

    @property
    def ber(self):
        return self.errors / self.sent if self.sent else 0.0


def measure_coeff_ber(video, bits, params=None, pre_quant=False):
    """
    Embed raw ``bits`` (no framing) in the coefficient channel and compare
    position by position with what the decoder reads back. Bits that found
    no slot count as errors.
    """
    params = params or CodecParams()
    bits = [int(bit) & 1 for bit in bits]
    strategy = get_strategy(EmbedMode.COEFF, bits, pre_quant=pre_quant, qp=params.qp)
    container = VideoEncoder(params=params, **strategy.encoder_hooks()).encode(video)

    received = get_strategy(EmbedMode.COEFF).read(iter_macroblocks(container))
    errors = sum(sent != got for sent, got in zip(bits, received))
    errors += max(0, len(bits) - len(received))
    report = BitErrorReport(sent=len(bits), placed=strategy.placed, errors=errors)
    logger.info(
        f"Coefficient channel ({'pre' if pre_quant else 'post'}-quantisation, qp {params.qp}): "
        f"{report.errors}/{report.sent} bit errors, BER {report.ber:.3f}"
    )
    return report
