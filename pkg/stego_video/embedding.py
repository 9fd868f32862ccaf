"""
Embed payloads through the encoder hooks and recover them from the
decoded macroblock stream.
"""
import logging
from dataclasses import dataclass, field

from codec.decoder import iter_macroblocks
from codec.encoder import VideoEncoder
from codec.macroblock import encode_frame_records
from codec.params import CodecParams
from formats.container import EncodedFrame
from mvstego.exceptions import CorruptPayload, InsufficientCapacity, KeyRequired, NoPayloadFound
from .modes import EmbedMode
from .payload import HEADER_BITS, parse_payload, seal_payload
from .strategies import get_strategy

logger = logging.getLogger(__name__)

NONCE_BITS = 128


@dataclass
class CapacityReport:
    mode: int
    per_frame_bits: list = field(default_factory=list)
    # embedding perturbs reference frames, so the count can differ on the real pass
    caveat: bool = True

    @property
    def estimated_bits(self):
        return sum(self.per_frame_bits)

    def max_payload_bytes(self, encrypted=False):
        overhead = HEADER_BITS + (NONCE_BITS if encrypted else 0)
        return max(0, (self.estimated_bits - overhead) // 8)


def _run_encoder(video, params, strategy, audio=None):
    encoder = VideoEncoder(params=params, **strategy.encoder_hooks())
    container = encoder.encode(video, audio=audio)
    if strategy.remaining:
        raise InsufficientCapacity(placed=strategy.placed, required=len(strategy.bits))
    logger.info(
        f"Embedded {strategy.placed} bits in {EmbedMode(strategy.mode).label} mode "
        f"({strategy.capacity} eligible slots)"
    )
    return container


def _strategy(mode, bits, params, pre_quant=False):
    if EmbedMode(mode) == EmbedMode.COEFF:
        return get_strategy(mode, bits, pre_quant=pre_quant, qp=params.qp)
    return get_strategy(mode, bits)


def embed(video, payload, mode, params=None, key=None, nonce=None, audio=None):
    """
    Hide ``payload`` in ``video`` while encoding it.

    With a key the body is AES-CTR encrypted under ``nonce`` first.
    Raises InsufficientCapacity when bits remain after the last eligible slot.
    """
    params = params or CodecParams()
    mode = EmbedMode(mode)
    frame = seal_payload(payload, mode, key=key, nonce=nonce)
    strategy = _strategy(mode, frame.to_bits(), params)
    return _run_encoder(video, params, strategy, audio=audio)


def embed_coeff(video, payload, params=None, pre_quant=False, key=None, nonce=None, audio=None):
    """
    Hide ``payload`` in quantised AC levels. ``pre_quant`` writes into the raw
    coefficients instead, which quantisation largely destroys.
    """
    params = params or CodecParams()
    frame = seal_payload(payload, EmbedMode.COEFF, key=key, nonce=nonce)
    strategy = _strategy(EmbedMode.COEFF, frame.to_bits(), params, pre_quant=pre_quant)
    return _run_encoder(video, params, strategy, audio=audio)


def extract(container, key=None):
    """
    Recover the payload, trying every mode in order.

    The first mode whose frame parses and verifies wins. Raises KeyRequired
    for an encrypted frame without a key, CorruptPayload when a candidate
    was found but failed its checksum, and NoPayloadFound otherwise.
    """
    walk = list(iter_macroblocks(container))
    corrupt = None
    for mode in EmbedMode:
        bits = get_strategy(mode).read(walk)
        try:
            frame = parse_payload(bits, expected_mode=mode)
            if frame.encrypted and key is None:
                raise KeyRequired(f'payload in {mode.label} mode is encrypted; a key is required')
            body = frame.open(key)
        except NoPayloadFound:
            continue
        except CorruptPayload as exc:
            logger.warning(f"Candidate payload in {mode.label} mode failed its checksum")
            corrupt = exc
            continue
        logger.info(f"Extracted {len(body)} bytes from {mode.label} mode")
        return body

    if corrupt is not None:
        raise corrupt
    raise NoPayloadFound('no payload found in any embedding mode')


def estimate_capacity(video, params=None, mode=EmbedMode.ALL_MB_X):
    """
    Count eligible slots with a pass that embeds nothing. An estimate: real
    embedding changes reference frames and so later coding decisions.
    """
    params = params or CodecParams()
    strategy = _strategy(mode, (), params)
    encoder = VideoEncoder(params=params, **strategy.encoder_hooks())
    encoder.encode(video)
    report = CapacityReport(
        mode=EmbedMode(mode),
        per_frame_bits=[strategy.slots.get(index, 0) for index in range(len(video.frames))],
    )
    logger.info(f"Estimated {report.estimated_bits} bits in {EmbedMode(mode).label} mode")
    return report


def invert_motion_vectors(container):
    """Negate every INTER motion vector and leave residuals untouched."""
    frames = []
    inverted = 0
    for frame_index, _frame_type, records in iter_macroblocks(container):
        for record in records:
            if record.has_motion_vector:
                record.mv = record.mv.negated()
                inverted += 1
        source = container.frames[frame_index]
        frames.append(EncodedFrame(
            frame_type=source.frame_type, pts=source.pts, data=encode_frame_records(records),
        ))
    logger.info(f"Inverted {inverted} motion vectors")
    return container.with_frames(frames)
