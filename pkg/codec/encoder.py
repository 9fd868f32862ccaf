"""
Video encoder.

Per frame the encoder runs motion estimation, decides SKIP blocks, hands
every INTER decision to the macroblock hook, computes the residual against
the (possibly modified) motion vector, quantises, entropy codes and finally
reconstructs the frame exactly as the decoder will.

Hook contracts::

    mb_hook(frame_index, frame_type, mb_index, mode, mv) -> mv
    coeff_hook(frame_index, mb_index, block, pre_quant) -> block

mb_hook only ever sees INTER macroblocks. coeff_hook receives the first
luma block of INTER macroblocks, either as raw DCT coefficients
(pre_quant=True, before quantise) or as quantised levels (pre_quant=False).
"""
import logging

import numpy as np

from formats.container import ContainerHeader, EncodedFrame, FrameType, StegoContainer
from mvstego.exceptions import EmptyInput, HookRangeError
from .frames import join_blocks, pad_frame, partition, split_blocks
from .macroblock import MacroblockRecord, encode_frame_records
from .motion import MacroblockMode, MotionVector, ZERO_MV, estimate_frame_motion, motion_compensate
from .params import CodecParams
from .transform import INTRA_PREDICTOR, dct8, quantise, reconstruct_residuals

logger = logging.getLogger(__name__)


def predict_blocks(ref, records, origins):
    """Prediction for every macroblock as a (macroblocks, 6, 8, 8) int array."""
    predictions = np.full((len(records), 6, 8, 8), INTRA_PREDICTOR, dtype=np.int64)
    for index, (record, origin) in enumerate(zip(records, origins)):
        if record.mode == MacroblockMode.INTRA:
            continue
        mv = record.mv if record.has_motion_vector else ZERO_MV
        luma, cb, cr = motion_compensate(ref, mv, origin)
        predictions[index, 0] = luma[:8, :8]
        predictions[index, 1] = luma[:8, 8:]
        predictions[index, 2] = luma[8:, :8]
        predictions[index, 3] = luma[8:, 8:]
        predictions[index, 4] = cb
        predictions[index, 5] = cr
    return predictions


def reconstruct_frame(predictions, levels, qp, coded_width, coded_height, pts):
    """Shared by encoder and decoder: prediction + dequantised residual."""
    pixels = predictions + reconstruct_residuals(levels, qp)
    blocks = np.clip(pixels, 0, 255).astype(np.uint8)
    return join_blocks(blocks, coded_width, coded_height, pts=pts)


class VideoEncoder:
    """
    Encodes a RawVideo into a StegoContainer.

    After ``encode()`` the in-loop reconstruction of every coded frame is
    available in ``reconstructed``; the decoder reproduces it exactly.
    """

    def __init__(self, params=None, mb_hook=None, coeff_hook=None, pre_quant=False):
        self.params = params or CodecParams()
        self.mb_hook = mb_hook
        self.coeff_hook = coeff_hook
        self.pre_quant = pre_quant
        self.reconstructed = []

    def _check_hook_mv(self, mv):
        limit = self.params.search_range + 1
        mv = MotionVector(int(mv[0]), int(mv[1]))
        if abs(mv.dx >> 2) > limit or abs(mv.dy >> 2) > limit:
            raise HookRangeError(f'hook returned {mv}, outside +/-{limit} pels')
        return mv

    def _decide_p_frame(self, frame_index, cur, ref, origins):
        params = self.params
        decisions = estimate_frame_motion(cur.y, ref.y, params)
        cur_blocks = split_blocks(cur).astype(np.int64)

        records = []
        for decision in decisions:
            if decision.mode == MacroblockMode.INTRA:
                records.append(MacroblockRecord(mode=MacroblockMode.INTRA))
            else:
                records.append(MacroblockRecord(mode=MacroblockMode.INTER, mv=decision.mv))

        # SKIP is decided on the unmodified zero vector, before any hook runs
        zero_mv = [i for i, r in enumerate(records) if r.has_motion_vector and r.mv == ZERO_MV]
        if zero_mv:
            colocated = predict_blocks(ref, [records[i] for i in zero_mv], [origins[i] for i in zero_mv])
            zero_levels = quantise(dct8(cur_blocks[zero_mv] - colocated), params.qp)
            for i, levels in zip(zero_mv, zero_levels):
                if not levels.any():
                    records[i] = MacroblockRecord(mode=MacroblockMode.SKIP)

        if self.mb_hook is not None:
            for mb_index, record in enumerate(records):
                if not record.has_motion_vector:
                    continue
                record.mv = self._check_hook_mv(
                    self.mb_hook(frame_index, FrameType.P, mb_index, record.mode, record.mv)
                )
        return records, cur_blocks

    def _quantise_residuals(self, frame_index, records, cur_blocks, predictions):
        qp = self.params.qp
        coeffs = dct8(cur_blocks - predictions)
        hooked = [
            i for i, r in enumerate(records) if r.has_motion_vector
        ] if self.coeff_hook is not None else []

        if self.pre_quant:
            for mb_index in hooked:
                coeffs[mb_index, 0] = self.coeff_hook(frame_index, mb_index, coeffs[mb_index, 0].copy(), True)
        levels = quantise(coeffs, qp)
        if not self.pre_quant:
            for mb_index in hooked:
                levels[mb_index, 0] = self.coeff_hook(frame_index, mb_index, levels[mb_index, 0].copy(), False)

        for mb_index, record in enumerate(records):
            if record.mode == MacroblockMode.SKIP:
                levels[mb_index] = 0
            record.levels = levels[mb_index]
        return levels

    def encode(self, video, audio=None):
        if not video.frames:
            raise EmptyInput('cannot encode a video with no frames')
        video.check_timestamps()
        params = self.params
        header = ContainerHeader(
            display_width=video.width, display_height=video.height,
            fps_num=video.fps_num, fps_den=video.fps_den,
            gop_size=params.gop_size, qp=params.qp,
        )
        coded_w, coded_h = header.coded_width, header.coded_height
        origins = partition(coded_w, coded_h)
        first_pts = video.frames[0].pts

        self.reconstructed = []
        encoded = []
        reference = None
        for frame_index, source in enumerate(video.frames):
            pts = source.pts - first_pts
            cur = pad_frame(source, coded_w, coded_h)
            if pts % params.gop_size == 0:
                frame_type = FrameType.I
                records = [MacroblockRecord(mode=MacroblockMode.INTRA) for _ in origins]
                cur_blocks = split_blocks(cur).astype(np.int64)
            else:
                frame_type = FrameType.P
                records, cur_blocks = self._decide_p_frame(frame_index, cur, reference, origins)

            predictions = predict_blocks(reference, records, origins)
            levels = self._quantise_residuals(frame_index, records, cur_blocks, predictions)
            reference = reconstruct_frame(predictions, levels, params.qp, coded_w, coded_h, pts)
            self.reconstructed.append(reference)

            encoded.append(EncodedFrame(
                frame_type=frame_type, pts=pts, data=encode_frame_records(records),
            ))
            logger.debug(
                f"Frame {frame_index} ({FrameType(frame_type).label}): "
                f"{sum(r.mode == MacroblockMode.SKIP for r in records)} skip, "
                f"{sum(r.mode == MacroblockMode.INTRA for r in records)} intra"
            )

        logger.info(f"Encoded {len(encoded)} frames at {coded_w}x{coded_h}, gop {params.gop_size}, qp {params.qp}")
        return StegoContainer(header=header, frames=encoded, audio=audio)


def encode_video(video, params=None, mb_hook=None, coeff_hook=None, pre_quant=False, audio=None):
    encoder = VideoEncoder(params=params, mb_hook=mb_hook, coeff_hook=coeff_hook, pre_quant=pre_quant)
    return encoder.encode(video, audio=audio)
