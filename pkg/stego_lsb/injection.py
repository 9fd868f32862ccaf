"""
End-of-file injection: bytes appended after the declared WAV data chunk.
Players that honour the declared size never read them.
"""
import logging

from formats.wav import locate_data_chunk, read_wav

logger = logging.getLogger(__name__)


def inject_append(wav, payload):
    wav = bytes(wav)
    # validates the file and its declared chunk sizes
    _, start, end = locate_data_chunk(wav)
    if (end - start) & 1 and len(wav) == end:
        # odd data chunk whose pad byte is missing
        wav += b'\x00'
    logger.info(f"Appended {len(payload)} bytes after the data chunk")
    return wav + bytes(payload)


def extract_appended(wav):
    _, _, trailing = read_wav(wav)
    return trailing
