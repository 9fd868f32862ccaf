"""
Deterministic synthetic test sequences.
"""
import numpy as np

from formats.video import Frame, RawVideo, chroma_dims


def _to_plane(values):
    return np.clip(np.rint(values), 0, 255).astype(np.uint8)


def moving_gradient(width=320, height=240, frames=60, velocity=(2, 1), noise=0, seed=0, fps=30):
    """
    A textured gradient translating by ``velocity`` whole pixels per frame.

    Frame t samples the same pattern at (x - vx*t, y - vy*t), so the true
    motion between consecutive frames is exactly (-vx, -vy) pixels.
    ``noise`` adds uniform integer luma noise in [-noise, noise].
    """
    rng = np.random.default_rng(seed)
    vx, vy = velocity
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    c_width, c_height = chroma_dims(width, height)
    cys, cxs = np.mgrid[0:c_height, 0:c_width].astype(np.float64) * 2

    result = []
    for t in range(frames):
        x, y = xs - vx * t, ys - vy * t
        luma = 80 + 0.2 * x + 0.2 * y + 40 * np.sin(x / 7.0) * np.sin(y / 9.0)
        if noise:
            luma = luma + rng.integers(-noise, noise + 1, luma.shape)
        cx, cy = cxs - vx * t, cys - vy * t
        result.append(Frame(
            y=_to_plane(luma),
            cb=_to_plane(128 + 30 * np.sin(cx / 11.0)),
            cr=_to_plane(128 + 30 * np.cos(cy / 13.0)),
            pts=t,
        ))
    return RawVideo(width=width, height=height, fps_num=fps, fps_den=1, frames=result)


def static_blocks(width=64, height=48, frames=13, seed=0, fps=30):
    """
    Identical frames made of flat 8x8 blocks.

    Flat blocks are reproduced exactly at qp 8, so every P-frame of this
    sequence codes as all-SKIP.
    """
    rng = np.random.default_rng(seed)
    c_width, c_height = chroma_dims(width, height)

    def flat(w, h):
        cells = rng.integers(16, 241, ((h + 7) // 8, (w + 7) // 8))
        return np.kron(cells, np.ones((8, 8), dtype=np.int64))[:h, :w].astype(np.uint8)

    first = Frame(y=flat(width, height), cb=flat(c_width, c_height), cr=flat(c_width, c_height))
    return RawVideo(width=width, height=height, fps_num=fps, fps_den=1,
                    frames=[first.copy(pts=t) for t in range(frames)])


def random_video(seed, width=None, height=None, frames=None):
    """Small video mixing translation, noise and scene cuts, for property tests."""
    rng = np.random.default_rng(seed)
    width = width or int(rng.choice([16, 24, 32, 48]))
    height = height or int(rng.choice([16, 24, 32]))
    frames = frames or int(rng.integers(2, 7))
    c_width, c_height = chroma_dims(width, height)

    base = rng.integers(0, 256, (height + 16, width + 16))
    base = (base + np.roll(base, 1, axis=0) + np.roll(base, 1, axis=1) + np.roll(base, 1, axis=(0, 1))) / 4
    result = []
    ox, oy = 8, 8
    for t in range(frames):
        if rng.random() < 0.15:
            base = rng.integers(0, 256, base.shape).astype(np.float64)
        ox = int(np.clip(ox + rng.integers(-2, 3), 0, 16))
        oy = int(np.clip(oy + rng.integers(-2, 3), 0, 16))
        luma = base[oy:oy + height, ox:ox + width] + rng.integers(-3, 4, (height, width))
        result.append(Frame(
            y=_to_plane(luma),
            cb=_to_plane(luma[::2, ::2][:c_height, :c_width] * 0.5 + 64),
            cr=_to_plane(255 - luma[::2, ::2][:c_height, :c_width] * 0.5 - 64),
            pts=t,
        ))
    return RawVideo(width=width, height=height, fps_num=30, fps_den=1, frames=result)
