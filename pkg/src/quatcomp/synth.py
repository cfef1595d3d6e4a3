"""Synthetic test data: exact low-tubal-rank tensors and smooth colour video."""

from __future__ import annotations

import numpy as np

from .errors import InvalidTruncation
from .media import FrameSequence
from .tensor import QTensor3


def lowrank_tensor(dims, rank: int, seed: int = 0) -> QTensor3:
    """Pure quaternion tensor of tubal rank exactly ``rank`` with entries in [0, 1].

    Entry ``(i, j, k)`` is ``sum_l a[i, l] c[l, k] b[j, l]`` with real ``a``,
    ``c`` and pure quaternion ``b``, so each frontal slice (and each slice of
    any mode-3 transform of the tensor) is a sum of ``rank`` outer products.
    All factors are nonnegative, which keeps the imaginary parts valid RGB.
    """
    i1, i2, i3 = (int(d) for d in dims)
    if not 1 <= rank < min(i1, i2):
        raise InvalidTruncation(f"rank={rank} must satisfy 1 <= rank < min(I1, I2) = {min(i1, i2)}")
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 1.0, (i1, rank))
    b = rng.uniform(0.0, 1.0, (i2, rank, 3))
    c = rng.uniform(0.5, 1.0, (rank, i3))
    rgb = np.einsum("il,jlc,lk->ijkc", a, b, c)
    rgb /= rgb.max()
    return QTensor3.from_parts(x=rgb[..., 0], y=rgb[..., 1], z=rgb[..., 2])


def smooth_video(dims, seed: int = 0, blobs: int = 4) -> FrameSequence:
    """Slowly drifting soft colour blobs over a flat background.

    Blob widths are a sizeable fraction of the frame, so the content is
    band-limited and nearly all of its DCT energy sits in low frequencies.
    """
    h, w, f = (int(d) for d in dims)
    rng = np.random.default_rng(seed)
    yy, xx = np.meshgrid(np.arange(h) / h, np.arange(w) / w, indexing="ij")
    t = np.arange(f) / max(f, 1)
    background = rng.uniform(0.2, 0.4, 3)
    video = np.broadcast_to(background, (h, w, f, 3)).copy()
    for _ in range(blobs):
        centre = rng.uniform(0.25, 0.75, 2)
        drift = rng.uniform(-0.15, 0.15, 2)
        width = rng.uniform(0.12, 0.2)
        colour = rng.uniform(0.0, 0.6 / blobs, 3)
        for k in range(f):
            cy, cx = centre + drift * t[k]
            g = np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2.0 * width**2))
            video[:, :, k, :] += g[..., None] * colour
    return FrameSequence(np.clip(video, 0.0, 1.0))
