"""Frame sequences on disk, pure-quaternion encoding, masks and quality metrics."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from PIL import Image

from .errors import DimensionMismatch
from .tensor import QTensor3

FRAME_GLOB = "*.png"


@dataclass(frozen=True)
class FrameSequence:
    """RGB video held as floats in [0, 1], shape ``(height, width, frames, 3)``."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=float)
        if px.ndim != 4 or px.shape[-1] != 3 or px.shape[2] < 1:
            raise DimensionMismatch(f"expected (height, width, frames, 3), got {px.shape}")
        if px.size and (px.min() < 0.0 or px.max() > 1.0):
            raise ValueError("pixel values must lie in [0, 1]")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def frames(self) -> int:
        return self.pixels.shape[2]

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.pixels.shape[:3]

    def to_uint8(self) -> np.ndarray:
        return np.floor(self.pixels * 255.0 + 0.5).astype(np.uint8)

    @classmethod
    def from_uint8(cls, arr) -> "FrameSequence":
        return cls(np.asarray(arr, dtype=np.uint8) / 255.0)


def load_frames(directory) -> FrameSequence:
    """Read every PNG in ``directory`` (lexicographic order) as one frame."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    files = sorted(directory.glob(FRAME_GLOB))
    if not files:
        raise FileNotFoundError(f"no PNG frames in {directory}")
    frames = []
    for f in files:
        with Image.open(f) as im:
            frames.append(np.asarray(im.convert("RGB"), dtype=np.uint8))
    if len({fr.shape for fr in frames}) != 1:
        raise DimensionMismatch(f"frames in {directory} differ in size")
    return FrameSequence.from_uint8(np.stack(frames, axis=2))


def save_frames(seq: FrameSequence, directory, prefix: str = "frame_") -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data = seq.to_uint8()
    paths = []
    for k in range(seq.frames):
        path = directory / f"{prefix}{k + 1:04d}.png"
        Image.fromarray(data[:, :, k, :], mode="RGB").save(path, optimize=False)
        paths.append(path)
    return paths


def rgb_to_qtensor(seq: FrameSequence) -> QTensor3:
    """Pixel ``(R, G, B)`` becomes the pure quaternion ``R i + G j + B k``."""
    px = seq.pixels
    return QTensor3.from_parts(x=px[..., 0], y=px[..., 1], z=px[..., 2])


def qtensor_to_rgb(T: QTensor3) -> FrameSequence:
    """Imaginary parts clamped to [0, 1] and quantized to 8 bits; the real part is dropped."""
    rgb = np.clip(T.components()[..., 1:], 0.0, 1.0)
    return FrameSequence.from_uint8(np.floor(rgb * 255.0 + 0.5))


@dataclass(frozen=True)
class MaskSpec:
    sample_rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.sample_rate <= 1.0:
            raise ValueError(f"sample_rate must lie in (0, 1], got {self.sample_rate}")


def sample_mask(dims, spec: MaskSpec) -> np.ndarray:
    """Boolean mask with exactly ``floor(SR * I1 * I2 * I3)`` observed entries.

    One entry covers all three colour channels of a pixel.
    """
    dims = tuple(int(d) for d in dims)
    n = math.prod(dims)
    count = math.floor(spec.sample_rate * n)
    rng = np.random.default_rng(spec.seed)
    flat = np.zeros(n, dtype=bool)
    flat[rng.choice(n, size=count, replace=False)] = True
    return flat.reshape(dims)


# 16-byte little-endian header: magic, version, value of the first run,
# padding, three dims, reserved
_MASK_HEADER = struct.Struct("<4sHBxHHHH")
MASK_MAGIC = b"QMSK"
MASK_VERSION = 1


def encode_mask(mask) -> bytes:
    """Run-length encode a boolean ``(I1, I2, I3)`` mask (C order).

    The body is a sequence of uint32 run lengths alternating between the
    header's first value and its negation.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 3:
        raise DimensionMismatch(f"mask must be 3-D, got shape {mask.shape}")
    if max(mask.shape) > 0xFFFF:
        raise ValueError("mask dims must fit in 16 bits")
    flat = mask.ravel()
    first = bool(flat[0]) if flat.size else False
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate([[0], change, [flat.size]])
    runs = np.diff(bounds).astype("<u4")
    header = _MASK_HEADER.pack(MASK_MAGIC, MASK_VERSION, int(first), *mask.shape, 0)
    return header + runs.tobytes()


def decode_mask(blob: bytes) -> np.ndarray:
    if len(blob) < _MASK_HEADER.size:
        raise ValueError("mask file is truncated")
    magic, version, first, i1, i2, i3, _ = _MASK_HEADER.unpack_from(blob)
    if magic != MASK_MAGIC:
        raise ValueError(f"bad mask magic {magic!r}")
    if version != MASK_VERSION:
        raise ValueError(f"unsupported mask version {version}")
    body = blob[_MASK_HEADER.size :]
    if len(body) % 4:
        raise ValueError("mask body is not a whole number of uint32 runs")
    runs = np.frombuffer(body, dtype="<u4").astype(np.int64)
    n = i1 * i2 * i3
    if runs.sum() != n:
        raise ValueError(f"run lengths sum to {runs.sum()}, expected {n}")
    values = (np.arange(len(runs)) % 2 == 0) == bool(first)
    return np.repeat(values, runs).reshape(i1, i2, i3)


def write_mask(path, mask) -> None:
    Path(path).write_bytes(encode_mask(mask))


def read_mask(path) -> np.ndarray:
    return decode_mask(Path(path).read_bytes())


def _pixels(x) -> np.ndarray:
    return x.pixels if isinstance(x, FrameSequence) else np.asarray(x, dtype=float)


def psnr(ref, test, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB over all pixels, channels and frames.

    Identical inputs give ``math.inf``.
    """
    a, b = _pixels(ref), _pixels(test)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak**2 / mse)


SSIM_WINDOW = 8
SSIM_K1, SSIM_K2 = 0.01, 0.03


def ssim(x, y, peak: float = 1.0, window: int = SSIM_WINDOW) -> float:
    """Mean SSIM of two 2-D images over all ``window x window`` uniform windows."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 2:
        raise DimensionMismatch(f"ssim needs two equal 2-D images, got {x.shape} and {y.shape}")
    w = min(window, *x.shape)
    c1 = (SSIM_K1 * peak) ** 2
    c2 = (SSIM_K2 * peak) ** 2

    def local_mean(img):
        return sliding_window_view(img, (w, w)).mean(axis=(-2, -1))

    mx, my = local_mean(x), local_mean(y)
    sxx = local_mean(x * x) - mx * mx
    syy = local_mean(y * y) - my * my
    sxy = local_mean(x * y) - mx * my
    num = (2.0 * mx * my + c1) * (2.0 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def assim(ref, test, peak: float = 1.0) -> float:
    """Average SSIM: per-channel SSIM averaged over channels, then over frames."""
    a, b = _pixels(ref), _pixels(test)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    per_frame = [
        np.mean([ssim(a[:, :, k, c], b[:, :, k, c], peak) for c in range(a.shape[3])]) for k in range(a.shape[2])
    ]
    return float(np.mean(per_frame))
