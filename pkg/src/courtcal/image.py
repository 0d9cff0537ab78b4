"""Frame container and PNG I/O helpers."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

MIN_FRAME_SIDE = 32


@dataclass(frozen=True)
class Frame:
    """An 8-bit RGB image plus its identity and position within its source.

    ``crop_origin`` is the (x, y) pixel offset of this frame inside the
    frame it was cropped from; (0, 0) for an uncropped frame.
    """

    pixels: np.ndarray  # (height, width, 3) uint8
    frame_id: str = "frame"
    crop_origin: tuple[int, int] = (0, 0)

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3 or px.dtype != np.uint8:
            raise ValueError(f"frame must be (h, w, 3) uint8, got {px.shape} {px.dtype}")
        h, w = px.shape[:2]
        if w < MIN_FRAME_SIDE or h < MIN_FRAME_SIDE:
            raise ValueError(f"frame must be at least {MIN_FRAME_SIDE}x{MIN_FRAME_SIDE}, got {w}x{h}")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def load_frame(path: str | os.PathLike, frame_id: str | None = None) -> Frame:
    """Read an image file as an RGB Frame; frame_id defaults to the file stem."""
    with Image.open(path) as img:
        px = np.asarray(img.convert("RGB"), dtype=np.uint8)
    if frame_id is None:
        frame_id = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    return Frame(pixels=px, frame_id=frame_id)


def save_png(path: str | os.PathLike, pixels: np.ndarray) -> None:
    """Write an (h, w, 3) uint8 RGB or (h, w) uint8 gray array as PNG."""
    arr = np.ascontiguousarray(pixels)
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {arr.dtype}")
    mode = "RGB" if arr.ndim == 3 else "L"
    Image.fromarray(arr, mode=mode).save(os.fspath(path), format="PNG")


def load_gray(path: str | os.PathLike) -> np.ndarray:
    """Read an image file as a single-channel (h, w) uint8 array."""
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def mask_to_u8(mask: np.ndarray) -> np.ndarray:
    """Boolean mask to an 8-bit image (True -> 255) for debug emission."""
    return np.where(mask, 255, 0).astype(np.uint8)


def integer_line_walk(p0: tuple[float, float], p1: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
    """Evenly spaced samples of the segment rounded to pixel centers.

    Returns (xs, ys) int arrays with one sample per unit step along the
    dominant axis, endpoints included.
    """
    dx = p1[0] - p0[0]
    dy = p1[1] - p0[1]
    steps = int(np.ceil(max(abs(dx), abs(dy)))) + 1
    t = np.linspace(0.0, 1.0, steps)
    xs = np.rint(p0[0] + t * dx).astype(np.int64)
    ys = np.rint(p0[1] + t * dy).astype(np.int64)
    return xs, ys


def luminance(pixels: np.ndarray) -> np.ndarray:
    """Rec. 601 luma as float64, unrounded."""
    px = np.asarray(pixels, dtype=np.float64)
    return px[:, :, 0] * 0.299 + px[:, :, 1] * 0.587 + px[:, :, 2] * 0.114
