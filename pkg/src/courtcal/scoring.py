"""Rendered-pixel scoring: count drawn court pixels landing on bright white.

A detection is drawn as integer-walked strokes and scored by how many of
its pixels coincide with bright white pixels of the reference frame; the
highest-scoring detection wins across candidates and frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibrate import CandidateDetection, clip_segment_at_w_plane
from .court import CourtTemplate
from .image import Frame, integer_line_walk

DEFAULT_STROKE_WIDTH = 3
DEFAULT_WHITE_THRESHOLD = 200


@dataclass(frozen=True)
class RenderedCourt:
    """Deduplicated integer pixels covered by drawing the projected court."""

    pixels: np.ndarray  # (n, 2) int columns (x, y), unique, inside the frame
    frame_size: tuple[int, int]

    @property
    def count(self) -> int:
        return int(self.pixels.shape[0])


def _clip_to_rect(p0, p1, x_min, x_max, y_min, y_max):
    """Liang-Barsky clip of the segment to a rectangle; None if fully outside."""
    x0, y0 = p0
    x1, y1 = p1
    dx, dy = x1 - x0, y1 - y0
    t0, t1 = 0.0, 1.0
    for p, q in (
        (-dx, x0 - x_min),
        (dx, x_max - x0),
        (-dy, y0 - y_min),
        (dy, y_max - y0),
    ):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        r = q / p
        if p < 0.0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    return (x0 + t0 * dx, y0 + t0 * dy), (x0 + t1 * dx, y0 + t1 * dy)


def render_court(
    h: np.ndarray,
    template: CourtTemplate,
    frame_size: tuple[int, int],
    stroke_width: int = DEFAULT_STROKE_WIDTH,
) -> RenderedCourt:
    """Draw every template segment through the homography at the given stroke.

    Each segment is clipped at the w-plane, walked with an integer line
    walk, and thickened by ``stroke_width`` pixels across its dominant
    direction; the union is clipped to the frame and deduplicated.
    """
    w_img, h_img = frame_size
    pad = stroke_width  # walk slightly beyond the frame so strokes enter cleanly
    all_x: list[np.ndarray] = []
    all_y: list[np.ndarray] = []
    off_lo = -(stroke_width // 2)
    offsets = range(off_lo, off_lo + stroke_width)

    for seg in template.segments:
        clipped_w = clip_segment_at_w_plane(h, seg.p0, seg.p1)
        if clipped_w is None:
            continue
        clipped = _clip_to_rect(*clipped_w, -pad, w_img - 1 + pad, -pad, h_img - 1 + pad)
        if clipped is None:
            continue
        p0, p1 = clipped
        xs, ys = integer_line_walk(p0, p1)
        x_dominant = abs(p1[0] - p0[0]) >= abs(p1[1] - p0[1])
        for off in offsets:
            if x_dominant:
                all_x.append(xs)
                all_y.append(ys + off)
            else:
                all_x.append(xs + off)
                all_y.append(ys)

    if not all_x:
        return RenderedCourt(pixels=np.empty((0, 2), dtype=np.int64), frame_size=frame_size)
    xs = np.concatenate(all_x)
    ys = np.concatenate(all_y)
    keep = (xs >= 0) & (xs < w_img) & (ys >= 0) & (ys < h_img)
    xs, ys = xs[keep], ys[keep]
    flat = np.unique(ys * w_img + xs)
    return RenderedCourt(
        pixels=np.column_stack([flat % w_img, flat // w_img]), frame_size=frame_size
    )


def is_bright_white(pixel, white_threshold: int = DEFAULT_WHITE_THRESHOLD) -> bool:
    """True iff every channel is at least the threshold."""
    p = np.asarray(pixel, dtype=np.int64)
    return bool(p.min() >= white_threshold)


def bright_white_mask(frame: Frame | np.ndarray, white_threshold: int = DEFAULT_WHITE_THRESHOLD) -> np.ndarray:
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    return px.min(axis=2) >= white_threshold


def score_detection(
    rendered: RenderedCourt,
    reference: Frame | np.ndarray,
    white_threshold: int = DEFAULT_WHITE_THRESHOLD,
) -> int:
    """Count rendered pixels that land on bright white reference pixels.

    ``reference`` may be the reference frame or a precomputed boolean
    bright-white mask.
    """
    ref = reference.pixels if isinstance(reference, Frame) else np.asarray(reference)
    white = ref if ref.dtype == bool else ref.min(axis=2) >= white_threshold
    if rendered.count == 0:
        return 0
    xs, ys = rendered.pixels[:, 0], rendered.pixels[:, 1]
    return int(white[ys, xs].sum())


def select_best(detections: list[CandidateDetection]) -> CandidateDetection | None:
    """Argmax by score; ties break to the earliest frame_id, then input order."""
    if not detections:
        return None
    return sorted(detections, key=lambda d: (-d.score, d.frame_id))[0]
