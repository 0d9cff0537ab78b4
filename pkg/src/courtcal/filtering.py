"""Binary line-candidate masks: court-color filtration and the threshold baseline.

The court-color filter marks a pixel as a line candidate when it does not
match the dominant playing-surface color but at least ``window_matches``
pixels in the surrounding window do. Masked-black pixels (exact 0,0,0)
introduced by cropping never match and are never marked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllMaskedError
from .image import Frame

DEFAULT_N_SAMPLES = 1000
DEFAULT_BIN_WIDTH = 8
DEFAULT_COLOR_TOLERANCE = 24
DEFAULT_WINDOW_SIZE = 7
DEFAULT_WINDOW_MATCHES = 4
DEFAULT_BASELINE_THRESHOLD = 180

# Rec. 601 luma weights for the baseline threshold filter.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class CourtColor:
    """Dominant surface color and its Chebyshev match radius."""

    rgb: tuple[int, int, int]
    tolerance: int = DEFAULT_COLOR_TOLERANCE

    def __post_init__(self) -> None:
        if not 0 <= self.tolerance <= 255:
            raise ValueError(f"tolerance must be in [0, 255], got {self.tolerance}")


def _pixels(frame: Frame | np.ndarray) -> np.ndarray:
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if px.ndim != 3 or px.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) pixels, got shape {px.shape}")
    return px


def sample_dominant_color(
    frame: Frame | np.ndarray,
    n_samples: int = DEFAULT_N_SAMPLES,
    seed: int = 0,
    bin_width: int = DEFAULT_BIN_WIDTH,
    tolerance: int = DEFAULT_COLOR_TOLERANCE,
) -> CourtColor:
    """Estimate the court color as the mode of randomly sampled pixels.

    Samples ``n_samples`` positions uniformly (seeded), quantizes each into
    RGB bins of ``bin_width``, and returns the mean color of the samples in
    the winning bin. Ties go to the lexicographically lowest (r, g, b) bin.
    Exact-black pixels are skipped; after 10 * n_samples attempts with no
    usable sample the frame counts as fully masked.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    px = _pixels(frame)
    flat = px.reshape(-1, 3)
    n_px = flat.shape[0]

    rng = np.random.default_rng(seed)
    samples: list[np.ndarray] = []
    max_attempts = 10 * n_samples
    attempts = 0
    while len(samples) < n_samples and attempts < max_attempts:
        idx = int(rng.integers(0, n_px))
        attempts += 1
        rgb = flat[idx]
        if rgb[0] == 0 and rgb[1] == 0 and rgb[2] == 0:
            continue
        samples.append(rgb)
    if not samples:
        raise AllMaskedError(f"no unmasked pixel found in {max_attempts} attempts")

    arr = np.asarray(samples, dtype=np.int64)
    bins = arr // bin_width
    keys, inverse, counts = np.unique(bins, axis=0, return_inverse=True, return_counts=True)
    best = counts.max()
    # np.unique sorts keys lexicographically, so the first max-count bin wins ties
    win = int(np.flatnonzero(counts == best)[0])
    mean = arr[inverse == win].mean(axis=0)
    rgb = tuple(int(v) for v in np.rint(mean).astype(np.int64))
    return CourtColor(rgb=rgb, tolerance=tolerance)


def matches_court(pixel: tuple[int, int, int] | np.ndarray, court: CourtColor) -> bool:
    """True iff the pixel is within Chebyshev distance ``tolerance`` of the court color."""
    p = np.asarray(pixel, dtype=np.int64)
    c = np.asarray(court.rgb, dtype=np.int64)
    return bool(np.abs(p - c).max() <= court.tolerance)


def _match_mask(px: np.ndarray, court: CourtColor) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel court match (never true on exact black) and the black mask."""
    p = px.astype(np.int64)
    c = np.asarray(court.rgb, dtype=np.int64)
    match = np.abs(p - c).max(axis=2) <= court.tolerance
    black = (px == 0).all(axis=2)
    return match & ~black, black


def court_color_filter(
    frame: Frame | np.ndarray,
    court: CourtColor,
    window_size: int = DEFAULT_WINDOW_SIZE,
    window_matches: int = DEFAULT_WINDOW_MATCHES,
    include_center: bool = False,
) -> np.ndarray:
    """Court-color line-candidate mask.

    A pixel is marked iff it does not match the court color and at least
    ``window_matches`` pixels in the window_size x window_size window around
    it (clipped at borders, center excluded unless ``include_center``) do.
    Returns a boolean (h, w) array.
    """
    if window_size % 2 != 1 or window_size < 1:
        raise ValueError(f"window_size must be odd and positive, got {window_size}")
    px = _pixels(frame)
    match, black = _match_mask(px, court)
    h, w = match.shape
    r = window_size // 2

    # summed-area table over the match mask; window sums with border clipping
    sat = np.zeros((h + 1, w + 1), dtype=np.int64)
    np.cumsum(np.cumsum(match, axis=0), axis=1, out=sat[1:, 1:])
    ys = np.arange(h)
    xs = np.arange(w)
    y0 = np.clip(ys - r, 0, h)[:, None]
    y1 = np.clip(ys + r + 1, 0, h)[:, None]
    x0 = np.clip(xs - r, 0, w)[None, :]
    x1 = np.clip(xs + r + 1, 0, w)[None, :]
    counts = sat[y1, x1] - sat[y0, x1] - sat[y1, x0] + sat[y0, x0]
    if not include_center:
        counts = counts - match

    return (counts >= window_matches) & ~match & ~black


def threshold_filter(
    frame: Frame | np.ndarray, threshold: int = DEFAULT_BASELINE_THRESHOLD
) -> np.ndarray:
    """Baseline filter: mark pixels whose rounded Rec. 601 luminance exceeds ``threshold``."""
    px = _pixels(frame).astype(np.float64)
    lum = np.rint(px[:, :, 0] * LUMA_WEIGHTS[0] + px[:, :, 1] * LUMA_WEIGHTS[1] + px[:, :, 2] * LUMA_WEIGHTS[2])
    return lum > threshold
