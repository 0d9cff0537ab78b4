"""Synthetic court scenes with known homographies, for testing and evaluation.

A scene is rendered by drawing a random plausible camera pose: every
visible ground-plane pixel takes the court color, the template segments
are drawn white with the same rasterizer the scorer uses, and the rest of
the frame (sky) takes a distinct background color. Optional extras:
Gaussian pixel noise, darkened shadow polygons, and a net band rising from
the net line for crop testing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .calibrate import is_plausible, normalize_homography, project, project_many
from .court import CourtDimensions, CourtTemplate, near_half, standard_template
from .errors import PoseRejectionError
from .image import Frame, integer_line_walk, luminance
from .preprocess import NetBBox
from .scoring import render_court

GROUND_W_EPS = 1e-9


@dataclass(frozen=True)
class SceneConfig:
    width: int = 1280
    height: int = 720
    line_width: int = 3
    noise_sigma: float = 0.0
    shadow_count: int = 0
    shadow_darkness: float = 0.5
    net_band: bool = False
    net_band_height: int = 28
    court_color: tuple[int, int, int] | None = None  # None: drawn per scene
    court_luma_range: tuple[float, float] = (70.0, 170.0)
    background_color: tuple[int, int, int] = (150, 185, 215)
    # camera pose ranges (meters behind the near baseline, height, lateral offset)
    camera_behind: tuple[float, float] = (2.0, 7.0)
    camera_height: tuple[float, float] = (3.5, 8.0)
    camera_lateral: tuple[float, float] = (-2.5, 2.5)
    focal_range: tuple[float, float] = (650.0, 1200.0)
    look_at_y: tuple[float, float] = (0.0, 5.0)
    keypoint_margin: float = 24.0  # near-half keypoints at least this far inside the frame
    min_ground_fraction: float = 0.55
    max_pose_draws: int = 1000


@dataclass(frozen=True)
class SyntheticScene:
    frame: Frame
    h_gt: np.ndarray
    court_color: tuple[int, int, int]
    net_bbox: NetBBox | None
    seed: int
    config: SceneConfig


def _look_at_homography(eye, target, focal, cx, cy):
    """Model-plane to pixel homography for a pinhole camera at ``eye``."""
    eye = np.asarray(eye, dtype=np.float64)
    fwd = np.asarray(target, dtype=np.float64) - eye
    fwd /= np.linalg.norm(fwd)
    up_world = np.array([0.0, 0.0, 1.0])
    x_cam = np.cross(fwd, up_world)
    nx = np.linalg.norm(x_cam)
    if nx < 1e-9:
        raise ValueError("camera looks straight down")
    x_cam /= nx
    y_cam = np.cross(fwd, x_cam)  # x right, y down, z forward
    r = np.stack([x_cam, y_cam, fwd])
    t = -r @ eye
    k = np.array([[focal, 0.0, cx], [0.0, focal, cy], [0.0, 0.0, 1.0]])
    return k @ np.column_stack([r[:, 0], r[:, 1], t])


def _draw_court_color(rng, config: SceneConfig) -> tuple[int, int, int]:
    if config.court_color is not None:
        return config.court_color
    lo, hi = config.court_luma_range
    for _ in range(1000):
        rgb = tuple(int(v) for v in rng.integers(40, 231, size=3))
        luma = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]
        # must not read as bright white, and must sit in the requested luma band
        if lo <= luma <= hi and min(rgb) < 196:
            return rgb
    raise PoseRejectionError("could not draw a court color in the configured luma range")


def _ground_sign(h_inv: np.ndarray, h: np.ndarray, dims: CourtDimensions) -> float:
    """Sign of the inverse-map w at a pixel known to show the ground."""
    anchor = project(h, (0.0, dims.length / 4.0))
    if anchor is None:
        raise ValueError("degenerate pose: court center projects to infinity")
    w = h_inv[2, 0] * anchor[0] + h_inv[2, 1] * anchor[1] + h_inv[2, 2]
    return 1.0 if w > 0 else -1.0


def _ground_mask(h: np.ndarray, width: int, height: int, dims: CourtDimensions) -> np.ndarray:
    h_inv = np.linalg.inv(h)
    sign = _ground_sign(h_inv, h, dims)
    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)
    w = h_inv[2, 0] * xs[None, :] + h_inv[2, 1] * ys[:, None] + h_inv[2, 2]
    return w * sign > GROUND_W_EPS


def _sample_pose(rng, config: SceneConfig, dims: CourtDimensions, template: CourtTemplate) -> np.ndarray:
    nh = near_half(template)
    near_pts = np.asarray(list(nh.keypoints.values()))
    cx, cy = config.width / 2.0, config.height / 2.0
    hd = dims.doubles_width / 2.0

    for _ in range(config.max_pose_draws):
        behind = rng.uniform(*config.camera_behind)
        height = rng.uniform(*config.camera_height)
        lateral = rng.uniform(*config.camera_lateral)
        focal = rng.uniform(*config.focal_range)
        look_y = rng.uniform(*config.look_at_y)
        eye = (lateral, dims.length / 2.0 + behind, height)
        target = (lateral * 0.5, look_y, 0.0)
        h = _look_at_homography(eye, target, focal, cx, cy)

        # normalize chirality: model +x must increase image x (left-to-right)
        left = project(h, (-hd, dims.length / 4.0))
        right = project(h, (hd, dims.length / 4.0))
        if left is None or right is None:
            continue
        if right[0] < left[0]:
            h = h @ np.diag([-1.0, 1.0, 1.0])

        if not is_plausible(h, (config.width, config.height), dims):
            continue
        xy, w = project_many(h, near_pts)
        if (w <= 0).any() or np.isnan(xy).any():
            continue
        m = config.keypoint_margin
        if (
            (xy[:, 0] < m).any()
            or (xy[:, 0] > config.width - 1 - m).any()
            or (xy[:, 1] < m).any()
            or (xy[:, 1] > config.height - 1 - m).any()
        ):
            continue
        ground_frac = _ground_mask(h, config.width, config.height, dims).mean()
        if ground_frac < config.min_ground_fraction:
            continue
        return normalize_homography(h)
    raise PoseRejectionError(f"no plausible pose in {config.max_pose_draws} draws")


def _apply_net_band(px, h, template, config: SceneConfig, band_color=(45, 45, 52)) -> NetBBox | None:
    net = template.segment("net")
    p0 = project(h, net.p0)
    p1 = project(h, net.p1)
    if p0 is None or p1 is None:
        return None
    xs, ys = integer_line_walk(p0, p1)
    height, width = px.shape[:2]
    keep = (xs >= 0) & (xs < width)
    xs, ys = xs[keep], ys[keep]
    if xs.size == 0:
        return None
    for x, y in zip(xs, ys):
        y_lo = max(0, y - config.net_band_height)
        y_hi = min(height, y)
        if y_lo < y_hi:
            px[y_lo:y_hi, x] = band_color
    x0 = max(0, int(xs.min()))
    x1 = min(width, int(xs.max()) + 1)
    y0 = max(0, int(ys.min()) - config.net_band_height)
    y1 = min(height, int(ys.max()) + 2)
    if x0 >= x1 or y0 >= y1:
        return None
    return NetBBox(x0=x0, y0=y0, x1=x1, y1=y1, confidence=0.95)


def _apply_shadows(px, rng, config: SceneConfig) -> None:
    height, width = px.shape[:2]
    gx, gy = np.meshgrid(np.arange(width, dtype=np.float64), np.arange(height, dtype=np.float64))
    for _ in range(config.shadow_count):
        cx = rng.uniform(0, width)
        cy = rng.uniform(height * 0.3, height)
        rx = rng.uniform(width * 0.05, width * 0.25)
        ry = rng.uniform(height * 0.05, height * 0.2)
        angles = np.sort(rng.uniform(0, 2 * np.pi, size=4))
        corners = np.column_stack([cx + rx * np.cos(angles), cy + ry * np.sin(angles)])
        inside = np.ones((height, width), dtype=bool)
        for i in range(4):
            ax, ay = corners[i]
            bx, by = corners[(i + 1) % 4]
            inside &= (bx - ax) * (gy - ay) - (by - ay) * (gx - ax) >= 0
        px[inside] = np.rint(px[inside].astype(np.float64) * (1.0 - config.shadow_darkness)).astype(np.uint8)


def generate_scene(
    seed: int,
    config: SceneConfig | None = None,
    dims: CourtDimensions | None = None,
) -> SyntheticScene:
    """Render one deterministic scene for the given seed."""
    config = config or SceneConfig()
    dims = dims or CourtDimensions()
    template = standard_template(dims)
    rng = np.random.default_rng(seed)

    court_color = _draw_court_color(rng, config)
    h = _sample_pose(rng, config, dims, template)

    px = np.empty((config.height, config.width, 3), dtype=np.uint8)
    px[:] = config.background_color
    ground = _ground_mask(h, config.width, config.height, dims)
    px[ground] = court_color

    net_bbox = None
    if config.net_band:
        net_bbox = _apply_net_band(px, h, template, config)

    rendered = render_court(h, template, (config.width, config.height), stroke_width=config.line_width)
    if rendered.count:
        px[rendered.pixels[:, 1], rendered.pixels[:, 0]] = (255, 255, 255)

    if config.shadow_count > 0:
        _apply_shadows(px, rng, config)

    if config.noise_sigma > 0:
        noise = rng.normal(0.0, config.noise_sigma, size=px.shape)
        px = np.clip(np.rint(px.astype(np.float64) + noise), 0, 255).astype(np.uint8)

    frame = Frame(pixels=px, frame_id=f"scene{seed:05d}")
    return SyntheticScene(
        frame=frame, h_gt=h, court_color=court_color, net_bbox=net_bbox, seed=seed, config=config
    )


def bright_court_config(**overrides) -> SceneConfig:
    """Scene config whose court surface exceeds the baseline threshold (Fig 4 regime)."""
    cfg = SceneConfig(court_luma_range=(185.0, 232.0), background_color=(70, 90, 110))
    return replace(cfg, **overrides)
