"""Homography estimation between the court diagram and detected image lines.

Homographies map homogeneous model coordinates (x meters, y meters, 1) to
homogeneous image pixels and are normalized to unit Frobenius norm with
h[2][2] >= 0 (first nonzero entry of the last row positive when it is 0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .court import CourtDimensions, CourtTemplate, NearHalfTemplate
from .errors import DegenerateCorrespondenceError, InsufficientLinesError
from .lines import LineSet, intersect

W_EPS = 1e-9
CLIP_W_EPS = 1e-6
DEFAULT_PLAUSIBLE_EXPAND = 2.0
DEFAULT_MIN_NET_WIDTH_FRAC = 0.10


@dataclass(frozen=True)
class Correspondence:
    """Four or more model points paired with image points.

    provenance records which (transverse pair, longitudinal pair,
    horizontal-line pair, vertical-line pair) produced the candidate.
    """

    model_pts: np.ndarray
    image_pts: np.ndarray
    provenance: tuple = ()


@dataclass(frozen=True)
class CandidateDetection:
    """A homography and its pixel score; the unit of selection."""

    h: np.ndarray  # 3x3, source-frame coordinates, normalized
    score: int
    frame_id: str
    crop_origin_applied: bool = True


@dataclass(frozen=True)
class ProjectedSegment:
    id: str
    p0: tuple[float, float]
    p1: tuple[float, float]


def normalize_homography(h: np.ndarray) -> np.ndarray:
    """Scale to unit Frobenius norm and fix the sign convention."""
    h = np.asarray(h, dtype=np.float64)
    norm = np.linalg.norm(h)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError("homography must be finite and nonzero")
    h = h / norm
    if h[2, 2] < 0:
        h = -h
    elif h[2, 2] == 0:
        for v in h[2]:
            if v != 0:
                if v < 0:
                    h = -h
                break
    return h


def _hartley_normalization(pts: np.ndarray) -> np.ndarray:
    """Similarity transform taking the points to centroid 0, RMS radius sqrt(2)."""
    centroid = pts.mean(axis=0)
    rms = np.sqrt(((pts - centroid) ** 2).sum(axis=1).mean())
    if rms < 1e-12:
        raise DegenerateCorrespondenceError("correspondence points are coincident")
    s = np.sqrt(2.0) / rms
    return np.array([[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]])


def dlt_homography(model_pts: np.ndarray, image_pts: np.ndarray) -> np.ndarray:
    """Hartley-normalized direct linear transform.

    Solves the stacked 2N x 9 system for the null space (N = 4) or the
    least-squares minimizer (N > 4). Raises DegenerateCorrespondenceError
    when the solution is rank-deficient beyond the expected dimension
    (three collinear points, repeated points).
    """
    mp = np.asarray(model_pts, dtype=np.float64).reshape(-1, 2)
    ip = np.asarray(image_pts, dtype=np.float64).reshape(-1, 2)
    if mp.shape != ip.shape or mp.shape[0] < 4:
        raise ValueError(f"need matching point sets of >= 4 points, got {mp.shape} vs {ip.shape}")

    t_m = _hartley_normalization(mp)
    t_i = _hartley_normalization(ip)
    mh = (t_m @ np.column_stack([mp, np.ones(len(mp))]).T).T
    ih = (t_i @ np.column_stack([ip, np.ones(len(ip))]).T).T

    rows = []
    for (x, y, _), (u, v, _) in zip(mh, ih):
        rows.append([x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y, -u])
        rows.append([0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y, -v])
    a = np.asarray(rows)

    _, s, vh = np.linalg.svd(a)
    # a valid configuration leaves exactly one null dimension: rank 8
    rank = int((s > 1e-9 * s[0]).sum())
    if rank < 8:
        raise DegenerateCorrespondenceError("rank-deficient correspondence (collinear or repeated points)")
    h_norm = vh[-1].reshape(3, 3)
    h = np.linalg.inv(t_i) @ h_norm @ t_m
    return normalize_homography(h)


def project(h: np.ndarray, model_pt: tuple[float, float]) -> tuple[float, float] | None:
    """Apply the homography; None for points at (or numerically near) infinity."""
    x, y = model_pt
    u = h[0, 0] * x + h[0, 1] * y + h[0, 2]
    v = h[1, 0] * x + h[1, 1] * y + h[1, 2]
    w = h[2, 0] * x + h[2, 1] * y + h[2, 2]
    if abs(w) <= W_EPS:
        return None
    return (u / w, v / w)


def project_many(h: np.ndarray, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized projection: returns ((n, 2) image points, (n,) w values).

    Rows with |w| <= W_EPS hold NaN coordinates.
    """
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    hom = h @ np.column_stack([pts, np.ones(len(pts))]).T
    w = hom[2]
    with np.errstate(divide="ignore", invalid="ignore"):
        xy = (hom[:2] / w).T
    xy[np.abs(w) <= W_EPS] = np.nan
    return xy, w


def compose_crop_origin(h: np.ndarray, crop_origin: tuple[int, int]) -> np.ndarray:
    """Translate a cropped-frame homography back into source-frame pixels."""
    dx, dy = crop_origin
    t = np.array([[1.0, 0.0, dx], [0.0, 1.0, dy], [0.0, 0.0, 1.0]])
    return normalize_homography(t @ h)


def enumerate_candidates(
    lines: LineSet,
    near: NearHalfTemplate,
    include_net_line: bool = True,
) -> Iterator[Correspondence]:
    """All order-preserving assignments of detected line pairs to model line pairs.

    Every ordered (top, bottom) pair of horizontal lines and (left, right)
    pair of vertical lines is matched against every far-to-near transverse
    model pair and left-to-right longitudinal pair; each assignment yields
    a 4-point correspondence from the line-pair intersections. Assignments
    with any near-parallel (missing) intersection are skipped. Enumeration
    order is deterministic: detected pairs in sort order, then model pairs
    in canonical order.
    """
    if len(lines.horizontal) < 2 or len(lines.vertical) < 2:
        raise InsufficientLinesError(
            f"need >= 2 horizontal and >= 2 vertical lines, got {len(lines.horizontal)}/{len(lines.vertical)}"
        )
    transverse = [seg for seg in near.transverse if include_net_line or seg.id != "net"]
    trans_pairs = list(itertools.combinations([(s.id, s.const_coord) for s in transverse], 2))
    longi_pairs = list(itertools.combinations([(s.id, s.const_coord) for s in near.longitudinal], 2))

    for h_top, h_bot in itertools.combinations(lines.horizontal, 2):
        for v_left, v_right in itertools.combinations(lines.vertical, 2):
            corners = (
                intersect(h_top, v_left),
                intersect(h_top, v_right),
                intersect(h_bot, v_left),
                intersect(h_bot, v_right),
            )
            if any(c is None for c in corners):
                continue
            image_pts = np.asarray(corners, dtype=np.float64)
            for (far_id, y_far), (near_id, y_near) in trans_pairs:
                for (left_id, x_left), (right_id, x_right) in longi_pairs:
                    model_pts = np.array(
                        [[x_left, y_far], [x_right, y_far], [x_left, y_near], [x_right, y_near]]
                    )
                    yield Correspondence(
                        model_pts=model_pts,
                        image_pts=image_pts,
                        provenance=((far_id, near_id), (left_id, right_id), (h_top, h_bot), (v_left, v_right)),
                    )


def is_plausible(
    h: np.ndarray,
    frame_size: tuple[int, int],
    dims: CourtDimensions | None = None,
    expand: float = DEFAULT_PLAUSIBLE_EXPAND,
    min_net_width_frac: float = DEFAULT_MIN_NET_WIDTH_FRAC,
) -> bool:
    """Cheap geometric sanity checks that prune the candidate search.

    Requires: consistent w sign for the four near-half corners, projections
    inside the frame expanded ``expand``-fold about its center, a convex
    non-self-intersecting court quadrilateral, the baseline imaged below
    the net, and a projected net width of at least ``min_net_width_frac``
    of the frame width.
    """
    dims = dims or CourtDimensions()
    w_img, h_img = frame_size
    hd = dims.doubles_width / 2.0
    hl = dims.length / 2.0
    # net-left, net-right, baseline-right, baseline-left (quad order)
    corners = np.array([[-hd, 0.0], [hd, 0.0], [hd, hl], [-hd, hl]])
    xy, w = project_many(h, corners)

    if not ((w > W_EPS).all() or (w < -W_EPS).all()):
        return False

    cx, cy = w_img / 2.0, h_img / 2.0
    half_x, half_y = expand * w_img / 2.0, expand * h_img / 2.0
    if (np.abs(xy[:, 0] - cx) > half_x).any() or (np.abs(xy[:, 1] - cy) > half_y).any():
        return False

    cross = []
    for i in range(4):
        a = xy[(i + 1) % 4] - xy[i]
        b = xy[(i + 2) % 4] - xy[(i + 1) % 4]
        cross.append(a[0] * b[1] - a[1] * b[0])
    cross = np.asarray(cross)
    if not ((cross > 0).all() or (cross < 0).all()):
        return False

    net_y = xy[:2, 1].mean()
    baseline_y = xy[2:, 1].mean()
    if not baseline_y > net_y:
        return False

    net_width = np.linalg.norm(xy[1] - xy[0])
    return bool(net_width >= min_net_width_frac * w_img)


def clip_segment_at_w_plane(
    h: np.ndarray, p0: tuple[float, float], p1: tuple[float, float], eps: float = CLIP_W_EPS
) -> tuple[tuple[float, float], tuple[float, float]] | None:
    """Project a model segment, clipping it at the w = eps plane.

    Returns the projected 2D endpoints, or None when the whole segment lies
    at or behind the plane.
    """
    a = np.array([p0[0], p0[1], 1.0])
    b = np.array([p1[0], p1[1], 1.0])
    ha, hb = h @ a, h @ b
    wa, wb = ha[2], hb[2]
    if wa <= eps and wb <= eps:
        return None
    if wa <= eps or wb <= eps:
        t = (eps - wa) / (wb - wa)
        hc = ha + t * (hb - ha)
        if wa <= eps:
            ha = hc
        else:
            hb = hc
    pa = (ha[0] / ha[2], ha[1] / ha[2])
    pb = (hb[0] / hb[2], hb[1] / hb[2])
    return pa, pb


def extend_to_full_court(
    detection: CandidateDetection | np.ndarray, template: CourtTemplate
) -> list[ProjectedSegment]:
    """Project all template segments through the near-side homography.

    Segments entirely at or behind the w = eps plane are dropped; segments
    crossing it are clipped before projection.
    """
    h = detection.h if isinstance(detection, CandidateDetection) else np.asarray(detection)
    out = []
    for seg in template.segments:
        clipped = clip_segment_at_w_plane(h, seg.p0, seg.p1)
        if clipped is None:
            continue
        out.append(ProjectedSegment(id=seg.id, p0=clipped[0], p1=clipped[1]))
    return out


def project_keypoints(
    h: np.ndarray, template: CourtTemplate
) -> dict[str, tuple[float, float] | None]:
    """Project all 19 template keypoints; None marks points at infinity."""
    return {name: project(h, pt) for name, pt in template.keypoints.items()}
