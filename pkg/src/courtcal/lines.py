"""Straight-line extraction from binary masks via a Hough transform.

Lines are kept in normal form x*cos(theta) + y*sin(theta) = rho with
theta in [0, pi); (rho, theta) and (-rho, theta +/- pi) describe the same
line, and merging honors that equivalence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_RHO_RES = 1.0
DEFAULT_THETA_RES = math.pi / 180.0
DEFAULT_MERGE_RHO = 12.0
DEFAULT_MERGE_THETA = 5.0 * math.pi / 180.0
DEFAULT_CLASS_CAP = 8
DEFAULT_REFINE_BAND = 3.0
REFINE_MIN_SUPPORT = 10
PARALLEL_EPS = 1e-6


@dataclass(frozen=True)
class PolarLine:
    rho: float
    theta: float
    votes: int


@dataclass(frozen=True)
class LineSet:
    """Detected lines split by orientation.

    horizontal is sorted by y at the image center column (top to bottom),
    vertical by x at the image center row (left to right).
    """

    horizontal: tuple[PolarLine, ...]
    vertical: tuple[PolarLine, ...]


def default_vote_threshold(width: int, height: int) -> float:
    return max(40.0, 0.15 * min(width, height))


def hough_lines(
    mask: np.ndarray,
    rho_res: float = DEFAULT_RHO_RES,
    theta_res: float = DEFAULT_THETA_RES,
    vote_threshold: float | None = None,
) -> list[PolarLine]:
    """Accumulator vote over all true pixels, returning local-maximum cells.

    A cell is a peak when each of its 8 accumulator neighbors has strictly
    fewer votes, except that equal-vote neighbors at a lexicographically
    larger (theta, rho) index do not disqualify it; this resolves plateau
    ties toward the lower theta then lower rho cell. Peaks with votes below
    the threshold are dropped; output is sorted by votes descending, then
    (theta, rho) index ascending.
    """
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    thr = default_vote_threshold(w, h) if vote_threshold is None else vote_threshold

    n_theta = int(math.floor((math.pi - 1e-12) / theta_res)) + 1
    thetas = np.arange(n_theta) * theta_res
    diag = math.hypot(w, h)
    n_rho_half = int(math.ceil(diag / rho_res))
    n_rho = 2 * n_rho_half + 1

    acc = np.zeros((n_theta, n_rho), dtype=np.int64)
    ys, xs = np.nonzero(mask)
    if xs.size:
        cos_t = np.cos(thetas)
        sin_t = np.sin(thetas)
        xs_f = xs.astype(np.float64)
        ys_f = ys.astype(np.float64)
        for t in range(n_theta):
            rho = xs_f * cos_t[t] + ys_f * sin_t[t]
            idx = np.rint(rho / rho_res).astype(np.int64) + n_rho_half
            acc[t] += np.bincount(idx, minlength=n_rho)

    peak = (acc >= max(thr, 1.0))
    padded = np.full((n_theta + 2, n_rho + 2), -1, dtype=np.int64)
    padded[1:-1, 1:-1] = acc
    for dt in (-1, 0, 1):
        for dr in (-1, 0, 1):
            if dt == 0 and dr == 0:
                continue
            nb = padded[1 + dt : 1 + dt + n_theta, 1 + dr : 1 + dr + n_rho]
            if dt > 0 or (dt == 0 and dr > 0):
                peak &= acc >= nb  # tie resolved toward this (lower-index) cell
            else:
                peak &= acc > nb

    ts, rs = np.nonzero(peak)
    votes = acc[ts, rs]
    order = np.lexsort((rs, ts, -votes))
    return [
        PolarLine(rho=float((rs[i] - n_rho_half) * rho_res), theta=float(ts[i] * theta_res), votes=int(votes[i]))
        for i in order
    ]


def _normalize(rho: float, theta: float) -> tuple[float, float]:
    """Map to the canonical branch theta in [0, pi)."""
    while theta < 0.0:
        theta += math.pi
        rho = -rho
    while theta >= math.pi:
        theta -= math.pi
        rho = -rho
    return rho, theta


def _branch_representations(line: PolarLine) -> list[tuple[float, float]]:
    return [
        (line.rho, line.theta),
        (-line.rho, line.theta - math.pi),
        (-line.rho, line.theta + math.pi),
    ]


def merge_lines(
    lines: list[PolarLine],
    d_rho: float = DEFAULT_MERGE_RHO,
    d_theta: float = DEFAULT_MERGE_THETA,
) -> list[PolarLine]:
    """Greedy clustering of near-duplicate Hough peaks.

    Lines are taken in descending-vote order; each joins the first cluster
    whose representative is within (d_rho, d_theta) under the theta-wrap
    equivalence, else starts a new cluster. Cluster representatives are
    vote-weighted means; output is sorted by total votes descending.
    """
    ordered = sorted(lines, key=lambda l: -l.votes)
    clusters: list[dict] = []
    for line in ordered:
        joined = False
        for cl in clusters:
            for rho, theta in _branch_representations(line):
                if abs(rho - cl["rho"]) <= d_rho and abs(theta - cl["theta"]) <= d_theta:
                    cl["members"].append((rho, theta, line.votes))
                    total = sum(v for _, _, v in cl["members"])
                    cl["rho"] = sum(r * v for r, _, v in cl["members"]) / total
                    cl["theta"] = sum(t * v for _, t, v in cl["members"]) / total
                    cl["votes"] = total
                    joined = True
                    break
            if joined:
                break
        if not joined:
            clusters.append(
                {"rho": line.rho, "theta": line.theta, "votes": line.votes, "members": [(line.rho, line.theta, line.votes)]}
            )
    clusters.sort(key=lambda c: -c["votes"])
    out = []
    for cl in clusters:
        rho, theta = _normalize(cl["rho"], cl["theta"])
        out.append(PolarLine(rho=rho, theta=theta, votes=cl["votes"]))
    return out


def is_horizontal(line: PolarLine) -> bool:
    """Line direction within 45 degrees of the image x-axis (normal near vertical)."""
    return abs(line.theta - math.pi / 2.0) < math.pi / 4.0


def classify_lines(
    lines: list[PolarLine],
    frame_size: tuple[int, int],
    max_horizontal: int = DEFAULT_CLASS_CAP,
    max_vertical: int = DEFAULT_CLASS_CAP,
) -> LineSet:
    """Split lines into horizontal/vertical, cap each class by votes, sort spatially."""
    w, h = frame_size
    cx, cy = w / 2.0, h / 2.0
    horiz = [l for l in lines if is_horizontal(l)]
    vert = [l for l in lines if not is_horizontal(l)]
    horiz = sorted(horiz, key=lambda l: -l.votes)[:max_horizontal]
    vert = sorted(vert, key=lambda l: -l.votes)[:max_vertical]

    def y_at_center(l: PolarLine) -> float:
        return (l.rho - cx * math.cos(l.theta)) / math.sin(l.theta)

    def x_at_center(l: PolarLine) -> float:
        return (l.rho - cy * math.sin(l.theta)) / math.cos(l.theta)

    horiz.sort(key=y_at_center)
    vert.sort(key=x_at_center)
    return LineSet(horizontal=tuple(horiz), vertical=tuple(vert))


def intersect(l1: PolarLine, l2: PolarLine) -> tuple[float, float] | None:
    """Intersection of two normal-form lines, or None when near-parallel."""
    c1, s1 = math.cos(l1.theta), math.sin(l1.theta)
    c2, s2 = math.cos(l2.theta), math.sin(l2.theta)
    det = c1 * s2 - s1 * c2  # sin(theta2 - theta1)
    if abs(det) < PARALLEL_EPS:
        return None
    x = (l1.rho * s2 - s1 * l2.rho) / det
    y = (c1 * l2.rho - l1.rho * c2) / det
    return (x, y)


def refine_line(
    mask: np.ndarray,
    line: PolarLine,
    band: float = DEFAULT_REFINE_BAND,
    min_support: int = REFINE_MIN_SUPPORT,
) -> PolarLine:
    """Snap a line to its supporting pixels with a principal-axis fit.

    Collects mask-true pixels within ``band`` of the line and fits the
    total-least-squares line through them; with fewer than ``min_support``
    supporting pixels the input is returned unchanged.
    """
    ys, xs = np.nonzero(np.asarray(mask, dtype=bool))
    if xs.size == 0:
        return line
    d = xs * math.cos(line.theta) + ys * math.sin(line.theta) - line.rho
    sel = np.abs(d) <= band
    if int(sel.sum()) < min_support:
        return line
    px = xs[sel].astype(np.float64)
    py = ys[sel].astype(np.float64)
    mx, my = px.mean(), py.mean()
    cov = np.cov(np.stack([px - mx, py - my]), bias=True)
    eigvals, eigvecs = np.linalg.eigh(cov)
    nx, ny = eigvecs[:, 0]  # normal = eigenvector of the smaller eigenvalue
    theta = math.atan2(ny, nx)
    rho, theta = _normalize(mx * nx + my * ny, theta)
    return PolarLine(rho=rho, theta=theta, votes=line.votes)
