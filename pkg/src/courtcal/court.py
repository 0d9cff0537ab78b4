"""Reference tennis-court diagram in metric model coordinates.

The model frame has its origin at the court center on the net line,
x across the court (doubles_left at -doubles_width/2) and y increasing
toward the near (camera-side) baseline, so the near half is y >= 0.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Literal

from .errors import InvalidDimensionsError

# ITF standard dimensions, meters.
DEFAULT_LENGTH = 23.77
DEFAULT_DOUBLES_WIDTH = 10.97
DEFAULT_SINGLES_WIDTH = 8.23
DEFAULT_SERVICE_LINE_DIST = 6.40

AxisClass = Literal["transverse", "longitudinal"]

# Transverse ids in far -> near order (increasing y on the near half).
NEAR_TRANSVERSE_ORDER = ("net", "near_service", "near_baseline")
# Longitudinal ids in left -> right order (increasing x).
LONGITUDINAL_ORDER = ("doubles_left", "singles_left", "center_service", "singles_right", "doubles_right")


@dataclass(frozen=True)
class CourtDimensions:
    """Court measurements in meters."""

    length: float = DEFAULT_LENGTH
    doubles_width: float = DEFAULT_DOUBLES_WIDTH
    singles_width: float = DEFAULT_SINGLES_WIDTH
    service_line_dist: float = DEFAULT_SERVICE_LINE_DIST

    def __post_init__(self) -> None:
        if not (self.length > 2 * self.service_line_dist > 0):
            raise InvalidDimensionsError(
                f"need length > 2*service_line_dist > 0, got {self.length} vs {self.service_line_dist}"
            )
        if not (self.doubles_width > self.singles_width > 0):
            raise InvalidDimensionsError(
                f"need doubles_width > singles_width > 0, got {self.doubles_width} vs {self.singles_width}"
            )


@dataclass(frozen=True)
class CourtSegment:
    """One straight court line between two model points."""

    id: str
    p0: tuple[float, float]
    p1: tuple[float, float]
    axis_class: AxisClass

    @property
    def const_coord(self) -> float:
        """y for transverse segments, x for longitudinal ones."""
        return self.p0[1] if self.axis_class == "transverse" else self.p0[0]

    def contains(self, pt: tuple[float, float], tol: float = 1e-9) -> bool:
        """Point-on-segment test within tolerance (meters)."""
        x, y = pt
        if self.axis_class == "transverse":
            lo, hi = sorted((self.p0[0], self.p1[0]))
            return abs(y - self.p0[1]) <= tol and lo - tol <= x <= hi + tol
        lo, hi = sorted((self.p0[1], self.p1[1]))
        return abs(x - self.p0[0]) <= tol and lo - tol <= y <= hi + tol


@dataclass(frozen=True)
class CourtTemplate:
    """Full court diagram: 10 segments and their 19 named intersections."""

    dims: CourtDimensions
    segments: tuple[CourtSegment, ...]
    keypoints: dict[str, tuple[float, float]] = field(compare=False)

    def segment(self, seg_id: str) -> CourtSegment:
        for seg in self.segments:
            if seg.id == seg_id:
                return seg
        raise KeyError(seg_id)


@dataclass(frozen=True)
class NearHalfTemplate:
    """Subset of the diagram with y >= 0, used for near-side calibration."""

    dims: CourtDimensions
    transverse: tuple[CourtSegment, ...]  # net, near_service, near_baseline (far -> near)
    longitudinal: tuple[CourtSegment, ...]  # clipped to y in [0, length/2], left -> right
    keypoints: dict[str, tuple[float, float]] = field(compare=False)


def _build_segments(dims: CourtDimensions) -> tuple[CourtSegment, ...]:
    hl = dims.length / 2.0
    hd = dims.doubles_width / 2.0
    hs = dims.singles_width / 2.0
    sv = dims.service_line_dist
    return (
        CourtSegment("near_baseline", (-hd, hl), (hd, hl), "transverse"),
        CourtSegment("far_baseline", (-hd, -hl), (hd, -hl), "transverse"),
        CourtSegment("near_service", (-hs, sv), (hs, sv), "transverse"),
        CourtSegment("far_service", (-hs, -sv), (hs, -sv), "transverse"),
        CourtSegment("net", (-hd, 0.0), (hd, 0.0), "transverse"),
        CourtSegment("doubles_left", (-hd, -hl), (-hd, hl), "longitudinal"),
        CourtSegment("doubles_right", (hd, -hl), (hd, hl), "longitudinal"),
        CourtSegment("singles_left", (-hs, -hl), (-hs, hl), "longitudinal"),
        CourtSegment("singles_right", (hs, -hl), (hs, hl), "longitudinal"),
        CourtSegment("center_service", (0.0, -sv), (0.0, sv), "longitudinal"),
    )


def standard_template(dims: CourtDimensions | None = None) -> CourtTemplate:
    """Build the reference diagram for the given (default: ITF) dimensions.

    Keypoints are every transverse x longitudinal intersection that lies
    within both segments' extents, named ``<transverse>_x_<longitudinal>``.
    """
    dims = dims or CourtDimensions()
    segments = _build_segments(dims)
    keypoints: dict[str, tuple[float, float]] = {}
    for tseg in segments:
        if tseg.axis_class != "transverse":
            continue
        for lseg in segments:
            if lseg.axis_class != "longitudinal":
                continue
            pt = (lseg.const_coord, tseg.const_coord)
            if tseg.contains(pt) and lseg.contains(pt):
                keypoints[f"{tseg.id}_x_{lseg.id}"] = pt
    return CourtTemplate(dims=dims, segments=segments, keypoints=keypoints)


def near_half(template: CourtTemplate) -> NearHalfTemplate:
    """Restrict the diagram to y >= 0: 3 transverse lines, 5 clipped longitudinal ones."""
    transverse = tuple(template.segment(name) for name in NEAR_TRANSVERSE_ORDER)
    longitudinal = []
    for name in LONGITUDINAL_ORDER:
        seg = template.segment(name)
        y_lo = max(0.0, min(seg.p0[1], seg.p1[1]))
        y_hi = max(seg.p0[1], seg.p1[1])
        longitudinal.append(
            CourtSegment(seg.id, (seg.const_coord, y_lo), (seg.const_coord, y_hi), "longitudinal")
        )
    keypoints = {name: pt for name, pt in template.keypoints.items() if pt[1] >= 0.0}
    return NearHalfTemplate(
        dims=template.dims,
        transverse=transverse,
        longitudinal=tuple(longitudinal),
        keypoints=keypoints,
    )


def template_to_dict(template: CourtTemplate) -> dict:
    """Template as a JSON-ready dict (meters), for debugging overlays."""
    return {
        "dims": {
            "length": template.dims.length,
            "doubles_width": template.dims.doubles_width,
            "singles_width": template.dims.singles_width,
            "service_line_dist": template.dims.service_line_dist,
        },
        "segments": [
            {"id": s.id, "p0": list(s.p0), "p1": list(s.p1), "axis_class": s.axis_class}
            for s in template.segments
        ],
        "keypoints": [{"name": n, "x": p[0], "y": p[1]} for n, p in template.keypoints.items()],
    }


def save_template_json(template: CourtTemplate, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(template_to_dict(template), fh, indent=2, sort_keys=True)
