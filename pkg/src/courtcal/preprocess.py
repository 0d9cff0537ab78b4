"""Shadow-removal and net-based near-side cropping, via pluggable adapters.

The heavy lifting (shadow detection/removal, net detection) is done by
pretrained models consumed either as per-frame sidecar files produced
offline or as optional in-process inference adapters; the pipeline itself
stays dependency-free. With neither available, shadow removal degrades to
identity and cropping is skipped.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    AdapterFailureError,
    DimensionMismatchError,
    EmptyCropError,
    MalformedSidecarError,
)
from .image import Frame, MIN_FRAME_SIDE, integer_line_walk, load_frame, load_gray, luminance

DEFAULT_NET_CONFIDENCE = 0.25
DEFAULT_CROP_MARGIN = 5

SHADOW_MASK_SUFFIX = ".shadowmask.png"
SHADOW_FREE_SUFFIX = ".shadowfree.png"
NET_BBOX_SUFFIX = ".net.json"


@dataclass(frozen=True)
class ShadowArtifacts:
    """Offline shadow-model outputs for one frame (255 = shadow in the mask)."""

    mask: np.ndarray | None = None
    shadow_free: Frame | None = None

    @property
    def empty(self) -> bool:
        return self.mask is None and self.shadow_free is None


@dataclass(frozen=True)
class NetBBox:
    """Axis-aligned net detection, inclusive-exclusive pixel bounds."""

    x0: int
    y0: int
    x1: int
    y1: int
    confidence: float = 1.0

    def __post_init__(self) -> None:
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate bbox ({self.x0},{self.y0},{self.x1},{self.y1})")
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError("bbox coordinates must be non-negative")


@dataclass(frozen=True)
class NetLine:
    """Left-to-right line standing in for the net in image coordinates."""

    a: tuple[float, float]
    b: tuple[float, float]

    def __post_init__(self) -> None:
        if not self.a[0] < self.b[0]:
            raise ValueError("net line endpoints must be ordered left to right")

    def y_at(self, x: float) -> float:
        ax, ay = self.a
        bx, by = self.b
        return ay + (by - ay) * (x - ax) / (bx - ax)


class ShadowRemovalAdapter:
    """In-process shadow removal (mask generation + removal inference)."""

    def remove_shadows(self, frame: Frame) -> Frame:
        raise NotImplementedError


class NetDetectionAdapter:
    """In-process net detector returning candidate boxes with confidences."""

    def detect(self, frame: Frame) -> list[NetBBox]:
        raise NotImplementedError


class OnnxShadowRemovalAdapter(ShadowRemovalAdapter):
    """Mask-then-removal inference from two ONNX models.

    Tensor layouts and value ranges are configuration, not assumptions:
    ``layout`` is "NCHW" or "NHWC" and ``scale`` divides the uint8 input.
    """

    def __init__(self, mask_model: str, removal_model: str, layout: str = "NCHW", scale: float = 255.0):
        if layout not in ("NCHW", "NHWC"):
            raise ValueError(f"unsupported layout {layout!r}")
        self.mask_model = mask_model
        self.removal_model = removal_model
        self.layout = layout
        self.scale = scale
        self._sessions = None

    def _ensure_sessions(self):
        if self._sessions is not None:
            return
        try:
            import onnxruntime  # noqa: PLC0415
        except ImportError as exc:
            raise AdapterFailureError("onnxruntime is required for ONNX adapters") from exc
        self._sessions = (
            onnxruntime.InferenceSession(self.mask_model),
            onnxruntime.InferenceSession(self.removal_model),
        )

    def _to_tensor(self, arr: np.ndarray) -> np.ndarray:
        x = arr.astype(np.float32) / self.scale
        x = x[None]  # batch
        if self.layout == "NCHW":
            x = x.transpose(0, 3, 1, 2)
        return x

    def _from_tensor(self, x: np.ndarray) -> np.ndarray:
        x = x[0]
        if self.layout == "NCHW":
            x = x.transpose(1, 2, 0)
        return np.clip(x * self.scale, 0, 255).astype(np.uint8)

    def remove_shadows(self, frame: Frame) -> Frame:
        self._ensure_sessions()
        mask_sess, removal_sess = self._sessions
        try:
            inp = self._to_tensor(frame.pixels)
            mask = mask_sess.run(None, {mask_sess.get_inputs()[0].name: inp})[0]
            removal_inputs = removal_sess.get_inputs()
            feed = {removal_inputs[0].name: inp}
            if len(removal_inputs) > 1:
                feed[removal_inputs[1].name] = mask
            out = removal_sess.run(None, feed)[0]
        except Exception as exc:
            raise AdapterFailureError(f"shadow removal inference failed: {exc}") from exc
        return Frame(pixels=self._from_tensor(out), frame_id=frame.frame_id, crop_origin=frame.crop_origin)


class OnnxNetDetectionAdapter(NetDetectionAdapter):
    """Single-model ONNX detector emitting (box, confidence) rows.

    ``box_format`` is "xyxy" or "cxcywh"; ``normalized`` marks coordinates
    in [0, 1] to be scaled by the frame size; ``class_id`` filters rows by
    the sixth output column when set.
    """

    def __init__(
        self,
        model: str,
        layout: str = "NCHW",
        scale: float = 255.0,
        box_format: str = "xyxy",
        normalized: bool = False,
        class_id: int | None = None,
    ):
        if layout not in ("NCHW", "NHWC"):
            raise ValueError(f"unsupported layout {layout!r}")
        if box_format not in ("xyxy", "cxcywh"):
            raise ValueError(f"unsupported box format {box_format!r}")
        self.model = model
        self.layout = layout
        self.scale = scale
        self.box_format = box_format
        self.normalized = normalized
        self.class_id = class_id
        self._session = None

    def detect(self, frame: Frame) -> list[NetBBox]:
        if self._session is None:
            try:
                import onnxruntime  # noqa: PLC0415
            except ImportError as exc:
                raise AdapterFailureError("onnxruntime is required for ONNX adapters") from exc
            self._session = onnxruntime.InferenceSession(self.model)
        try:
            x = frame.pixels.astype(np.float32) / self.scale
            x = x[None]
            if self.layout == "NCHW":
                x = x.transpose(0, 3, 1, 2)
            rows = self._session.run(None, {self._session.get_inputs()[0].name: x})[0]
        except Exception as exc:
            raise AdapterFailureError(f"net detection inference failed: {exc}") from exc
        rows = np.asarray(rows).reshape(-1, rows.shape[-1])
        boxes = []
        for row in rows:
            if self.class_id is not None and len(row) > 5 and int(row[5]) != self.class_id:
                continue
            b0, b1, b2, b3 = (float(v) for v in row[:4])
            conf = float(row[4])
            if self.box_format == "cxcywh":
                b0, b1, b2, b3 = b0 - b2 / 2, b1 - b3 / 2, b0 + b2 / 2, b1 + b3 / 2
            if self.normalized:
                b0, b2 = b0 * frame.width, b2 * frame.width
                b1, b3 = b1 * frame.height, b3 * frame.height
            x0, y0 = max(0, int(round(b0))), max(0, int(round(b1)))
            x1, y1 = min(frame.width, int(round(b2))), min(frame.height, int(round(b3)))
            if x0 < x1 and y0 < y1:
                boxes.append(NetBBox(x0, y0, x1, y1, conf))
        return boxes


def load_sidecar(
    frame_id: str, directory: str | os.PathLike, frame: Frame | None = None
) -> tuple[ShadowArtifacts, NetBBox | None]:
    """Read whatever sidecar files exist for the frame; absent files yield absent fields."""
    directory = os.fspath(directory)
    mask = None
    shadow_free = None
    bbox = None

    mask_path = os.path.join(directory, frame_id + SHADOW_MASK_SUFFIX)
    if os.path.exists(mask_path):
        try:
            mask = load_gray(mask_path)
        except Exception as exc:
            raise MalformedSidecarError(f"{mask_path}: {exc}") from exc
        if frame is not None and mask.shape != (frame.height, frame.width):
            raise DimensionMismatchError(f"{mask_path}: {mask.shape} vs frame {(frame.height, frame.width)}")

    free_path = os.path.join(directory, frame_id + SHADOW_FREE_SUFFIX)
    if os.path.exists(free_path):
        try:
            shadow_free = load_frame(free_path, frame_id=frame_id)
        except Exception as exc:
            raise MalformedSidecarError(f"{free_path}: {exc}") from exc
        if frame is not None and shadow_free.pixels.shape != frame.pixels.shape:
            raise DimensionMismatchError(
                f"{free_path}: {shadow_free.pixels.shape} vs frame {frame.pixels.shape}"
            )

    bbox_path = os.path.join(directory, frame_id + NET_BBOX_SUFFIX)
    if os.path.exists(bbox_path):
        try:
            with open(bbox_path, encoding="utf-8") as fh:
                data = json.load(fh)
            bbox = NetBBox(
                x0=int(data["x0"]),
                y0=int(data["y0"]),
                x1=int(data["x1"]),
                y1=int(data["y1"]),
                confidence=float(data.get("conf", 1.0)),
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise MalformedSidecarError(f"{bbox_path}: {exc}") from exc

    return ShadowArtifacts(mask=mask, shadow_free=shadow_free), bbox


def apply_shadow_removal(
    frame: Frame,
    artifacts: ShadowArtifacts | None = None,
    adapter: ShadowRemovalAdapter | None = None,
    fall_back_to_identity: bool = True,
) -> Frame:
    """Return the shadow-free frame, preferring sidecar output over inference.

    Order: sidecar shadow-free image, then the adapter, then the input
    unchanged. A sidecar mask alone cannot remove shadows and only earns a
    warning. Adapter failures raise unless identity fallback is enabled.
    """
    if artifacts is not None and artifacts.shadow_free is not None:
        return Frame(
            pixels=artifacts.shadow_free.pixels, frame_id=frame.frame_id, crop_origin=frame.crop_origin
        )
    if adapter is not None:
        try:
            out = adapter.remove_shadows(frame)
        except AdapterFailureError:
            if not fall_back_to_identity:
                raise
            warnings.warn("shadow-removal adapter failed; using the frame as-is", RuntimeWarning)
            return frame
        if out.pixels.shape != frame.pixels.shape:
            raise DimensionMismatchError(f"adapter returned {out.pixels.shape}, expected {frame.pixels.shape}")
        return Frame(pixels=out.pixels, frame_id=frame.frame_id, crop_origin=frame.crop_origin)
    if artifacts is not None and artifacts.mask is not None:
        warnings.warn("shadow mask present without a removal adapter; shadows left in place", RuntimeWarning)
    return frame


def detect_net(
    frame: Frame,
    sidecar_bbox: NetBBox | None = None,
    adapter: NetDetectionAdapter | None = None,
    confidence_threshold: float = DEFAULT_NET_CONFIDENCE,
) -> NetBBox | None:
    """Best net bounding box: the sidecar wins, else argmax adapter confidence."""
    if sidecar_bbox is not None:
        _check_bbox_in_frame(sidecar_bbox, frame)
        return sidecar_bbox
    if adapter is None:
        return None
    boxes = [b for b in adapter.detect(frame) if b.confidence >= confidence_threshold]
    if not boxes:
        return None
    best = max(boxes, key=lambda b: b.confidence)
    _check_bbox_in_frame(best, frame)
    return best


def _check_bbox_in_frame(bbox: NetBBox, frame: Frame) -> None:
    if bbox.x1 > frame.width or bbox.y1 > frame.height:
        raise ValueError(f"bbox {bbox} exceeds frame {frame.width}x{frame.height}")


def net_line_from_bbox(frame: Frame, bbox: NetBBox) -> NetLine:
    """Pick the bbox diagonal whose pixels show the stronger mean gradient.

    The net cord is the dominant edge inside the box, so the diagonal that
    tracks it crosses more gradient energy. Thin boxes, flat images, and
    ties fall back to the horizontal midline.
    """
    _check_bbox_in_frame(bbox, frame)
    mid_y = (bbox.y0 + bbox.y1) / 2.0
    midline = NetLine(a=(float(bbox.x0), mid_y), b=(float(bbox.x1), mid_y))
    if bbox.y1 - bbox.y0 <= 2:
        return midline

    lum = luminance(frame.pixels)
    gy, gx = np.gradient(lum)
    mag = np.hypot(gx, gy)

    def mean_grad(p0, p1):
        xs, ys = integer_line_walk(p0, p1)
        xs = np.clip(xs, 0, frame.width - 1)
        ys = np.clip(ys, 0, frame.height - 1)
        return float(mag[ys, xs].mean())

    tl_br = ((float(bbox.x0), float(bbox.y0)), (float(bbox.x1), float(bbox.y1)))
    bl_tr = ((float(bbox.x0), float(bbox.y1)), (float(bbox.x1), float(bbox.y0)))
    g1 = mean_grad(*tl_br)
    g2 = mean_grad(*bl_tr)
    if math.isclose(g1, g2, rel_tol=0.0, abs_tol=1e-9):
        return midline
    chosen = tl_br if g1 > g2 else bl_tr
    return NetLine(a=chosen[0], b=chosen[1])


def crop_near_side(frame: Frame, net_line: NetLine, margin: int = DEFAULT_CROP_MARGIN) -> Frame:
    """Keep the rows from just above the net line downward, blacking out
    everything strictly above the extended line minus the margin.

    The returned frame's crop_origin records the row offset, so repeated
    crops compose by adding origins.
    """
    top = min(net_line.a[1], net_line.b[1])
    row0 = max(0, int(math.floor(top)) - margin)
    retained = frame.height - row0
    if retained < MIN_FRAME_SIDE:
        raise EmptyCropError(f"crop would retain {retained} rows (< {MIN_FRAME_SIDE})")

    cropped = frame.pixels[row0:].copy()
    (ax, ay), (bx, by) = net_line.a, net_line.b
    xs = np.arange(frame.width, dtype=np.float64)
    line_y = ay + (by - ay) * (xs - ax) / (bx - ax)
    src_rows = row0 + np.arange(retained, dtype=np.float64)
    above = src_rows[:, None] < (line_y - margin)[None, :]
    cropped[above] = 0

    return Frame(
        pixels=cropped,
        frame_id=frame.frame_id,
        crop_origin=(frame.crop_origin[0], frame.crop_origin[1] + row0),
    )
