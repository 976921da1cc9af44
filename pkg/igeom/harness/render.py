"""Raster drawings of flow lines and Loewner traces."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
from PIL import Image, ImageColor, ImageDraw

from igeom.core import ConfigValidationError
from igeom.flowline import FlowPath, LightConeSet
from igeom.sle import CurvePolyline

logger = logging.getLogger(__name__)

Box = Tuple[float, float, float, float]

MAX_HUE = 270.0


def _points(path) -> np.ndarray:
    return np.asarray(getattr(path, "vertices", getattr(path, "points", path)), dtype=complex)


def _key(index: int, path) -> float:
    return float(path.theta) if isinstance(path, FlowPath) else float(index)


def hues_for(keys: Sequence[float]) -> list[float]:
    """Hue in degrees, increasing with ``keys``; equal keys share a hue."""

    keys = np.asarray(keys, dtype=float)
    lo, hi = float(keys.min()), float(keys.max())
    if hi == lo:
        return [0.0] * len(keys)
    return list(MAX_HUE * (keys - lo) / (hi - lo))


def _bounds(paths: Sequence[np.ndarray], margin: float = 0.05) -> Box:
    stacked = np.concatenate(paths)
    x0, x1 = stacked.real.min(), stacked.real.max()
    y0, y1 = stacked.imag.min(), stacked.imag.max()
    pad = margin * max(x1 - x0, y1 - y0, 1e-9)
    return (x0 - pad, y0 - pad, x1 + pad, y1 + pad)


def _to_pixels(points: np.ndarray, box: Box, size: Tuple[int, int]) -> list[tuple[float, float]]:
    x0, y0, x1, y1 = box
    width, height = size
    px = (points.real - x0) / (x1 - x0) * (width - 1)
    py = (y1 - points.imag) / (y1 - y0) * (height - 1)
    return list(zip(np.round(px).tolist(), np.round(py).tolist()))


def render_paths(
    paths: Sequence[FlowPath | CurvePolyline | np.ndarray],
    out: str | Path,
    *,
    size: Tuple[int, int] = (800, 800),
    box: Optional[Box] = None,
    hues: Optional[Sequence[float]] = None,
    background: str = "white",
    line_width: int = 1,
) -> Path:
    """PNG of the polylines; flow lines get hues ordered by angle, other paths by position in the list."""

    if not paths:
        raise ConfigValidationError("paths", "nothing to render")
    polylines = [_points(p) for p in paths]
    if any(p.size == 0 for p in polylines):
        raise ConfigValidationError("paths", "empty polyline")
    box = box or _bounds(polylines)
    if hues is None:
        hues = hues_for([_key(i, p) for i, p in enumerate(paths)])

    image = Image.new("RGB", size, background)
    draw = ImageDraw.Draw(image)
    for points, hue in zip(polylines, hues):
        color = ImageColor.getrgb(f"hsv({int(round(hue))},100%,85%)")
        pixels = _to_pixels(points, box, size)
        if len(pixels) == 1:
            draw.point(pixels, fill=color)
        else:
            draw.line(pixels, fill=color, width=line_width)

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    image.save(out, format="PNG")
    logger.debug("Rendered %d paths to %s", len(polylines), out)
    return out


def render_light_cone(cone: LightConeSet, out: str | Path, **options) -> Path:
    """Paths coloured by generation."""

    generations = [p.generation for p in cone.paths]
    return render_paths(cone.paths, out, hues=hues_for(generations), **options)


def count_foreground(path: str | Path, background: str = "white") -> int:
    """Pixels differing from the background colour."""

    with Image.open(path) as image:
        pixels = np.asarray(image.convert("RGB"))
    return int(np.any(pixels != np.asarray(ImageColor.getrgb(background)), axis=-1).sum())
