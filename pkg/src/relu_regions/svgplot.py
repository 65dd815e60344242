"""SVG rendering of a 2-D region partition.

Each region is drawn as its polygon clipped to the plotting box.  Fill
colors are arbitrary but deterministic: a 64-bit FNV-1a hash of the pattern
string picks the hue.  Polygon points are written in data coordinates with
the y axis negated (SVG's y grows downward), so areas can be recovered from
the file directly.
"""

from __future__ import annotations

import colorsys

from .geometry import clip_to_polygon
from .regions import RegionSet

__all__ = ["pattern_color", "render_region_svg"]

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _fnv1a64(text: str) -> int:
    value = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        value ^= byte
        value = (value * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return value


def pattern_color(pattern_text: str) -> str:
    """Deterministic fill color (hex) for a pattern string."""
    digest = _fnv1a64(pattern_text)
    hue = (digest % 360) / 360.0
    lightness = 0.45 + ((digest >> 16) % 100) / 400.0  # 0.45 .. 0.70
    r, g, b = colorsys.hls_to_rgb(hue, lightness, 0.65)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def render_region_svg(region_set: RegionSet, box, pixel_size: int = 640) -> str:
    """SVG 1.1 document with one filled polygon per region inside ``box``."""
    (xlo, xhi), (ylo, yhi) = box
    width = xhi - xlo
    height = yhi - ylo
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{pixel_size}" height="{pixel_size}" '
        f'viewBox="{_fmt(xlo)} {_fmt(-yhi)} {_fmt(width)} {_fmt(height)}">',
    ]
    stroke_width = _fmt(min(width, height) / 640.0)
    for region in region_set.regions:
        vertices = clip_to_polygon(region.halfspaces, box)
        if not vertices:
            continue
        points = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in vertices)
        lines.append(
            f'<polygon points="{points}" fill="{pattern_color(region.pattern.text)}" '
            f'stroke="#202020" stroke-width="{stroke_width}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
