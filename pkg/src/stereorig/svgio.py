"""SVG rendering and parsing for template layouts.

Output is SVG 1.1 with millimetre user units (viewBox == sheet bounds).
Layer identity travels in the class attribute: cut, fold, velcro,
aperture.  Coordinates are written with exactly three decimals and the
layout metadata is embedded as canonical JSON, so render -> parse ->
render is byte-identical and parsing recovers geometry to 0.001 mm.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape

from .templates import Piece, TemplateLayout, TemplateError

_STYLE = """\
    .cut { fill: none; stroke: #000000; stroke-width: 0.3; }
    .fold { fill: none; stroke: #0066cc; stroke-width: 0.3; stroke-dasharray: 3 2; }
    .velcro { fill: url(#hatch); stroke: #666666; stroke-width: 0.2; }
    .aperture { fill: none; stroke: #cc0000; stroke-width: 0.3; }"""

_HATCH = """\
    <pattern id="hatch" patternUnits="userSpaceOnUse" width="3" height="3">
      <path d="M 0,3 L 3,0" stroke="#666666" stroke-width="0.4"/>
    </pattern>"""


def _fmt(v: float) -> str:
    r = round(v, 3)
    if r == 0:
        r = 0.0  # never emit -0.000
    return f"{r:.3f}"


def _round_floats(obj):
    if isinstance(obj, float):
        return round(obj, 6)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _canonical_metadata(metadata: dict) -> str:
    return json.dumps(_round_floats(metadata), sort_keys=True, separators=(",", ":"))


def _check_bounds(piece: Piece, sheet: tuple[float, float, float, float]) -> None:
    x, y, w, h = piece.bbox()
    sx, sy, sw, sh = sheet
    eps = 1e-6
    if x < sx - eps or y < sy - eps or x + w > sx + sw + eps or y + h > sy + sh + eps:
        raise TemplateError(
            f"piece {piece.piece_id!r} extends outside sheet bounds "
            f"({x:.3f}, {y:.3f}, {w:.3f}, {h:.3f} vs sheet {sw:.3f} x {sh:.3f})"
        )


def _piece_to_svg(piece: Piece) -> str:
    cls = piece.kind
    panel = f' data-panel="{escape(piece.panel)}"' if piece.panel else ""
    ident = f'id="{escape(piece.piece_id)}" class="{cls}"{panel}'
    if piece.shape == "rect":
        x, y, w, h = piece.rect
        rx = f' rx="{_fmt(piece.corner_radius)}"' if piece.corner_radius > 0 else ""
        return (
            f'    <rect {ident} x="{_fmt(x)}" y="{_fmt(y)}" '
            f'width="{_fmt(w)}" height="{_fmt(h)}"{rx}/>'
        )
    if piece.shape == "circle":
        cx, cy = piece.center
        return (
            f'    <circle {ident} cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(piece.radius)}"/>'
        )
    if piece.shape == "segments":
        parts = [f"M {_fmt(piece.points[0][0])},{_fmt(piece.points[0][1])}"]
        parts.extend(f"L {_fmt(px)},{_fmt(py)}" for px, py in piece.points[1:])
        return f'    <path {ident} d="{" ".join(parts)}"/>'
    raise TemplateError(f"piece {piece.piece_id!r} has unknown shape {piece.shape!r}")


def render_svg(layout: TemplateLayout) -> str:
    sx, sy, sw, sh = layout.sheet_bounds
    for piece in layout.pieces:
        if piece.kind not in ("cut", "fold", "velcro", "aperture"):
            raise TemplateError(
                f"piece {piece.piece_id!r} has unknown kind {piece.kind!r}"
            )
        _check_bounds(piece, layout.sheet_bounds)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(sw)}mm" '
        f'height="{_fmt(sh)}mm" viewBox="{_fmt(sx)} {_fmt(sy)} {_fmt(sw)} {_fmt(sh)}">',
        "  <defs>",
        _HATCH,
        "  </defs>",
        "  <style>",
        _STYLE,
        "  </style>",
        f"  <metadata>{escape(_canonical_metadata(layout.metadata))}</metadata>",
        '  <g id="pieces">',
    ]
    lines.extend(_piece_to_svg(p) for p in layout.pieces)
    lines.append("  </g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


_PATH_RE = re.compile(r"[ML]\s+(-?\d+\.\d+),(-?\d+\.\d+)")


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_svg(text: str) -> TemplateLayout:
    """Inverse of render_svg for documents this module emitted."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise TemplateError(f"not parseable as SVG: {exc}") from exc
    if _local_name(root.tag) != "svg":
        raise TemplateError(f"root element is {root.tag!r}, expected svg")

    view = root.get("viewBox")
    if not view:
        raise TemplateError("missing viewBox")
    sx, sy, sw, sh = (float(v) for v in view.split())

    metadata: dict = {}
    pieces: list[Piece] = []
    for el in root.iter():
        name = _local_name(el.tag)
        if name == "metadata" and el.text:
            # ElementTree has already undone the XML escaping in .text
            metadata = json.loads(el.text)
            continue
        cls = el.get("class", "")
        if cls not in ("cut", "fold", "velcro", "aperture"):
            continue
        piece_id = el.get("id", "")
        panel = el.get("data-panel", "")
        if name == "rect":
            pieces.append(
                Piece(
                    piece_id,
                    cls,
                    "rect",
                    rect=(
                        float(el.get("x")),
                        float(el.get("y")),
                        float(el.get("width")),
                        float(el.get("height")),
                    ),
                    corner_radius=float(el.get("rx", "0")),
                    panel=panel,
                )
            )
        elif name == "circle":
            pieces.append(
                Piece(
                    piece_id,
                    cls,
                    "circle",
                    center=(float(el.get("cx")), float(el.get("cy"))),
                    radius=float(el.get("r")),
                    panel=panel,
                )
            )
        elif name == "path":
            pts = tuple(
                (float(mx), float(my)) for mx, my in _PATH_RE.findall(el.get("d", ""))
            )
            if len(pts) < 2:
                raise TemplateError(f"path {piece_id!r} has fewer than 2 points")
            pieces.append(Piece(piece_id, cls, "segments", points=pts, panel=panel))
    return TemplateLayout(tuple(pieces), (sx, sy, sw, sh), metadata)
