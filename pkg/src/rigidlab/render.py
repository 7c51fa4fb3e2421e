"""Deterministic SVG scatter of a two-coordinate projection of T^d."""

from __future__ import annotations

from typing import Sequence

import numpy as np

SIZE = 480
PAD = 30


def _xy(p, size: int) -> tuple[str, str]:
    span = size - 2 * PAD
    return f"{PAD + p[0] * span:.3f}", f"{PAD + (1 - p[1]) * span:.3f}"


def orbit_svg(
    points: np.ndarray,
    axes: tuple[int, int] = (0, 1),
    envelope: np.ndarray | None = None,
    discs: Sequence[tuple[np.ndarray, float]] = (),
    title: str = "",
    size: int = SIZE,
) -> str:
    """Orbit points in the unit square of coordinates ``axes``.

    ``envelope`` points (e.g. samples of predicted subtori) are drawn as faint
    dots underneath; ``discs`` are (center, radius) pairs in torus units.
    """
    i, j = axes
    span = size - 2 * PAD
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="{PAD}" y="{PAD}" width="{span}" height="{span}" fill="white" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{PAD}" y="{PAD - 10}" font-size="12" font-family="monospace">{_escape(title)}</text>')
    if envelope is not None and len(envelope):
        out.append('<g fill="#bbbbbb">')
        for p in np.mod(envelope[:, [i, j]], 1.0):
            x, y = _xy(p, size)
            out.append(f'<circle cx="{x}" cy="{y}" r="0.6"/>')
        out.append("</g>")
    if discs:
        out.append('<g fill="none" stroke="#3366cc">')
        for center, radius in discs:
            x, y = _xy(np.mod(np.asarray(center)[[i, j]], 1.0), size)
            out.append(f'<circle cx="{x}" cy="{y}" r="{max(radius * span, 1.0):.3f}"/>')
        out.append("</g>")
    out.append('<g fill="#cc2222">')
    for p in np.mod(np.asarray(points)[:, [i, j]], 1.0):
        x, y = _xy(p, size)
        out.append(f'<circle cx="{x}" cy="{y}" r="1.5"/>')
    out.append("</g>")
    out.append(
        f'<text x="{PAD}" y="{size - 8}" font-size="11" font-family="monospace">x_{i + 1} vs x_{j + 1}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
