"""Overlay rendering: grayscale probability background, green path cells,
red start dot, blue goal dot. Writes PPM (own deterministic P6 writer) or
PNG (via Pillow) depending on the output extension.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .grid import Cell, ProbGrid

PATH_COLOR = (0, 200, 0)
START_COLOR = (220, 40, 40)
GOAL_COLOR = (50, 80, 235)


def _paint_disc(img: np.ndarray, cell: Cell, radius: int, color) -> None:
    h, w = img.shape[:2]
    r0, c0 = cell
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            if dr * dr + dc * dc <= radius * radius:
                r, c = r0 + dr, c0 + dc
                if 0 <= r < h and 0 <= c < w:
                    img[r, c] = color


def write_ppm(img: np.ndarray, path) -> None:
    """Write an (h, w, 3) uint8 array as binary P6."""
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode())
        fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def render_overlay(
    grid: ProbGrid | np.ndarray,
    paths: list[list[Cell]],
    out_path,
    start: Cell | None = None,
    goal: Cell | None = None,
    scale: int = 1,
) -> None:
    """Render path overlays on a probability map and write an image file.

    ``paths`` may be empty (background and endpoint dots only). Pixels map
    1:1 to cells, upscaled by the integer ``scale``.
    """
    probs = grid.probs if isinstance(grid, ProbGrid) else np.asarray(grid, dtype=np.float64)
    if scale < 1:
        raise ValueError("scale must be a positive integer")
    gray = np.clip(probs * 255.0, 0, 255).astype(np.uint8)
    img = np.repeat(gray[:, :, None], 3, axis=2)
    h, w = probs.shape
    for path in paths:
        for r, c in path:
            if not (0 <= r < h and 0 <= c < w):
                raise ValueError(f"path cell {(r, c)} outside the {h}x{w} map")
            img[r, c] = PATH_COLOR
    if start is not None:
        _paint_disc(img, start, 1, START_COLOR)
    if goal is not None:
        _paint_disc(img, goal, 1, GOAL_COLOR)
    if scale > 1:
        img = np.repeat(np.repeat(img, scale, axis=0), scale, axis=1)
    out = Path(out_path)
    try:
        if out.suffix.lower() == ".ppm":
            write_ppm(img, out)
        else:
            from PIL import Image

            Image.fromarray(img, mode="RGB").save(out)
    except OSError as exc:
        raise OSError(f"cannot write overlay image {out}: {exc}") from exc
