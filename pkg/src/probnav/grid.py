"""Traversability grids: data model, file I/O, resampling, and simulated sensing.

Grids are indexed ``[row, col]`` with row 0 at the top. Probability maps hold
one traversal probability per cell; ground-truth masks hold the true
traversable/blocked label used by the simulator and by metrics.

Supported file formats: PGM (P2 ASCII and P5 binary, 8-bit), 8-bit grayscale
PNG, and CSV of comma-separated reals (one row per line). Grayscale value v
maps to probability v/maxval; CSV values are used directly and must lie in
[0, 1].
"""

from __future__ import annotations

import math
from functools import lru_cache
from pathlib import Path

import numpy as np

Cell = tuple[int, int]

# Values below this are lifted when a grid is prepared for planning, so the
# model never hard-blocks a cell; only reveal() writes exact zeros.
PROB_FLOOR = 1e-6


class MapFormatError(Exception):
    """A map or mask file could not be read or violates format constraints."""


def euclid(a: Cell, b: Cell) -> float:
    """Euclidean distance between two cells, in cell units."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


class ProbGrid:
    """Dense 2D grid of traversal probabilities in [0, 1].

    ``probs`` is a float64 array of shape (height, width). Instances are
    treated as immutable except for in-place revelation via :func:`reveal`;
    a grid being revealed must be owned by exactly one simulation.
    """

    __slots__ = ("probs",)

    def __init__(self, probs) -> None:
        arr = np.ascontiguousarray(probs, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"probability grid must be 2D, got shape {arr.shape}")
        h, w = arr.shape
        if h < 2 or w < 2:
            raise ValueError(f"probability grid must be at least 2x2, got {h}x{w}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("probability grid contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("probability values must lie in [0, 1]")
        self.probs = arr

    @property
    def height(self) -> int:
        return self.probs.shape[0]

    @property
    def width(self) -> int:
        return self.probs.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.probs.shape[0] and 0 <= cell[1] < self.probs.shape[1]

    def copy(self) -> "ProbGrid":
        return ProbGrid(self.probs.copy())

    def floored(self, floor: float = PROB_FLOOR) -> "ProbGrid":
        """Copy with every probability lifted to at least ``floor``.

        Applied once when a loaded grid enters a planner or simulator, so
        that model uncertainty never produces hard blocks; cells revealed
        blocked afterwards are set to exactly 0.0 and stay hard.
        """
        return ProbGrid(np.maximum(self.probs, floor))

    def mean(self) -> float:
        return float(self.probs.mean())


class GroundTruthMask:
    """Binary traversable/blocked grid. ``labels[row, col]`` True = traversable."""

    __slots__ = ("labels",)

    def __init__(self, labels) -> None:
        arr = np.ascontiguousarray(labels, dtype=bool)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2D, got shape {arr.shape}")
        h, w = arr.shape
        if h < 2 or w < 2:
            raise ValueError(f"mask must be at least 2x2, got {h}x{w}")
        self.labels = arr

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.labels.shape[0] and 0 <= cell[1] < self.labels.shape[1]

    def traversable(self, cell: Cell) -> bool:
        return bool(self.labels[cell[0], cell[1]])


# ---------------------------------------------------------------------------
# File loading


def _parse_pgm(data: bytes) -> np.ndarray:
    """Parse a P2/P5 PGM into a float array scaled to [0, 1]."""
    # Tokenize the header; '#' starts a comment running to end of line.
    pos = 0
    tokens: list[bytes] = []
    while len(tokens) < 4 and pos < len(data):
        ch = data[pos : pos + 1]
        if ch == b"#":
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace() and data[end : end + 1] != b"#":
                end += 1
            tokens.append(data[pos:end])
            pos = end
    if len(tokens) < 4:
        raise MapFormatError("truncated PGM header")
    magic = tokens[0]
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise MapFormatError(f"bad PGM header fields: {exc}") from exc
    if width <= 0 or height <= 0:
        raise MapFormatError(f"zero-sized PGM image ({width}x{height})")
    if not 0 < maxval < 256:
        raise MapFormatError(f"only 8-bit PGM supported, maxval={maxval}")
    if magic == b"P5":
        raster = data[pos + 1 : pos + 1 + width * height]
        if len(raster) < width * height:
            raise MapFormatError("truncated P5 raster")
        vals = np.frombuffer(raster, dtype=np.uint8).astype(np.float64)
    elif magic == b"P2":
        body = data[pos:].split()
        if len(body) < width * height:
            raise MapFormatError("truncated P2 raster")
        try:
            vals = np.array([int(t) for t in body[: width * height]], dtype=np.float64)
        except ValueError as exc:
            raise MapFormatError(f"bad P2 sample: {exc}") from exc
    else:
        raise MapFormatError(f"unsupported PNM magic {magic!r}")
    if vals.min() < 0 or vals.max() > maxval:
        raise MapFormatError("PGM sample outside [0, maxval]")
    return (vals / float(maxval)).reshape(height, width)


def _parse_csv(text: str) -> np.ndarray:
    rows: list[list[float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError as exc:
            raise MapFormatError(f"bad CSV value on line {lineno}: {exc}") from exc
        rows.append(row)
    if not rows:
        raise MapFormatError("empty CSV map")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise MapFormatError("ragged CSV map (rows of unequal length)")
    arr = np.array(rows, dtype=np.float64)
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise MapFormatError("CSV value outside [0, 1]")
    return arr


def _load_gray(path) -> np.ndarray:
    """Read any supported map file as a float array in [0, 1]."""
    p = Path(path)
    if not p.is_file():
        raise MapFormatError(f"no such map file: {p}")
    suffix = p.suffix.lower()
    if suffix == ".csv":
        return _parse_csv(p.read_text())
    data = p.read_bytes()
    if data[:2] in (b"P2", b"P5"):
        return _parse_pgm(data)
    if suffix == ".png":
        from PIL import Image

        try:
            with Image.open(p) as img:
                gray = img.convert("L")
                arr = np.asarray(gray, dtype=np.float64)
        except Exception as exc:
            raise MapFormatError(f"cannot read PNG {p}: {exc}") from exc
        if arr.size == 0:
            raise MapFormatError(f"zero-sized image: {p}")
        return arr / 255.0
    raise MapFormatError(f"unsupported map format: {p}")


def load_prob_grid(path) -> ProbGrid:
    """Load a traversal-probability map from PGM, PNG, or CSV."""
    return ProbGrid(_load_gray(path))


def load_gt_mask(path, threshold: float = 0.5) -> GroundTruthMask:
    """Load a ground-truth mask; values >= threshold are traversable."""
    return GroundTruthMask(_load_gray(path) >= threshold)


def write_pgm(values: np.ndarray, path) -> None:
    """Write a [0, 1] float array (or bool mask) as an 8-bit binary PGM."""
    arr = np.asarray(values)
    if arr.dtype == bool:
        arr = arr.astype(np.float64)
    quant = np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)
    h, w = quant.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(quant.tobytes())


def check_paired(grid: ProbGrid, mask: GroundTruthMask) -> None:
    """Reject dimension mismatches between a map and its paired mask."""
    if grid.shape != mask.shape:
        raise MapFormatError(
            f"probability map is {grid.height}x{grid.width} but ground-truth mask "
            f"is {mask.height}x{mask.width}; paired files must have equal dimensions"
        )


# ---------------------------------------------------------------------------
# Resampling


def _box_weights(n_in: int, n_out: int) -> np.ndarray:
    """Row-stochastic (n_out, n_in) overlap matrix for 1D box resampling.

    Output interval i covers [i*n_in/n_out, (i+1)*n_in/n_out) in input-cell
    coordinates; weights are exact overlap fractions computed with integer
    arithmetic so each row sums to 1 up to one float division per entry.
    """
    w = np.zeros((n_out, n_in), dtype=np.float64)
    for i in range(n_out):
        lo = i * n_in  # interval bounds scaled by n_out
        hi = (i + 1) * n_in
        k0 = lo // n_out
        k1 = (hi + n_out - 1) // n_out
        for k in range(k0, min(k1, n_in)):
            overlap = min(hi, (k + 1) * n_out) - max(lo, k * n_out)
            if overlap > 0:
                w[i, k] = overlap / n_in
    return w


def resample_array(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Area-weighted box resampling of a 2D array to (out_h, out_w)."""
    arr = np.asarray(arr, dtype=np.float64)
    if out_h < 1 or out_w < 1:
        raise ValueError("output dimensions must be positive")
    h, w = arr.shape
    if (h, w) == (out_h, out_w):
        return arr.copy()
    wr = _box_weights(h, out_h)
    wc = _box_weights(w, out_w)
    return wr @ arr @ wc.T


def resample(grid: ProbGrid, out_w: int, out_h: int) -> ProbGrid:
    """Resample a probability grid via area-weighted averaging.

    Preserves the grid mean exactly when output dims divide input dims.
    """
    if out_w < 2 or out_h < 2:
        raise ValueError("resample output dimensions must be at least 2")
    if (grid.height, grid.width) == (out_h, out_w):
        return grid.copy()
    out = resample_array(grid.probs, out_h, out_w)
    # Weight rounding can push values a few ulps outside [0, 1].
    return ProbGrid(np.clip(out, 0.0, 1.0))


def resample_mask(mask: GroundTruthMask, out_w: int, out_h: int) -> GroundTruthMask:
    """Resample a binary mask by averaging its {0,1} image, re-thresholding at 0.5."""
    if out_w < 2 or out_h < 2:
        raise ValueError("resample output dimensions must be at least 2")
    if (mask.height, mask.width) == (out_h, out_w):
        return GroundTruthMask(mask.labels.copy())
    reals = resample_array(mask.labels.astype(np.float64), out_h, out_w)
    return GroundTruthMask(reals >= 0.5)


# ---------------------------------------------------------------------------
# Line of sight and revelation


def bresenham_line(a: Cell, b: Cell) -> list[Cell]:
    """Integer Bresenham line from a to b, inclusive.

    Symmetric variant: the line is always traced from the lexicographically
    smaller endpoint, so line(a, b) == reversed(line(b, a)) cell for cell.
    Consecutive cells are 8-adjacent and the list has max(|dr|, |dc|) + 1
    entries.
    """
    if b < a:
        pts = bresenham_line(b, a)
        pts.reverse()
        return pts
    r0, c0 = a
    r1, c1 = b
    dr = r1 - r0  # >= 0 by canonical ordering
    dc = abs(c1 - c0)
    sc = 1 if c0 < c1 else -1
    err = dr - dc
    pts: list[Cell] = []
    r, c = r0, c0
    while True:
        pts.append((r, c))
        if r == r1 and c == c1:
            return pts
        e2 = 2 * err
        if e2 > -dc:
            err -= dc
            r += 1
        if e2 < dr:
            err += dr
            c += sc


@lru_cache(maxsize=8)
def _ray_table(radius: int):
    """Precomputed rays for every offset within Euclidean ``radius`` of origin.

    Returns (targets, prefix_r, prefix_c, prefix_ok) where targets is an
    (n, 2) offset array and prefix_* are (n, L) arrays holding each target's
    Bresenham prefix (the line from the origin, excluding the target itself);
    padded entries have prefix_ok False and point at the origin.
    """
    offsets = []
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            if (dr or dc) and dr * dr + dc * dc <= radius * radius:
                offsets.append((dr, dc))
    n = len(offsets)
    max_len = max(1, radius)  # line length is max(|dr|,|dc|)+1, prefix drops one
    prefix_r = np.zeros((n, max_len), dtype=np.int32)
    prefix_c = np.zeros((n, max_len), dtype=np.int32)
    prefix_ok = np.zeros((n, max_len), dtype=bool)
    for i, (dr, dc) in enumerate(offsets):
        line = bresenham_line((0, 0), (dr, dc))[:-1]
        for j, (pr, pc) in enumerate(line):
            prefix_r[i, j] = pr
            prefix_c[i, j] = pc
            prefix_ok[i, j] = True
    return np.array(offsets, dtype=np.int32), prefix_r, prefix_c, prefix_ok


def _scan_arrays(center: Cell, radius: int, gt: GroundTruthMask):
    """Vectorized visibility scan; returns (rows, cols, labels) arrays.

    A cell is visible when every cell strictly before it on the Bresenham
    ray from the center is traversable, so rays stop at (and include) the
    first blocked cell. The center itself is always visible.
    """
    if radius < 1:
        raise ValueError("scan radius must be at least 1")
    if not gt.in_bounds(center):
        raise ValueError(f"scan center {center} outside {gt.height}x{gt.width} mask")
    targets, pre_r, pre_c, pre_ok = _ray_table(radius)
    r0, c0 = center
    h, w = gt.labels.shape
    abs_r = targets[:, 0] + r0
    abs_c = targets[:, 1] + c0
    inb = (abs_r >= 0) & (abs_r < h) & (abs_c >= 0) & (abs_c < w)
    abs_r = abs_r[inb]
    abs_c = abs_c[inb]
    # Prefix cells lie in the bounding box of center and target, so they are
    # in bounds whenever the target is.
    rows = pre_r[inb] + r0
    cols = pre_c[inb] + c0
    clear = gt.labels[rows, cols] | ~pre_ok[inb]
    vis = clear.all(axis=1)
    out_r = np.concatenate(([r0], abs_r[vis]))
    out_c = np.concatenate(([c0], abs_c[vis]))
    return out_r, out_c, gt.labels[out_r, out_c]


def scan_visible(center: Cell, radius: int, gt: GroundTruthMask) -> dict[Cell, bool]:
    """Simulate a range-limited line-of-sight scan around ``center``.

    Returns the visible set as a mapping from cell to its true label
    (True = traversable). Every returned cell lies within Euclidean
    ``radius`` of the center; occlusion follows the first-blocked-cell rule.
    """
    rows, cols, labels = _scan_arrays(center, radius, gt)
    return {
        (int(r), int(c)): bool(v) for r, c, v in zip(rows.tolist(), cols.tolist(), labels.tolist())
    }


def _reveal_arrays(known: ProbGrid, rows, cols, labels):
    """Vectorized reveal; returns (rows, cols) arrays of cells that changed."""
    probs = known.probs
    new = np.where(labels, 1.0, 0.0)
    old = probs[rows, cols]
    changed = old != new
    probs[rows[changed], cols[changed]] = new[changed]
    return rows[changed], cols[changed]


def reveal(known: ProbGrid, gt: GroundTruthMask, visible: dict[Cell, bool]) -> set[Cell]:
    """Write true labels into the known grid for every visible cell.

    Visible traversable cells become probability 1.0 and blocked cells
    exactly 0.0; all other cells are untouched. Returns the set of cells
    whose stored value actually changed (idempotent on repeats). ``gt`` is
    the mask the cells were scanned from and is used for dimension checks.
    """
    if known.shape != gt.shape:
        raise ValueError(
            f"known grid {known.shape} and ground truth {gt.shape} dimensions differ"
        )
    if not visible:
        return set()
    cells = list(visible.keys())
    rows = np.array([c[0] for c in cells], dtype=np.intp)
    cols = np.array([c[1] for c in cells], dtype=np.intp)
    labels = np.array([visible[c] for c in cells], dtype=bool)
    chr_, chc = _reveal_arrays(known, rows, cols, labels)
    return {(int(r), int(c)) for r, c in zip(chr_.tolist(), chc.tolist())}
