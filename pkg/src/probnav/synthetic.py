"""Seeded synthetic worlds: ground-truth masks in several styles plus the
noisy probability maps a segmentation model would produce for them.

The probability map starts from the mask in {0,1}; when noise is nonzero a
few ghost corridors (confidently mispredicted regions that are actually
blocked) are painted in at moderate belief, then per-cell uniform noise is
added, the result is blurred with a 3x3 mean filter, and values are clamped
to [1e-6, 1]. The blur leaks probability mass across corridor boundaries
and the ghosts mimic structured segmentation false positives; together they
make confidence-thresholding planners cut corners, chase phantom shortcuts,
or lose connectivity while probability-aware planners keep working.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .grid import PROB_FLOOR, Cell, GroundTruthMask, ProbGrid

STYLES = ("maze", "corridors", "blobs")


def _blur3(arr: np.ndarray) -> np.ndarray:
    """3x3 mean filter with edge replication."""
    padded = np.pad(arr, 1, mode="edge")
    out = np.zeros_like(arr)
    for dr in range(3):
        for dc in range(3):
            out += padded[dr : dr + arr.shape[0], dc : dc + arr.shape[1]]
    return out / 9.0


def _carve_segment(gt: np.ndarray, a: Cell, b: Cell, width: int, rng) -> None:
    """Open an L-shaped corridor between two cells, axis order randomized."""
    r0, c0 = a
    r1, c1 = b
    if rng.integers(2) == 0:
        legs = [((r0, c0), (r1, c0)), ((r1, c0), (r1, c1))]
    else:
        legs = [((r0, c0), (r0, c1)), ((r0, c1), (r1, c1))]
    h, w = gt.shape
    half = width // 2
    for (ar, ac), (br, bc) in legs:
        rlo, rhi = sorted((ar, br))
        clo, chi = sorted((ac, bc))
        gt[
            max(0, rlo - half) : min(h, rhi + width - half),
            max(0, clo - half) : min(w, chi + width - half),
        ] = True


def _gen_corridors(rng, height: int, width: int) -> np.ndarray:
    """Winding corridor network: a chain of waypoints plus a few branches.

    Leg widths vary between 2 and 3 cells so some stretches binarize
    robustly while others pinch off under noise.
    """
    gt = np.zeros((height, width), dtype=bool)
    margin = 3
    n_pts = 5 + int(rng.integers(3))
    pts = [
        (int(rng.integers(margin, height - margin)), int(rng.integers(margin, width - margin)))
        for _ in range(n_pts)
    ]
    for a, b in zip(pts, pts[1:]):
        _carve_segment(gt, a, b, 2 + int(rng.integers(2)), rng)
    for _ in range(2):
        i, j = rng.integers(0, n_pts, size=2)
        if i != j:
            _carve_segment(gt, pts[int(i)], pts[int(j)], 2 + int(rng.integers(2)), rng)
    return gt


def _gen_maze(rng, height: int, width: int, braid: float = 0.35) -> np.ndarray:
    """Braided maze scaled up to 2-cell corridors.

    Generated with a recursive backtracker, then ``braid`` of the remaining
    lattice walls are knocked out so the street network has loops and few
    dead ends, like a road grid rather than a labyrinth.
    """
    cell = 3  # lattice pitch: 2 corridor cells + 1 wall cell
    mh = max(2, (height - 1) // cell)
    mw = max(2, (width - 1) // cell)
    visited = np.zeros((mh, mw), dtype=bool)
    opened: set[tuple[int, int, int, int]] = set()
    gt = np.zeros((height, width), dtype=bool)

    def open_room(r: int, c: int) -> None:
        gt[1 + r * cell : 1 + r * cell + 2, 1 + c * cell : 1 + c * cell + 2] = True

    def open_wall(r0: int, c0: int, r1: int, c1: int) -> None:
        opened.add((min(r0, r1), min(c0, c1), max(r0, r1), max(c0, c1)))
        rlo = 1 + min(r0, r1) * cell
        clo = 1 + min(c0, c1) * cell
        if r0 == r1:
            gt[rlo : rlo + 2, clo : clo + cell + 2] = True
        else:
            gt[rlo : rlo + cell + 2, clo : clo + 2] = True

    start = (int(rng.integers(mh)), int(rng.integers(mw)))
    stack = [start]
    visited[start] = True
    open_room(*start)
    while stack:
        r, c = stack[-1]
        options = [
            (r + dr, c + dc)
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1))
            if 0 <= r + dr < mh and 0 <= c + dc < mw and not visited[r + dr, c + dc]
        ]
        if not options:
            stack.pop()
            continue
        nxt = options[int(rng.integers(len(options)))]
        visited[nxt] = True
        open_wall(r, c, nxt[0], nxt[1])
        open_room(*nxt)
        stack.append(nxt)
    walls = [
        (r, c, r + dr, c + dc)
        for r in range(mh)
        for c in range(mw)
        for dr, dc in ((0, 1), (1, 0))
        if r + dr < mh and c + dc < mw and (r, c, r + dr, c + dc) not in opened
    ]
    for k in rng.permutation(len(walls))[: int(braid * len(walls))]:
        w = walls[int(k)]
        open_wall(*w)
    return gt


def _gen_blobs(rng, height: int, width: int) -> np.ndarray:
    """Traversable blobs joined by corridors so the world stays connected."""
    gt = np.zeros((height, width), dtype=bool)
    margin = 4
    n_blobs = 3 + int(rng.integers(3))
    centers = []
    rows, cols = np.indices((height, width))
    for _ in range(n_blobs):
        cr = int(rng.integers(margin, height - margin))
        cc = int(rng.integers(margin, width - margin))
        radius = int(rng.integers(3, max(4, min(height, width) // 6)))
        gt |= (rows - cr) ** 2 + (cols - cc) ** 2 <= radius * radius
        centers.append((cr, cc))
    for a, b in zip(centers, centers[1:]):
        _carve_segment(gt, a, b, 2, rng)
    return gt


GHOST_BELIEF = 0.65


def _ghost_corridors(rng, gt: np.ndarray) -> np.ndarray:
    """Structured false positives: corridor-shaped regions the model rates
    moderately traversable although the ground truth blocks them.

    They sit above a 50% confidence cutoff but well below real corridors,
    so thresholding planners treat them as shortcuts while probability-aware
    costs price them out.
    """
    h, w = gt.shape
    ghost = np.zeros((h, w), dtype=bool)
    margin = 3
    for _ in range(3 + int(rng.integers(2))):
        a = (int(rng.integers(margin, h - margin)), int(rng.integers(margin, w - margin)))
        b = (int(rng.integers(margin, h - margin)), int(rng.integers(margin, w - margin)))
        _carve_segment(ghost, a, b, 3, rng)
    return ghost & ~gt


def gen_synthetic(
    seed: int, width: int, height: int, style: str, noise: float
) -> tuple[ProbGrid, GroundTruthMask]:
    """Generate a (probability map, ground-truth mask) pair.

    Deterministic per seed. ``noise`` is the half-width of the per-cell
    uniform perturbation and must lie in [0, 0.5]; with noise 0 the map is
    exactly the blurred, floored mask (no perturbations, no ghosts).
    """
    if style not in STYLES:
        raise ValueError(f"unknown style {style!r}; expected one of {STYLES}")
    if not 0.0 <= noise <= 0.5:
        raise ValueError("noise must lie in [0, 0.5]")
    if width < 8 or height < 8:
        raise ValueError("synthetic maps must be at least 8x8")
    rng = np.random.default_rng(seed)
    if style == "corridors":
        gt = _gen_corridors(rng, height, width)
    elif style == "maze":
        gt = _gen_maze(rng, height, width)
    else:
        gt = _gen_blobs(rng, height, width)
    m = gt.astype(np.float64)
    if noise > 0.0:
        m = np.maximum(m, np.where(_ghost_corridors(rng, gt), GHOST_BELIEF, 0.0))
        m = m + rng.uniform(-noise, noise, size=m.shape)
    m = _blur3(m)
    m = np.clip(m, PROB_FLOOR, 1.0)
    return ProbGrid(m), GroundTruthMask(gt)


def _bfs_farthest(labels: np.ndarray, source: Cell) -> Cell:
    """Farthest traversable cell from ``source`` by 8-connected hop count."""
    h, w = labels.shape
    dist = np.full((h, w), -1, dtype=np.int32)
    dist[source] = 0
    queue = deque([source])
    far = source
    while queue:
        r, c = queue.popleft()
        far = (r, c)
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                nr, nc = r + dr, c + dc
                if 0 <= nr < h and 0 <= nc < w and labels[nr, nc] and dist[nr, nc] < 0:
                    dist[nr, nc] = dist[r, c] + 1
                    queue.append((nr, nc))
    return far


def pick_endpoints(gt: GroundTruthMask, seed: int = 0) -> tuple[Cell, Cell]:
    """Deterministically pick far-apart start/goal cells in one traversable
    component (double-BFS pseudo-diameter)."""
    rng = np.random.default_rng(seed)
    rs, cs = np.nonzero(gt.labels)
    if rs.size < 2:
        raise ValueError("mask has fewer than two traversable cells")
    k = int(rng.integers(rs.size))
    anchor = (int(rs[k]), int(cs[k]))
    start = _bfs_farthest(gt.labels, anchor)
    goal = _bfs_farthest(gt.labels, start)
    if start == goal:
        raise ValueError("could not find two distinct connected traversable cells")
    return start, goal
