"""Uniform-grid lookup table for the disjoint covering balls."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BallTable:
    cx: np.ndarray
    cy: np.ndarray
    r: np.ndarray
    cell_start: np.ndarray  # int32, nx*ny + 1
    items: np.ndarray       # int32, flattened candidate lists
    padded: np.ndarray      # int32, (nx*ny, maxc), -1 padded
    x0: float
    y0: float
    inv_h: float
    nx: int
    ny: int

    @property
    def k(self) -> int:
        return self.cx.shape[0]


def build_table(centers, radii, max_cells: int = 512) -> BallTable:
    """Index disjoint balls on a uniform grid sized to the smallest ball."""
    centers = np.ascontiguousarray(centers, dtype=float)
    radii = np.ascontiguousarray(radii, dtype=float)
    k = radii.shape[0]
    if k == 0:
        empty = np.zeros(1, dtype=np.int32)
        return BallTable(
            centers[:, 0].copy() if k else np.zeros(0), np.zeros(0), np.zeros(0),
            empty, np.zeros(0, dtype=np.int32), np.full((1, 1), -1, dtype=np.int32),
            0.0, 0.0, 1.0, 1, 1,
        )
    x0 = float(np.min(centers[:, 0] - radii))
    y0 = float(np.min(centers[:, 1] - radii))
    x1 = float(np.max(centers[:, 0] + radii))
    y1 = float(np.max(centers[:, 1] + radii))
    h = max(2.0 * float(np.min(radii)), (max(x1 - x0, y1 - y0)) / max_cells)
    nx = max(1, int(np.ceil((x1 - x0) / h)))
    ny = max(1, int(np.ceil((y1 - y0) / h)))
    cells = [[] for _ in range(nx * ny)]
    for i in range(k):
        ix0 = max(0, int((centers[i, 0] - radii[i] - x0) / h))
        ix1 = min(nx - 1, int((centers[i, 0] + radii[i] - x0) / h))
        iy0 = max(0, int((centers[i, 1] - radii[i] - y0) / h))
        iy1 = min(ny - 1, int((centers[i, 1] + radii[i] - y0) / h))
        for ix in range(ix0, ix1 + 1):
            for iy in range(iy0, iy1 + 1):
                cells[ix * ny + iy].append(i)
    cell_start = np.zeros(nx * ny + 1, dtype=np.int32)
    for c, lst in enumerate(cells):
        cell_start[c + 1] = cell_start[c] + len(lst)
    items = np.zeros(int(cell_start[-1]), dtype=np.int32)
    maxc = max(1, max(len(lst) for lst in cells))
    padded = np.full((nx * ny, maxc), -1, dtype=np.int32)
    for c, lst in enumerate(cells):
        items[cell_start[c]:cell_start[c + 1]] = lst
        padded[c, : len(lst)] = lst
    return BallTable(
        np.ascontiguousarray(centers[:, 0]), np.ascontiguousarray(centers[:, 1]),
        radii, cell_start, items, padded, x0, y0, 1.0 / h, nx, ny,
    )
