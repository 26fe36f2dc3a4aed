"""Deterministic maze image used as the image-ingestion fixture.

The 32x32 image has cells at odd coordinates and three regions separated by
solid wall columns.  Each region holds its own recursive-backtracker maze:

* left   (columns 1-13): one start pixel and one exit pixel
* middle (columns 15-21): one exit pixel only
* right  (columns 23-29): one start pixel only

Start and exit pixels sit in the outer wall next to a cell, so they never cut
a corridor.
"""
import json

import numpy as np

SIZE = 32
WALL, WHITE, EXIT, START = (0, 0, 0), (255, 255, 255), (0, 255, 0), (0, 0, 255)
REGIONS = ((1, 13), (15, 21), (23, 29))
SEED = 20220801

PALETTE = {"adjacency": "chebyshev8",
           "colors": {"#000000": "wall", "#ffffff": "white", "#00ff00": "exit", "#0000ff": "start"}}

# (row, col) of the marker pixels
STARTS = ((0, 1), (0, 25))
EXITS = ((30, 13), (30, 17))


def _carve(grid, rng, c0, c1):
    rows = list(range(1, SIZE - 2, 2))
    cols = list(range(c0, c1 + 1, 2))
    start = (rows[0], cols[0])
    seen = {start}
    stack = [start]
    grid[start] = WHITE
    while stack:
        r, c = stack[-1]
        options = [(r + dr, c + dc) for dr, dc in ((-2, 0), (2, 0), (0, -2), (0, 2))
                   if rows[0] <= r + dr <= rows[-1] and c0 <= c + dc <= c1 and (r + dr, c + dc) not in seen]
        if not options:
            stack.pop()
            continue
        nr, nc = options[int(rng.integers(len(options)))]
        grid[(r + nr) // 2, (c + nc) // 2] = WHITE
        grid[nr, nc] = WHITE
        seen.add((nr, nc))
        stack.append((nr, nc))


def generate_maze(seed=SEED):
    """RGB array of shape ``(32, 32, 3)``."""
    rng = np.random.default_rng(seed)
    grid = np.zeros((SIZE, SIZE, 3), dtype=np.uint8)
    grid[:] = WALL
    for c0, c1 in REGIONS:
        _carve(grid, rng, c0, c1)
    for rc in STARTS:
        grid[rc] = START
    for rc in EXITS:
        grid[rc] = EXIT
    return grid


def palette_json():
    return json.dumps(PALETTE, indent=1) + "\n"


def upscale(img, factor):
    return np.repeat(np.repeat(img, factor, axis=0), factor, axis=1)
