"""Pixel orderings that flatten a 28x28 image into the network input.

A pattern is a permutation ``perm`` of 0..783 with ``out[k] =
pixels[perm[k]]`` where pixel index = row * 28 + col.

Built-in orderings:

1. column by column, top to bottom within each column;
2. clockwise inward spiral from the top-left corner, heading right;
3. the central 20x20 block (rows/cols 4..23) row by row, then the four
   outer rings in the same clockwise spiral order, outermost first.
"""
from pathlib import Path

import numpy as np

from .errors import PatternError

SIZE = 28
N_PIXELS = SIZE * SIZE
CENTER_LO, CENTER_HI = 4, 24


class Pattern:
    __slots__ = ("perm",)

    def __init__(self, perm):
        perm = np.asarray(perm)
        if perm.shape != (N_PIXELS,):
            raise PatternError(f"pattern needs {N_PIXELS} entries, got {perm.size}")
        if not np.issubdtype(perm.dtype, np.integer):
            raise PatternError("pattern entries must be integers")
        if perm.min() < 0 or perm.max() >= N_PIXELS:
            raise PatternError("pattern entries must lie in 0..783")
        counts = np.bincount(perm, minlength=N_PIXELS)
        if not (counts == 1).all():
            dup = int(np.flatnonzero(counts > 1)[0])
            raise PatternError(f"pattern is not a bijection: index {dup} repeats")
        perm = perm.astype(np.int64)
        perm.setflags(write=False)
        self.perm = perm

    def __eq__(self, other):
        return isinstance(other, Pattern) and np.array_equal(self.perm, other.perm)

    def __hash__(self):
        return hash(self.perm.tobytes())

    def __repr__(self):
        return f"Pattern([{', '.join(map(str, self.perm[:6]))}, ...])"


def _spiral(size=SIZE):
    """Clockwise inward spiral over a size x size grid, as (row, col)."""
    top, left, bottom, right = 0, 0, size - 1, size - 1
    cells = []
    while top <= bottom and left <= right:
        cells += [(top, c) for c in range(left, right + 1)]
        cells += [(r, right) for r in range(top + 1, bottom + 1)]
        if top < bottom:
            cells += [(bottom, c) for c in range(right - 1, left - 1, -1)]
        if left < right:
            cells += [(r, left) for r in range(bottom - 1, top, -1)]
        top, left, bottom, right = top + 1, left + 1, bottom - 1, right - 1
    return cells


def column_major():
    k = np.arange(N_PIXELS)
    return Pattern((k % SIZE) * SIZE + k // SIZE)


def spiral():
    return Pattern([r * SIZE + c for r, c in _spiral()])


def center_then_border():
    center = [r * SIZE + c
              for r in range(CENTER_LO, CENTER_HI)
              for c in range(CENTER_LO, CENTER_HI)]
    border = [r * SIZE + c for r, c in _spiral()
              if min(r, c, SIZE - 1 - r, SIZE - 1 - c) < CENTER_LO]
    return Pattern(center + border)


def identity():
    return Pattern(np.arange(N_PIXELS))


_BUILTINS = {1: column_major, 2: spiral, 3: center_then_border}


def builtin_pattern(pattern_id):
    try:
        return _BUILTINS[int(pattern_id)]()
    except (KeyError, ValueError, TypeError):
        raise PatternError(f"unknown T-pattern id {pattern_id!r}; use 1, 2 or 3") from None


def load_pattern(path):
    text = Path(path).read_text()
    try:
        values = [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise PatternError(f"{path}: non-integer entry ({exc})") from None
    return Pattern(np.array(values, dtype=np.int64))


def save_pattern(pattern, path):
    rows = [" ".join(str(v) for v in pattern.perm[k:k + SIZE])
            for k in range(0, N_PIXELS, SIZE)]
    Path(path).write_text("\n".join(rows) + "\n")


def invert_pattern(pattern):
    inv = np.empty(N_PIXELS, dtype=np.int64)
    inv[pattern.perm] = np.arange(N_PIXELS)
    return Pattern(inv)


def apply_pattern(pattern, image):
    """Reorder one image (784,) or a batch (N, 784)."""
    image = np.asarray(image)
    return image[..., pattern.perm]


def prepare_input(pattern, image):
    """Bias 1 followed by the reordered pixels scaled to [0, 1].

    Accepts one image or a batch; returns (785,) or (N, 785) float64.
    """
    image = np.asarray(image)
    batch = np.atleast_2d(image)
    y = np.empty((batch.shape[0], N_PIXELS + 1))
    y[:, 0] = 1.0
    y[:, 1:] = batch[:, pattern.perm] / 255.0
    return y[0] if image.ndim == 1 else y
