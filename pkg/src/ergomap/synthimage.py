"""Deterministic synthetic grayscale test image (a coin-like disk).

Stands in for a photographed coin in the image-density pipeline: a bright
disk with a rim, an embossed wave motif and a soft radial falloff, rendered
procedurally so tests and demos need no binary assets.
"""

from __future__ import annotations

import numpy as np


def synthetic_coin(size: int = 64, maxval: int = 255) -> np.ndarray:
    """Render the disk at the given resolution; returns integer samples (row 0 = top)."""
    yy, xx = np.mgrid[0:size, 0:size]
    cx = cy = (size - 1) / 2.0
    r = np.hypot(xx - cx, yy - cy) / (size / 2.0)
    theta = np.arctan2(yy - cy, xx - cx)

    disk = np.clip(1.0 - r, 0.0, 1.0) ** 0.35
    rim = np.exp(-((r - 0.88) ** 2) / 0.003)
    motif = 0.25 * (1.0 + np.sin(5.0 * theta) * np.cos(9.0 * r * np.pi))
    relief = 0.2 * np.exp(-((r - 0.45) ** 2) / 0.02)

    img = np.where(r <= 0.95, 0.25 + 0.5 * disk + 0.35 * rim + motif * (r < 0.8) + relief, 0.0)
    img = np.clip(img / img.max(), 0.0, 1.0)
    # dark but nonzero background, as in a photograph: zero pixels would be
    # floor-clamped and make the inverse transform ill-conditioned there
    floor = 0.05
    img = floor + (1.0 - floor) * img
    return np.rint(img * maxval).astype(np.int64)
