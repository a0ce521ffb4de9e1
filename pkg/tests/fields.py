"""Shared smooth periodic test fields."""

import numpy as np

from mrtlb.kinetic import Jet


def smooth_jet(disc, pb, seed=0):
    rng = np.random.default_rng(seed)
    x, y = disc.coordinates(pb)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    a, b, c = rng.uniform(-1, 1, 3)
    k = 2 * np.pi
    phi = 1 + a * np.sin(k * xx) * np.cos(k * yy) + b * np.cos(k * xx) + c * np.sin(2 * k * yy)
    px = a * k * np.cos(k * xx) * np.cos(k * yy) - b * k * np.sin(k * xx)
    py = -a * k * np.sin(k * xx) * np.sin(k * yy) + 2 * c * k * np.cos(2 * k * yy)
    pxx = -a * k * k * np.sin(k * xx) * np.cos(k * yy) - b * k * k * np.cos(k * xx)
    pxy = -a * k * k * np.cos(k * xx) * np.sin(k * yy)
    pyy = -a * k * k * np.sin(k * xx) * np.cos(k * yy) - 4 * c * k * k * np.sin(2 * k * yy)
    return Jet(phi, px, py, pxx, pxy, pyy)
