"""Two-bump synthetic planar curves.

Class ``A``: a gaussian bump on the first half of [0, 2*pi] followed by a
half-sinusoid raised to a power on the second half. Class ``B`` swaps the
two bumps. Within-class variation comes from the gaussian width and the
sinusoid exponent, both drawn uniformly.
"""
from dataclasses import dataclass

import numpy as np

from .curve import Curve, knots
from .errors import DataError

HALF = np.pi


@dataclass(frozen=True)
class SynthConfig:
    n_per_class: int = 100
    m: int = 100
    width_range: tuple = (0.15, 0.45)  # gaussian sigma as a fraction of the half-interval
    power_range: tuple = (1.0, 4.0)
    seed: int = 0

    def __post_init__(self):
        if self.n_per_class < 1:
            raise DataError("n_per_class must be >= 1")
        for name in ("width_range", "power_range"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise DataError(f"{name} is empty: {lo} > {hi}")
        if self.width_range[0] <= 0 or self.power_range[0] <= 0:
            raise DataError("widths and powers must be positive")


def gaussian_bump(t, start, sigma):
    center = start + HALF / 2.0
    return np.exp(-((t - center) ** 2) / (2.0 * sigma**2))


def sine_bump(t, start, power):
    inside = (t >= start) & (t <= start + HALF)
    s = np.sin(np.pi * (t - start) / HALF)
    return np.where(inside, np.clip(s, 0.0, None) ** power, 0.0)


def two_bump_profile(t, label, sigma, power):
    if label == "A":
        return gaussian_bump(t, 0.0, sigma) + sine_bump(t, HALF, power)
    return sine_bump(t, 0.0, power) + gaussian_bump(t, HALF, sigma)


def generate_synthetic(cfg=SynthConfig()):
    """Labelled curves, class A first then class B; deterministic in ``cfg.seed``.

    Returns a list of ``(id, label, Curve)`` triples.
    """
    rng = np.random.default_rng(cfg.seed)
    t = knots(cfg.m)
    out = []
    for label in ("A", "B"):
        sigmas = rng.uniform(*cfg.width_range, size=cfg.n_per_class) * HALF
        powers = rng.uniform(*cfg.power_range, size=cfg.n_per_class)
        for i, (sigma, power) in enumerate(zip(sigmas, powers)):
            y = two_bump_profile(t, label, sigma, power)
            out.append((f"{label}{i:04d}", label, Curve(np.column_stack([t, y]))))
    return out
