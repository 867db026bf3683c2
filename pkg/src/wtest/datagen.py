"""Synthetic distribution generators and unit-box preprocessing.

Families cover the experiment settings the test suite exercises: boxed
Gaussians with an optional mean shift, products of exponentials with a
rate shift, a symmetric two-component Gaussian mixture, three singular
circle measures, and a degenerate point mass.

Unbounded families are clipped to fixed, generous per-family boxes (the
box is part of the family definition, never data-derived). Circle samples
are shifted by (+0.5, +0.5) after generation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .samples import Sample

GAUSSIAN_BOX = (-6.0, 6.0)
EXPONENTIAL_BOX = (0.0, 12.0)
MIXTURE_BOX = (-9.0, 9.0)

CIRCLE_RADIUS = 0.5
CIRCLE_SHIFT_CENTER = 0.08
CIRCLE_SCALE_FACTOR = 1.8

FAMILIES = (
    "gaussian",
    "exponential",
    "mixture",
    "circle_plain",
    "circle_shift",
    "circle_scale",
    "point_mass",
)


@dataclass(frozen=True)
class DistSpec:
    """A sampling family plus its parameters.

    ``shift`` is the per-coordinate mean shift of the Gaussian family,
    ``rate_shift`` the exponential rate increment (rate = 1 + rate_shift),
    ``location`` the point-mass position.
    """

    family: str
    d: int
    shift: float = 0.0
    rate_shift: float = 0.0
    location: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.d < 1:
            raise InputError(f"dimension must be >= 1, got {self.d}")
        if self.family.startswith("circle") and self.d != 2:
            raise InputError("circle families are 2-dimensional")
        if not np.isfinite(self.shift) or not np.isfinite(self.rate_shift):
            raise InputError("family parameters must be finite")
        if self.rate_shift <= -1.0:
            raise InputError("rate_shift must keep the rate 1 + rate_shift positive")
        if self.family == "point_mass":
            if self.location is None:
                raise InputError("point_mass requires a location")
            loc = tuple(float(v) for v in self.location)
            if len(loc) != self.d or not all(np.isfinite(loc)):
                raise InputError(f"location must be {self.d} finite coordinates")
            object.__setattr__(self, "location", loc)


def natural_box(spec: DistSpec) -> tuple[float, float]:
    """The fixed clipping box of the family (identity box for the rest)."""
    if spec.family == "gaussian":
        return GAUSSIAN_BOX
    if spec.family == "exponential":
        return EXPONENTIAL_BOX
    if spec.family == "mixture":
        return MIXTURE_BOX
    return (0.0, 1.0)


def generate(spec: DistSpec, n: int, seed: int) -> Sample:
    """n i.i.d. draws from the family, deterministic per seed."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if spec.family == "gaussian":
        lo, hi = GAUSSIAN_BOX
        data = np.clip(rng.standard_normal((n, spec.d)) + spec.shift, lo, hi)
    elif spec.family == "exponential":
        lo, hi = EXPONENTIAL_BOX
        data = np.clip(
            rng.exponential(scale=1.0 / (1.0 + spec.rate_shift), size=(n, spec.d)),
            lo,
            hi,
        )
    elif spec.family == "mixture":
        lo, hi = MIXTURE_BOX
        centers = np.where(rng.random((n, spec.d)) < 0.5, -4.0, 4.0)
        data = np.clip(centers + rng.standard_normal((n, spec.d)), lo, hi)
    elif spec.family.startswith("circle"):
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
        radius = CIRCLE_RADIUS
        center = np.zeros(2)
        if spec.family == "circle_shift":
            center = np.array([CIRCLE_SHIFT_CENTER, 0.0])
        elif spec.family == "circle_scale":
            radius = CIRCLE_RADIUS * CIRCLE_SCALE_FACTOR
        data = center + radius * np.column_stack([np.cos(theta), np.sin(theta)])
        data = data + 0.5
    else:  # point_mass
        data = np.tile(np.asarray(spec.location, dtype=np.float64), (n, 1))
    return Sample(data)


def rescale_to_unit_box(x: Sample, lo, hi) -> Sample:
    """Affine map (v - lo) / (hi - lo) per dimension, clipped to [0, 1].

    The bounds are fixed inputs (scalars or per-dimension arrays), never
    derived from the data, so the same map can be applied to several
    samples without coupling them.
    """
    lo = np.broadcast_to(np.asarray(lo, dtype=np.float64), (x.d,))
    hi = np.broadcast_to(np.asarray(hi, dtype=np.float64), (x.d,))
    if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
        raise InputError("box bounds must be finite")
    if not np.all(lo < hi):
        raise InputError("box bounds must satisfy lo < hi in every dimension")
    return Sample(np.clip((x.data - lo) / (hi - lo), 0.0, 1.0))
