"""Thresholding rules, threshold/level selection, and the shrinkage pipeline."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .transform import (
    CoefficientPyramid,
    haar_dwt,
    haar_idwt,
    is_power_of_two,
)


def soft_threshold(x, lam: float):
    """Shrink toward zero by lam; values within [-lam, lam] become 0."""
    if lam < 0:
        raise ValueError("threshold must be >= 0")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - lam, 0.0)


def hard_threshold(x, lam: float):
    """Zero values with magnitude <= lam, keep the rest unchanged."""
    if lam < 0:
        raise ValueError("threshold must be >= 0")
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= lam, 0.0, x)


_THRESHOLD_FNS = {"soft": soft_threshold, "hard": hard_threshold}


def apply_threshold(pyramid: CoefficientPyramid, lam: float, mode: str = "soft"):
    """Threshold the detail coefficients; the approximation block passes through."""
    if mode not in _THRESHOLD_FNS:
        raise ValueError(f"mode must be 'soft' or 'hard', got {mode!r}")
    if lam < 0:
        raise ValueError("threshold must be >= 0")
    fn = _THRESHOLD_FNS[mode]
    return pyramid.map_details(lambda d: fn(d, lam))


def compute_threshold(n: int, delta: float, b: float, c_phi: float = 1.0) -> float:
    """Shrinkage threshold c_phi * b * (1 + 2*sqrt((1+delta)*ln 2)) * sqrt(log2(n)/n)."""
    if not is_power_of_two(n) or n < 2:
        raise ValueError(f"n must be a power of two >= 2, got {n}")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if b <= 0:
        raise ValueError("noise range b must be > 0")
    if c_phi < 1:
        raise ValueError("wavelet-system constant must be >= 1")
    return c_phi * b * (1.0 + 2.0 * math.sqrt((1.0 + delta) * math.log(2.0))) \
        * math.sqrt(math.log2(n) / n)


class MinSamples(NamedTuple):
    raw: float
    padded: int  # raw rounded up to the next power of two


def min_samples(alpha: float) -> MinSamples:
    """Smallest sample count for which the deviation bounds apply."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if alpha <= 1:
        return MinSamples(512.0, 512)
    raw = (4 * alpha + 2) ** (2 * alpha + 2) * math.log2(4 * alpha + 2) ** 2
    return MinSamples(raw, 2 ** math.ceil(math.log2(raw)))


class Levels(NamedTuple):
    finest: int    # J = log2(n)
    coarse: int    # J0
    boundary: int  # J1


def compute_levels(n: int, alpha: float) -> Levels:
    """Coarse and boundary decomposition levels for a given sample count."""
    if not is_power_of_two(n) or n < 2:
        raise ValueError(f"n must be a power of two >= 2, got {n}")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    J = int(math.log2(n))
    J1 = math.ceil((J - math.log2(J)) / (1.0 + 2.0 * alpha))
    if alpha <= 1:
        J0 = 0
    else:
        J0 = 1 + math.ceil(math.log2(2 * math.ceil(alpha) - 1))
    if J0 > J1:
        raise ValueError(
            f"n={n} is too small for alpha={alpha}: coarse level {J0} exceeds "
            f"boundary level {J1} (need n >= {min_samples(alpha).padded})"
        )
    return Levels(J, J0, J1)


@dataclass(frozen=True)
class ShrinkageConfig:
    """Everything the shrinkage pipeline needs for one sample count."""

    n: int
    alpha: float
    holder_const: float       # smoothness-class constant M
    noise_bound: float        # total noise range b, |e_i| <= b/2
    delta: float
    system_const: float       # c_phi of the wavelet system
    system: str               # "haar" or "interval"
    moments: Optional[int]    # vanishing moments for the interval system
    coarse_level: int
    boundary_level: int
    threshold: float
    mode: str = "soft"

    def __post_init__(self):
        if self.system not in ("haar", "interval"):
            raise ValueError(f"unknown wavelet system {self.system!r}")
        if self.mode not in _THRESHOLD_FNS:
            raise ValueError(f"unknown thresholding mode {self.mode!r}")
        J = int(math.log2(self.n))
        if not self.coarse_level <= self.boundary_level <= J:
            raise ValueError("levels must satisfy J0 <= J1 <= J")
        if self.system == "interval":
            if self.moments is None or self.moments < 1:
                raise ValueError("interval system needs vanishing moments >= 1")
            if self.moments < self.alpha:
                raise ValueError("need moments >= alpha for the interval system")
            if self.coarse_level < 1 + math.ceil(math.log2(2 * self.moments - 1)):
                raise ValueError("coarse level too small for the interval system")
        want = compute_threshold(self.n, self.delta, self.noise_bound, self.system_const)
        if not math.isclose(self.threshold, want, rel_tol=1e-12):
            raise ValueError(
                f"threshold {self.threshold} does not match the formula value {want}"
            )

    @classmethod
    def build(cls, n: int, alpha: float, holder_const: float, noise_bound: float,
              delta: float, mode: str = "soft", system: str = "haar",
              moments: Optional[int] = None,
              system_const: Optional[float] = None) -> "ShrinkageConfig":
        """Derive levels and threshold from the primitive parameters."""
        levels = compute_levels(n, alpha)
        if system == "haar":
            if system_const is None:
                system_const = 1.0  # Haar basis functions are bounded by 1
            if moments is None:
                moments = 1
        coarse = levels.coarse
        if system == "interval":
            if moments is None:
                moments = max(1, math.ceil(alpha))
            if system_const is None:
                raise ValueError(
                    "interval runs need system_const (use the estimate from "
                    "build_interval_system)"
                )
            if moments > 1:
                # the boundary construction needs room at the coarse level;
                # pushing J0 above J1 leaves the estimator well defined but
                # outside the deviation-bound range
                coarse = max(coarse, 1 + math.ceil(math.log2(2 * moments - 1)))
            if coarse >= int(math.log2(n)):
                raise ValueError(
                    f"n={n} too small for an interval system with {moments} "
                    f"vanishing moments"
                )
        lam = compute_threshold(n, delta, noise_bound, system_const)
        return cls(
            n=n, alpha=alpha, holder_const=holder_const, noise_bound=noise_bound,
            delta=delta, system_const=system_const, system=system, moments=moments,
            coarse_level=coarse, boundary_level=max(levels.boundary, coarse),
            threshold=lam, mode=mode,
        )


def shrink(y, config: ShrinkageConfig, interval_system=None) -> np.ndarray:
    """Denoise one sample vector: analyze, threshold details, synthesize."""
    y = np.asarray(y, dtype=float)
    if len(y) != config.n:
        raise ValueError(f"signal length {len(y)} does not match config n={config.n}")
    if config.system == "haar":
        pyr = haar_dwt(y, config.coarse_level)
        pyr = apply_threshold(pyr, config.threshold, config.mode)
        return haar_idwt(pyr)
    from .interval import build_interval_system, interval_dwt, interval_idwt
    if interval_system is None:
        interval_system = build_interval_system(
            config.moments, config.n, config.coarse_level
        )
    pyr = interval_dwt(y, interval_system)
    pyr = apply_threshold(pyr, config.threshold, config.mode)
    return interval_idwt(pyr, interval_system)
