"""Fast Haar analysis/synthesis on [0,1] and the coefficient pyramid.

Coefficients are stored in the integral convention (inner products of the
piecewise-constant sample extension with the basis functions).  The discrete
orthonormal transform differs by a factor of sqrt(n); the ``scaled`` flag on
the pyramid records which convention the stored entries use.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

_SQRT2 = np.sqrt(2.0)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _as_samples(values) -> np.ndarray:
    y = np.asarray(values, dtype=float)
    if y.ndim != 1:
        raise ValueError(f"expected a 1-d sample vector, got shape {y.shape}")
    if len(y) < 2 or not is_power_of_two(len(y)):
        raise ValueError(f"sample count must be a power of two >= 2, got {len(y)}")
    if not np.all(np.isfinite(y)):
        raise ValueError("samples must be finite")
    return y


@dataclass(frozen=True)
class CoefficientPyramid:
    """Approximation coefficients at the coarse level plus detail levels.

    ``approx`` has 2**coarse_level entries; ``details[i]`` holds the
    2**(coarse_level+i) detail coefficients of level coarse_level+i.
    """

    coarse_level: int
    approx: np.ndarray
    details: tuple[np.ndarray, ...]
    scaled: bool = False

    def __post_init__(self):
        if self.coarse_level < 0:
            raise ValueError("coarse level must be >= 0")
        if len(self.approx) != 2 ** self.coarse_level:
            raise ValueError(
                f"approx block has {len(self.approx)} entries, "
                f"expected {2 ** self.coarse_level}"
            )
        for i, d in enumerate(self.details):
            if len(d) != 2 ** (self.coarse_level + i):
                raise ValueError(
                    f"detail level {self.coarse_level + i} has {len(d)} "
                    f"entries, expected {2 ** (self.coarse_level + i)}"
                )

    @property
    def finest_level(self) -> int:
        """J, where the represented signal has n = 2**J samples."""
        return self.coarse_level + len(self.details)

    @property
    def n(self) -> int:
        return 2 ** self.finest_level

    def detail(self, j: int) -> np.ndarray:
        if not self.coarse_level <= j < self.finest_level:
            raise IndexError(f"no detail level {j} in pyramid")
        return self.details[j - self.coarse_level]

    def with_scaling(self, scaled: bool) -> "CoefficientPyramid":
        if scaled == self.scaled:
            return self
        factor = np.sqrt(self.n) if scaled else 1.0 / np.sqrt(self.n)
        return replace(
            self,
            approx=self.approx * factor,
            details=tuple(d * factor for d in self.details),
            scaled=scaled,
        )

    def flat(self) -> np.ndarray:
        """All coefficients, approx first, details coarse to fine."""
        return np.concatenate([self.approx, *self.details]) if self.details \
            else np.array(self.approx)

    def map_details(self, fn) -> "CoefficientPyramid":
        return replace(self, details=tuple(fn(d) for d in self.details))


def haar_dwt(values, coarse_level: int) -> CoefficientPyramid:
    """Haar wavelet coefficients of the piecewise-constant sample extension.

    Runs the O(n) pyramid recursion on the sqrt(n)-scaled coefficients and
    returns the integral-convention pyramid.
    """
    y = _as_samples(values)
    n = len(y)
    levels = int(np.log2(n))
    if not 0 <= coarse_level <= levels:
        raise ValueError(f"coarse_level must be in [0, {levels}], got {coarse_level}")
    s = y.copy()
    details = []
    for _ in range(levels - coarse_level):
        even, odd = s[0::2], s[1::2]
        details.append((even - odd) / _SQRT2)
        s = (even + odd) / _SQRT2
    details.reverse()
    pyr = CoefficientPyramid(coarse_level, s, tuple(details), scaled=True)
    return pyr.with_scaling(False)


def haar_idwt(pyramid: CoefficientPyramid) -> np.ndarray:
    """Exact inverse of :func:`haar_dwt`."""
    p = pyramid.with_scaling(True)
    s = np.asarray(p.approx, dtype=float)
    for d in p.details:
        out = np.empty(2 * len(s))
        out[0::2] = (s + d) / _SQRT2
        out[1::2] = (s - d) / _SQRT2
        s = out
    return s


def haar_coeff_closed_form(values, j: int, k: int, kind: str = "detail") -> float:
    """Single Haar coefficient by direct summation over the sample blocks.

    Independent of the pyramid recursion; used as an oracle against
    :func:`haar_dwt`.
    """
    y = _as_samples(values)
    levels = int(np.log2(len(y)))
    if not 0 <= j <= levels:
        raise IndexError(f"level {j} out of range [0, {levels}]")
    if not 0 <= k < 2 ** j:
        raise IndexError(f"shift {k} out of range at level {j}")
    block = 2 ** (levels - j)
    scale = 2.0 ** (-levels + j / 2.0)
    seg = y[k * block : (k + 1) * block]
    if kind == "approx":
        return scale * float(np.sum(seg))
    if kind == "detail":
        if j == levels:
            raise IndexError(f"no detail coefficients at the finest level {j}")
        half = block // 2
        return scale * float(np.sum(seg[:half]) - np.sum(seg[half:]))
    raise ValueError(f"kind must be 'approx' or 'detail', got {kind!r}")
