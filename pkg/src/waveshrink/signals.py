"""Hölder-class test signals with certified membership constants.

Each generator returns a closed-form evaluator together with the pair
(alpha, M) it is certified for: the analytic argument for membership lives
in the generator, and :func:`check_holder` verifies the discrete certificate
on the sample grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

SIGNAL_KINDS = ("constant", "linear", "cusp", "oddcusp", "sine", "ripple",
                "weierstrass")

_RIPPLE_CYCLES = 64


def sample_grid(n: int) -> np.ndarray:
    """The sample points t_i = i/n, i = 1..n."""
    return np.arange(1, n + 1) / n


@dataclass(frozen=True)
class HolderSignal:
    """A test signal certified to lie in the Hölder class with the stored
    exponent and constant."""

    kind: str
    alpha: float
    holder_const: float
    evaluate: Callable[[np.ndarray], np.ndarray]

    def sample(self, n: int) -> np.ndarray:
        return np.asarray(self.evaluate(sample_grid(n)), dtype=float)


def _weierstrass_evaluator(alpha: float, M: float):
    """Truncated Weierstrass-type sum sum_m a^m cos(2^m pi t) with a = 2^-alpha,
    normalized so the certified constant is exactly M."""
    base = 2.0
    if alpha < 1.0:
        terms = int(math.ceil(48.0 / alpha))
        # |W(x)-W(y)| <= sum a^m min(2, pi b^m |x-y|); splitting the sum at
        # b^m ~ 1/|x-y| bounds it by C_alpha |x-y|^alpha
        c = math.pi * base ** (1 - alpha) / (base ** (1 - alpha) - 1.0) \
            + 2.0 / (1.0 - base ** -alpha)
    else:
        # the infinite sum is not Lipschitz; the truncated one is, with
        # constant pi per term
        terms = 30
        c = math.pi * terms
    amps = (base ** -alpha) ** np.arange(terms)
    freqs = base ** np.arange(terms) * math.pi
    scale = M / c

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return scale * np.sum(amps[:, None] * np.cos(freqs[:, None] * t), axis=0)

    return evaluate


def make_signal(kind: str, alpha: float, M: float) -> HolderSignal:
    """Build a certified Hölder-class signal of the given kind."""
    if alpha <= 0 or M <= 0:
        raise ValueError("need alpha > 0 and M > 0")
    if kind == "constant":
        evaluate = lambda t: np.full_like(np.asarray(t, dtype=float), M)
    elif kind == "linear":
        if alpha > 2:
            raise ValueError("linear signal is certified only for alpha <= 2")
        evaluate = lambda t: M * np.asarray(t, dtype=float)
    elif kind == "cusp":
        if alpha > 1:
            raise ValueError("cusp signal is certified only for alpha <= 1")
        evaluate = lambda t: M * np.abs(np.asarray(t, dtype=float) - 0.5) ** alpha
    elif kind == "oddcusp":
        if alpha > 1:
            raise ValueError("oddcusp signal is certified only for alpha <= 1")
        # antisymmetric cusp M * 2^(alpha-1) * sign(t-1/2) |t-1/2|^alpha.
        # Same-side pairs: |f(u)-f(v)| <= M 2^(alpha-1) |u-v|^alpha <= M|u-v|^alpha.
        # Opposite-side pairs with a = |u-1/2|, b = |v-1/2|, a + b = |u-v|:
        # |f(u)-f(v)| = M 2^(alpha-1) (a^alpha + b^alpha)
        #            <= M 2^(alpha-1) 2^(1-alpha) (a+b)^alpha = M|u-v|^alpha,
        # using the concavity bound a^alpha + b^alpha <= 2^(1-alpha)(a+b)^alpha.
        amp = M * 2.0 ** (alpha - 1.0)

        def evaluate(t, amp=amp, alpha=alpha):
            u = np.asarray(t, dtype=float) - 0.5
            return amp * np.sign(u) * np.abs(u) ** alpha
    elif kind == "ripple":
        if alpha > 2:
            raise ValueError("ripple signal is certified only for alpha <= 2")
        # high-frequency low-amplitude sinusoid A sin(2 pi q t).  With
        # A = M/(2 pi q) the Lipschitz constant is M, so for alpha <= 1 the
        # increments obey M|dt| <= M|dt|^alpha on [0,1]; one more derivative
        # gives the alpha > 1 certificate with A = M/(2 pi q)^2.
        q = _RIPPLE_CYCLES
        amp = M / (2 * math.pi * q) if alpha <= 1 else M / (2 * math.pi * q) ** 2
        evaluate = lambda t: amp * np.sin(2 * math.pi * q * np.asarray(t, dtype=float))
    elif kind == "sine":
        if alpha > 2:
            raise ValueError("sine signal is certified only for alpha <= 2")
        # |sin'| <= 1 gives increments 2*pi*A*|dt|; one more derivative for
        # the alpha > 1 certificate
        amp = M / (2 * math.pi) if alpha <= 1 else M / (2 * math.pi) ** 2
        evaluate = lambda t: amp * np.sin(2 * math.pi * np.asarray(t, dtype=float))
    elif kind == "weierstrass":
        if alpha > 1:
            raise ValueError("weierstrass signal is certified only for alpha <= 1")
        evaluate = _weierstrass_evaluator(alpha, M)
    else:
        raise ValueError(f"unknown signal kind {kind!r}; choose from {SIGNAL_KINDS}")
    return HolderSignal(kind=kind, alpha=alpha, holder_const=M, evaluate=evaluate)


class HolderCheck(NamedTuple):
    ok: bool
    worst_ratio: float
    pair: tuple[int, int]


def check_holder(samples, alpha: float, M: float) -> HolderCheck:
    """Discrete Hölder certificate on the sample grid t_i = i/n.

    For alpha <= 1 every grid pair is checked directly (O(n^2), fine at desk
    scale).  For alpha > 1 the first difference quotients are required to stay
    below M and their sequence must satisfy the (alpha - 1) pairwise check.
    """
    y = np.asarray(samples, dtype=float)
    n = len(y)
    if n < 2:
        raise ValueError("need at least two samples")
    if alpha <= 0 or M <= 0:
        raise ValueError("need alpha > 0 and M > 0")

    if alpha > 1:
        quot = (y[1:] - y[:-1]) * n
        i = int(np.argmax(np.abs(quot)))
        if abs(quot[i]) > M:
            return HolderCheck(False, float(abs(quot[i]) / M), (i, i + 1))
        inner = check_holder(quot, alpha - 1.0, M)
        return HolderCheck(inner.ok, inner.worst_ratio, inner.pair)

    worst, pair = 0.0, (0, 1)
    for d in range(1, n):
        num = np.abs(y[d:] - y[:-d])
        ratio = num / (M * (d / n) ** alpha)
        i = int(np.argmax(ratio))
        if ratio[i] > worst:
            worst, pair = float(ratio[i]), (i, i + d)
    # tiny slack: generators that attain the bound exactly must not fail on
    # the last ulp of the division
    return HolderCheck(worst <= 1.0 + 1e-9, worst, pair)
