#!/usr/bin/env python3
"""Coefficient-decay diagnostics: per-level maxima of |d_{j,k}| against the
smoothness-class ceiling M * 2^(-j(1/2+alpha)) for the Haar system, and the
fitted per-level decay slope of a smooth signal under the interval system.
"""
import argparse
import math
import sys

import numpy as np

from waveshrink.interval import build_interval_system, interval_dwt, min_coarse_level
from waveshrink.signals import make_signal, sample_grid
from waveshrink.transform import haar_dwt


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4096)
    args = ap.parse_args()

    for kind, alpha in (("cusp", 0.5), ("cusp", 1.0),
                        ("weierstrass", 0.5), ("weierstrass", 1.0)):
        f = make_signal(kind, alpha, 1.0).sample(args.n)
        pyr = haar_dwt(f, 0)
        worst = 0.0
        for j in range(pyr.finest_level):
            ceiling = 2.0 ** (-j * (0.5 + alpha))
            worst = max(worst, float(np.max(np.abs(pyr.detail(j)))) / ceiling)
        print(f"haar {kind:12s} alpha={alpha:<4g} "
              f"max |d|/ceiling = {worst:.4f} (< 1 required)")

    n, moments = 1024, 2
    system = build_interval_system(moments, n, min_coarse_level(moments))
    f = np.sin(2 * math.pi * sample_grid(n))
    pyr = interval_dwt(f, system)
    js = np.arange(system.coarse_level, pyr.finest_level)
    maxima = [float(np.max(np.abs(pyr.detail(j)))) for j in js]
    slope = np.polyfit(js, np.log2(maxima), 1)[0]
    print(f"interval N={moments} sin(2 pi t): per-level decay slope "
          f"{slope:.3f} (target -2.5)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
