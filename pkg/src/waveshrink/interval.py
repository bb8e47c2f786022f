"""Boundary-adapted orthonormal wavelet transform on [0,1].

The transform is materialized as an explicit orthogonal matrix, built one
level at a time.  Interior rows carry the Daubechies filter; boundary rows
are derived numerically so that

* every level map is exactly orthogonal,
* the scaling spaces contain the sampled polynomials of degree < N (hence
  all detail rows annihilate them), and
* all rows stay locally supported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .transform import CoefficientPyramid, is_power_of_two

_ORTHO_TOL = 1e-9
_NULL_TOL = 1e-9


class GeometryError(ValueError):
    """Raised when (N, J0, n) cannot support the boundary construction."""


def daubechies_filter(moments: int) -> np.ndarray:
    """Orthonormal Daubechies lowpass filter with the given vanishing moments.

    Computed by spectral factorization of the binomial half-band polynomial;
    supported for 1 <= moments <= 5 (larger values work but lose accuracy).
    """
    if not 1 <= moments <= 5:
        raise ValueError(f"unsupported number of vanishing moments: {moments}")
    if moments == 1:
        return np.array([1.0, 1.0]) / math.sqrt(2.0)
    # P(y) = sum_k C(N-1+k, k) y^k has no roots in [0, 1]
    p = np.array([math.comb(moments - 1 + k, k) for k in range(moments)], dtype=float)
    y_roots = np.roots(p[::-1])
    poly = np.array([1.0 + 0j])
    for y in y_roots:
        # y = (2 - z - 1/z)/4  =>  z^2 - (2 - 4y) z + 1 = 0; keep |z| < 1
        c = 2.0 - 4.0 * y
        disc = np.sqrt(c * c / 4.0 - 1.0 + 0j)
        z = c / 2.0 + disc
        if abs(z) > 1.0:
            z = c / 2.0 - disc
        poly = np.convolve(poly, [1.0, -z])
    for _ in range(moments):
        poly = np.convolve(poly, [0.5, 0.5])
    h = np.real(poly)
    h *= math.sqrt(2.0) / h.sum()
    # minimum-phase orientation: energy concentrated at the front
    if np.sum(h[:moments] ** 2) < np.sum(h[moments:] ** 2):
        h = h[::-1]
    return h


def highpass_from_lowpass(h: np.ndarray) -> np.ndarray:
    """Quadrature-mirror highpass g_k = (-1)^k h_{2N-1-k}."""
    signs = (-1.0) ** np.arange(len(h))
    return signs * h[::-1]


class CascadeTable(NamedTuple):
    """Scaling function and wavelet tabulated on a dyadic grid over [0, 2N-1]."""

    moments: int
    resolution: int
    grid: np.ndarray
    phi: np.ndarray
    psi: np.ndarray

    @property
    def step(self) -> float:
        return 2.0 ** -self.resolution


def cascade_evaluate(moments: int, resolution: int) -> CascadeTable:
    """Tabulate the Daubechies-N scaling function and wavelet.

    Integer-grid values come from the eigenvector of the refinement operator;
    dyadic values are then filled in exactly by the two-scale relation, so the
    refinement-equation residual is pure roundoff.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    h = daubechies_filter(moments)
    width = 2 * moments - 1
    grid = np.arange(width * 2 ** resolution + 1) * 2.0 ** -resolution
    if moments == 1:
        phi = np.ones_like(grid)
        phi[0] = 0.0
        psi = np.where(grid <= 0.5, 1.0, -1.0)
        psi[0] = 0.0
        return CascadeTable(1, resolution, grid, phi, psi)

    # values at the interior integers: eigenvector of A[m,l] = sqrt(2) h[2m-l]
    m_idx = np.arange(1, width)
    A = np.zeros((width - 1, width - 1))
    for r, m in enumerate(m_idx):
        for c, l in enumerate(m_idx):
            s = 2 * m - l
            if 0 <= s < len(h):
                A[r, c] = math.sqrt(2.0) * h[s]
    eigvals, eigvecs = np.linalg.eig(A)
    pick = np.argmin(np.abs(eigvals - 1.0))
    v = np.real(eigvecs[:, pick])
    v /= v.sum()
    phi = np.zeros(width + 1)
    phi[1:width] = v

    for depth in range(1, resolution + 1):
        prev = phi
        cur = np.zeros(width * 2 ** depth + 1)
        cur[::2] = prev
        # odd points x: phi(x) = sqrt(2) sum_s h_s phi(2x - s)
        odd = np.arange(1, len(cur), 2)  # index at step 2^-depth
        acc = np.zeros(len(odd))
        for s, hs in enumerate(h):
            src = odd - s * 2 ** (depth - 1)  # index of 2x - s at step 2^-(depth-1)
            ok = (src >= 0) & (src < len(prev))
            acc[ok] += hs * prev[src[ok]]
        cur[odd] = math.sqrt(2.0) * acc
        phi = cur

    g = highpass_from_lowpass(h)
    psi = np.zeros_like(phi)
    idx = np.arange(len(phi))
    for s, gs in enumerate(g):
        src = 2 * idx - s * 2 ** resolution
        ok = (src >= 0) & (src < len(phi))
        psi[ok] += gs * phi[src[ok]]
    psi *= math.sqrt(2.0)
    return CascadeTable(moments, resolution, grid, phi, psi)


class _LevelBlock(NamedTuple):
    scaling: np.ndarray   # (L/2, L)
    detail: np.ndarray    # (L/2, L)
    margin_right: int     # non-polynomial coarse entries at the right end


def _fix_signs(rows: np.ndarray) -> np.ndarray:
    out = rows.copy()
    for i, r in enumerate(out):
        j = np.argmax(np.abs(r))
        if r[j] < 0:
            out[i] = -r
    return out


def _boundary_details(stacked: np.ndarray, L: int, needed: int, left: bool,
                      start_width: int) -> np.ndarray:
    """Locally supported orthonormal complement rows at one boundary."""
    if needed == 0:
        return np.zeros((0, L))
    width = start_width
    while width <= L:
        null = _window_null(stacked, L, width, left)
        if len(null) == needed:
            return _by_center(null)
        if len(null) > needed:
            raise GeometryError(
                f"boundary complement too large ({len(null)} > {needed})"
            )
        width += 1
    raise GeometryError("boundary complement window grew past the block")


def _window_null(stacked: np.ndarray, L: int, width: int, left: bool) -> np.ndarray:
    """Orthonormal vectors supported on a boundary window of ``width`` columns
    that are orthogonal to every row of ``stacked``, embedded into length L."""
    cols = np.arange(width) if left else np.arange(L - width, L)
    touching = np.any(stacked[:, cols] != 0.0, axis=1)
    sub = stacked[np.ix_(touching, cols)]
    _, svals, vt = np.linalg.svd(sub)
    rank = int(np.sum(svals > _NULL_TOL))
    null = vt[rank:]
    rows = np.zeros((len(null), L))
    rows[:, cols] = null
    return _fix_signs(rows)


def _mgs(rows: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt; keeps the row order."""
    out = rows.copy()
    for i in range(len(out)):
        for p in range(i):
            out[i] -= (out[i] @ out[p]) * out[p]
        out[i] /= np.linalg.norm(out[i])
    return out


def _by_center(rows: np.ndarray) -> np.ndarray:
    """Sort rows by the center of mass of their energy."""
    idx = np.arange(rows.shape[1])
    centers = [np.average(idx, weights=r ** 2) for r in rows]
    return rows[np.argsort(centers)]


def _left_complement(stacked: np.ndarray, L: int, at_most: int,
                     start_width: int) -> np.ndarray:
    """All complement vectors that live at the left edge.

    The dimension is not known a priori (it depends on the filter phase), so
    the window grows until the null space stops gaining directions.  A wrong
    count cannot pass silently: the right-edge search and the final
    orthogonality check both validate it.
    """
    width = start_width
    best = np.zeros((0, L))
    stall = 0
    while width <= L and stall <= 4 and len(best) < at_most:
        null = _window_null(stacked, L, width, True)
        if len(null) > len(best):
            best, stall = null, 0
        else:
            stall += 1
        width += 1
    return _by_center(best)


def _level_block(h: np.ndarray, L: int, poly_vecs: list[np.ndarray],
                 margin_left: int, margin_right: int) -> _LevelBlock:
    """One analysis step: L fine coefficients -> L/2 scaling + L/2 detail.

    ``margin_left``/``margin_right`` count the entries at each end of the
    ``poly_vecs`` that are no longer polynomial samples (boundary coordinates
    produced by earlier levels).  Interior filter rows must not touch them,
    otherwise the exact-cancellation arguments below break down.
    """
    N = len(h) // 2
    half = L // 2
    g = highpass_from_lowpass(h)

    if N == 1:
        # no boundary functions needed: plain Haar level map
        scaling = np.zeros((half, L))
        detail = np.zeros((half, L))
        k = np.arange(half)
        scaling[k, 2 * k] = scaling[k, 2 * k + 1] = h[0]
        detail[k, 2 * k], detail[k, 2 * k + 1] = g[0], g[1]
        return _LevelBlock(scaling, detail, 0)

    # row budget: N left boundary scaling rows, R right boundary scaling rows,
    # ceil(margin_left/2) left and R right boundary detail rows; everything
    # else carries the interior filters
    n_right = max(N, N + math.ceil(margin_right / 2) - 1)
    k_lo, k_hi = N, half - 1 - n_right
    kd_lo = math.ceil(margin_left / 2)
    win_l, win_r = 4 * N - 2, 2 * n_right
    if k_hi < k_lo or k_hi < kd_lo or win_l + win_r > L:
        raise GeometryError(f"block of {half} coefficients too small for N={N}")

    scaling = np.zeros((half, L))
    k_int = np.arange(k_lo, k_hi + 1)
    for s in range(2 * N):
        scaling[k_int, 2 * k_int + s] = h[s]

    # boundary scaling rows: orthonormalized residuals of the polynomial-like
    # vectors after interior reconstruction (keeps sampled polynomials inside
    # the scaling span, which is what gives the detail rows vanishing moments)
    res_left = np.zeros((len(poly_vecs), win_l))
    res_right = np.zeros((len(poly_vecs), win_r))
    for i, v in enumerate(poly_vecs):
        coeffs = np.array([h @ v[2 * k : 2 * k + 2 * N] for k in k_int])
        recon = np.zeros(L)
        for s in range(2 * N):
            recon[2 * k_int + s] += coeffs * h[s]
        resid = v - recon
        mid = np.max(np.abs(resid[win_l : L - win_r]))
        if mid > 1e-8 * max(1.0, np.max(np.abs(v))):
            raise GeometryError("polynomial residual leaked outside the boundary")
        res_left[i] = resid[:win_l]
        res_right[i] = resid[L - win_r :]

    detail = np.zeros((half, L))
    kd = np.arange(kd_lo, k_hi + 1)
    for s in range(2 * N):
        detail[kd, 2 * kd + s] = g[s]

    right_res = np.zeros((N, L))
    interior = np.vstack([scaling[k_lo : k_hi + 1], detail[kd]])
    for resid, is_left in ((res_left, True), (res_right, False)):
        _, svals, vt = np.linalg.svd(resid, full_matrices=False)
        if svals[-1] < 1e-13 * svals[0]:
            raise GeometryError("degenerate boundary residuals")
        rows = np.zeros((N, L))
        if is_left:
            rows[:, :win_l] = vt
        else:
            rows[:, L - win_r :] = vt
        # tiny residual singular values leave cancellation noise in the row
        # directions; project it out against the (exact) interior rows
        for _ in range(2):
            rows = rows - (rows @ interior.T) @ interior
            rows = _mgs(rows)
        rows = _fix_signs(rows)
        if is_left:
            scaling[:N] = rows
        else:
            right_res[:] = rows

    # the remaining rows are the locally supported orthonormal complement of
    # everything above; how many live at each edge depends on the filter
    # phase, so take the left edge as it comes and require the rest on the
    # right, then distribute by position
    missing = kd_lo + 2 * n_right - N
    stacked = np.vstack([scaling[: k_hi + 1], right_res, detail[kd]])
    left_part = _left_complement(stacked, L, missing, 2 * N)
    stacked = np.vstack([stacked, left_part])
    right_part = _boundary_details(stacked, L, missing - len(left_part), False, win_r)

    comp = np.vstack([left_part, right_part])
    # same refinement for the null vectors, which come from rank decisions on
    # marginal singular values
    base = np.vstack([scaling[: k_hi + 1], right_res, detail[kd]])
    for _ in range(2):
        comp = comp - (comp @ base.T) @ base
        comp = _mgs(comp)

    n_extra = n_right - N  # complement rows that go to the scaling side
    if n_extra:
        scaling[half - n_right : half - N] = comp[-n_extra:]
        comp = comp[:-n_extra]
    scaling[half - N :] = right_res
    free = np.concatenate([np.arange(kd_lo), np.arange(k_hi + 1, half)])
    detail[free] = comp

    T = np.vstack([scaling, detail])
    err = np.max(np.abs(T @ T.T - np.eye(L)))
    if err > _ORTHO_TOL:
        raise GeometryError(f"level map failed orthogonality check ({err:.2e})")
    return _LevelBlock(scaling, detail, n_right)


@dataclass
class IntervalSystem:
    """Explicit orthogonal transform for the interval wavelet basis.

    ``matrix`` maps samples to sqrt(n)-scaled coefficients, ordered approx
    block first, then detail levels coarse to fine.  ``scaling_rows[j]`` holds
    the composed scaling analysis rows of level j (2**j x n), used for the
    per-level coefficient weights.
    """

    moments: int
    coarse_level: int
    n: int
    matrix: np.ndarray
    scaling_rows: dict[int, np.ndarray] = field(repr=False)
    detail_rows: dict[int, np.ndarray] = field(repr=False)
    c_phi_estimate: float = 1.0

    @property
    def finest_level(self) -> int:
        return int(math.log2(self.n))


def min_coarse_level(moments: int) -> int:
    if moments == 1:
        return 0  # Haar needs no boundary adaptation
    return 1 + math.ceil(math.log2(2 * moments - 1))


def build_interval_system(moments: int, n: int, coarse_level: int) -> IntervalSystem:
    """Assemble the n x n orthogonal interval wavelet matrix."""
    if not is_power_of_two(n) or n < 2:
        raise GeometryError(f"n must be a power of two >= 2, got {n}")
    J = int(math.log2(n))
    if not min_coarse_level(moments) <= coarse_level <= J:
        raise GeometryError(
            f"coarse level {coarse_level} out of range "
            f"[{min_coarse_level(moments)}, {J}] for N={moments}"
        )
    h = daubechies_filter(moments)
    grid = np.arange(1, n + 1) / n
    # Legendre basis: spans the same polynomials as monomials but is much
    # better conditioned at higher degrees
    poly = [np.polynomial.Legendre.basis(i, domain=[0.0, 1.0])(grid)
            for i in range(moments)]

    cum = np.eye(n)
    scaling_rows = {J: cum}
    detail_rows: dict[int, np.ndarray] = {}
    margin_left = margin_right = 0
    for m in range(J - 1, coarse_level - 1, -1):
        block = _level_block(h, 2 ** (m + 1), poly, margin_left, margin_right)
        detail_rows[m] = block.detail @ cum
        cum = block.scaling @ cum
        scaling_rows[m] = cum
        # propagate the polynomial span; re-orthonormalizing keeps the
        # residual extraction well conditioned at higher N
        coarse_poly = np.column_stack([block.scaling @ v for v in poly])
        poly = list(np.linalg.qr(coarse_poly)[0].T)
        margin_left = 0 if moments == 1 else moments
        margin_right = block.margin_right

    W = np.vstack([scaling_rows[coarse_level]]
                  + [detail_rows[j] for j in range(coarse_level, J)])
    c_phi = 1.0
    for j in range(coarse_level, J):
        f = 2.0 ** ((J - j) / 2.0)
        c_phi = max(c_phi, f * np.max(np.abs(scaling_rows[j])),
                    f * np.max(np.abs(detail_rows[j])))
    return IntervalSystem(
        moments=moments, coarse_level=coarse_level, n=n, matrix=W,
        scaling_rows=scaling_rows, detail_rows=detail_rows,
        c_phi_estimate=float(c_phi),
    )


class LevelWeights(NamedTuple):
    alphas: np.ndarray
    betas: np.ndarray
    offset: int  # sample index where the joint support starts


def extract_weights(system: IntervalSystem, j: int, k: int) -> LevelWeights:
    """Per-sample coefficient weights of the (j, k) scaling and detail rows.

    Normalized so that the integral-convention coefficient equals
    2^(-J + j/2) * sum_i weight_i * sample_{offset + i}.
    """
    if not system.coarse_level <= j < system.finest_level:
        raise IndexError(f"level {j} out of range")
    if not 0 <= k < 2 ** j:
        raise IndexError(f"shift {k} out of range at level {j}")
    J = system.finest_level
    factor = 2.0 ** ((J - j) / 2.0)
    a_row = system.scaling_rows[j][k] * factor
    b_row = system.detail_rows[j][k] * factor
    support = np.nonzero((np.abs(a_row) > 1e-14) | (np.abs(b_row) > 1e-14))[0]
    if len(support) == 0:
        return LevelWeights(np.zeros(0), np.zeros(0), 0)
    lo, hi = support[0], support[-1] + 1
    observed = max(np.max(np.abs(a_row)), np.max(np.abs(b_row)), 1.0)
    system.c_phi_estimate = max(system.c_phi_estimate, float(observed))
    return LevelWeights(a_row[lo:hi], b_row[lo:hi], int(lo))


def interval_dwt(samples, system: IntervalSystem) -> CoefficientPyramid:
    y = np.asarray(samples, dtype=float)
    if len(y) != system.n:
        raise ValueError(f"expected {system.n} samples, got {len(y)}")
    coeffs = system.matrix @ y
    J0, J = system.coarse_level, system.finest_level
    approx = coeffs[: 2 ** J0]
    details, pos = [], 2 ** J0
    for j in range(J0, J):
        details.append(coeffs[pos : pos + 2 ** j])
        pos += 2 ** j
    pyr = CoefficientPyramid(J0, approx, tuple(details), scaled=True)
    return pyr.with_scaling(False)


def interval_idwt(pyramid: CoefficientPyramid, system: IntervalSystem) -> np.ndarray:
    if pyramid.n != system.n or pyramid.coarse_level != system.coarse_level:
        raise ValueError("pyramid geometry does not match the system")
    return system.matrix.T @ pyramid.with_scaling(True).flat()


def save_system(path, system: IntervalSystem) -> None:
    """Binary cache: three little-endian int64 (N, J0, n), then the matrix
    as little-endian float64, row-major."""
    header = np.array([system.moments, system.coarse_level, system.n],
                      dtype="<i8")
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(system.matrix, dtype="<f8").tobytes())


def load_matrix(path) -> tuple[int, int, int, np.ndarray]:
    """Read a cached matrix; returns (N, J0, n, W)."""
    raw = Path(path).read_bytes()
    moments, coarse, n = (int(v) for v in np.frombuffer(raw[:24], dtype="<i8"))
    W = np.frombuffer(raw[24:], dtype="<f8").reshape(n, n).copy()
    return moments, coarse, n, W
