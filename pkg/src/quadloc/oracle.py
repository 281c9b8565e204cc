"""Independent ground truth for the BEM solver.

Everything here avoids the BEM machinery: disk eigenpairs come from Bessel
functions evaluated in-repo, and an ordinary five-point finite-difference
Laplacian gives a coarse but unrelated estimate for deformed shapes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .bem import GridSpec, IntensityField
from .errors import ConfigurationError, DomainError, NumericalError
from .geometry import ShapeParams, contains

SERIES_LIMIT = 6.0
MIN_FD_POINTS = 500


@dataclass(frozen=True)
class BesselZero:
    m: int
    s: int
    value: float


def _bessel_series(m, x):
    # sum_k (-1)^k (x/2)^(2k+m) / (k! (k+m)!)
    half = 0.5 * x
    term = half ** m / math.factorial(m)
    total = term.copy()
    q = -half * half
    for k in range(1, 60):
        term = term * q / (k * (k + m))
        total += term
        if np.all(np.abs(term) < 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _bessel_miller(m, x):
    """Backward recurrence from a high order, normalized with
    ``J0 + 2 sum_k J_2k = 1``."""
    top = int(np.max(x)) + 20 + int(10 * np.max(x) ** (1 / 3)) + m
    top += top % 2
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    result = np.zeros_like(x)
    for n in range(top, 0, -1):
        j_prev = 2.0 * n / x * j_cur - j_next        # J_{n-1}
        j_next, j_cur = j_cur, j_prev
        if n - 1 == m:
            result = j_cur.copy()
        if (n - 1) % 2 == 0 and n - 1 > 0:
            norm += 2.0 * j_cur
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            for arr in (j_cur, j_next, norm, result):
                arr[big] *= 1e-250
    norm += j_cur                                    # J0 term
    return result / norm


def bessel_j(m: int, x):
    """Bessel function of the first kind of integer order ``m >= 0``.

    Power series below ``SERIES_LIMIT``, Miller's backward recurrence above.
    Vectorized over ``x``; absolute error below 1e-10 on [0, 50].
    """
    if m < 0:
        raise DomainError(f"order must be nonnegative, got {m}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("bessel_j is defined here for x >= 0 only")
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)
    small = flat <= SERIES_LIMIT
    if np.any(small):
        out[small] = _bessel_series(m, flat[small])
    if np.any(~small):
        out[~small] = _bessel_miller(m, flat[~small])
    return out.reshape(xa.shape) if xa.ndim else float(out[0])


def bessel_zeros(m: int, count: int):
    """First ``count`` positive zeros of ``J_m`` by bracketing and bisection."""
    if count < 1:
        raise DomainError("count must be >= 1")
    zeros = []
    step = 0.25
    a = max(float(m), step)
    fa = bessel_j(m, a)
    while len(zeros) < count:
        b = a + step
        fb = bessel_j(m, b)
        if fa == 0.0:
            zeros.append(a)
        elif fa * fb < 0:
            lo, hi, flo = a, b, fa
            while hi - lo > 1e-13:
                mid = 0.5 * (lo + hi)
                fm = bessel_j(m, mid)
                if flo * fm <= 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            zeros.append(0.5 * (lo + hi))
        a, fa = b, fb
    return [BesselZero(m, s + 1, z) for s, z in enumerate(zeros[:count])]


def disk_eigenvalues(count: int):
    """Lowest ``count`` Dirichlet wavenumbers of the unit disk, with
    multiplicity (orders ``m > 0`` are doubly degenerate)."""
    values = []
    m = 0
    while True:
        zs = [z.value for z in bessel_zeros(m, count)]
        if values and len(values) >= count and zs[0] > sorted(values)[count - 1]:
            break
        values.extend(zs * (1 if m == 0 else 2))
        m += 1
    return sorted(values)[:count]


def disk_mode_field(m: int, s: int, grid: GridSpec = None) -> IntensityField:
    """Intensity of ``J_m(j_{m,s} r) cos(m phi)`` on the unit disk."""
    if grid is None:
        grid = GridSpec.covering(1.0, 1.0)
    j = bessel_zeros(m, s)[-1].value
    X, Y = grid.mesh()
    R = np.hypot(X, Y)
    mask = R < 1.0
    psi = bessel_j(m, j * R[mask]) * np.cos(m * np.arctan2(Y[mask], X[mask]))
    psi = psi / np.linalg.norm(psi)
    rho = psi ** 2
    return IntensityField(grid=grid, mask=mask, values=rho / rho.sum(), psi=psi.astype(complex))


def fd_laplacian(params: ShapeParams, h: float):
    """Five-point ``-Laplacian`` on the nodes of an ``h``-grid inside the
    boundary, with zero Dirichlet values at every outside node.

    Returns ``(matrix, mask, grid)``.
    """
    half = 1.0 + params.epsilon
    n = int(np.ceil(half / h))
    axis = h * np.arange(-n, n + 1)
    grid = GridSpec(axis.size, axis.size, (axis[0], axis[0]), (h, h))
    X, Y = grid.mesh()
    mask = contains(params, X, Y)
    count = int(mask.sum())
    if count < MIN_FD_POINTS:
        raise ConfigurationError(
            f"FD mask has {count} interior points, need >= {MIN_FD_POINTS}")
    index = -np.ones(mask.shape, dtype=np.int64)
    index[mask] = np.arange(count)
    rows, cols = np.nonzero(mask)
    me = index[rows, cols]
    I = [me]
    J = [me]
    V = [np.full(count, 4.0 / h ** 2)]
    for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nb = index[rows + dr, cols + dc]  # grid padding keeps indices in range
        ok = nb >= 0
        I.append(me[ok])
        J.append(nb[ok])
        V.append(np.full(ok.sum(), -1.0 / h ** 2))
    L = sp.csc_matrix((np.concatenate(V), (np.concatenate(I), np.concatenate(J))),
                      shape=(count, count))
    return L, mask, grid


def subspace_iteration(L, count: int, guard: int = 6, tol: float = 1e-11,
                       max_iter: int = 2000, seed: int = 0):
    """Smallest ``count`` eigenvalues of a sparse SPD matrix by block inverse
    iteration with Rayleigh-Ritz projection."""
    n = L.shape[0]
    p = min(count + guard, n)
    lu = splu(L.tocsc())
    rng = np.random.default_rng(seed)
    V, _ = np.linalg.qr(rng.standard_normal((n, p)))
    prev = None
    for _ in range(max_iter):
        W = lu.solve(V)
        Q, _ = np.linalg.qr(W)
        H = Q.T @ (L @ Q)
        theta, S = np.linalg.eigh(0.5 * (H + H.T))
        V = Q @ S
        lam = theta[:count]
        if prev is not None and np.all(np.abs(lam - prev) <= tol * np.abs(lam)):
            return lam
        prev = lam
    raise NumericalError("subspace iteration did not converge")


def fd_eigensolve(params: ShapeParams, h: float = 0.02, count: int = 6):
    """Lowest ``count`` wavenumbers ``sqrt(lambda) / n`` of the FD Laplacian."""
    if not 0 < h <= 0.05:
        raise ConfigurationError(f"FD spacing must lie in (0, 0.05], got {h}")
    L, _, _ = fd_laplacian(params, h)
    lam = subspace_iteration(L, count)
    return list(np.sqrt(lam) / params.refractive_index)
