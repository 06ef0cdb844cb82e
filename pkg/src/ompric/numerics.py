"""Dense linear algebra kernel: Gram matrices, least squares, symmetric spectra.

Everything here works on float64 numpy arrays. The hot kernels exist in two
forms: a scalar loop version compiled by numba, and a vectorized numpy
version that is used when numba is unavailable or disabled through
``OMPRIC_DISABLE_NUMBA``. Both follow the same rotation and reflection
formulas, so they agree to rounding.
"""

from typing import NamedTuple

import numpy as np

from ._accel import NUMBA_ENABLED, jit

SYMMETRY_RTOL = 1e-12
JACOBI_RTOL = 1e-14
JACOBI_MAX_SWEEPS = 100
RANK_RTOL = 1e-12

# beyond this |theta|, theta**2 overflows and t ~ 1/(2 theta)
_THETA_BIG = 1e150


class NotSymmetricError(ValueError):
    """Raised when an eigenvalue request gets a non-symmetric matrix."""


class NoConvergenceError(ArithmeticError):
    """Raised when Jacobi sweeps fail to clear the off-diagonal mass."""


class LeastSquares(NamedTuple):
    coef: np.ndarray
    rank_deficient: bool


def as_matrix(a, name="matrix"):
    """Validate and convert ``a`` to a C-contiguous 2-D float64 array."""
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be nonempty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_vector(v, name="vector"):
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError(f"{name} must be a nonempty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


# ---------------------------------------------------------------------------
# Gram matrix

def gram(a):
    """Return ``A.T @ A``, symmetrized.

    Both backends use the BLAS product; a compiled triple loop was measured
    about ten times slower.
    """
    a = as_matrix(a)
    g = a.T @ a
    return 0.5 * (g + g.T)


# ---------------------------------------------------------------------------
# Symmetric eigenvalues by cyclic Jacobi

@jit
def _jacobi_loop(g, tol, max_sweeps):
    """Cyclic Jacobi on a copy of ``g``.

    Returns the sorted diagonal and the number of sweeps performed, or -1 for
    the sweep count when ``max_sweeps`` sweeps did not converge.
    """
    a = g.copy()
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j] * a[i, j]
        if np.sqrt(off) <= tol:
            return np.sort(np.diag(a).copy()), sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > _THETA_BIG:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for r in range(n):
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = c * arp - s * arq
                    a[r, q] = s * arp + c * arq
                for r in range(n):
                    apr = a[p, r]
                    aqr = a[q, r]
                    a[p, r] = c * apr - s * aqr
                    a[q, r] = s * apr + c * aqr
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
    return np.sort(np.diag(a).copy()), -1


def _jacobi_batched(stack, tol, max_sweeps):
    """Vectorized cyclic Jacobi over a stack of symmetric matrices.

    ``stack`` has shape (batch, n, n) and ``tol`` shape (batch,). A matrix
    stops rotating once its off-diagonal norm is within its tolerance, so each
    slice sees the same rotation sequence as :func:`_jacobi_loop`. Returns
    sorted eigenvalues (batch, n) and per-matrix sweep counts (-1 on failure).
    """
    a = np.array(stack, dtype=np.float64, copy=True)
    batch, n, _ = a.shape
    diag_idx = np.arange(n)
    sweeps = np.full(batch, -1, dtype=np.int64)
    active = np.ones(batch, dtype=bool)
    for sweep in range(max_sweeps + 1):
        sq = a * a
        sq[:, diag_idx, diag_idx] = 0.0
        off = np.sqrt(sq.reshape(batch, -1).sum(axis=1))
        done = active & (off <= tol)
        sweeps[done] = sweep
        active &= ~done
        if not active.any() or sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q].copy()
                rot = active & (apq != 0.0)
                if not rot.any():
                    continue
                app = a[:, p, p].copy()
                aqq = a[:, q, q].copy()
                with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                    theta = (aqq - app) / (2.0 * np.where(rot, apq, 1.0))
                    big = np.abs(theta) > _THETA_BIG
                    t = 1.0 / (np.abs(theta) + np.sqrt(np.where(big, 0.0, theta * theta) + 1.0))
                    t = np.where(theta < 0.0, -t, t)
                    t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
                t = np.where(rot, t, 0.0)
                c = (1.0 / np.sqrt(t * t + 1.0))[:, None]
                s = t[:, None] * c
                cp = a[:, :, p].copy()
                cq = a[:, :, q].copy()
                a[:, :, p] = c * cp - s * cq
                a[:, :, q] = s * cp + c * cq
                rp = a[:, p, :].copy()
                rq = a[:, q, :].copy()
                a[:, p, :] = c * rp - s * rq
                a[:, q, :] = s * rp + c * rq
                a[:, p, p] = app - t * apq
                a[:, q, q] = aqq + t * apq
                a[:, p, q] = np.where(rot, 0.0, apq)
                a[:, q, p] = np.where(rot, 0.0, apq)
    eig = np.sort(a[:, diag_idx, diag_idx], axis=1)
    return eig, sweeps


def check_symmetric(g):
    """Raise NotSymmetricError unless ``g`` is square and symmetric to 1e-12 relative."""
    g = as_matrix(g)
    if g.shape[0] != g.shape[1]:
        raise NotSymmetricError(f"matrix is not square: shape {g.shape}")
    scale = np.max(np.abs(g))
    asym = np.max(np.abs(g - g.T))
    if asym > SYMMETRY_RTOL * scale:
        raise NotSymmetricError(
            f"asymmetry {asym:.3e} exceeds {SYMMETRY_RTOL:g} x max|G| = {SYMMETRY_RTOL * scale:.3e}"
        )
    return 0.5 * (g + g.T)


def jacobi_tolerance(g):
    return JACOBI_RTOL * np.sqrt(np.sum(g * g))


def _pow2_scale(g):
    """Power of two near max|g|; dividing by it is exact and keeps squares in range."""
    peak = np.max(np.abs(g))
    if peak == 0.0:
        return 1.0
    return float(np.ldexp(1.0, int(np.frexp(peak)[1])))


def sym_eigenvalues(g):
    """All eigenvalues of a symmetric matrix, in nondecreasing order.

    Cyclic Jacobi, stopped once the off-diagonal Frobenius norm is at most
    1e-14 times the Frobenius norm of ``g``.

    Raises
    ------
    NotSymmetricError
        ``g`` is not square or not symmetric to 1e-12 relative.
    NoConvergenceError
        100 sweeps were not enough.
    """
    g = check_symmetric(g)
    scale = _pow2_scale(g)
    g = g / scale
    tol = jacobi_tolerance(g)
    if NUMBA_ENABLED:
        eig, sweeps = _jacobi_loop(g, tol, JACOBI_MAX_SWEEPS)
    else:
        eigs, sweep_arr = _jacobi_batched(g[None], np.array([tol]), JACOBI_MAX_SWEEPS)
        eig, sweeps = eigs[0], int(sweep_arr[0])
    if sweeps < 0:
        raise NoConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    return eig * scale


# ---------------------------------------------------------------------------
# Least squares by Householder QR

@jit
def _householder_lstsq(a, y, rel_tol):
    m, n = a.shape
    r = a.copy()
    b = y.copy()
    for k in range(n):
        normx = 0.0
        for i in range(k, m):
            normx += r[i, k] * r[i, k]
        normx = np.sqrt(normx)
        if normx == 0.0:
            continue
        alpha = -normx if r[k, k] >= 0.0 else normx
        v = r[k:, k].copy()
        v[0] -= alpha
        vv = 0.0
        for i in range(v.shape[0]):
            vv += v[i] * v[i]
        if vv == 0.0:
            continue
        for j in range(k + 1, n):
            proj = 0.0
            for i in range(v.shape[0]):
                proj += v[i] * r[k + i, j]
            proj *= 2.0 / vv
            for i in range(v.shape[0]):
                r[k + i, j] -= proj * v[i]
        proj = 0.0
        for i in range(v.shape[0]):
            proj += v[i] * b[k + i]
        proj *= 2.0 / vv
        for i in range(v.shape[0]):
            b[k + i] -= proj * v[i]
        r[k, k] = alpha
        for i in range(k + 1, m):
            r[i, k] = 0.0

    dmax = 0.0
    for i in range(n):
        dmax = max(dmax, abs(r[i, i]))
    cutoff = rel_tol * dmax
    z = np.zeros(n)
    truncated = False
    for i in range(n - 1, -1, -1):
        if abs(r[i, i]) <= cutoff:
            truncated = True
            continue
        acc = b[i]
        for j in range(i + 1, n):
            acc -= r[i, j] * z[j]
        z[i] = acc / r[i, i]
    return z, truncated


def least_squares(a_sub, y):
    """Minimize ``||a_sub @ z - y||_2`` by Householder QR.

    Coefficients whose R diagonal falls below 1e-12 of the largest diagonal
    magnitude are set to zero; ``rank_deficient`` reports whether that
    happened.
    """
    a_sub = as_matrix(a_sub, "a_sub")
    y = as_vector(y, "y")
    m, n = a_sub.shape
    if m < n:
        raise ValueError(f"least_squares needs rows >= cols, got {m}x{n}")
    if y.shape[0] != m:
        raise ValueError(f"y has length {y.shape[0]}, expected {m}")
    z, truncated = _householder_lstsq(a_sub, y, RANK_RTOL)
    return LeastSquares(z, bool(truncated))
