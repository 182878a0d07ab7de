"""First nonzero radial Neumann eigenvalue of the unit ball by shooting.

The radial eigenfunction solves

    u'' + (n-1)/r u' + lambda u = 0,   u(0) = 1, u'(0) = 0,

and the Neumann condition u'(1) = 0 selects the eigenvalues. The first
sign change of u'(1; lambda) past lambda = 0 brackets the first nonzero
eigenvalue, which is then pinned down by bisection.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

# The (n-1)/r term is singular at r = 0; the integration starts from a
# short Taylor arc u(r) = 1 - lam r^2/(2n) + lam^2 r^4/(8n(n+2)) whose
# truncation error is O(r^6).
SERIES_RADIUS = 1e-3

DEFAULT_GRID_SIZE = 4096
DEFAULT_TOL = 1e-10
SCAN_SAMPLES = 256


class BracketError(RuntimeError):
    """No sign change of u'(1; lambda) found below the requested bound."""


class IntegrationError(RuntimeError):
    """The fixed-step integrator produced non-finite values."""


@dataclass(frozen=True)
class RadialEigenSolution:
    dim: int
    lambda1: float
    grid: np.ndarray
    values: np.ndarray
    u_at_1: float
    derivative_at_1: float


def _series_start(dim, lam):
    """u and u' at SERIES_RADIUS from the Taylor expansion about 0."""
    n = dim
    r = SERIES_RADIUS
    u = 1.0 - lam * r**2 / (2 * n) + lam**2 * r**4 / (8 * n * (n + 2))
    du = -lam * r / n + lam**2 * r**3 / (2 * n * (n + 2))
    return u, du


def shoot(dim, lam, grid_size=DEFAULT_GRID_SIZE):
    """Integrate the radial ODE from r=0 to r=1 with u(0)=1, u'(0)=0.

    Returns (u_at_1, derivative_at_1, grid, values) where grid holds 0,
    the series hand-off radius and the fixed RK4 steps up to 1.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if grid_size < 16:
        raise ValueError("grid_size must be >= 16")

    n = dim
    r0 = SERIES_RADIUS
    h = (1.0 - r0) / grid_size
    u, w = _series_start(n, lam)

    grid = np.empty(grid_size + 2)
    values = np.empty(grid_size + 2)
    grid[0] = 0.0
    values[0] = 1.0
    grid[1] = r0
    values[1] = u

    c = n - 1.0
    for i in range(grid_size):
        r = r0 + i * h
        # classical RK4 on (u, w), w = u'
        k1u = w
        k1w = -c / r * w - lam * u
        rm = r + 0.5 * h
        u2 = u + 0.5 * h * k1u
        w2 = w + 0.5 * h * k1w
        k2u = w2
        k2w = -c / rm * w2 - lam * u2
        u3 = u + 0.5 * h * k2u
        w3 = w + 0.5 * h * k2w
        k3u = w3
        k3w = -c / rm * w3 - lam * u3
        re = r + h
        u4 = u + h * k3u
        w4 = w + h * k3w
        k4u = w4
        k4w = -c / re * w4 - lam * u4
        u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)
        grid[i + 2] = re
        values[i + 2] = u

    if not (np.isfinite(u) and np.isfinite(w)):
        raise IntegrationError(
            "non-finite values at lambda=%g, grid_size=%d; shrink the step"
            % (lam, grid_size)
        )
    grid[-1] = 1.0
    return u, w, grid, values


def _shoot_batch(dim, lams, grid_size):
    """u'(1; lambda) for an array of lambdas (vectorized RK4 sweep)."""
    n = dim
    r0 = SERIES_RADIUS
    h = (1.0 - r0) / grid_size
    lams = np.asarray(lams, dtype=float)
    u = 1.0 - lams * r0**2 / (2 * n) + lams**2 * r0**4 / (8 * n * (n + 2))
    w = -lams * r0 / n + lams**2 * r0**3 / (2 * n * (n + 2))
    c = n - 1.0
    for i in range(grid_size):
        r = r0 + i * h
        rm = r + 0.5 * h
        re = r + h
        k1u = w
        k1w = -c / r * w - lams * u
        u2 = u + 0.5 * h * k1u
        w2 = w + 0.5 * h * k1w
        k2u = w2
        k2w = -c / rm * w2 - lams * u2
        u3 = u + 0.5 * h * k2u
        w3 = w + 0.5 * h * k2w
        k3u = w3
        k3w = -c / rm * w3 - lams * u3
        u4 = u + h * k3u
        w4 = w + h * k3w
        k4u = w4
        k4w = -c / re * w4 - lams * u4
        u = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        w = w + h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)
    return w


def default_bracket(dim):
    # comfortably above the first radial Neumann eigenvalue for dim <= 16
    return 4.0 * (dim + 2) ** 2


def solve_lambda1(dim, bracket_hi=None, tol=DEFAULT_TOL,
                  grid_size=DEFAULT_GRID_SIZE):
    """Smallest lambda > 0 with u'(1; lambda) = 0, to tolerance tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if bracket_hi is None:
        bracket_hi = default_bracket(dim)

    # locate and narrow the bracket on a coarse grid first: the RK4
    # cost is dominated by step count, and the coarse root sits within
    # its O(h^4) discretization error of the full-grid root
    coarse = min(grid_size, max(256, grid_size // 8))
    lams = np.linspace(bracket_hi / SCAN_SAMPLES, bracket_hi, SCAN_SAMPLES)
    ders = _shoot_batch(dim, lams, coarse)
    sign = np.sign(ders)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(flips) == 0:
        raise BracketError(
            "no sign change of u'(1) in (0, %g]; enlarge bracket_hi"
            % bracket_hi
        )
    i = flips[0]
    lo, hi = lams[i], lams[i + 1]
    flo, fhi = ders[i], ders[i + 1]
    # multisection: one vectorized sweep narrows the bracket 31-fold
    while hi - lo > max(1e-5, tol):
        pts = np.linspace(lo, hi, 32)
        vals = np.empty(32)
        vals[0], vals[-1] = flo, fhi
        vals[1:-1] = _shoot_batch(dim, pts[1:-1], coarse)
        j = np.nonzero(vals[:-1] * vals[1:] <= 0)[0][0]
        lo, hi = pts[j], pts[j + 1]
        flo, fhi = vals[j], vals[j + 1]

    def fine(lam):
        return shoot(dim, lam, grid_size)[1]

    if coarse == grid_size:
        lam1 = 0.5 * (lo + hi) if hi - lo <= tol else brentq(
            fine, lo, hi, xtol=tol)
    else:
        # pad the coarse bracket to absorb the discretization shift of
        # the root, then polish at full resolution
        pad = 10.0 * (hi - lo) + 1e-4
        lo2 = max(lo - pad, 0.5 * lo)
        hi2 = hi + pad
        if fine(lo2) * fine(hi2) > 0:  # pragma: no cover - paranoia
            lo2, hi2 = lams[i], lams[i + 1]
        lam1 = brentq(fine, lo2, hi2, xtol=tol)
    u1, du1, grid, values = shoot(dim, lam1, grid_size)
    return RadialEigenSolution(
        dim=dim,
        lambda1=lam1,
        grid=grid,
        values=values,
        u_at_1=u1,
        derivative_at_1=du1,
    )
