"""Radial functions on R^n, their quadrature, and the extremal profile.

A RadialFunction is a sampled radial function with compact support;
integrals against the measure n|B| r^{n-1} dr use composite
Gauss-Legendre panels so that the support boundary is always a panel
endpoint.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

from .ball_eigen import RadialEigenSolution
from .constants import NashConstants, unit_ball_volume

GL_POINTS = 16
GL_PANELS = 256

_GL_NODES, _GL_WEIGHTS = leggauss(GL_POINTS)


@dataclass
class RadialFunction:
    dim: int
    grid: np.ndarray
    values: np.ndarray
    support_radius: float
    _spline: CubicSpline | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid[0] != 0.0:
            raise ValueError("grid must start at 0")
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values length mismatch")
        if not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        if self.support_radius <= 0:
            raise ValueError("support_radius must be positive")

    def _interp(self):
        if self._spline is None:
            self._spline = CubicSpline(self.grid, self.values)
        return self._spline

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        inside = r <= min(self.support_radius, self.grid[-1])
        out[inside] = self._interp()(r[inside])
        return out

    def scaled(self, c):
        """c * f, same support."""
        return RadialFunction(self.dim, self.grid, c * self.values,
                              self.support_radius)

    def dilated(self, s):
        """f(./s): radii stretched by s."""
        return RadialFunction(self.dim, self.grid * s, self.values,
                              self.support_radius * s)


def _panel_nodes(radius, panels=GL_PANELS):
    """Gauss-Legendre nodes and weights tiling [0, radius]."""
    edges = np.linspace(0.0, radius, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    r = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return r, w


def integrate(f: RadialFunction, power=1.0, panels=GL_PANELS):
    """n|B| * integral of |f|^power r^{n-1} dr over the support."""
    n = f.dim
    r, w = _panel_nodes(f.support_radius, panels)
    vals = np.abs(f(r)) ** power
    return n * unit_ball_volume(n) * np.sum(w * vals * r ** (n - 1))


def dirichlet_energy(f: RadialFunction, panels=GL_PANELS):
    """n|B| * integral of f'(r)^2 r^{n-1} dr.

    f' is formed by centered differences on the stored grid (one-sided,
    second order at the ends) and integrated with the same quadrature.
    """
    deriv = np.gradient(f.values, f.grid, edge_order=2)
    df = RadialFunction(f.dim, f.grid, deriv, f.support_radius)
    return integrate(df, power=2.0, panels=panels)


def build_v(eig: RadialEigenSolution):
    """v(r) = u(r) - u(1) on [0,1], extended by zero; v(1) = 0."""
    return RadialFunction(
        dim=eig.dim,
        grid=eig.grid,
        values=eig.values - eig.u_at_1,
        support_radius=1.0,
    )


def build_phi(eig: RadialEigenSolution, consts: NashConstants, k=1.0):
    """Extremal profile phi(r) = k * v(lambda0 * r), support 1/lambda0."""
    if consts.dim != eig.dim:
        raise ValueError("dimension mismatch")
    if k <= 0:
        raise ValueError("k must be positive")
    lam0 = consts.lambda0
    return RadialFunction(
        dim=eig.dim,
        grid=eig.grid / lam0,
        values=k * (eig.values - eig.u_at_1),
        support_radius=1.0 / lam0,
    )


def dump_csv(f: RadialFunction, path):
    """Two-column CSV (r, value) of the stored samples."""
    with open(path, "w") as fh:
        fh.write("r,value\n")
        for r, v in zip(f.grid, f.values):
            fh.write("%.17g,%.17g\n" % (r, v))
