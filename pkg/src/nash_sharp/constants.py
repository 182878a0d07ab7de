"""Closed-form constants of the sharp L2-Nash inequality.

Bundles the unit-ball volume, the sharp constant a0(n), the profile
rescaling factor lambda0 and the curvature threshold that governs
existence of extremals on a model manifold.
"""

from dataclasses import dataclass

from .ball_eigen import RadialEigenSolution


def unit_ball_volume(dim):
    """Volume of the unit ball in R^n via |B_n| = |B_{n-2}| * 2 pi / n."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    import math

    if dim == 1:
        return 2.0
    if dim == 2:
        return math.pi
    return unit_ball_volume(dim - 2) * 2.0 * math.pi / dim


def unit_sphere_area(dim):
    """Surface area of the unit n-sphere S^n embedded in R^{n+1}."""
    return (dim + 1) * unit_ball_volume(dim + 1)


@dataclass(frozen=True)
class NashConstants:
    dim: int
    vol_unit_ball: float
    lambda1: float
    a0: float
    lambda0: float
    threshold_coeff: float

    def to_dict(self):
        return {
            "dim": self.dim,
            "vol_unit_ball": self.vol_unit_ball,
            "lambda1": self.lambda1,
            "a0": self.a0,
            "lambda0": self.lambda0,
            "threshold_coeff": self.threshold_coeff,
        }


@dataclass(frozen=True)
class ManifoldModel:
    kind: str  # circle | round_sphere | flat_torus
    dim: int
    size_param: float
    volume: float
    max_scalar_curvature: float

    def to_dict(self):
        return {
            "kind": self.kind,
            "dim": self.dim,
            "size_param": self.size_param,
            "volume": self.volume,
            "max_scalar_curvature": self.max_scalar_curvature,
        }


def circle(length):
    if length <= 0:
        raise ValueError("length must be positive")
    return ManifoldModel("circle", 1, length, length, 0.0)


def round_sphere(dim, radius=1.0):
    if radius <= 0:
        raise ValueError("radius must be positive")
    vol = radius**dim * unit_sphere_area(dim)
    curv = dim * (dim - 1) / radius**2
    return ManifoldModel("round_sphere", dim, radius, vol, curv)


def flat_torus(dim, side=1.0):
    if side <= 0:
        raise ValueError("side must be positive")
    return ManifoldModel("flat_torus", dim, side, side**dim, 0.0)


def compute_constants(dim, eig: RadialEigenSolution):
    """All closed-form constants from the eigenvalue lambda1."""
    if eig.dim != dim:
        raise ValueError("dimension mismatch between eig and dim")
    n = dim
    vol = unit_ball_volume(n)
    lam1 = eig.lambda1
    a0 = (n + 2) ** ((n + 2) / n) / (2 ** (2 / n) * n * lam1 * vol ** (2 / n))
    lambda0 = ((n + 2) / 2) ** (-1 / n) * vol ** (1 / n)
    coeff = (
        vol ** (-2 / n)
        / (6 * n)
        * (2 / (n + 2) + (n - 2) / lam1)
        * ((n + 2) / 2) ** (2 / n)
    )
    return NashConstants(
        dim=n,
        vol_unit_ball=vol,
        lambda1=lam1,
        a0=a0,
        lambda0=lambda0,
        threshold_coeff=coeff,
    )


def threshold(dim, consts: NashConstants, model: ManifoldModel):
    """Curvature threshold T(M) = threshold_coeff * max S_g."""
    if model.dim != dim or consts.dim != dim:
        raise ValueError("dimension mismatch")
    return consts.threshold_coeff * model.max_scalar_curvature


def corollary_check(consts: NashConstants, model: ManifoldModel):
    """Whether Vol(M)^{-2/n} exceeds T(M); returns (verdict, margin)."""
    n = consts.dim
    if model.dim != n:
        raise ValueError("dimension mismatch")
    t = threshold(n, consts, model)
    margin = model.volume ** (-2 / n) - t
    return ("holds" if margin > 0 else "fails"), margin
