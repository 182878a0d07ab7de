"""Euclidean Nash quotient and randomized lower-bound checks.

The quotient of a radial function u is

    I(u) = (int |grad u|^2) (int |u|)^{4/n} / (int u^2)^{1+2/n},

and I(u) * a0(n) >= 1 for every admissible u, with equality attained by
the compactly supported extremal profile. The property suite samples
seeded random radial families and reports the worst normalized value.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import ball_eigen
from .constants import NashConstants, compute_constants
from .extremal import RadialFunction, build_phi, dirichlet_energy, integrate

FAILURE_SLACK = 1e-6


class DegenerateInput(ValueError):
    """Zero L2 norm; the quotient is undefined."""


@dataclass(frozen=True)
class NashReport:
    value: float
    normalized: float
    gradient_term: float
    l1_term: float
    l2_term: float

    def to_dict(self):
        return {
            "value": self.value,
            "normalized": self.normalized,
            "gradient_term": self.gradient_term,
            "l1_term": self.l1_term,
            "l2_term": self.l2_term,
        }


def evaluate(u: RadialFunction, consts: NashConstants):
    if u.dim != consts.dim:
        raise ValueError("dimension mismatch")
    n = u.dim
    l2 = integrate(u, 2.0)
    if l2 <= 0.0:
        raise DegenerateInput("function has zero L2 norm")
    grad = dirichlet_energy(u)
    l1 = integrate(u, 1.0)
    value = grad * l1 ** (4.0 / n) / l2 ** (1.0 + 2.0 / n)
    return NashReport(
        value=value,
        normalized=value * consts.a0,
        gradient_term=grad,
        l1_term=l1,
        l2_term=l2,
    )


def _gaussian(dim, rng):
    w = rng.uniform(0.3, 3.0)
    grid = np.linspace(0.0, 7.0 * w, 1025)
    return RadialFunction(dim, grid, np.exp(-((grid / w) ** 2)), 7.0 * w)


def _tent(dim, rng):
    w = rng.uniform(0.5, 2.0)
    grid = np.linspace(0.0, w, 1025)
    return RadialFunction(dim, grid, 1.0 - grid / w, w)


def _poly_cap(dim, rng):
    R = rng.uniform(0.5, 2.0)
    p = rng.uniform(1.0, 4.0)
    grid = np.linspace(0.0, R, 1025)
    return RadialFunction(dim, grid, (1.0 - (grid / R) ** 2) ** p, R)


def _positive_spline(dim, rng):
    R = rng.uniform(0.8, 2.5)
    knots = np.linspace(0.0, R, 9)
    amp = rng.uniform(0.2, 1.0, size=9)
    amp[-1] = 0.0  # compact support, value -> 0 like (R-r)^2
    s = CubicSpline(knots, np.sqrt(amp))
    grid = np.linspace(0.0, R, 1025)
    return RadialFunction(dim, grid, s(grid) ** 2, R)


def _perturbed_profile(dim, rng, phi):
    # multiplicative bump keeps the sample nonnegative
    eps = rng.uniform(0.02, 0.1) * rng.choice([-1.0, 1.0])
    center = rng.uniform(0.2, 0.8) * phi.support_radius
    width = rng.uniform(0.1, 0.3) * phi.support_radius
    bump = np.exp(-(((phi.grid - center) / width) ** 2))
    return RadialFunction(dim, phi.grid, phi.values * (1.0 + eps * bump),
                          phi.support_radius)


def property_suite(dim, consts, trials, seed, eig=None,
                   check_invariances=True):
    """Evaluate `trials` random radial functions; count bound failures.

    Returns a dict with min_normalized, failures, trials, seed. With
    check_invariances, each sample is also re-evaluated under scaling
    c*u and dilation u(./s) and the quotient must be unchanged.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    if eig is None:
        eig = ball_eigen.solve_lambda1(dim, grid_size=1024)
    phi = build_phi(eig, consts if consts.dim == dim
                    else compute_constants(dim, eig))

    samplers = [_gaussian, _tent, _poly_cap, _positive_spline]
    min_normalized = np.inf
    failures = 0
    for _ in range(trials):
        pick = rng.integers(0, len(samplers) + 1)
        if pick == len(samplers):
            u = _perturbed_profile(dim, rng, phi)
        else:
            u = samplers[pick](dim, rng)
        rep = evaluate(u, consts)
        if rep.normalized < min_normalized:
            min_normalized = rep.normalized
        if rep.normalized < 1.0 - FAILURE_SLACK:
            failures += 1
        if check_invariances:
            for c in (0.5, 3.0, 100.0):
                r2 = evaluate(u.scaled(c), consts)
                if abs(r2.value - rep.value) > 1e-10 * abs(rep.value):
                    raise AssertionError(
                        "homogeneity violated at c=%g: %r vs %r"
                        % (c, r2.value, rep.value)
                    )
            for s in (0.5, 2.0):
                r2 = evaluate(u.dilated(s), consts)
                if abs(r2.value - rep.value) > 1e-6 * abs(rep.value):
                    raise AssertionError(
                        "dilation invariance violated at s=%g: %r vs %r"
                        % (s, r2.value, rep.value)
                    )
    return {
        "min_normalized": float(min_normalized),
        "failures": failures,
        "trials": trials,
        "seed": seed,
    }
