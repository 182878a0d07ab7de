"""Penalized subcritical minimization on model manifolds.

Discretizes the constrained problem

    minimize  (int |grad u|^2 + (alpha0 - alpha) int u^2) *
              (int u^{1+eps})^{4/(n(1+eps))}
    over      u >= 0,  int u^2 = 1

on a circle, a flat torus (one-dimensional periodic reduction) or a
round sphere (zonal reduction in colatitude), and reports how the
minimizers concentrate as alpha decreases.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from numpy.polynomial.legendre import leggauss

from .constants import ManifoldModel, unit_sphere_area
from .extremal import RadialFunction

MIN_RESOLUTION = 32


class DegenerateInput(ValueError):
    """Identically-zero input where a nonzero function is required."""


@dataclass
class ManifoldGrid:
    model: ManifoldModel
    nodes: np.ndarray          # arclength (periodic) or colatitude
    weights: np.ndarray        # volume measure per node
    stiffness: sp.csr_matrix   # Dirichlet form matrix: E(u) = u K u

    def laplacian(self, u):
        """Minus-sign convention Laplacian, symmetric in the weighted
        inner product."""
        return self.stiffness @ u / self.weights

    def dirichlet(self, u):
        return float(u @ (self.stiffness @ u))

    def integral(self, f):
        return float(self.weights @ f)

    def distances(self, index):
        """Geodesic distance of every node from nodes[index]."""
        x = self.nodes
        kind = self.model.kind
        if kind in ("circle", "flat_torus"):
            period = (self.model.size_param if kind == "flat_torus"
                      else self.model.volume)
            d = np.abs(x - x[index])
            return np.minimum(d, period - d)
        # zonal sphere: meridian distance via colatitude
        return self.model.size_param * np.abs(x - x[index])


@dataclass
class MinimizerState:
    u: np.ndarray
    alpha: float
    alpha0: float
    eps_alpha: float
    A_alpha: float
    B_alpha: float
    k_alpha: float
    mu_alpha: float
    residual: float
    x_max_index: int
    iterations: int
    converged: bool

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "alpha0": self.alpha0,
            "eps_alpha": self.eps_alpha,
            "A_alpha": self.A_alpha,
            "B_alpha": self.B_alpha,
            "k_alpha": self.k_alpha,
            "mu_alpha": self.mu_alpha,
            "residual": self.residual,
            "x_max_index": self.x_max_index,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass
class ConcentrationReport:
    mass_in_ball: dict
    l2_mass_in_ball: dict
    decay_sup: float
    rescaled_profile: RadialFunction
    profile_deviation: float

    def to_dict(self):
        return {
            "mass_in_ball": {str(k): v for k, v in self.mass_in_ball.items()},
            "l2_mass_in_ball": {str(k): v
                                for k, v in self.l2_mass_in_ball.items()},
            "decay_sup": self.decay_sup,
            "profile_deviation": self.profile_deviation,
        }


def _periodic_grid(model, resolution, section_length, cross_section):
    """Uniform periodic 1-D grid; cross_section scales the transverse
    volume (1 for the circle, side^{n-1} for the torus)."""
    N = resolution
    h = section_length / N
    nodes = h * np.arange(N)
    weights = np.full(N, cross_section * h)
    main = np.full(N, 2.0)
    off = np.full(N - 1, -1.0)
    K = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    K[0, -1] = -1.0
    K[-1, 0] = -1.0
    K = (cross_section / h) * K.tocsr()
    return ManifoldGrid(model, nodes, weights, K)


def _zonal_sphere_grid(model, resolution):
    """Cell-centered colatitude grid on the round sphere S^n(r).

    Weights are the exact surface measure of each latitude band; the
    stiffness matrix is the flux form of the zonal Laplace-Beltrami
    operator, second-order accurate.
    """
    n = model.dim
    r = model.size_param
    N = resolution
    h = np.pi / N
    theta = (np.arange(N) + 0.5) * h
    omega = unit_sphere_area(n - 1)  # area of the unit S^{n-1} fibre

    # band measure: r^n omega int sin^{n-1}, by Gauss-Legendre per cell
    gl_x, gl_w = leggauss(8)
    lo = theta - 0.5 * h
    mid = theta
    t = mid[:, None] + 0.5 * h * gl_x[None, :]
    band = 0.5 * h * np.sum(gl_w[None, :] * np.sin(t) ** (n - 1), axis=1)
    weights = r**n * omega * band

    edges = (np.arange(1, N)) * h
    cond = r ** (n - 2) * omega * np.sin(edges) ** (n - 1) / h
    K = sp.diags(
        [np.concatenate([cond, [0.0]]) + np.concatenate([[0.0], cond]),
         -cond, -cond],
        [0, 1, -1],
        format="csr",
    )
    return ManifoldGrid(model, theta, weights, K)


def build_grid(model: ManifoldModel, resolution: int) -> ManifoldGrid:
    if resolution < MIN_RESOLUTION:
        raise ValueError("resolution must be >= %d" % MIN_RESOLUTION)
    if model.kind == "circle":
        return _periodic_grid(model, resolution, model.size_param, 1.0)
    if model.kind == "flat_torus":
        a = model.size_param
        return _periodic_grid(model, resolution, a, a ** (model.dim - 1))
    if model.kind == "round_sphere":
        return _zonal_sphere_grid(model, resolution)
    raise ValueError("unknown model kind %r" % model.kind)


def _functional_terms(u, grid, alpha, alpha0, eps_alpha):
    n = grid.model.dim
    p = 4.0 / (n * (1.0 + eps_alpha))
    E = grid.dirichlet(u)
    Q = grid.integral(u**2)
    P = grid.integral(np.abs(u) ** (1.0 + eps_alpha))
    return E, Q, P, p


def evaluate_I_alpha(u, grid, alpha, alpha0, eps_alpha):
    """Discrete penalized quotient for an arbitrary (not necessarily
    normalized) nonnegative u."""
    u = np.asarray(u, dtype=float)
    E, Q, P, p = _functional_terms(u, grid, alpha, alpha0, eps_alpha)
    if Q <= 0.0:
        raise DegenerateInput("zero L2 norm")
    n = grid.model.dim
    return (E + (alpha0 - alpha) * Q) * P**p / Q ** (1.0 + 2.0 / n)


def _euler_residual(u, grid, A, B, k, eps_alpha):
    """Weighted L2 norm of the Euler-equation residual.

    Where the nonnegativity constraint is active (u = 0) the equation
    only holds as a variational inequality, so only the infeasible part
    of the residual (pushing into the cone) is counted there.
    """
    n = grid.model.dim
    r = 2.0 * A * grid.laplacian(u) + (4.0 / n) * B * u**eps_alpha - k * u
    active = u <= 0.0
    r = np.where(active, np.minimum(r, 0.0), r)
    return float(np.sqrt(grid.integral(r**2)))


def _state_from(u, grid, alpha, alpha0, eps_alpha, iterations, tol):
    n = grid.model.dim
    E, Q, P, p = _functional_terms(u, grid, alpha, alpha0, eps_alpha)
    A = P**p
    B = (E + (alpha0 - alpha)) * P ** (p - 1.0)
    mu = (E + (alpha0 - alpha)) * A
    k = (4.0 / n) * mu + 2.0 * E * A
    residual = _euler_residual(u, grid, A, B, k, eps_alpha)
    return MinimizerState(
        u=u,
        alpha=alpha,
        alpha0=alpha0,
        eps_alpha=eps_alpha,
        A_alpha=A,
        B_alpha=B,
        k_alpha=k,
        mu_alpha=mu,
        residual=residual,
        x_max_index=int(np.argmax(u)),
        iterations=iterations,
        converged=residual <= tol,
    )


def _project(u, grid):
    """Clamp to the nonnegative cone, renormalize to int u^2 = 1."""
    u = np.maximum(u, 0.0)
    q = grid.integral(u**2)
    if q <= 0.0:
        raise DegenerateInput("projection collapsed to zero")
    return u / np.sqrt(q)


def minimize(grid, alpha, alpha0, eps_alpha, init, max_iter=200000,
             tol=1e-8):
    """Projected gradient descent with backtracking on the L2 sphere.

    Terminates on the weighted Euler-equation residual. Steps are tried
    at a Barzilai-Borwein length and backtracked until the objective
    decreases, so accepted iterations are monotone. Once the monotone
    phase stalls against floating-point rounding of the objective, a
    preconditioned polishing phase (sparse solves against the shifted
    Dirichlet operator) pushes the residual the rest of the way down.

    A localized initial iterate can freeze against the nonnegativity
    constraint in regimes whose minimizer is spread out: re-filling a
    clamped tail is energetically downhill only collectively, never
    node by node, so no local step crosses the barrier. The constant
    branch is therefore always probed and descent restarted from it
    whenever its objective value undercuts the state reached.
    """
    u = np.asarray(init, dtype=float)
    if np.any(u < 0):
        raise ValueError("init must be nonnegative")
    state = _descend(_project(u, grid), grid, alpha, alpha0, eps_alpha,
                     max_iter, tol)
    const = _project(np.ones_like(grid.nodes), grid)
    I_state = evaluate_I_alpha(state.u, grid, alpha, alpha0, eps_alpha)
    I_const = evaluate_I_alpha(const, grid, alpha, alpha0, eps_alpha)
    if I_const < I_state * (1.0 - 1e-12):
        retry = _descend(const, grid, alpha, alpha0, eps_alpha,
                         max_iter, tol)
        if (evaluate_I_alpha(retry.u, grid, alpha, alpha0, eps_alpha)
                < I_state):
            retry.iterations += state.iterations
            return retry
    return state


def _descend(u, grid, alpha, alpha0, eps_alpha, max_iter, tol):
    n = grid.model.dim

    def objective_and_grad(u):
        E, Q, P, p = _functional_terms(u, grid, alpha, alpha0, eps_alpha)
        A = P**p
        B = (E + (alpha0 - alpha)) * P ** (p - 1.0)
        F = (E + (alpha0 - alpha)) * A
        g = 2.0 * A * grid.laplacian(u) \
            + 2.0 * (alpha0 - alpha) * A * u \
            + (4.0 / n) * B * u**eps_alpha
        return F, g, A, B, E

    F, g, A, B, E = objective_and_grad(u)
    t = 1.0 / (1.0 + float(np.sqrt(grid.integral(g**2))))
    prev_u = None
    prev_res = None
    it = 0
    best = np.inf
    since_best = 0
    while it < max_iter:
        # tangential gradient = Euler residual on the constraint sphere
        res_vec = g - grid.integral(g * u) * u
        measured = np.where(u <= 0.0, np.minimum(res_vec, 0.0), res_vec)
        residual = float(np.sqrt(grid.integral(measured**2)))
        if residual <= tol:
            break
        if residual < 0.9 * best:
            best = residual
            since_best = 0
        else:
            since_best += 1
            if since_best > 500:
                break  # slow grind; the polishing phase is far faster

        if prev_u is not None:
            du = u - prev_u
            dg = res_vec - prev_res
            denom = grid.integral(du * dg)
            if denom > 0:
                t = grid.integral(du * du) / denom
        accepted = False
        for _ in range(60):
            try:
                u_new = _project(u - t * res_vec, grid)
            except DegenerateInput:
                t *= 0.5
                continue
            F_new, g_new, A_new, B_new, E_new = objective_and_grad(u_new)
            if F_new < F:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break  # objective rounding floor; hand over to polishing
        prev_u, prev_res = u, res_vec
        u, F, g, A, B, E = u_new, F_new, g_new, A_new, B_new, E_new
        it += 1

    u, it = _polish(u, grid, alpha, alpha0, eps_alpha, it, max_iter, tol)
    return _state_from(u, grid, alpha, alpha0, eps_alpha, it, tol)


def _polish(u, grid, alpha, alpha0, eps_alpha, it, max_iter, tol):
    """Preconditioned tangential descent on the Euler residual.

    Directions solve (2 A K + tau W) z = W r, which is SPD for any
    tau > 0 and approximates the constrained Hessian, so the residual
    contracts geometrically without relying on objective comparisons
    (which saturate at the rounding floor near the minimum).
    """
    n = grid.model.dim
    W = sp.diags(grid.weights)
    best_u = u
    best_res = np.inf
    bad_streak = 0
    while it < max_iter:
        E, Q, P, p = _functional_terms(u, grid, alpha, alpha0, eps_alpha)
        A = P**p
        B = (E + (alpha0 - alpha)) * P ** (p - 1.0)
        mu = (E + (alpha0 - alpha)) * A
        k = (4.0 / n) * mu + 2.0 * E * A
        r = 2.0 * A * grid.laplacian(u) + (4.0 / n) * B * u**eps_alpha \
            - k * u
        res = _euler_residual(u, grid, A, B, k, eps_alpha)
        if res < best_res:
            best_u, best_res = u, res
            bad_streak = 0
        else:
            bad_streak += 1
        # the residual climbs transiently while the support boundary
        # marches node by node, so the divergence guard must be patient
        if res <= tol or bad_streak > 400:
            break
        # local Jacobian diagonal; the eps u^{eps-1} term is enormous in
        # the tail and is what keeps the update from overshooting there
        with np.errstate(divide="ignore", over="ignore"):
            dloc = np.where(
                u > 0.0,
                (4.0 / n) * B * eps_alpha * u ** (eps_alpha - 1.0) - k,
                np.inf,
            )
        tau = max(1.0, abs(k))
        diag = np.clip(dloc, tau, 1e18)
        M = (2.0 * A * grid.stiffness + W @ sp.diags(diag)).tocsc()
        z = sp.linalg.splu(M).solve(grid.weights * r)
        u = np.maximum(u - z, 0.0)
        # clamped nodes pushed into the cone (r < 0) violate the
        # variational inequality; the Newton diagonal is infinite at
        # u = 0, so instead seed them with the root of the dominant
        # local balance (4/n) B u^eps = -2 A (lap u). The seeds are far
        # below quadrature resolution and leave the coefficients alone.
        rnew = 2.0 * A * grid.laplacian(u) + (4.0 / n) * B * u**eps_alpha \
            - k * u
        react = (u <= 0.0) & (rnew < 0.0)
        if np.any(react):
            # cap the seed: a large local root means the node is far
            # from the tail regime and ordinary Newton steps take over
            with np.errstate(under="ignore", over="ignore"):
                u[react] = np.minimum(
                    (n * -rnew[react] / (4.0 * B)) ** (1.0 / eps_alpha),
                    1e-3 * float(np.max(u)),
                )
        u = _project(u, grid)
        it += 1
    return best_u, it


def bump_init(grid, width=0.3):
    """Normalized Gaussian bump at the first node (pole / origin)."""
    d = grid.distances(0)
    return _project(np.exp(-((d / width) ** 2)), grid)


def constant_init(grid):
    return _project(np.ones_like(grid.nodes), grid)


def concentration_diagnostics(state, grid, reference, deltas=(1.0, 2.0, 4.0)):
    """Mass localization, pointwise decay and rescaled-profile distance
    for a converged minimizer."""
    u = state.u
    n = grid.model.dim
    eps = state.eps_alpha
    a = np.sqrt(state.A_alpha)
    d = grid.distances(state.x_max_index)

    p_density = grid.weights * u ** (1.0 + eps)
    q_density = grid.weights * u**2
    p_tot = p_density.sum()
    q_tot = q_density.sum()
    mass = {}
    l2_mass = {}
    for delta in deltas:
        inside = d <= delta * a
        mass[float(delta)] = float(p_density[inside].sum() / p_tot)
        l2_mass[float(delta)] = float(q_density[inside].sum() / q_tot)

    decay_sup = float(np.max(u * d ** (n / 2.0)))

    umax = u[state.x_max_index]
    s = d / a
    order = np.argsort(s, kind="stable")
    s_sorted = s[order]
    v_sorted = u[order] / umax
    # symmetric nodes can land at equal distance; average them
    s_unique, start = np.unique(s_sorted, return_index=True)
    v_unique = np.array([v_sorted[start[i]:(start[i + 1] if i + 1 <
                                            len(start) else None)].mean()
                         for i in range(len(start))])
    if s_unique[0] != 0.0:
        s_unique = np.concatenate([[0.0], s_unique])
        v_unique = np.concatenate([[1.0], v_unique])
    profile = RadialFunction(n, s_unique, v_unique,
                             max(s_unique[-1], 1e-12))

    ref0 = reference(np.array([0.0]))[0]
    cmp_range = min(s_unique[-1], 1.5 * reference.support_radius)
    s_cmp = s_unique[s_unique <= cmp_range]
    dev = float(np.max(np.abs(profile(s_cmp) - reference(s_cmp) / ref0)))

    return ConcentrationReport(
        mass_in_ball=mass,
        l2_mass_in_ball=l2_mass,
        decay_sup=decay_sup,
        rescaled_profile=profile,
        profile_deviation=dev,
    )


@dataclass
class SweepResult:
    states: list
    reports: list
    trajectory: dict = field(default_factory=dict)


def _max_workers():
    raw = os.environ.get("NASH_SHARP_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return os.cpu_count() or 1


def alpha_sweep(grid, alphas, alpha0, eps_schedule, init=None,
                reference=None, deltas=(1.0, 2.0, 4.0), max_iter=200000,
                tol=1e-8, warm_start=True):
    """Run minimize over a decreasing alpha schedule.

    With warm_start (default) each run starts from the previous
    solution; otherwise the runs are independent and may execute in
    parallel, capped by NASH_SHARP_THREADS, with results ordered by
    alpha.
    """
    alphas = list(alphas)
    if any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be strictly decreasing")
    if init is None:
        init = bump_init(grid)

    if warm_start:
        states = []
        u = init
        for alpha in alphas:
            state = minimize(grid, alpha, alpha0, eps_schedule(alpha), u,
                             max_iter=max_iter, tol=tol)
            states.append(state)
            u = state.u
    else:
        def run(alpha):
            return minimize(grid, alpha, alpha0, eps_schedule(alpha), init,
                            max_iter=max_iter, tol=tol)
        with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
            states = list(pool.map(run, alphas))

    reports = []
    if reference is not None:
        for state in states:
            reports.append(concentration_diagnostics(state, grid, reference,
                                                     deltas))
    trajectory = {
        "alpha": alphas,
        "grad_times_A": [s.A_alpha * grid.dirichlet(s.u) for s in states],
        "B_times_P": [s.B_alpha *
                      grid.integral(s.u ** (1.0 + s.eps_alpha))
                      for s in states],
        "k_alpha": [s.k_alpha for s in states],
        "mu_alpha": [s.mu_alpha for s in states],
    }
    return SweepResult(states=states, reports=reports, trajectory=trajectory)
