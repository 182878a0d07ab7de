import math

import numpy as np
import pytest

from nash_sharp import constants, extremal, minimizer


@pytest.fixture(scope="module")
def circle_grid():
    return minimizer.build_grid(constants.circle(2 * math.pi), 128)


@pytest.fixture(scope="module")
def sphere_grid():
    return minimizer.build_grid(constants.round_sphere(2, 1.0), 128)


@pytest.fixture(scope="module")
def torus_grid():
    return minimizer.build_grid(constants.flat_torus(2, 1.0), 128)


def test_grid_invariants(circle_grid, sphere_grid, torus_grid):
    rng = np.random.default_rng(0)
    for grid in (circle_grid, sphere_grid, torus_grid):
        vol = grid.model.volume
        assert abs(grid.weights.sum() - vol) < 1e-8 * vol
        assert np.all(grid.weights > 0)
        ones = np.ones_like(grid.nodes)
        lap1 = grid.laplacian(ones)
        assert np.sqrt(grid.integral(lap1**2)) < 1e-8
        # symmetry in the weighted inner product
        u = rng.uniform(size=len(grid.nodes))
        v = rng.uniform(size=len(grid.nodes))
        lhs = grid.integral(grid.laplacian(u) * v)
        rhs = grid.integral(u * grid.laplacian(v))
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))
        # positive semidefinite Dirichlet form
        assert grid.dirichlet(u) >= 0.0


def test_build_grid_validation():
    with pytest.raises(ValueError):
        minimizer.build_grid(constants.circle(2 * math.pi), 16)


def test_distances(circle_grid, sphere_grid):
    d = circle_grid.distances(0)
    assert d[0] == 0.0
    assert np.max(d) <= math.pi + 1e-12  # half the circumference
    ds = sphere_grid.distances(0)
    assert np.max(ds) <= math.pi


def test_constant_is_critical_point(circle_grid, sphere_grid, torus_grid):
    # at the exact constant the Euler residual vanishes for any model
    for grid in (circle_grid, sphere_grid, torus_grid):
        state = minimizer.minimize(grid, 1.0, 1.0, 0.1,
                                   minimizer.constant_init(grid))
        assert state.converged
        assert state.residual <= 1e-8
        assert state.iterations == 0


def test_state_invariants(circle_grid):
    grid = circle_grid
    state = minimizer.minimize(grid, 0.5, 1.0, 0.1,
                               minimizer.bump_init(grid))
    assert state.converged
    u = state.u
    n = grid.model.dim
    assert np.all(u >= 0)
    assert abs(grid.integral(u**2) - 1.0) < 1e-10
    p = 4.0 / (n * (1.0 + state.eps_alpha))
    P = grid.integral(u ** (1.0 + state.eps_alpha))
    A = P**p
    assert abs(A - state.A_alpha) < 1e-12 * abs(state.A_alpha)
    E = grid.dirichlet(u)
    k = (4.0 / n) * state.mu_alpha + 2.0 * E * state.A_alpha
    assert abs(k - state.k_alpha) < 1e-10 * abs(state.k_alpha)


def test_minimize_rejects_negative_init(circle_grid):
    bad = -np.ones_like(circle_grid.nodes)
    with pytest.raises(ValueError):
        minimizer.minimize(circle_grid, 0.5, 1.0, 0.1, bad)


def test_objective_never_increases(circle_grid):
    grid = circle_grid
    init = minimizer.bump_init(grid)
    state = minimizer.minimize(grid, 0.5, 1.0, 0.1, init)
    before = minimizer.evaluate_I_alpha(init, grid, 0.5, 1.0, 0.1)
    after = minimizer.evaluate_I_alpha(state.u, grid, 0.5, 1.0, 0.1)
    assert after <= before * (1.0 + 1e-12)


def test_evaluate_rejects_zero(circle_grid):
    with pytest.raises(minimizer.DegenerateInput):
        minimizer.evaluate_I_alpha(np.zeros_like(circle_grid.nodes),
                                   circle_grid, 0.5, 1.0, 0.1)


def test_concentration_report_invariants(circle_grid, eig_by_dim,
                                         consts_by_dim):
    grid = circle_grid
    state = minimizer.minimize(grid, 0.5, 1.0, 0.1,
                               minimizer.bump_init(grid))
    ref = extremal.build_phi(eig_by_dim(1), consts_by_dim(1))
    rep = minimizer.concentration_diagnostics(state, grid, ref,
                                              deltas=(0.5, 1.0, 2.0))
    a = math.sqrt(state.A_alpha)
    vals = [rep.mass_in_ball[d] for d in (0.5, 1.0, 2.0)]
    l2 = [rep.l2_mass_in_ball[d] for d in (0.5, 1.0, 2.0)]
    for seq in (vals, l2):
        assert all(0.0 <= v <= 1.0 + 1e-12 for v in seq)
        assert all(b >= a_ - 1e-12 for a_, b in zip(seq, seq[1:]))
    assert rep.decay_sup >= 0.0
    # the rescaled profile abscissa is geodesic distance over a = sqrt(A)
    d = grid.distances(state.x_max_index)
    assert abs(rep.rescaled_profile.grid[-1] - np.max(d) / a) < 1e-12
    assert np.isfinite(rep.profile_deviation)


def test_sweep_requires_decreasing_alphas(circle_grid):
    with pytest.raises(ValueError):
        minimizer.alpha_sweep(circle_grid, [0.1, 0.5], 1.0,
                              eps_schedule=lambda a: 0.1)


def test_circle_sweep_all_constant(circle_grid):
    grid = circle_grid
    # small alpha0: the penalty is too weak to pay for any gradient,
    # so every minimizer along the sweep is the constant
    alpha0 = 0.1
    alphas = [0.06, 0.03, 0.01]
    result = minimizer.alpha_sweep(grid, alphas, alpha0,
                                   eps_schedule=lambda a: 0.2 * a)
    const = 1.0 / math.sqrt(grid.model.volume)
    for state in result.states:
        assert state.converged
        assert np.max(np.abs(state.u - const)) < 1e-6
    # constants carry no Dirichlet energy
    assert all(abs(g) < 1e-10 for g in result.trajectory["grad_times_A"])
    assert result.trajectory["alpha"] == alphas


def test_sweep_parallel_matches_serial(circle_grid, monkeypatch):
    grid = circle_grid
    monkeypatch.setenv("NASH_SHARP_THREADS", "2")
    serial = minimizer.alpha_sweep(grid, [0.5, 0.2], 1.0,
                                   eps_schedule=lambda a: 0.1,
                                   warm_start=True)
    parallel = minimizer.alpha_sweep(grid, [0.5, 0.2], 1.0,
                                     eps_schedule=lambda a: 0.1,
                                     warm_start=False)
    # output ordering is by alpha either way
    assert [s.alpha for s in parallel.states] == [0.5, 0.2]
    for a, b in zip(serial.states, parallel.states):
        assert np.max(np.abs(a.u - b.u)) < 1e-6


def test_max_workers_env(monkeypatch):
    monkeypatch.setenv("NASH_SHARP_THREADS", "3")
    assert minimizer._max_workers() == 3
    monkeypatch.setenv("NASH_SHARP_THREADS", "0")
    assert minimizer._max_workers() == 1
    monkeypatch.setenv("NASH_SHARP_THREADS", "nope")
    assert minimizer._max_workers() >= 1
