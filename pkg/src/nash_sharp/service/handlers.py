"""Command handlers shared by the FastAPI routes and the CLI.

Each handler takes a validated request model and returns a plain dict
(JSON-ready except for float formatting, which the caller controls).
"""

from functools import lru_cache

import numpy as np

from .. import ball_eigen, constants, extremal, functional, minimizer
from . import schemas

ZONAL_CAVEAT = ("minimization restricted to zonally symmetric functions; "
                "non-symmetric minimizers are not explored")


@lru_cache(maxsize=32)
def _eig(dim, tol=1e-10, grid_size=4096):
    return ball_eigen.solve_lambda1(dim, tol=tol, grid_size=grid_size)


def _build_model(kind, dim, radius, length, side):
    if kind == "circle":
        if dim != 1:
            raise ValueError("circle model requires dim=1")
        return constants.circle(length)
    if kind == "sphere":
        return constants.round_sphere(dim, radius)
    return constants.flat_torus(dim, side)


def _default_alpha0(model, consts, margin):
    """alpha0 from the best known lower bound for the optimal L2
    coefficient: the max of Vol^{-2/n} and the curvature threshold,
    scaled by the sharp constant (with a relative safety margin)."""
    n = consts.dim
    cand = max(model.volume ** (-2.0 / n),
               constants.threshold(n, consts, model))
    return cand * (1.0 + margin) / consts.a0


def handle_constants(req: schemas.ConstantsRequest):
    consts = constants.compute_constants(req.dim, _eig(req.dim))
    out = {"config": req.model_dump()}
    out.update(consts.to_dict())
    return out


def handle_eigen(req: schemas.EigenRequest):
    eig = ball_eigen.solve_lambda1(req.dim, tol=req.tol,
                                   grid_size=req.grid)
    return {
        "config": req.model_dump(),
        "dim": eig.dim,
        "lambda1": eig.lambda1,
        "u_at_1": eig.u_at_1,
        "derivative_at_1": eig.derivative_at_1,
        "grid_points": len(eig.grid),
    }


def handle_profile(req: schemas.ProfileRequest):
    eig = _eig(req.dim)
    consts = constants.compute_constants(req.dim, eig)
    phi = extremal.build_phi(eig, consts, k=req.k)
    r = np.linspace(0.0, phi.support_radius, req.samples)
    sampled = extremal.RadialFunction(req.dim, r, phi(r),
                                      phi.support_radius)
    report = functional.evaluate(phi, consts)
    out = {
        "config": req.model_dump(),
        "dim": req.dim,
        "k": req.k,
        "lambda0": consts.lambda0,
        "support_radius": phi.support_radius,
        "value_at_0": float(phi(np.array([0.0]))[0]),
        "l1": report.l1_term,
        "l2": report.l2_term,
        "dirichlet": report.gradient_term,
        "nash_value": report.value,
        "normalized": report.normalized,
    }
    if req.csv is not None:
        extremal.dump_csv(sampled, req.csv)
        out["csv"] = req.csv
    return out


def handle_verify(req: schemas.VerifyRequest):
    eig = _eig(req.dim, grid_size=1024)
    consts = constants.compute_constants(req.dim, eig)
    result = functional.property_suite(req.dim, consts, req.trials,
                                       req.seed, eig=eig)
    out = {"config": req.model_dump()}
    out.update(result)
    return out


def handle_threshold(req: schemas.ThresholdRequest):
    model = _build_model(req.model, req.dim, req.radius, req.length,
                         req.side)
    consts = constants.compute_constants(req.dim, _eig(req.dim))
    t = constants.threshold(req.dim, consts, model)
    verdict, margin = constants.corollary_check(consts, model)
    return {
        "config": req.model_dump(),
        "model": model.to_dict(),
        "threshold": t,
        "verdict": verdict,
        "margin": margin,
    }


def _state_record(state, report=None):
    rec = {
        "alpha": state.alpha,
        "alpha0": state.alpha0,
        "eps_alpha": state.eps_alpha,
        "mu_alpha": state.mu_alpha,
        "A_alpha": state.A_alpha,
        "B_alpha": state.B_alpha,
        "k_alpha": state.k_alpha,
        "residual": state.residual,
        "iterations": state.iterations,
        "x_max_index": state.x_max_index,
        "converged": state.converged,
        "u_max": float(np.max(state.u)),
    }
    if report is not None:
        rec["mass_in_ball"] = {"%g" % d: v
                               for d, v in report.mass_in_ball.items()}
        rec["l2_mass_in_ball"] = {"%g" % d: v
                                  for d, v in report.l2_mass_in_ball.items()}
        rec["decay_sup"] = report.decay_sup
        rec["profile_deviation"] = report.profile_deviation
    return rec


def handle_minimize(req: schemas.MinimizeRequest):
    model = _build_model(req.model, req.dim, req.radius, req.length,
                         req.side)
    consts = constants.compute_constants(req.dim, _eig(req.dim))
    grid = minimizer.build_grid(model, req.resolution)
    alpha0 = req.alpha0
    if alpha0 is None:
        alpha0 = _default_alpha0(model, consts, req.alpha0_margin)
    eps = req.eps if req.eps is not None else req.alpha * consts.a0
    init = (minimizer.bump_init(grid) if req.init == "bump"
            else minimizer.constant_init(grid))
    state = minimizer.minimize(grid, req.alpha, alpha0, eps, init,
                               max_iter=req.max_iter, tol=req.tol)
    out = {"config": req.model_dump(), "model": model.to_dict()}
    out.update(_state_record(state))
    if req.model == "sphere":
        out["caveat"] = ZONAL_CAVEAT
    return out


def handle_sweep(req: schemas.SweepRequest):
    model = _build_model(req.model, req.dim, req.radius, req.length,
                         req.side)
    eig = _eig(req.dim)
    consts = constants.compute_constants(req.dim, eig)
    grid = minimizer.build_grid(model, req.resolution)
    alpha0 = req.alpha0
    if alpha0 is None:
        alpha0 = _default_alpha0(model, consts, req.alpha0_margin)
    # eps schedule: eps_scale * a0 * alpha at eps_power=1; larger powers
    # shrink eps faster along the sweep while keeping the first value.
    scale = req.eps_scale * consts.a0
    a1 = req.alphas[0]
    power = req.eps_power
    init = (minimizer.bump_init(grid) if req.init == "bump"
            else minimizer.constant_init(grid))
    reference = extremal.build_phi(eig, consts)
    result = minimizer.alpha_sweep(
        grid, req.alphas, alpha0,
        eps_schedule=lambda a: scale * a * (a / a1) ** (power - 1.0),
        init=init, reference=reference, deltas=tuple(req.deltas),
        max_iter=req.max_iter, tol=req.tol, warm_start=req.warm_start,
    )
    records = [_state_record(s, r)
               for s, r in zip(result.states, result.reports)]
    out = {
        "config": req.model_dump(),
        "model": model.to_dict(),
        "alpha0": alpha0,
        "records": records,
        "trajectory": result.trajectory,
    }
    if req.model == "sphere":
        out["caveat"] = ZONAL_CAVEAT
    return out


HANDLERS = {
    "constants": handle_constants,
    "eigen": handle_eigen,
    "profile": handle_profile,
    "verify": handle_verify,
    "threshold": handle_threshold,
    "minimize": handle_minimize,
    "sweep": handle_sweep,
}


def dispatch(req):
    return HANDLERS[req.command](req)
