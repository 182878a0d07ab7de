"""Command-line client: validates flags into the shared request models
and dispatches in-process to the same handlers the HTTP service uses.

All floats are serialized with 17 significant digits so identical
configurations reproduce byte-identical reports.
"""

import json
import sys

import click
import numpy as np
import pydantic

from .service import handlers, schemas


def _fmt_float(x):
    if x != x:
        return "NaN"
    if x == float("inf"):
        return "Infinity"
    if x == float("-inf"):
        return "-Infinity"
    return "%.17g" % x


def render_json(obj, indent=0):
    """JSON with deterministic 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            "%s%s: %s" % (inner, json.dumps(str(k)),
                          render_json(v, indent + 1))
            for k, v in obj.items()
        )
        return "{\n%s\n%s}" % (items, pad)
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = ",\n".join(
            "%s%s" % (inner, render_json(v, indent + 1)) for v in obj
        )
        return "[\n%s\n%s]" % (items, pad)
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _emit(report, output):
    text = render_json(report) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _run(ctx, req):
    try:
        report = handlers.dispatch(req)
    except (ValueError, RuntimeError) as exc:
        click.echo("error: %s" % exc, err=True)
        sys.exit(1)
    _emit(report, ctx.obj.get("output"))


def _validate(ctx, request_cls, **kwargs):
    try:
        return request_cls(**kwargs)
    except pydantic.ValidationError as exc:
        raise click.UsageError(str(exc))


@click.group(invoke_without_command=True)
@click.option("--json-config", default=None,
              help="Serialized RunConfig (inline JSON or a file path); "
                   "overrides subcommands.")
@click.option("--output", default=None, type=click.Path(),
              help="Write the JSON report to this path instead of stdout.")
@click.pass_context
def main(ctx, json_config, output):
    """Sharp L2-Nash constants, extremal profiles, curvature thresholds
    and penalized variational minimizers."""
    ctx.ensure_object(dict)
    ctx.obj["output"] = output
    if json_config is not None:
        raw = json_config
        if not raw.lstrip().startswith("{"):
            with open(raw) as fh:
                raw = fh.read()
        try:
            req = schemas.parse_config(json.loads(raw))
        except (ValueError, pydantic.ValidationError) as exc:
            raise click.UsageError(str(exc))
        _run(ctx, req)
        ctx.exit(0)
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        ctx.exit(2)


@main.command()
@click.option("--dim", required=True, type=int)
@click.pass_context
def constants(ctx, dim):
    """Closed-form constants a0, lambda0 and the threshold coefficient."""
    _run(ctx, _validate(ctx, schemas.ConstantsRequest, dim=dim))


@main.command()
@click.option("--dim", required=True, type=int)
@click.option("--tol", default=1e-10, type=float)
@click.option("--grid", default=4096, type=int)
@click.pass_context
def eigen(ctx, dim, tol, grid):
    """First nonzero radial Neumann eigenvalue of the unit ball."""
    _run(ctx, _validate(ctx, schemas.EigenRequest, dim=dim, tol=tol,
                        grid=grid))


@main.command()
@click.option("--dim", required=True, type=int)
@click.option("--k", default=1.0, type=float)
@click.option("--samples", default=1024, type=int)
@click.option("--csv", default=None, type=click.Path())
@click.pass_context
def profile(ctx, dim, k, samples, csv):
    """Compactly supported extremal profile and its integrals."""
    _run(ctx, _validate(ctx, schemas.ProfileRequest, dim=dim, k=k,
                        samples=samples, csv=csv))


@main.command()
@click.option("--dim", required=True, type=int)
@click.option("--trials", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.pass_context
def verify(ctx, dim, trials, seed):
    """Randomized lower-bound check of the Nash quotient."""
    _run(ctx, _validate(ctx, schemas.VerifyRequest, dim=dim,
                        trials=trials, seed=seed))


@main.command()
@click.option("--model", required=True,
              type=click.Choice(["circle", "sphere", "torus"]))
@click.option("--dim", required=True, type=int)
@click.option("--radius", default=1.0, type=float)
@click.option("--length", default=2.0 * np.pi, type=float)
@click.option("--side", default=1.0, type=float)
@click.pass_context
def threshold(ctx, model, dim, radius, length, side):
    """Curvature threshold and the volume-margin verdict."""
    _run(ctx, _validate(ctx, schemas.ThresholdRequest, model=model,
                        dim=dim, radius=radius, length=length, side=side))


@main.command()
@click.option("--model", required=True,
              type=click.Choice(["circle", "sphere", "torus"]))
@click.option("--dim", required=True, type=int)
@click.option("--alpha", required=True, type=float)
@click.option("--alpha0", default=None, type=float)
@click.option("--eps", default=None, type=float)
@click.option("--resolution", default=256, type=int)
@click.option("--init", default="bump",
              type=click.Choice(["constant", "bump"]))
@click.pass_context
def minimize(ctx, model, dim, alpha, alpha0, eps, resolution, init):
    """Penalized variational minimizer on a model manifold."""
    _run(ctx, _validate(ctx, schemas.MinimizeRequest, model=model,
                        dim=dim, alpha=alpha, alpha0=alpha0, eps=eps,
                        resolution=resolution, init=init))


@main.command()
@click.option("--model", required=True,
              type=click.Choice(["circle", "sphere", "torus"]))
@click.option("--dim", required=True, type=int)
@click.option("--alphas", required=True,
              help="Comma-separated decreasing positive values.")
@click.option("--alpha0", default=None, type=float)
@click.option("--resolution", default=256, type=int)
@click.option("--init", default="bump",
              type=click.Choice(["constant", "bump"]))
@click.pass_context
def sweep(ctx, model, dim, alphas, alpha0, resolution, init):
    """Warm-started minimization along a decreasing alpha schedule."""
    try:
        values = [float(a) for a in alphas.split(",") if a.strip()]
    except ValueError:
        raise click.UsageError("--alphas must be comma-separated numbers")
    _run(ctx, _validate(ctx, schemas.SweepRequest, model=model, dim=dim,
                        alphas=values, alpha0=alpha0,
                        resolution=resolution, init=init))


if __name__ == "__main__":
    main()
