"""FastAPI application exposing each computation as a POST endpoint."""

from fastapi import FastAPI, HTTPException

from . import handlers, schemas

app = FastAPI(
    title="nash-sharp",
    description="Sharp L2-Nash constants, extremal profiles, curvature "
                "thresholds and penalized variational minimizers.",
)


def _run(handler, req):
    try:
        return handler(req)
    except (ValueError, RuntimeError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.post("/constants")
def constants(req: schemas.ConstantsRequest) -> dict:
    return _run(handlers.handle_constants, req)


@app.post("/eigen")
def eigen(req: schemas.EigenRequest) -> dict:
    return _run(handlers.handle_eigen, req)


@app.post("/profile")
def profile(req: schemas.ProfileRequest) -> dict:
    return _run(handlers.handle_profile, req)


@app.post("/verify")
def verify(req: schemas.VerifyRequest) -> dict:
    return _run(handlers.handle_verify, req)


@app.post("/threshold")
def threshold(req: schemas.ThresholdRequest) -> dict:
    return _run(handlers.handle_threshold, req)


@app.post("/minimize")
def minimize(req: schemas.MinimizeRequest) -> dict:
    return _run(handlers.handle_minimize, req)


@app.post("/sweep")
def sweep(req: schemas.SweepRequest) -> dict:
    return _run(handlers.handle_sweep, req)
