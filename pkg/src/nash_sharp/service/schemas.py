"""Request models shared by the HTTP endpoints and the CLI.

Every response embeds the request under a "config" key so a report is
reproducible from its own output.
"""

import math
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

ModelKind = Literal["circle", "sphere", "torus"]


class ConstantsRequest(BaseModel):
    command: Literal["constants"] = "constants"
    dim: int = Field(ge=1, le=16)


class EigenRequest(BaseModel):
    command: Literal["eigen"] = "eigen"
    dim: int = Field(ge=1, le=16)
    tol: float = Field(default=1e-10, gt=0.0)
    grid: int = Field(default=4096, ge=16)


class ProfileRequest(BaseModel):
    command: Literal["profile"] = "profile"
    dim: int = Field(ge=1, le=16)
    k: float = Field(default=1.0, gt=0.0)
    samples: int = Field(default=1024, ge=8)
    csv: Optional[str] = None


class VerifyRequest(BaseModel):
    command: Literal["verify"] = "verify"
    dim: int = Field(ge=1, le=16)
    trials: int = Field(ge=1)
    seed: int = 0


class ThresholdRequest(BaseModel):
    command: Literal["threshold"] = "threshold"
    model: ModelKind
    dim: int = Field(ge=1, le=16)
    radius: float = Field(default=1.0, gt=0.0)
    length: float = Field(default=2.0 * math.pi, gt=0.0)
    side: float = Field(default=1.0, gt=0.0)


class MinimizeRequest(BaseModel):
    command: Literal["minimize"] = "minimize"
    model: ModelKind
    dim: int = Field(ge=1, le=3)
    alpha: float = Field(gt=0.0)
    alpha0: Optional[float] = None
    eps: Optional[float] = Field(default=None, gt=0.0)
    resolution: int = Field(default=256, ge=32)
    init: Literal["constant", "bump"] = "bump"
    radius: float = Field(default=1.0, gt=0.0)
    length: float = Field(default=2.0 * math.pi, gt=0.0)
    side: float = Field(default=1.0, gt=0.0)
    max_iter: int = Field(default=200000, ge=1)
    tol: float = Field(default=1e-8, gt=0.0)
    alpha0_margin: float = Field(default=0.0, ge=0.0)


class SweepRequest(BaseModel):
    command: Literal["sweep"] = "sweep"
    model: ModelKind
    dim: int = Field(ge=1, le=3)
    alphas: List[float]
    alpha0: Optional[float] = None
    eps_scale: float = Field(default=1.0, gt=0.0)
    eps_power: float = Field(default=1.0, ge=1.0)
    resolution: int = Field(default=256, ge=32)
    init: Literal["constant", "bump"] = "bump"
    radius: float = Field(default=1.0, gt=0.0)
    length: float = Field(default=2.0 * math.pi, gt=0.0)
    side: float = Field(default=1.0, gt=0.0)
    deltas: List[float] = [1.0, 2.0, 4.0]
    max_iter: int = Field(default=200000, ge=1)
    tol: float = Field(default=1e-8, gt=0.0)
    alpha0_margin: float = Field(default=0.0, ge=0.0)
    warm_start: bool = True

    @field_validator("alphas")
    @classmethod
    def _decreasing_positive(cls, v):
        if not v:
            raise ValueError("alphas must be nonempty")
        if any(a <= 0 for a in v):
            raise ValueError("alphas must be positive")
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("alphas must be strictly decreasing")
        return v


REQUEST_TYPES = {
    "constants": ConstantsRequest,
    "eigen": EigenRequest,
    "profile": ProfileRequest,
    "verify": VerifyRequest,
    "threshold": ThresholdRequest,
    "minimize": MinimizeRequest,
    "sweep": SweepRequest,
}


def parse_config(data: dict):
    """Dispatch a serialized RunConfig dict to its request model."""
    command = data.get("command")
    if command not in REQUEST_TYPES:
        raise ValueError("unknown or missing command: %r" % (command,))
    return REQUEST_TYPES[command].model_validate(data)
