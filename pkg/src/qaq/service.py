"""HTTP scoring service.

Wraps the scorers for long-running, multi-client use: a pristine model is
loaded once into a registry and scored against from any number of clients.
Images and gradient fields travel as contiguous row-major float64 buffers,
base64-encoded (or as plain JSON arrays), with explicit (height, width)
shape.  The service never mutates request buffers and never lets a library
error escape as a bare 500: failures map to structured
``{"error": {"code", "message", "field"}}`` payloads.
"""

from __future__ import annotations

import base64
import binascii
import threading
import uuid
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator

from . import __version__
from .errors import (
    DegenerateDataError,
    DimensionError,
    DomainError,
    InputError,
    ModelIncompatibilityError,
    QaqError,
)
from .mscn import FeatureConfig, extract_features
from .mvg import MvgModel, load_model, niqe_distance, score_image
from .ssim import SsimParams, dq_distance, ssim_gp_penalty, ssim_index

_ERROR_CODES = {
    DimensionError: "dimension",
    DomainError: "domain",
    DegenerateDataError: "degenerate_data",
    ModelIncompatibilityError: "model_incompatible",
    InputError: "input",
}


def _error_code(exc: QaqError) -> str:
    for cls in type(exc).__mro__:
        if cls in _ERROR_CODES:
            return _ERROR_CODES[cls]
    return "error"


class BufferPayload(BaseModel):
    """Row-major float64 image buffer with explicit shape.

    Exactly one of ``data_b64`` (base64 of little-endian float64 bytes) or
    ``data`` (JSON array of numbers) must be present.
    """

    height: int = Field(ge=1)
    width: int = Field(ge=1)
    data_b64: Optional[str] = None
    data: Optional[list[float]] = None

    @model_validator(mode="after")
    def _exactly_one_payload(self):
        if (self.data_b64 is None) == (self.data is None):
            raise ValueError("provide exactly one of data_b64 or data")
        return self

    def to_array(self, field: str) -> np.ndarray:
        if self.data_b64 is not None:
            try:
                raw = base64.b64decode(self.data_b64, validate=True)
            except (binascii.Error, ValueError):
                raise DomainError(f"{field}.data_b64 is not valid base64") from None
            if len(raw) % 8:
                raise DomainError(f"{field}.data_b64 length is not a multiple of 8")
            flat = np.frombuffer(raw, dtype="<f8")
        else:
            flat = np.asarray(self.data, dtype=np.float64)
        if flat.size != self.height * self.width:
            raise DimensionError(
                f"{field}: buffer holds {flat.size} values, expected "
                f"{self.height}x{self.width}={self.height * self.width}"
            )
        if not np.all(np.isfinite(flat)):
            raise DomainError(f"{field}: buffer contains non-finite values")
        # Copy so downstream math can never alias request memory.
        return flat.reshape(self.height, self.width).astype(np.float64, copy=True)


class SsimParamsPayload(BaseModel):
    c1: float = Field(default=(0.01 * 255.0) ** 2, gt=0)
    c2: float = Field(default=(0.03 * 255.0) ** 2, gt=0)

    def to_params(self) -> SsimParams:
        return SsimParams(c1=self.c1, c2=self.c2)


class FeatureConfigPayload(BaseModel):
    patch_size: int = Field(default=96, ge=2)
    sharpness_fraction: float = Field(default=0.75, ge=0.0, le=1.0)
    scales: int = Field(default=2, ge=1, le=2)

    def to_config(self) -> FeatureConfig:
        return FeatureConfig(
            patch_size=self.patch_size,
            sharpness_fraction=self.sharpness_fraction,
            scales=self.scales,
        )


class PairRequest(BaseModel):
    reference: BufferPayload
    test: BufferPayload
    params: SsimParamsPayload = SsimParamsPayload()


class SsimGpRequest(BaseModel):
    d_x: float
    d_y: float
    x: BufferPayload
    y: BufferPayload
    params: SsimParamsPayload = SsimParamsPayload()
    floor: float = Field(default=1e-8, gt=0)


class ExtractFeaturesRequest(BaseModel):
    image: BufferPayload
    config: FeatureConfigPayload = FeatureConfigPayload()


class LoadModelRequest(BaseModel):
    path: str


class NiqeDistanceRequest(BaseModel):
    model_a: str
    model_b: str


class NiqeGpRequest(BaseModel):
    grad: BufferPayload
    model_id: str


class ValueResponse(BaseModel):
    value: float


class FeaturesResponse(BaseModel):
    features: list[float]


class ModelInfo(BaseModel):
    model_id: str
    feature_dim: int
    meta: dict


class _ModelRegistry:
    """Loaded models, immutable after registration; reads are lock-free."""

    def __init__(self):
        self._models: dict[str, MvgModel] = {}
        self._lock = threading.Lock()

    def add(self, model: MvgModel) -> str:
        model_id = uuid.uuid4().hex
        with self._lock:
            self._models[model_id] = model
        return model_id

    def get(self, model_id: str) -> MvgModel:
        try:
            return self._models[model_id]
        except KeyError:
            raise InputError(f"unknown model_id {model_id!r}") from None

    def list_ids(self) -> list[str]:
        return list(self._models)


def create_app() -> FastAPI:
    app = FastAPI(title="qaq scoring service", version=__version__)
    registry = _ModelRegistry()
    app.state.models = registry

    @app.exception_handler(QaqError)
    async def _qaq_error(_request: Request, exc: QaqError):
        status = 409 if isinstance(exc, ModelIncompatibilityError) else 400
        return JSONResponse(
            status_code=status,
            content={"error": {"code": _error_code(exc), "message": str(exc)}},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", ()) if p != "body")
        return JSONResponse(
            status_code=422,
            content={
                "error": {
                    "code": "validation",
                    "field": field,
                    "message": first.get("msg", "invalid request"),
                }
            },
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/ssim-index", response_model=ValueResponse)
    def ssim_index_endpoint(req: PairRequest):
        ref = req.reference.to_array("reference")
        test = req.test.to_array("test")
        return ValueResponse(value=ssim_index(ref, test, req.params.to_params()))

    @app.post("/v1/dq-distance", response_model=ValueResponse)
    def dq_distance_endpoint(req: PairRequest):
        ref = req.reference.to_array("reference")
        test = req.test.to_array("test")
        return ValueResponse(value=dq_distance(ref, test, req.params.to_params()))

    @app.post("/v1/ssim-gp", response_model=ValueResponse)
    def ssim_gp_endpoint(req: SsimGpRequest):
        x = req.x.to_array("x")
        y = req.y.to_array("y")
        value = ssim_gp_penalty(
            req.d_x, req.d_y, x, y, req.params.to_params(), floor=req.floor
        )
        return ValueResponse(value=value)

    @app.post("/v1/extract-features", response_model=FeaturesResponse)
    def extract_features_endpoint(req: ExtractFeaturesRequest):
        img = req.image.to_array("image")
        feats = extract_features(img, req.config.to_config())
        return FeaturesResponse(features=feats.tolist())

    @app.post("/v1/models", response_model=ModelInfo)
    def load_model_endpoint(req: LoadModelRequest):
        model = load_model(req.path)
        model_id = registry.add(model)
        meta = model.meta.__dict__ if model.meta is not None else {}
        return ModelInfo(model_id=model_id, feature_dim=model.dim, meta=dict(meta))

    @app.get("/v1/models")
    def list_models_endpoint():
        return {"model_ids": registry.list_ids()}

    @app.post("/v1/niqe-distance", response_model=ValueResponse)
    def niqe_distance_endpoint(req: NiqeDistanceRequest):
        a = registry.get(req.model_a)
        b = registry.get(req.model_b)
        return ValueResponse(value=niqe_distance(a, b))

    @app.post("/v1/niqe-gp", response_model=ValueResponse)
    def niqe_gp_endpoint(req: NiqeGpRequest):
        model = registry.get(req.model_id)
        grad = req.grad.to_array("grad")
        return ValueResponse(value=score_image(grad, model))

    return app


app = create_app()
