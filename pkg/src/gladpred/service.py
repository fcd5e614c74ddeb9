"""HTTP endpoint exposing concise-model predictions with margin intervals.

Direction convention: a positive predicted change is improvement, so the
expected post-program pain is baseline minus predicted change, clamped to the
0-100 pain scale. The interval is post-pain +/- margin (clamped), and the
certainty percentage is the bundle's cross-validated rho at that margin.
"""

import logging
import uuid

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import ArgumentError, ValidationError
from .modelstore import ModelBundle
from .schema import Continuous, builtin_dictionary
from .selection import CONCISE_IDS

DEFAULT_MARGIN = 15.0

log = logging.getLogger("gladpred.service")


def validate_request_fields(bundle: ModelBundle, payload: dict) -> tuple[dict[str, float], list[str]]:
    """Parse the model's input fields from a request payload.

    Returns (values, offending_fields); a field offends when missing,
    non-numeric, or outside its dictionary bounds.
    """
    dictionary = builtin_dictionary(bundle.dict_edition)
    values: dict[str, float] = {}
    bad: list[str] = []
    for vid, _ in bundle.feature_layout.entries:
        spec = dictionary.get(vid)
        raw = payload.get(vid)
        try:
            value = float(raw)
        except (TypeError, ValueError):
            bad.append(vid)
            continue
        if not np.isfinite(value):
            bad.append(vid)
            continue
        if isinstance(spec.kind, Continuous) and not (spec.kind.min <= value <= spec.kind.max):
            bad.append(vid)
            continue
        values[vid] = value
    return values, bad


def prediction_response(bundle: ModelBundle, values: dict[str, float], margin: float = DEFAULT_MARGIN) -> dict:
    """Predicted change, post-pain interval, and certainty for one record."""
    if margin <= 0:
        raise ArgumentError("margin must be > 0")
    vec = np.array([values[vid] for vid, _ in bundle.feature_layout.entries], dtype=np.float64)
    change = bundle.predict(vec)

    used_margin = margin
    warning = None
    if margin not in bundle.certainty:
        used_margin = bundle.nearest_margin(margin)
        warning = f"margin {margin:g} not in bundle; certainty taken at nearest margin {used_margin:g}"
    certainty_pct = 100.0 * bundle.certainty[used_margin]

    response = {
        "predicted_change": change,
        "certainty_pct": certainty_pct,
        "model_info": {
            "dict_edition": bundle.dict_edition,
            "variant": bundle.variant_label,
            "bundle_hash": bundle.bundle_hash,
        },
    }
    if "baseline_pain" in values:
        post = values["baseline_pain"] - change
        lower = min(max(post - margin, 0.0), 100.0)
        upper = min(max(post + margin, 0.0), 100.0)
        response["predicted_post_pain"] = min(max(post, 0.0), 100.0)
        response["interval"] = {"lower": lower, "upper": upper, "margin": margin}
    else:
        response["interval"] = {"lower": change - margin, "upper": change + margin, "margin": margin}
    if warning:
        response["warning"] = warning
    return response


def model_info_payload(bundle: "ModelBundle | None") -> dict:
    if bundle is None:
        return {"model_loaded": False}
    payload = {
        "model_loaded": True,
        "dict_edition": bundle.dict_edition,
        "dict_hash": bundle.dict_hash,
        "variant": bundle.variant_label,
        "bundle_hash": bundle.bundle_hash,
        "features": [vid for vid, _ in bundle.feature_layout.entries],
        "certainty": {f"{m:g}": r for m, r in sorted(bundle.certainty.items())},
        "train_outcome_stats": bundle.train_outcome_stats.to_json_obj(),
    }
    if bundle.certainty_average is not None:
        payload["certainty_average"] = {f"{m:g}": r for m, r in sorted(bundle.certainty_average.items())}
    if bundle.evaluation is not None:
        payload["evaluation"] = dict(bundle.evaluation)
    return payload


def check_serveable(bundle: ModelBundle) -> None:
    """The service exposes only the six-variable concise model."""
    ids = set(bundle.feature_layout.ids)
    if ids != set(CONCISE_IDS):
        raise ValidationError(
            f"service requires a concise bundle with features {sorted(CONCISE_IDS)}, got {sorted(ids)}"
        )


def create_app(bundle: "ModelBundle | None", static_dir=None, cors_origins=("*",)):
    """Build the FastAPI app; `bundle` may be None for a degraded health probe."""
    if bundle is not None:
        check_serveable(bundle)

    app = FastAPI(title="gladpred", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        request_id = uuid.uuid4().hex[:12]
        response = await call_next(request)
        log.info("request %s %s %s -> %s", request_id, request.method, request.url.path, response.status_code)
        response.headers["x-request-id"] = request_id
        return response

    @app.get("/health")
    def health():
        return {
            "status": "ok" if bundle is not None else "degraded",
            "model_loaded": bundle is not None,
            "dict_hash": bundle.dict_hash if bundle is not None else None,
        }

    @app.get("/model")
    def model_info():
        return model_info_payload(bundle)

    @app.post("/predict")
    async def predict_endpoint(request: Request):
        if bundle is None:
            return JSONResponse(status_code=500, content={"error": "no model loaded", "fields": []})
        try:
            payload = await request.json()
        except Exception:
            payload = None
        if not isinstance(payload, dict):
            return JSONResponse(status_code=422, content={"error": "request body must be a JSON object", "fields": []})

        margin = payload.get("margin", DEFAULT_MARGIN)
        try:
            margin = float(margin)
        except (TypeError, ValueError):
            return JSONResponse(status_code=422, content={"error": "margin must be a number", "fields": ["margin"]})
        if margin <= 0:
            return JSONResponse(status_code=422, content={"error": "margin must be > 0", "fields": ["margin"]})

        values, bad = validate_request_fields(bundle, payload)
        if bad:
            return JSONResponse(
                status_code=422,
                content={"error": "missing or out-of-range fields", "fields": bad},
            )
        try:
            return prediction_response(bundle, values, margin)
        except Exception:
            log.exception("prediction failed")
            return JSONResponse(status_code=500, content={"error": "internal prediction failure", "fields": []})

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
