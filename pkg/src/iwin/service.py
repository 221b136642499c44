"""HTTP service: upload studies, fetch renders/windows/masks/histograms.

Renders go over the wire as binary PGM (bit-depth exact, dependency-light);
the browser viewer decodes them client-side. Library errors surface as JSON
``{"error": <ErrorClassName>}`` with a 4xx status.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .core import histogram
from .errors import FormatError, IwinError
from .pgm import write_pgm
from .store import StudyStore
from .suppress import mask_to_pgm_samples
from .window import DEFAULT_STRATEGY, AutoWindowStrategy, WindowSettings, apply_window

PGM_MEDIA_TYPE = "image/x-portable-graymap"
MAX_HISTOGRAM_BINS = 1 << 16


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8000
    store_dir: Optional[Path] = None
    max_body_bytes: int = 64 * 1024 * 1024
    default_strategy: AutoWindowStrategy = field(default_factory=lambda: DEFAULT_STRATEGY)
    ui_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        if not 1 <= self.port <= 65535:
            raise ValueError("port must be in [1, 65535]")


def _error(status: int, name: str, detail: str = "") -> JSONResponse:
    body = {"error": name}
    if detail:
        body["detail"] = detail
    return JSONResponse(body, status_code=status)


def _parse_bool(value: Optional[str], default: bool = False) -> Optional[bool]:
    if value is None:
        return default
    lowered = value.lower()
    if lowered in ("1", "true", "yes"):
        return True
    if lowered in ("0", "false", "no"):
        return False
    return None


def default_ui_dir() -> Optional[Path]:
    env = os.environ.get("IWIN_UI_DIR")
    if env:
        return Path(env)
    candidate = Path.cwd() / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def create_app(config: ServiceConfig = ServiceConfig()) -> FastAPI:
    app = FastAPI(title="iwin", docs_url=None, redoc_url=None)
    store = StudyStore(config.store_dir)
    app.state.store = store
    app.state.config = config

    @app.get("/healthz")
    def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.post("/api/studies")
    async def upload_study(request: Request) -> Response:
        declared = request.headers.get("X-Format")
        if declared is not None and declared not in ("dicom", "pgm"):
            return _error(400, "UnknownFormat", f"X-Format {declared!r}")
        content_length = request.headers.get("content-length")
        if content_length and content_length.isdigit() and int(content_length) > config.max_body_bytes:
            return _error(413, "PayloadTooLarge")
        data = await request.body()
        if len(data) > config.max_body_bytes:
            return _error(413, "PayloadTooLarge")
        try:
            record = store.upload(data, declared)
        except FormatError as e:
            return _error(400, type(e).__name__, str(e))
        return JSONResponse(record.summary(), status_code=201)

    @app.get("/api/studies/{study_id}")
    def get_study(study_id: str) -> Response:
        record = store.get(study_id)
        if record is None:
            return _error(404, "UnknownStudy", study_id)
        return JSONResponse(record.summary())

    def _resolve_params(request: Request):
        """Shared render/auto-window query handling -> (suppress, strategy) or error."""
        suppress = _parse_bool(request.query_params.get("suppress"), default=False)
        if suppress is None:
            return None, _error(422, "BadParameter", "suppress must be a boolean")
        strategy_text = request.query_params.get("strategy")
        if strategy_text is None:
            strategy = config.default_strategy
        else:
            try:
                strategy = AutoWindowStrategy.parse(strategy_text)
            except ValueError as e:
                return None, _error(422, "UnknownStrategy", str(e))
        return (suppress, strategy), None

    @app.get("/api/studies/{study_id}/render")
    def get_render(study_id: str, request: Request) -> Response:
        record = store.get(study_id)
        if record is None:
            return _error(404, "UnknownStudy", study_id)
        params, err = _resolve_params(request)
        if err is not None:
            return err
        suppress, strategy = params

        ww_text = request.query_params.get("ww")
        wl_text = request.query_params.get("wl")
        warnings: list[str] = []
        if (ww_text is None) != (wl_text is None):
            return _error(422, "BadParameter", "ww and wl must be given together")
        if ww_text is not None:
            try:
                ww, wl = float(ww_text), float(wl_text)
            except ValueError:
                return _error(422, "BadParameter", "ww/wl must be numbers")
            if not (math.isfinite(ww) and math.isfinite(wl)):
                return _error(422, "BadParameter", "ww/wl must be finite")
            if ww < 1:
                return _error(422, "BadParameter", "ww must be >= 1")
            settings = WindowSettings(level=wl, width=ww)
        else:
            settings, warnings = store.auto_window_for(record, suppress, strategy)

        with record.lock:
            mask = record.mask
        render_mask = mask if (suppress and mask is not None) else None
        if suppress and mask is None:
            warnings = warnings + ["no mask available; rendered unsuppressed"]
        display = apply_window(record.image, settings, record.photometric, render_mask)
        headers = {"X-WW": repr(settings.width), "X-WL": repr(settings.level)}
        if warnings:
            headers["X-Warning"] = "; ".join(warnings)
        return Response(write_pgm(display.samples), media_type=PGM_MEDIA_TYPE, headers=headers)

    @app.get("/api/studies/{study_id}/auto-window")
    def get_auto_window(study_id: str, request: Request) -> Response:
        record = store.get(study_id)
        if record is None:
            return _error(404, "UnknownStudy", study_id)
        params, err = _resolve_params(request)
        if err is not None:
            return err
        suppress, strategy = params
        settings, warnings = store.auto_window_for(record, suppress, strategy)
        with record.lock:
            mask = record.mask
        if suppress and mask is not None and not warnings:
            fraction = mask.count / mask.bits.size
        else:
            fraction = 1.0
        return JSONResponse(
            {
                "ww": settings.width,
                "wl": settings.level,
                "strategy": strategy.key(),
                "suppress": suppress,
                "foreground_fraction": fraction,
                "warnings": warnings,
            }
        )

    @app.get("/api/studies/{study_id}/mask")
    def get_mask(study_id: str) -> Response:
        record = store.get(study_id)
        if record is None:
            return _error(404, "UnknownStudy", study_id)
        with record.lock:
            mask = record.mask
            provenance = record.mask_provenance
        if mask is None:
            return _error(404, "MaskUnavailable", study_id)
        return Response(
            write_pgm(mask_to_pgm_samples(mask)),
            media_type=PGM_MEDIA_TYPE,
            headers={"X-Mask-Provenance": provenance or ""},
        )

    @app.put("/api/studies/{study_id}/mask")
    async def put_mask(study_id: str, request: Request) -> Response:
        record = store.get(study_id)
        if record is None:
            return _error(404, "UnknownStudy", study_id)
        data = await request.body()
        if len(data) > config.max_body_bytes:
            return _error(413, "PayloadTooLarge")
        try:
            store.put_mask(record, data)
        except IwinError as e:
            return _error(400, type(e).__name__, str(e))
        return Response(status_code=204)

    @app.get("/api/studies/{study_id}/histogram")
    def get_histogram(study_id: str, request: Request) -> Response:
        record = store.get(study_id)
        if record is None:
            return _error(404, "UnknownStudy", study_id)
        suppress = _parse_bool(request.query_params.get("suppress"), default=False)
        if suppress is None:
            return _error(422, "BadParameter", "suppress must be a boolean")
        bins_text = request.query_params.get("bins")
        bins = None
        if bins_text is not None:
            if not bins_text.isdigit() or not 1 <= int(bins_text) <= MAX_HISTOGRAM_BINS:
                return _error(
                    422, "BadParameter", f"bins must be in [1, {MAX_HISTOGRAM_BINS}]"
                )
            bins = int(bins_text)
        with record.lock:
            mask = record.mask
        warnings: list[str] = []
        use_mask = mask if (suppress and mask is not None and mask.count > 0) else None
        if suppress and use_mask is None:
            warnings.append("no usable mask; full-image histogram")
        h = histogram(record.image, use_mask, bins)
        return JSONResponse(
            {
                "range_min": h.range_min,
                "range_max": h.range_max,
                "counts": h.counts.tolist(),
                "total": h.total,
                "warnings": warnings,
            }
        )

    ui_dir = config.ui_dir if config.ui_dir is not None else default_ui_dir()
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/")
        def index() -> PlainTextResponse:
            return PlainTextResponse(
                "iwin service is running. Build the viewer (frontend/dist) to serve the UI here."
            )

    return app
