"""
cubic_siegel.api
----------------

FastAPI application exposing cubic-siegel via HTTP.

Supported endpoints:
- /health - Liveness and configuration summary
- /rotation - Parse a rotation number, with convergents and multiplier
- /classify - Boundary verdict and critical-orbit classes of one parameter
- /centers - Capture-component centers up to level 4
- /siegel/boundary - Siegel boundary polyline of one map
- /render - Small parameter or dynamical plane renders as PNG

Entry points (after install):
    cubic-siegel-api   # convenience wrapper defined in pyproject.toml

Or manually:
    uvicorn cubic_siegel.api:app --reload
"""

from __future__ import annotations

import io
import logging
from typing import Any

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse

from .capture import CensusError, a_plane_centers, capture_centers, mirror_centers
from .classify import classify_parameter_a, classify_parameter_c
from .config import get_config
from .family import CubicSiegelMap, MapSlice, RotationNumber, make_rotation
from .render import Plane, RenderJob, render, write_image
from .siegel import LinearizationError, boundary_to_json, build_linearization, verdict_from_linearization
from .utils import parse_complex, read_and_cleanup, temp_output_context

logger = logging.getLogger(__name__)

API_MAX_LEVEL = 4

app = FastAPI(
    title="cubic-siegel API",
    description="""
Siegel disks, capture components and parameter planes of the critically
marked cubic family P_c(z) = λz + Az² + Bz³ with critical points 1 and c.

Complex query values use the grammar `RE+IMi`, e.g. `3+0i` or `-0.5-1.2i`.
Rotation numbers are `golden` or a periodic continued fraction like `[0;(2)]`.

| Endpoint | Description |
|----------|-------------|
| `/classify` | Boundary verdict plus free and passive critical orbit classes |
| `/centers` | Capture centers per level (counts 1, 3, 9, 27) |
| `/siegel/boundary` | Boundary polyline, conformal radius and verdict |
| `/render` | PNG render, pixel count capped by the server |
    """,
    version="0.1.0",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["GET", "OPTIONS"],
    allow_headers=["*"],
)


def _rotation(theta: str) -> RotationNumber:
    try:
        return make_rotation(theta)
    except ValueError as ve:
        raise HTTPException(status_code=400, detail=str(ve)) from ve


def _parameter(c: str | None, a: str | None) -> tuple[MapSlice, complex]:
    """Exactly one of ``c``/``a`` as a parsed parameter."""
    if (c is None) == (a is None):
        raise HTTPException(status_code=400, detail="Give exactly one of 'c' or 'a'.")
    try:
        if c is not None:
            value = parse_complex(c)
            if value == 0:
                raise ValueError("c-plane parameter must be nonzero")
            return MapSlice.C_PLANE, value
        return MapSlice.A_PLANE, parse_complex(a or "")
    except ValueError as ve:
        raise HTTPException(status_code=400, detail=str(ve)) from ve


@app.get("/health", tags=["meta"])
async def health() -> dict:
    """Health check endpoint."""
    cfg = get_config()
    return {
        "status": "ok",
        "environment": cfg.environment,
        "max_api_pixels": cfg.render.max_api_pixels,
        "max_level": API_MAX_LEVEL,
    }


@app.get("/rotation", tags=["meta"])
async def rotation_info(
    theta: str = Query("golden", description="Rotation number, 'golden' or e.g. '[0;(2)]'."),
    convergents: int = Query(8, ge=1, le=64, description="How many convergents to list."),
) -> dict:
    """Canonical form, value, multiplier and convergents of a rotation number."""
    rot = _rotation(theta)
    lam = rot.multiplier
    return {
        "theta": str(rot),
        "value": rot.value,
        "multiplier": [lam.real, lam.imag],
        "convergents": [list(pq) for pq in rot.convergents(convergents)],
    }


@app.get("/classify", tags=["parameters"])
def classify_endpoint(
    c: str | None = Query(None, description="Parameter of P_c, e.g. 3+0i."),
    a: str | None = Query(None, description="Parameter of f_a."),
    theta: str = Query("golden"),
    max_iter: int | None = Query(None, ge=1, le=20000, description="Orbit budget."),
) -> dict[str, Any]:
    """Classify one parameter: boundary verdict and both critical orbits."""
    rot = _rotation(theta)
    plane, value = _parameter(c, a)
    try:
        if plane is MapSlice.C_PLANE:
            result = classify_parameter_c(value, max_iter, rot)
        else:
            result = classify_parameter_a(value, max_iter, rot)
    except ValueError as ve:
        raise HTTPException(status_code=400, detail=str(ve)) from ve
    except (RuntimeError, ArithmeticError) as exc:
        logger.exception("Failed to classify %s=%s.", plane.value, value)
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return {"theta": str(rot), "slice": plane.value, **result.to_dict()}


@app.get("/centers", tags=["parameters"])
def centers_endpoint(
    theta: str = Query("golden"),
    max_level: int = Query(3, ge=1, le=API_MAX_LEVEL, description="Highest level."),
    include_mirror: bool = Query(False, description="Add the interior centers 1/c."),
    a_plane: bool = Query(False, description="Also list the a-plane centers."),
) -> dict[str, Any]:
    """Capture-component centers per level."""
    rot = _rotation(theta)
    try:
        census = capture_centers(rot, max_level)
    except CensusError as exc:
        logger.exception("Census failed at level %d.", exc.level)
        raise HTTPException(status_code=422, detail=str(exc)) from exc

    levels = []
    for level in range(1, max_level + 1):
        centers = census.centers(level)
        entry: dict[str, Any] = {
            "level": level,
            "centers": [[z.real, z.imag] for z in centers],
        }
        if include_mirror:
            entry["mirror"] = [[z.real, z.imag] for z in mirror_centers(centers)]
        if a_plane:
            entry["a_plane"] = [[z.real, z.imag] for z in a_plane_centers(centers, rot)]
        levels.append(entry)
    return {"theta": str(rot), "counts": list(census.counts), "levels": levels}


@app.get("/siegel/boundary", tags=["dynamics"])
def siegel_boundary_endpoint(
    c: str | None = Query(None, description="Parameter of P_c."),
    a: str | None = Query(None, description="Parameter of f_a."),
    theta: str = Query("golden"),
    terms: int | None = Query(None, ge=32, le=2048, description="Series terms."),
    samples: int | None = Query(None, ge=64, le=4096, description="Boundary samples."),
) -> dict[str, Any]:
    """Siegel boundary polyline, conformal radius and, for P_c, the boundary verdict."""
    rot = _rotation(theta)
    plane, value = _parameter(c, a)
    map = CubicSiegelMap.p_c(value, rot) if plane is MapSlice.C_PLANE else CubicSiegelMap.f_a(value, rot)
    try:
        lin = build_linearization(map, terms=terms, samples=samples)
    except (LinearizationError, ArithmeticError) as exc:
        logger.exception("Failed to linearize %s=%s.", plane.value, value)
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    payload = boundary_to_json(lin)
    if plane is MapSlice.C_PLANE:
        payload["verdict"] = verdict_from_linearization(lin).to_dict()
    return payload


@app.get("/render", tags=["render"])
def render_endpoint(
    plane: Plane = Query(Plane.PARAM_C, description="param-c, param-a or dyn."),
    center: str | None = Query(None, description="Window center (default: the plane's default)."),
    width: float | None = Query(None, gt=0, description="Window width in plane units."),
    columns: int = Query(128, ge=1, description="Pixels per row."),
    rows: int = Query(128, ge=1, description="Pixel rows."),
    c: str | None = Query(None, description="Parameter of P_c (dyn only)."),
    a: str | None = Query(None, description="Parameter of f_a (dyn only)."),
    theta: str = Query("golden"),
    max_iter: int | None = Query(None, ge=1, le=5000, description="Orbit budget per sample."),
    supersample: int = Query(1, description="Samples per pixel axis: 1, 2 or 4."),
):
    """Render a small plane image and stream it back as PNG."""
    cfg = get_config().render
    if columns * rows > cfg.max_api_pixels:
        raise HTTPException(
            status_code=400,
            detail=f"{columns}x{rows} exceeds the limit of {cfg.max_api_pixels} pixels; use the CLI for large renders.",
        )
    rot = _rotation(theta)
    extra: dict[str, Any] = {}
    if plane is Plane.DYNAMICAL:
        dyn_slice, value = _parameter(c, a)
        extra.update(parameter=value, dynamical_slice=dyn_slice)
    try:
        if center is not None:
            extra["center"] = parse_complex(center)
        if width is not None:
            extra["width"] = width
        job = RenderJob.default(
            plane,
            resolution=(columns, rows),
            rotation=rot,
            max_iter=max_iter,
            supersample=supersample,
            **extra,
        )
        job.validate()
    except ValueError as ve:
        raise HTTPException(status_code=400, detail=str(ve)) from ve

    try:
        buf = render(job)
        with temp_output_context(".png") as out_path:
            write_image(buf, out_path, "png")
            result = read_and_cleanup(out_path)
    except (RuntimeError, ArithmeticError) as exc:
        logger.exception("Failed to render %s.", plane.value)
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except OSError as exc:
        logger.exception("Failed to write render output.")
        raise HTTPException(status_code=500, detail="Internal server error") from exc

    headers = {f"X-Class-{name.capitalize()}": str(count) for name, count in buf.histogram.items()}
    return StreamingResponse(io.BytesIO(result), media_type="image/png", headers=headers)


def run() -> None:
    """Convenience entrypoint for `cubic-siegel-api` script."""
    import uvicorn

    server = get_config().server
    logging.basicConfig(level=getattr(logging, server.log_level.upper(), logging.INFO))
    uvicorn.run(
        "cubic_siegel.api:app",
        host=server.host,
        port=server.port,
        reload=server.reload,
        workers=None if server.reload else server.workers,
        log_level=server.log_level,
    )
