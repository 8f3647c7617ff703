"""
cubic_siegel.config
-------------------

Centralized configuration management for cubic-siegel.

All tolerances, budgets and pool sizes are loaded from environment variables
with the defaults documented in each module. Library functions take explicit
keyword overrides and fall back to these values when an argument is None.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

logger = logging.getLogger(__name__)

ENV_PREFIX = "CUBIC_SIEGEL_"


def _parse_bool(value: str) -> bool:
    """Parse boolean from environment variable string."""
    return value.lower() in ("true", "1", "yes", "on")


def _env(name: str, default: str) -> str:
    return os.getenv(ENV_PREFIX + name, default)


def default_threads() -> int:
    """Logical core count, never below one."""
    return max(1, os.cpu_count() or 1)


@dataclass(frozen=True)
class ServerConfig:
    """HTTP server configuration settings."""
    host: str = "0.0.0.0"
    port: int = 8000
    reload: bool = False
    workers: int = 1
    log_level: str = "info"


@dataclass(frozen=True)
class LinearizationConfig:
    """Linearization series, boundary sampling and membership tolerances."""
    terms: int = 256
    samples: int = 512
    max_terms: int = 2048
    safety: float = 0.999
    margin: float = 1e-3
    boundary_tol: float = 5e-3
    residual_gate: float = 1e-8
    boundary_residual: float = 1e-6
    newton_steps: int = 50
    newton_tol: float = 1e-12


@dataclass(frozen=True)
class OrbitConfig:
    """Orbit classification budgets."""
    max_iter: int = 2000
    acceptance_iter: int = 20000
    escape_radius: float = 1e4
    cycle_tol: float = 1e-9
    cycle_modulus: float = 0.99


@dataclass(frozen=True)
class RootConfig:
    """Root finder and census thresholds."""
    max_sweeps: int = 1000
    step_tol: float = 1e-13
    cluster_distance: float = 1e-7
    compensated_degree: int = 100
    census_residual: float = 1e-8
    simple_derivative: float = 1e-6


@dataclass(frozen=True)
class TraceConfig:
    """Parameter-ray continuation and Zakeri bisection settings."""
    r_start: float = 0.05
    r_stop: float = 0.995
    min_step: float = 1e-4
    max_step: float = 0.05
    fd_step: float = 1e-6
    ray_terms: int = 128
    max_failure_fraction: float = 0.05
    zakeri_bracket: float = 1e-4
    zakeri_tie: float = 1e-4


@dataclass(frozen=True)
class RenderConfig:
    """Renderer pool and per-pixel budgets."""
    threads: int = 1
    tile_size: int = 64
    series_terms: int = 96
    boundary_samples: int = 64
    coarse_step: int = 4
    max_iter: int = 500
    max_api_pixels: int = 256 * 256


@dataclass
class AppConfig:
    """Main application configuration."""
    server: ServerConfig
    linearization: LinearizationConfig
    orbit: OrbitConfig
    roots: RootConfig
    trace: TraceConfig
    render: RenderConfig

    # Environment
    environment: str = "development"
    debug: bool = False

    @classmethod
    def from_env(cls) -> AppConfig:
        """Load configuration from environment variables."""
        environment = _env("ENV", "development")
        is_production = environment == "production"

        server = ServerConfig(
            host=_env("HOST", "0.0.0.0"),
            port=int(_env("PORT", "8000")),
            reload=_parse_bool(_env("RELOAD", "false" if is_production else "true")),
            workers=int(_env("WORKERS", "4" if is_production else "1")),
            log_level=_env("LOG_LEVEL", "info"),
        )

        linearization = LinearizationConfig(
            terms=int(_env("TERMS", "256")),
            samples=int(_env("SAMPLES", "512")),
            max_terms=int(_env("MAX_TERMS", "2048")),
            safety=float(_env("SAFETY", "0.999")),
            margin=float(_env("MARGIN", "1e-3")),
            boundary_tol=float(_env("BOUNDARY_TOL", "5e-3")),
            residual_gate=float(_env("RESIDUAL_GATE", "1e-8")),
            boundary_residual=float(_env("BOUNDARY_RESIDUAL", "1e-6")),
        )

        orbit = OrbitConfig(
            max_iter=int(_env("MAX_ITER", "2000")),
            acceptance_iter=int(_env("ACCEPTANCE_ITER", "20000")),
            escape_radius=float(_env("ESCAPE_RADIUS", "1e4")),
            cycle_tol=float(_env("CYCLE_TOL", "1e-9")),
            cycle_modulus=float(_env("CYCLE_MODULUS", "0.99")),
        )

        roots = RootConfig(
            max_sweeps=int(_env("MAX_SWEEPS", "1000")),
            cluster_distance=float(_env("CLUSTER_DISTANCE", "1e-7")),
        )

        trace = TraceConfig(
            r_stop=float(_env("R_STOP", "0.995")),
            ray_terms=int(_env("RAY_TERMS", "128")),
        )

        render = RenderConfig(
            threads=int(_env("THREADS", str(default_threads()))),
            tile_size=int(_env("TILE_SIZE", "64")),
            series_terms=int(_env("RENDER_TERMS", "96")),
            coarse_step=int(_env("COARSE_STEP", "4")),
            max_iter=int(_env("RENDER_MAX_ITER", "500")),
            max_api_pixels=int(_env("MAX_API_PIXELS", str(256 * 256))),
        )

        return cls(
            server=server,
            linearization=linearization,
            orbit=orbit,
            roots=roots,
            trace=trace,
            render=render,
            environment=environment,
            debug=_parse_bool(_env("DEBUG", "false")),
        )

    def validate(self) -> list[str]:
        """Validate configuration and return list of issues."""
        issues = []

        if self.server.port < 1 or self.server.port > 65535:
            issues.append(f"Invalid port: {self.server.port}")

        lin = self.linearization
        if lin.terms < 32:
            issues.append("terms must be at least 32")
        if lin.max_terms < lin.terms:
            issues.append("max_terms must be at least terms")
        if lin.samples < 64:
            issues.append("samples must be at least 64")
        if not 0.0 < lin.safety <= 1.0:
            issues.append("safety must lie in (0, 1]")
        if not 0.0 < lin.margin < 0.5:
            issues.append("margin must lie in (0, 0.5)")

        if self.orbit.max_iter < 1:
            issues.append("max_iter must be at least 1")
        if self.orbit.escape_radius <= 1.0:
            issues.append("escape_radius must exceed 1")

        if not 0.0 < self.trace.r_stop < 1.0:
            issues.append("r_stop must lie in (0, 1)")

        if self.render.threads < 1:
            issues.append("threads must be at least 1")
        if self.render.tile_size < 8:
            issues.append("tile_size must be at least 8")
        if self.render.coarse_step < 1:
            issues.append("coarse_step must be at least 1")

        return issues


# Global configuration instance (lazy loaded)
_config: AppConfig | None = None


def get_config() -> AppConfig:
    """Get the application configuration (lazy loaded singleton)."""
    global _config
    if _config is None:
        _config = AppConfig.from_env()
        issues = _config.validate()
        if issues:
            for issue in issues:
                logger.error("Configuration error: %s", issue)
            if _config.environment == "production":
                raise ValueError(f"Configuration validation failed: {issues}")
    return _config


def reset_config() -> None:
    """Reset configuration (useful for testing)."""
    global _config
    _config = None
