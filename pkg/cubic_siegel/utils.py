"""
cubic_siegel.utils
------------------

Helpers shared by the CLI, the API and the renderer: result files, complex
flag parsing, temporary output paths and the ordered task pool.
"""

from __future__ import annotations

import contextlib
import csv
import json
import logging
import re
import tempfile
from collections.abc import Callable, Generator, Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from pathlib import Path
from typing import Any, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Magic bytes of the image formats we write
IMAGE_MAGIC_BYTES = {
    b"\x89PNG\r\n\x1a\n": "png",
    b"P6": "ppm",
}

CENTER_COLUMNS = ("level", "re", "im", "residual", "derivative_magnitude")

# the imaginary unit always needs an explicit coefficient
_COMPLEX_PATTERN = re.compile(r"^[+-]?[0-9.eE+-]*[0-9.][ij]?$")


def detect_image_format(data: bytes) -> str | None:
    """Detect image format from magic bytes."""
    for magic, name in IMAGE_MAGIC_BYTES.items():
        if data.startswith(magic):
            return name
    return None


def parse_complex(text: str) -> complex:
    """Parse ``"RE+IMi"``, ``"RE-IMj"``, ``"RE"`` or ``"IMi"`` into a complex number.

    Raises:
        ValueError: If the text is not a complex literal.
    """
    cleaned = text.strip().replace(" ", "")
    if cleaned.endswith("i"):
        cleaned = cleaned[:-1] + "j"
    if not cleaned or not _COMPLEX_PATTERN.match(cleaned):
        raise ValueError(f"Invalid complex number: {text!r} (expected e.g. '3+0.5i')")
    try:
        return complex(cleaned)
    except ValueError as e:
        raise ValueError(f"Invalid complex number: {text!r} (expected e.g. '3+0.5i')") from e


def format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}i"


def write_json(path: Path | str, payload: Mapping[str, Any]) -> Path:
    """Write ``payload`` as indented JSON, creating parent directories."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e.strerror or e}") from e
    logger.info("wrote %s", path)
    return path


def write_centers_csv(path: Path | str, rows: Iterable[Mapping[str, Any]]) -> Path:
    """Write center rows with the columns level,re,im,residual,derivative_magnitude."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=CENTER_COLUMNS, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e.strerror or e}") from e
    logger.info("wrote %s", path)
    return path


def read_centers_csv(path: Path | str) -> list[dict[str, Any]]:
    with open(path, newline="", encoding="utf-8") as f:
        return [
            {
                "level": int(row["level"]),
                "center": complex(float(row["re"]), float(row["im"])),
                "residual": float(row["residual"]),
                "derivative_magnitude": float(row["derivative_magnitude"]),
            }
            for row in csv.DictReader(f)
        ]


def run_tasks(
    fn: Callable[[T], R],
    items: Sequence[T],
    workers: int = 1,
    *,
    processes: bool = False,
) -> list[R]:
    """Map ``fn`` over ``items`` on a pool; results keep the order of ``items``.

    ``processes`` switches from threads to worker processes, in which case
    ``fn`` must be a module-level function.
    """
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    executor = ProcessPoolExecutor if processes else ThreadPoolExecutor
    with executor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@contextlib.contextmanager
def temp_output_context(suffix: str = ".png") -> Generator[Path, None, None]:
    """
    Context manager for a temporary output file path.

    Creates a temp file path and ensures cleanup.

    Args:
        suffix: File extension to use.

    Yields:
        Path where output can be written.
    """
    tmp_path = None
    try:
        with tempfile.NamedTemporaryFile(suffix=suffix, delete=False) as tmp:
            tmp_path = Path(tmp.name)
        yield tmp_path
    finally:
        if tmp_path and tmp_path.exists():
            try:
                tmp_path.unlink()
            except OSError as e:
                logger.warning("Failed to delete temp file %s: %s", tmp_path, e)


def read_and_cleanup(path: Path) -> bytes:
    """Read file content and delete the file."""
    try:
        with open(path, "rb") as f:
            return f.read()
    finally:
        try:
            path.unlink(missing_ok=True)
        except OSError as e:
            logger.warning("Failed to delete file %s: %s", path, e)
