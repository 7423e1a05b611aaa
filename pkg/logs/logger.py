# logs/logger.py
import logging

from rich.console import Console
from rich.logging import RichHandler

ROOT_LOGGER = "bipartite"

_handler: logging.Handler | None = None


def configure_logging(level: str | int = "INFO") -> logging.Logger:
    """Send package logs to stderr through rich. Safe to call more than once."""
    global _handler
    root = logging.getLogger(ROOT_LOGGER)
    if _handler is not None:
        root.removeHandler(_handler)
    _handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=False,
        markup=False,
    )
    _handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(_handler)
    root.setLevel(level.upper() if isinstance(level, str) else level)
    return root


def get_logger(name: str) -> logging.Logger:
    # core.ingest -> bipartite.core.ingest
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def kv(event: str, **fields) -> str:
    """Render a structured record as ``event key=value ...``."""
    parts = [event]
    parts.extend(f"{key}={value}" for key, value in fields.items())
    return " ".join(parts)
