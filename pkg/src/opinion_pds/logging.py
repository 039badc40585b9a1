"""Structured logging for the opinion dynamics toolkit.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.

All library modules log under the ``opinion-pds`` hierarchy and never touch
handlers. :func:`setup_structured_logging` is the only place a handler is
installed: one stderr stream, JSON lines by default, with the run id of the
current invocation stamped on every record. stdout carries command payloads.
"""

import contextvars
import hashlib
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any

import numpy as np

from .config import get_settings

APP_LOGGER_NAME = "opinion-pds"

# third-party loggers that are noisy at INFO (font discovery and the like)
QUIET_LOGGERS = ("matplotlib", "PIL")

run_id_var: contextvars.ContextVar[str] = contextvars.ContextVar("run_id", default="")

# attributes every LogRecord has; anything else arrived through ``extra``
_RECORD_ATTRS = frozenset(
    vars(logging.LogRecord("", logging.INFO, "", 0, "", None, None))
) | {"message", "asctime", "run_id", "taskName"}

PLAIN_FORMAT = "%(asctime)s %(levelname)-7s %(name)s [%(run_id)s] %(message)s"


def to_jsonable(value: Any) -> Any:
    """Convert numpy values (and containers holding them) to JSON-native values."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple | set | frozenset):
        return [to_jsonable(v) for v in value]
    return value


def record_extras(record: logging.LogRecord) -> dict[str, Any]:
    """Fields passed through ``extra=``, JSON-ready."""
    return {k: to_jsonable(v) for k, v in vars(record).items() if k not in _RECORD_ATTRS}


class JSONFormatter(logging.Formatter):
    """One JSON object per record."""

    def __init__(self, *, include_timestamp: bool = True, include_run_id: bool = True) -> None:
        super().__init__()
        self.include_timestamp = include_timestamp
        self.include_run_id = include_run_id

    @staticmethod
    def timestamp(created: float) -> str:
        stamp = datetime.fromtimestamp(created, tz=timezone.utc).isoformat(timespec="milliseconds")
        return stamp.replace("+00:00", "Z")

    def format(self, record: logging.LogRecord) -> str:
        entry: dict[str, Any] = {
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }
        if self.include_timestamp:
            entry["timestamp"] = self.timestamp(record.created)
        if self.include_run_id and run_id_var.get():
            entry["run_id"] = run_id_var.get()
        if record.exc_info:
            exc_type, exc, _ = record.exc_info
            entry["exception"] = {
                "type": exc_type.__name__ if exc_type else None,
                "message": str(exc) if exc else None,
                "traceback": self.formatException(record.exc_info),
            }
        extras = record_extras(record)
        if extras:
            entry["extra"] = extras
        return json.dumps(entry, ensure_ascii=False, separators=(",", ":"), default=str)


class RunIdFilter(logging.Filter):
    """Stamp ``record.run_id`` from the current context."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = run_id_var.get()
        return True


def derive_run_id(payload: bytes) -> str:
    """Stable id from config bytes so reruns of one config share it."""
    return hashlib.sha256(payload).hexdigest()[:12]


def set_run_id(run_id: str) -> str:
    run_id_var.set(run_id)
    return run_id


def get_run_id() -> str | None:
    return run_id_var.get() or None


def setup_structured_logging(
    logger_name: str = APP_LOGGER_NAME, force_json: bool = False
) -> logging.Logger:
    """Install the stderr handler on ``logger_name`` from the current settings.

    Calling it again replaces the handler, so a settings reload takes effect.
    JSON lines are used unless ``debug_mode`` is on or ``log_json`` is off;
    ``force_json`` overrides both.
    """
    settings = get_settings()
    level = getattr(logging, settings.log_level)

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    handler.addFilter(RunIdFilter())
    if force_json or (settings.log_json and not settings.debug_mode):
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT))

    logger = logging.getLogger(logger_name)
    logger.handlers = [handler]
    logger.setLevel(level)
    logger.propagate = False

    if not settings.debug_mode:
        for name in QUIET_LOGGERS:
            logging.getLogger(name).setLevel(logging.WARNING)
    return logger


def get_logger(name: str | None = None) -> logging.Logger:
    """The application logger, or its child ``name``.

    Children carry no handler or level of their own and inherit whatever
    :func:`setup_structured_logging` installed on the application logger.
    """
    return logging.getLogger(f"{APP_LOGGER_NAME}.{name}" if name else APP_LOGGER_NAME)


def log_solver_event(
    logger: logging.Logger,
    method: str,
    *,
    iterations: int | None = None,
    residual: float | None = None,
    elapsed: float | None = None,
    error: str | None = None,
    extra_data: dict[str, Any] | None = None,
) -> None:
    """Log an equilibrium solver outcome; failures go out at ERROR.

    ``residual`` is the final fixed-point displacement or PDS residual.
    """
    fields: dict[str, Any] = {"event_type": "solver", "solver_method": method}
    if iterations is not None:
        fields["iterations"] = iterations
    if residual is not None:
        fields["residual"] = float(residual)
    if elapsed is not None:
        fields["elapsed_ms"] = round(elapsed * 1000, 2)
    if error:
        fields["error"] = error
    fields.update(extra_data or {})

    if error:
        logger.error("solver %s failed: %s", method, error, extra=fields)
    else:
        logger.info("solver %s", method, extra=fields)


def log_simulation_run(
    logger: logging.Logger,
    scheme: str,
    *,
    steps: int,
    terminated_by: str,
    final_residual: float,
    elapsed: float | None = None,
) -> None:
    """Log the outcome of one trajectory integration.

    Stalls and iteration caps go out at WARNING, horizon and residual stops
    at INFO.
    """
    fields: dict[str, Any] = {
        "event_type": "simulation",
        "scheme": scheme,
        "steps": steps,
        "terminated_by": terminated_by,
        "final_residual": float(final_residual),
    }
    if elapsed is not None:
        fields["elapsed_ms"] = round(elapsed * 1000, 2)
    level = logging.WARNING if terminated_by in ("stall", "iteration-cap") else logging.INFO
    logger.log(level, "simulation %s ended by %s", scheme, terminated_by, extra=fields)
