"""
Error boundary utilities for structured failure reporting.

Commands run inside ``error_boundary`` so that every failure reaches the CLI
as an ``OpinionPDSError`` with a stable error code and exit status.
"""

from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any

from .exceptions import (
    EXIT_RUNTIME,
    CommandExecutionError,
    OpinionPDSError,
)
from .logging import get_logger

logger = get_logger(__name__)


@contextmanager
def error_boundary(
    operation_name: str,
    context: dict[str, Any] | None = None,
) -> Iterator[None]:
    """Context manager for implementing error boundaries.

    Args:
        operation_name: Name of the operation for logging
        context: Additional context for error logging

    Raises:
        OpinionPDSError: Structured errors pass through unchanged.
        CommandExecutionError: Wraps any other exception.

    """
    try:
        yield

    except OpinionPDSError as e:
        logger.error(
            f"Operation {operation_name} failed",
            extra={"error_details": e.to_dict(), "context": context},
        )
        raise

    except Exception as e:
        logger.error(
            f"Operation {operation_name} failed with unexpected error",
            extra={
                "exception_type": type(e).__name__,
                "exception_message": str(e),
                "context": context,
            },
            exc_info=True,
        )
        raise CommandExecutionError(
            command=operation_name,
            reason=f"{type(e).__name__}: {e!s}",
            context=context,
        ) from e


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit status."""
    if isinstance(exc, OpinionPDSError):
        return exc.exit_code
    return EXIT_RUNTIME
