"""Resource guards.

Enumeration-heavy routines estimate their elementary-operation count up
front and refuse to start when it exceeds the guard, raising a structured
error instead of silently truncating.  The CLI maps this error to exit
code 3.
"""

from __future__ import annotations

DEFAULT_GUARD = 10**9

__all__ = ["DEFAULT_GUARD", "ResourceGuardError", "check_guard"]


class ResourceGuardError(RuntimeError):
    def __init__(self, operation: str, estimated_ops: int, limit: int):
        self.operation = operation
        self.estimated_ops = estimated_ops
        self.limit = limit
        super().__init__(
            f"{operation}: estimated {estimated_ops:.3e} elementary ops "
            f"exceeds guard {limit:.3e}"
        )


def check_guard(operation: str, estimated_ops: int, limit: int = DEFAULT_GUARD) -> None:
    if estimated_ops > limit:
        raise ResourceGuardError(operation, int(estimated_ops), int(limit))
