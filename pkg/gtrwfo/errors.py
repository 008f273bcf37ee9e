"""
Exception hierarchy shared by every gtrwfo module.
"""
from typing import Any, Dict, Optional


class GtrwfoError(Exception):
    """
    Base class for all errors raised by the package.
    """

    kind = "error"


class InputError(GtrwfoError):
    """
    Malformed input text or an argument outside an operation's domain.
    """

    kind = "input"

    def __init__(self, message: str, line: Optional[int] = None):
        self.message = message
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NodeNotInDomain(InputError):
    """
    A tree address outside the domain of the tree it was applied to.
    """

    def __init__(self, node: Any):
        self.node = node
        super().__init__(f"node {node!r} is not in the tree domain")


class CapExceeded(GtrwfoError):
    """
    A configured resource cap was hit before the computation finished.

    The reduction attaches its symbolic bounds so callers can still
    report them.
    """

    kind = "cap"

    def __init__(
        self,
        cap_name: str,
        limit: int,
        reached: Optional[int] = None,
        bounds: Optional[Dict[str, Any]] = None,
    ):
        self.cap_name = cap_name
        self.limit = limit
        self.reached = reached
        self.bounds = bounds
        detail = f"{cap_name} cap of {limit} exceeded"
        if reached is not None:
            detail += f" (reached {reached})"
        super().__init__(detail)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cap": self.cap_name,
            "limit": self.limit,
            "reached": self.reached,
            "bounds": self.bounds,
        }
