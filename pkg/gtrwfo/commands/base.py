"""
Base command implementation.
"""
import base64
import logging
import os
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple

from gtrwfo.errors import CapExceeded, GtrwfoError, InputError
from gtrwfo.trees import RankedAlphabet, RankedTree, parse_term

logger = logging.getLogger(__name__)


class Command(ABC):
    """
    Base class for all CLI subcommands.

    ``execute`` never raises for expected failures: it returns a result dict
    with ``success`` and ``message``, plus ``error`` (the error kind) when
    ``success`` is false and ``verdict`` for commands that decide a truth
    value.
    """

    def __init__(self, name: str, description: str, parameters: Optional[Dict[str, Any]] = None):
        """
        Initialize a command.

        Args:
            name: The subcommand name
            description: A description of what the command does
            parameters: JSON schema of the keyword arguments ``execute`` accepts
        """
        self.name = name
        self.description = description
        self.parameters = parameters or {}

    @abstractmethod
    def execute(self, **kwargs) -> Dict[str, Any]:
        """
        Execute the command with the given parameters.

        Args:
            **kwargs: Parameters for the command

        Returns:
            The result dict
        """

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "parameters": self.parameters,
        }


def failure(exc: GtrwfoError) -> Dict[str, Any]:
    """The result dict for a failed run."""
    result: Dict[str, Any] = {"success": False, "message": str(exc), "error": exc.kind}
    if isinstance(exc, CapExceeded):
        result["message"] = f"CAP-EXCEEDED: {exc}"
        result["cap"] = exc.to_dict()
    logger.debug("command failed: %s", exc)
    return result


def read_text(path: str, what: str = "input") -> str:
    if not path:
        raise InputError(f"no {what} file given")
    if not os.path.exists(path):
        raise InputError(f"{what} file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"failed to read {what} file {path}: {e}")


def write_text(path: str, content: str) -> None:
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(content)
    except OSError as e:
        raise InputError(f"failed to write {path}: {e}")


def write_png(path: str, data_uri: str) -> None:
    """Store a ``data:image/png;base64,...`` URI as a PNG file."""
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "wb") as f:
            f.write(base64.b64decode(data_uri.split(",", 1)[1]))
    except OSError as e:
        raise InputError(f"failed to write {path}: {e}")


def split_words(text: Optional[str]) -> List[str]:
    """Whitespace- or comma-separated items."""
    return (text or "").replace(",", " ").split()


def parse_tree_lines(text: str, alphabet: RankedAlphabet) -> List[Tuple[Optional[str], RankedTree]]:
    """
    One tree per line, optionally named: ``x = f(a, b)``. Blank lines and
    ``#`` comments are skipped.
    """
    trees: List[Tuple[Optional[str], RankedTree]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name: Optional[str] = None
        head, sep, rest = line.partition("=")
        if sep:
            name, line = head.strip(), rest.strip()
            if not name:
                raise InputError("empty variable name", line=lineno)
        try:
            trees.append((name, parse_term(line, alphabet)))
        except InputError as e:
            raise InputError(e.message, line=lineno)
    if not trees:
        raise InputError("tree file contains no tree")
    return trees
