"""
Run configuration: resource caps, output options and the random seed.
"""
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

from gtrwfo.errors import InputError

DEFAULT_MAX_ALPHABET = 100_000
DEFAULT_MAX_WORDS = 2_000_000
DEFAULT_STEP_BUDGET = 10_000_000
DEFAULT_MAX_NODES = 1_000_000

# entries kept by each memo table before it is cleared
MEMO_ENTRIES = 500_000

MAX_MEM_ENV = "GTRWFO_MAX_MEM"


@dataclass
class RunConfig:
    """
    Settings for a single CLI run.

    Caps are plain counts: trees or symbols for ``max_alphabet``, candidate
    words for ``max_words``, (tree, subformula) evaluations for
    ``step_budget`` and explored graph nodes for ``max_nodes``.
    """

    command: str = ""
    max_alphabet: int = DEFAULT_MAX_ALPHABET
    max_words: int = DEFAULT_MAX_WORDS
    step_budget: int = DEFAULT_STEP_BUDGET
    max_nodes: int = DEFAULT_MAX_NODES
    json_output: bool = False
    seed: int = 0
    inputs: Dict[str, Optional[str]] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("max_alphabet", "max_words", "step_budget", "max_nodes"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")
        for label, path in self.inputs.items():
            if path is not None and not os.path.exists(path):
                raise InputError(f"{label} file not found: {path}")

    @classmethod
    def from_env(cls, **overrides: Any) -> "RunConfig":
        """
        Build a config whose node budget defaults to ``GTRWFO_MAX_MEM``.

        Args:
            **overrides: Field values that take precedence over the environment

        Returns:
            The resulting configuration
        """
        values: Dict[str, Any] = {}
        raw = os.environ.get(MAX_MEM_ENV)
        if raw:
            try:
                values["max_nodes"] = int(raw)
            except ValueError:
                raise InputError(f"{MAX_MEM_ENV} must be an integer, got {raw!r}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
