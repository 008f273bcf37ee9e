"""
The ``lemmas`` command: randomized structural checks.
"""
from typing import Any, Dict, Optional

from gtrwfo.commands.base import Command, failure, split_words
from gtrwfo.errors import GtrwfoError
from gtrwfo.experiments import CHECKS, run_checks


class LemmasCommand(Command):
    """
    Run the randomized checks from ``gtrwfo.experiments``. The verdict is
    true when no check failed.
    """

    def __init__(self):
        super().__init__(
            name="lemmas",
            description="Run the randomized structural checks",
            parameters={
                "type": "object",
                "properties": {
                    "seed": {"type": "integer", "description": "Run seed"},
                    "checks": {
                        "type": "string",
                        "description": f"Comma-separated subset of: {', '.join(CHECKS)}",
                    },
                    "scale": {"type": "number", "description": "Factor on every check's trial count"},
                    "workers": {"type": "integer", "description": "Size of the process pool"},
                },
            },
        )

    def execute(self, seed: int = 0, checks: Optional[str] = None, scale: float = 1.0, workers: int = 1) -> Dict[str, Any]:
        try:
            names = split_words(checks) or None
            tallies = run_checks(seed, names, scale, workers)
        except GtrwfoError as e:
            return failure(e)
        lines = [str(t) for t in tallies]
        for t in tallies:
            lines.extend(f"  {t.name}: {detail}" for detail in t.failures)
        return {
            "success": True,
            "verdict": all(t.ok for t in tallies),
            "message": "\n".join(lines),
            "seed": seed,
            "tallies": [t.to_dict() for t in tallies],
        }
