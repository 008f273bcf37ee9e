"""
The ``fr-eval`` command: first-order sentences over 𝔊⁺ of a finite graph.
"""
from dataclasses import asdict
from typing import Any, Dict

from gtrwfo.commands.base import Command, failure, read_text
from gtrwfo.config import DEFAULT_MAX_WORDS
from gtrwfo.errors import GtrwfoError
from gtrwfo.fologic import parse_formula
from gtrwfo.wordfr import FrEvaluator, parse_graph


class FrEvalCommand(Command):
    def __init__(self):
        super().__init__(
            name="fr-eval",
            description="Decide a sentence over the word graph of a finite labelled graph",
            parameters={
                "type": "object",
                "properties": {
                    "graph": {"type": "string", "description": "Path to the graph file"},
                    "formula": {"type": "string", "description": "Path to the sentence file"},
                    "max_words": {"type": "integer", "description": "Cap on candidate words"},
                    "slack": {"type": "integer", "description": "Added to every word length bound"},
                },
                "required": ["graph", "formula"],
            },
        )

    def execute(self, graph: str, formula: str, max_words: int = DEFAULT_MAX_WORDS, slack: int = 0) -> Dict[str, Any]:
        try:
            G = parse_graph(read_text(graph, "graph"))
            phi = parse_formula(read_text(formula, "formula"))
            evaluator = FrEvaluator(G, max_words=max_words, slack=slack)
            bounds = evaluator.bounds(phi)
            verdict = evaluator.evaluate(phi)
            return {
                "success": True,
                "verdict": verdict,
                "message": "TRUE" if verdict else "FALSE",
                "length_bounds": bounds,
                "stats": asdict(evaluator.stats),
            }
        except GtrwfoError as e:
            return failure(e)
