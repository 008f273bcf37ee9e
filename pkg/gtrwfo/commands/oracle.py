"""
The ``oracle`` command: guarded evaluation on concrete trees.
"""
from typing import Any, Dict

from gtrwfo import fologic
from gtrwfo.commands.base import Command, failure, parse_tree_lines, read_text
from gtrwfo.config import DEFAULT_STEP_BUDGET
from gtrwfo.errors import GtrwfoError, InputError
from gtrwfo.fologic import parse_formula
from gtrwfo.gtrs import parse_gtrs
from gtrwfo.guarded import GuardedEvaluator, is_guarded


class OracleCommand(Command):
    """
    Evaluate a guarded formula in 𝔊(ℛ) under an assignment read from a
    tree file. A file holding a single unnamed tree assigns it to the
    formula's only free variable.
    """

    def __init__(self):
        super().__init__(
            name="oracle",
            description="Evaluate a guarded formula on concrete trees",
            parameters={
                "type": "object",
                "properties": {
                    "gtrs": {"type": "string", "description": "Path to the GTRS file"},
                    "formula": {"type": "string", "description": "Path to the formula file"},
                    "tree": {"type": "string", "description": "Path to the tree file (lines 'x = term')"},
                    "step_budget": {"type": "integer", "description": "Cap on evaluation steps"},
                },
                "required": ["gtrs", "formula", "tree"],
            },
        )

    def execute(self, gtrs: str, formula: str, tree: str, step_budget: int = DEFAULT_STEP_BUDGET) -> Dict[str, Any]:
        try:
            R = parse_gtrs(read_text(gtrs, "GTRS"))
            phi = parse_formula(read_text(formula, "formula"))
            if not is_guarded(phi):
                raise InputError("formula is not guarded")
            free = sorted(fologic.free_vars(phi))
            entries = parse_tree_lines(read_text(tree, "tree"), R.alphabet)
            if len(entries) == 1 and entries[0][0] is None:
                if len(free) != 1:
                    raise InputError(f"an unnamed tree needs exactly one free variable, formula has {len(free)}")
                assignment = {free[0]: entries[0][1]}
            elif any(name is None for name, _ in entries):
                raise InputError("with several trees every line must name its variable")
            else:
                assignment = dict(entries)
            evaluator = GuardedEvaluator(R, step_budget)
            verdict = evaluator.evaluate(phi, assignment)
            return {
                "success": True,
                "verdict": verdict,
                "message": "TRUE" if verdict else "FALSE",
                "steps": evaluator.steps,
            }
        except GtrwfoError as e:
            return failure(e)
