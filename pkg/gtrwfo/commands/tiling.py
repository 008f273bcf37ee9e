"""
The ``gen-tiling`` command: formulas, trees and the GTRS of the tiling
encoding.
"""
import logging
import os
from typing import Any, Dict, List, Optional

from gtrwfo.commands.base import Command, failure, read_text, split_words, write_png, write_text
from gtrwfo.errors import GtrwfoError, InputError
from gtrwfo.fologic import format_formula
from gtrwfo.render import render_solution
from gtrwfo.tiling import (
    MAX_GRID_TREE_N,
    PRESETS,
    TilingSystem,
    brute_solutions,
    build_grid_tree,
    gen_alternating,
    gen_formulas,
    mark_subtree,
    parse_tiling,
    r0_gtrs,
)
from gtrwfo.trees import format_term

logger = logging.getLogger(__name__)

EMIT_CHOICES = ("formulas", "trees", "gtrs")


def load_system(system: str) -> TilingSystem:
    """A preset name or the path of a tiling file."""
    if system in PRESETS:
        return PRESETS[system]
    return parse_tiling(read_text(system, "tiling system"))


class GenTilingCommand(Command):
    """
    Generate the formula family, example grid trees or ℛ₀ for a tiling
    system and an input word.
    """

    def __init__(self):
        super().__init__(
            name="gen-tiling",
            description="Generate the tiling encoding: formulas, grid trees or the GTRS",
            parameters={
                "type": "object",
                "properties": {
                    "system": {
                        "type": "string",
                        "description": f"Tiling file, or one of the presets {', '.join(PRESETS)}",
                    },
                    "word": {"type": "string", "description": "Input word, tiles separated by spaces or commas"},
                    "n": {"type": "integer", "description": "Parameter n when no word is given"},
                    "emit": {"type": "string", "enum": list(EMIT_CHOICES), "description": "What to generate"},
                    "alternating": {"type": "boolean", "description": "Add the alternating sentence"},
                    "out": {"type": "string", "description": "Directory to write one file per item"},
                    "png": {"type": "string", "description": "Write a drawing of the solution to this path"},
                },
                "required": ["system", "emit"],
            },
        )

    def execute(
        self,
        system: str,
        emit: str = "formulas",
        word: Optional[str] = None,
        n: Optional[int] = None,
        alternating: bool = False,
        out: Optional[str] = None,
        png: Optional[str] = None,
    ) -> Dict[str, Any]:
        try:
            S = load_system(system)
            w = split_words(word) if word is not None else None
            if w is not None and n is not None and n != len(w):
                raise InputError(f"n = {n} does not match the word length {len(w)}")
            n = len(w) if w is not None else n
            if n is None:
                raise InputError("give either a word or n")
            if emit == "formulas":
                return self._formulas(S, n, w, alternating, out)
            if emit == "trees":
                return self._trees(S, n, w or [], out, png)
            if emit == "gtrs":
                text = str(r0_gtrs(S))
                if out:
                    write_text(os.path.join(out, "r0.gtrs"), text + "\n")
                return {"success": True, "message": text, "gtrs": text}
            raise InputError(f"unknown emit target {emit!r}; choose from {', '.join(EMIT_CHOICES)}")
        except GtrwfoError as e:
            return failure(e)

    def _formulas(self, S: TilingSystem, n: int, w: Optional[List[str]], alternating: bool, out: Optional[str]) -> Dict[str, Any]:
        family = gen_formulas(S, n, w)
        if alternating:
            if w is None:
                raise InputError("the alternating sentence needs a word")
            family["alternating"] = gen_alternating(S, w)
        texts = {name: format_formula(phi) for name, phi in family.items()}
        if out:
            for name, text in texts.items():
                write_text(os.path.join(out, f"{name}.fo"), text + "\n")
        message = "\n".join(f"{name}: {text}" for name, text in texts.items())
        return {"success": True, "message": message, "formulas": texts}

    def _trees(self, S: TilingSystem, n: int, w: List[str], out: Optional[str], png: Optional[str]) -> Dict[str, Any]:
        if n > MAX_GRID_TREE_N:
            raise InputError(f"grid trees are only built for n <= {MAX_GRID_TREE_N}")
        side = 2 ** 2 ** n
        solutions = brute_solutions(S, side, w)
        logger.debug("%d solutions of side %d", len(solutions), side)
        if not solutions:
            return {"success": True, "message": f"no {side}×{side} solution starts with {' '.join(w) or 'the empty word'}", "trees": {}}
        sol = solutions[0]
        grid = build_grid_tree(S, n, sol)
        trees = {"grid": grid, "marked_grid": mark_subtree(grid, 0)}
        texts = {name: format_term(t) for name, t in trees.items()}
        if out:
            for name, text in texts.items():
                write_text(os.path.join(out, f"{name}.tree"), f"x = {text}\n")
        result = {
            "success": True,
            "message": f"{len(solutions)} solution(s); first:\n{sol}\n" + "\n".join(f"{k} = {v}" for k, v in texts.items()),
            "solutions": len(solutions),
            "solution": sol.to_dict(),
            "trees": texts,
        }
        if png:
            write_png(png, render_solution(S, sol))
            result["png"] = png
        return result
