"""
Commands around the decision procedure: ``check`` and ``bounds``.
"""
import logging
from typing import Any, Dict, Optional

from gtrwfo.commands.base import Command, failure, read_text
from gtrwfo.config import DEFAULT_MAX_ALPHABET, DEFAULT_MAX_NODES, DEFAULT_MAX_WORDS
from gtrwfo.errors import CapExceeded, GtrwfoError, InputError
from gtrwfo.fologic import parse_formula
from gtrwfo.gtrs import parse_gtrs
from gtrwfo.reduction import ReductionBounds, bounds_for, decide, report_bounds
from gtrwfo.trees import RankedAlphabet

logger = logging.getLogger(__name__)


def format_bounds(bounds: ReductionBounds) -> str:
    sigmas = ", ".join(f"σ({i})={s}" for i, s in enumerate(bounds.sigma))
    return "\n".join(
        [
            f"ℓ={bounds.ell} r={bounds.r} p={bounds.p} |A|={bounds.alphabet_size}",
            sigmas,
            f"γ={bounds.gamma}",
            f"trees in U have size ≤ {bounds.u_max_size}, |U| ≤ |A|^{bounds.u_max_size}",
            f"log10 |U″| ≤ {bounds.u2_bound_log10:.4g}",
            f"log10 |Γ| ≤ {bounds.gamma_size_log10:.4g}",
        ]
    )


def _bounds_json(bounds: ReductionBounds) -> Dict[str, Any]:
    values = bounds.to_dict()
    # |A|^{u_max_size} can have millions of digits
    values["u_bound"] = f"{bounds.alphabet_size}^{bounds.u_max_size}"
    return values


class CheckCommand(Command):
    """
    Decide 𝔊(ℛ) ⊨ φ for a GTRS file and a sentence file.
    """

    def __init__(self):
        super().__init__(
            name="check",
            description="Decide whether a first-order sentence holds in the graph of a GTRS",
            parameters={
                "type": "object",
                "properties": {
                    "gtrs": {"type": "string", "description": "Path to the GTRS file"},
                    "formula": {"type": "string", "description": "Path to the sentence file"},
                    "max_alphabet": {"type": "integer", "description": "Cap on enumerated trees and letters"},
                    "max_words": {"type": "integer", "description": "Cap on candidate words"},
                    "max_nodes": {"type": "integer", "description": "Cap on explored sphere nodes"},
                    "bounds_only": {"type": "boolean", "description": "Report the bounds without deciding"},
                    "literal": {"type": "boolean", "description": "Evaluate the fully spelled-out sentence"},
                },
                "required": ["gtrs", "formula"],
            },
        )

    def execute(
        self,
        gtrs: str,
        formula: str,
        max_alphabet: int = DEFAULT_MAX_ALPHABET,
        max_words: int = DEFAULT_MAX_WORDS,
        max_nodes: int = DEFAULT_MAX_NODES,
        bounds_only: bool = False,
        literal: bool = False,
    ) -> Dict[str, Any]:
        """
        Execute the check command with the given parameters.

        Returns:
            ``verdict`` and the bounds report; on a cap the bounds are still
            reported under ``bounds``
        """
        bounds: Optional[ReductionBounds] = None
        try:
            R = parse_gtrs(read_text(gtrs, "GTRS"))
            phi = parse_formula(read_text(formula, "formula"))
            bounds = report_bounds(R, phi)
            if bounds_only:
                return {"success": True, "message": format_bounds(bounds), "bounds": _bounds_json(bounds)}
            verdict = decide(
                R,
                phi,
                literal=literal,
                max_alphabet=max_alphabet,
                max_words=max_words,
                max_nodes=max_nodes,
            )
            return {
                "success": True,
                "verdict": verdict,
                "message": "TRUE" if verdict else "FALSE",
                "bounds": _bounds_json(bounds),
            }
        except CapExceeded as e:
            result = failure(e)
            logger.debug("check stopped at the %s cap", e.cap_name)
            if bounds is not None:
                result["bounds"] = result["cap"]["bounds"] = _bounds_json(bounds)
                result["message"] += "\n" + format_bounds(bounds)
            return result
        except GtrwfoError as e:
            return failure(e)


class BoundsCommand(Command):
    """
    Report the reduction bounds, either for a GTRS and a sentence or for
    raw parameters (ℓ, r, p, |A|).
    """

    def __init__(self):
        super().__init__(
            name="bounds",
            description="Compute the size bounds of the reduction without enumerating anything",
            parameters={
                "type": "object",
                "properties": {
                    "gtrs": {"type": "string", "description": "Path to the GTRS file"},
                    "formula": {"type": "string", "description": "Path to the sentence file"},
                    "ell": {"type": "integer", "description": "Number of quantifiers minus one"},
                    "r": {"type": "integer", "description": "Maximal rule tree size"},
                    "p": {"type": "integer", "description": "Maximal rank"},
                    "alphabet_size": {"type": "integer", "description": "Number of symbols"},
                },
            },
        )

    def execute(
        self,
        gtrs: Optional[str] = None,
        formula: Optional[str] = None,
        ell: Optional[int] = None,
        r: Optional[int] = None,
        p: Optional[int] = None,
        alphabet_size: Optional[int] = None,
    ) -> Dict[str, Any]:
        try:
            if gtrs or formula:
                R = parse_gtrs(read_text(gtrs, "GTRS"))
                bounds = report_bounds(R, parse_formula(read_text(formula, "formula")))
            else:
                bounds = bounds_for(_parameter_alphabet(p, alphabet_size), _positive(r, "r"), _natural(ell, "ell"))
            return {"success": True, "message": format_bounds(bounds), "bounds": _bounds_json(bounds)}
        except GtrwfoError as e:
            return failure(e)


def _natural(value: Optional[int], name: str) -> int:
    if value is None or value < 0:
        raise InputError(f"{name} must be given and non-negative")
    return value


def _positive(value: Optional[int], name: str) -> int:
    if value is None or value < 1:
        raise InputError(f"{name} must be given and positive")
    return value


def _parameter_alphabet(p: Optional[int], size: Optional[int]) -> RankedAlphabet:
    """One symbol of rank p and constants up to the requested size."""
    p = _positive(p, "p")
    size = _positive(size, "alphabet_size")
    if size < 2:
        raise InputError("an alphabet with a symbol of positive rank has at least 2 symbols")
    return RankedAlphabet((("f", p), *((f"c{i}", 0) for i in range(size - 1))))
