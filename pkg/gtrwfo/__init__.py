"""
First-order logic over ground tree rewrite graphs.

The decision procedure lives in ``reduction.decide``; ``guarded`` evaluates
guarded formulas directly on trees and ``tiling`` generates the tiling
encoding.
"""

from gtrwfo.errors import CapExceeded, GtrwfoError, InputError, NodeNotInDomain
from gtrwfo.fologic import parse_formula
from gtrwfo.gtrs import Gtrs, parse_gtrs
from gtrwfo.guarded import eval_guarded
from gtrwfo.reduction import decide, report_bounds
from gtrwfo.trees import RankedAlphabet, RankedTree, parse_term

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "GtrwfoError",
    "InputError",
    "NodeNotInDomain",
    "Gtrs",
    "RankedAlphabet",
    "RankedTree",
    "decide",
    "eval_guarded",
    "parse_formula",
    "parse_gtrs",
    "parse_term",
    "report_bounds",
]
