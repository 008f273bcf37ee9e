"""
CLI subcommands.
"""

from gtrwfo.commands.base import Command
from gtrwfo.commands.check import BoundsCommand, CheckCommand
from gtrwfo.commands.fr_eval import FrEvalCommand
from gtrwfo.commands.lemmas import LemmasCommand
from gtrwfo.commands.oracle import OracleCommand
from gtrwfo.commands.spheres import SpheresCommand
from gtrwfo.commands.tiling import GenTilingCommand

COMMANDS = {
    cmd.name: cmd
    for cmd in (
        CheckCommand(),
        BoundsCommand(),
        SpheresCommand(),
        OracleCommand(),
        GenTilingCommand(),
        FrEvalCommand(),
        LemmasCommand(),
    )
}

__all__ = [
    "Command",
    "CheckCommand",
    "BoundsCommand",
    "SpheresCommand",
    "OracleCommand",
    "GenTilingCommand",
    "FrEvalCommand",
    "LemmasCommand",
    "COMMANDS",
]
