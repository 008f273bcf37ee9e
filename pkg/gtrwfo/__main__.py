"""
Command-line entry point.

Exit status: 0 when the verdict is true (or the command has none), 1 when
it is false, 2 when a resource cap was hit and 3 on input errors.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from gtrwfo.commands import COMMANDS
from gtrwfo.commands.base import failure
from gtrwfo.commands.tiling import EMIT_CHOICES
from gtrwfo.config import RunConfig
from gtrwfo.errors import GtrwfoError

EXIT_TRUE, EXIT_FALSE, EXIT_CAP, EXIT_INPUT = 0, 1, 2, 3


def _add_caps(parser: argparse.ArgumentParser, *names: str) -> None:
    helps = {
        "max_alphabet": "cap on enumerated trees and letters",
        "max_words": "cap on candidate words",
        "max_nodes": "cap on explored graph nodes (default: $GTRWFO_MAX_MEM or 1000000)",
        "step_budget": "cap on guarded evaluation steps",
    }
    for name in names:
        parser.add_argument("--" + name.replace("_", "-"), dest=name, type=int, default=None, help=helps[name])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtrwfo", description="First-order logic over ground tree rewrite graphs")
    parser.add_argument("--json", action="store_true", help="print the full result as JSON")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help=COMMANDS["check"].description)
    p.add_argument("--gtrs", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--bounds-only", action="store_true")
    p.add_argument("--literal", action="store_true", help="evaluate the fully spelled-out sentence")
    _add_caps(p, "max_alphabet", "max_words", "max_nodes")

    p = sub.add_parser("bounds", help=COMMANDS["bounds"].description)
    p.add_argument("--gtrs")
    p.add_argument("--formula")
    p.add_argument("--ell", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--alphabet-size", dest="alphabet_size", type=int)

    p = sub.add_parser("spheres", help=COMMANDS["spheres"].description)
    p.add_argument("--gtrs", required=True)
    p.add_argument("--trees", required=True, help="file with one tree per line")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--string", action="store_true", help="read the trees as one tree string")
    p.add_argument("--png", help="write a drawing of the sphere")
    _add_caps(p, "max_nodes")

    p = sub.add_parser("oracle", help=COMMANDS["oracle"].description)
    p.add_argument("--gtrs", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--tree", required=True)
    _add_caps(p, "step_budget")

    p = sub.add_parser("gen-tiling", help=COMMANDS["gen-tiling"].description)
    p.add_argument("--system", required=True, help="tiling file or preset name")
    p.add_argument("--word")
    p.add_argument("--n", type=int)
    p.add_argument("--emit", choices=EMIT_CHOICES, default="formulas")
    p.add_argument("--alternating", action="store_true")
    p.add_argument("--out", help="directory for the generated files")
    p.add_argument("--png", help="write a drawing of the first solution")

    p = sub.add_parser("fr-eval", help=COMMANDS["fr-eval"].description)
    p.add_argument("--graph", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--slack", type=int, default=0)
    _add_caps(p, "max_words")

    p = sub.add_parser("lemmas", help=COMMANDS["lemmas"].description)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--checks", help="comma-separated subset of the checks")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _kwargs(args: argparse.Namespace, config: RunConfig) -> Dict[str, Any]:
    """Command keyword arguments: the parsed flags with caps taken from the config."""
    skip = {"command", "json", "verbose"}
    kwargs = {k: v for k, v in vars(args).items() if k not in skip}
    for cap in ("max_alphabet", "max_words", "max_nodes", "step_budget"):
        if cap in kwargs:
            kwargs[cap] = getattr(config, cap)
    if "seed" in kwargs:
        kwargs["seed"] = config.seed
    return kwargs


def exit_code(result: Dict[str, Any]) -> int:
    if not result.get("success"):
        return EXIT_CAP if result.get("error") == "cap" else EXIT_INPUT
    return EXIT_FALSE if result.get("verdict") is False else EXIT_TRUE


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the subcommand and print its result.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    inputs = {k: getattr(args, k, None) for k in ("gtrs", "formula", "trees", "tree", "graph")}
    try:
        config = RunConfig.from_env(
            command=args.command,
            max_alphabet=getattr(args, "max_alphabet", None),
            max_words=getattr(args, "max_words", None),
            step_budget=getattr(args, "step_budget", None),
            max_nodes=getattr(args, "max_nodes", None),
            json_output=args.json,
            seed=getattr(args, "seed", None),
            inputs=inputs,
        )
        result = COMMANDS[args.command].execute(**_kwargs(args, config))
    except GtrwfoError as e:
        result = failure(e)
    if args.json:
        print(json.dumps(result, ensure_ascii=False, indent=2, default=str))
    else:
        stream = sys.stdout if result.get("success") else sys.stderr
        print(result["message"], file=stream)
    return exit_code(result)


if __name__ == "__main__":
    sys.exit(main())
