"""
The ``spheres`` command: dump S_n around one or more trees.
"""
from typing import Any, Dict, Optional

from gtrwfo.commands.base import Command, failure, parse_tree_lines, read_text, write_png
from gtrwfo.config import DEFAULT_MAX_NODES
from gtrwfo.errors import GtrwfoError
from gtrwfo.gtrs import parse_gtrs, sphere, sphere_word
from gtrwfo.render import render_sphere


class SpheresCommand(Command):
    """
    Build the sphere of a given radius in 𝔊(ℛ) around the trees of a file,
    or in 𝔊(ℛ)⁺ around the tree string they form.
    """

    def __init__(self):
        super().__init__(
            name="spheres",
            description="Explore the neighbourhood of trees in the graph of a GTRS",
            parameters={
                "type": "object",
                "properties": {
                    "gtrs": {"type": "string", "description": "Path to the GTRS file"},
                    "trees": {"type": "string", "description": "Path to a file with one tree per line"},
                    "radius": {"type": "integer", "description": "Sphere radius"},
                    "string": {"type": "boolean", "description": "Read the trees as one tree string"},
                    "png": {"type": "string", "description": "Write a drawing of the sphere to this path"},
                    "max_nodes": {"type": "integer", "description": "Cap on explored nodes"},
                },
                "required": ["gtrs", "trees", "radius"],
            },
        )

    def execute(
        self,
        gtrs: str,
        trees: str,
        radius: int,
        string: bool = False,
        png: Optional[str] = None,
        max_nodes: int = DEFAULT_MAX_NODES,
    ) -> Dict[str, Any]:
        try:
            R = parse_gtrs(read_text(gtrs, "GTRS"))
            centers = [t for _, t in parse_tree_lines(read_text(trees, "tree"), R.alphabet)]
            if string:
                local = sphere_word(R, (tuple(centers),), radius, max_nodes)
            else:
                local = sphere(R, centers, radius, max_nodes)
            result = {"success": True, "message": local.dump(), "sphere": local.to_dict()}
            if png:
                write_png(png, render_sphere(local))
                result["png"] = png
            return result
        except GtrwfoError as e:
            return failure(e)
