"""
PNG rendering of spheres and tiling solutions.
"""
import base64
import io
import logging
import math
from typing import Dict, Tuple

from PIL import Image, ImageDraw, ImageFont

from gtrwfo.gtrs import SphereStructure, element_text
from gtrwfo.tiling import Solution, TilingSystem

logger = logging.getLogger(__name__)

MAX_WIDTH = 800
PALETTE = [
    (230, 159, 0),
    (86, 180, 233),
    (0, 158, 115),
    (240, 228, 66),
    (0, 114, 178),
    (213, 94, 0),
    (204, 121, 167),
]
CENTER_FILL = (255, 210, 210)
NODE_FILL = (235, 235, 235)
INK = (30, 30, 30)


def to_data_uri(image: Image.Image) -> str:
    """PNG-encode an image, scaled down to at most MAX_WIDTH pixels wide."""
    width, height = image.size
    if width > MAX_WIDTH:
        scale = MAX_WIDTH / width
        image = image.resize((MAX_WIDTH, max(1, int(height * scale))), Image.LANCZOS)
    buffered = io.BytesIO()
    image.save(buffered, format="PNG", optimize=True)
    img_bytes = buffered.getvalue()
    logger.debug("rendered %dx%d image, %d bytes", image.size[0], image.size[1], len(img_bytes))
    return f"data:image/png;base64,{base64.b64encode(img_bytes).decode()}"


def _shells(sphere: SphereStructure) -> Dict[object, Tuple[float, float]]:
    """Concentric rings in [-1, 1]², one per distance, centers in the middle."""
    rings: Dict[int, list] = {}
    for node in sphere.nodes:
        rings.setdefault(sphere.dist[node], []).append(node)
    outer = max(rings) or 1
    pos = {}
    for d, members in rings.items():
        radius = d / outer if d else (0.0 if len(members) == 1 else 0.25)
        for i, node in enumerate(sorted(members, key=element_text)):
            angle = 2 * math.pi * i / len(members) + 0.3 * d
            pos[node] = (radius * math.cos(angle), radius * math.sin(angle))
    return pos


def render_sphere(sphere: SphereStructure, size: int = 720) -> str:
    """
    Draw a sphere with nodes on rings by distance from the centers and
    edges labelled by their actions.
    """
    image = Image.new("RGB", (size, size), "white")
    draw = ImageDraw.Draw(image)
    font = ImageFont.load_default()
    margin = 70
    scale = (size - 2 * margin) / 2
    pos = {node: (margin + (x + 1) * scale, margin + (y + 1) * scale) for node, (x, y) in _shells(sphere).items()}
    graph = sphere.to_networkx()
    for u, v, data in graph.edges(data=True):
        label = ",".join(sorted(data["labels"]))
        (x1, y1), (x2, y2) = pos[u], pos[v]
        if u == v:
            draw.ellipse([x1 - 4, y1 - 26, x1 + 18, y1 - 4], outline=INK)
            draw.text((x1 + 20, y1 - 30), label, fill=INK, font=font)
            continue
        draw.line([x1, y1, x2, y2], fill=INK, width=1)
        angle = math.atan2(y2 - y1, x2 - x1)
        tip = (x2 - 10 * math.cos(angle), y2 - 10 * math.sin(angle))
        wings = [
            (tip[0] - 8 * math.cos(angle - 0.4), tip[1] - 8 * math.sin(angle - 0.4)),
            (tip[0] - 8 * math.cos(angle + 0.4), tip[1] - 8 * math.sin(angle + 0.4)),
        ]
        draw.polygon([tip, *wings], fill=INK)
        draw.text(((x1 + x2) / 2, (y1 + y2) / 2), label, fill=(120, 0, 0), font=font)
    for node, (x, y) in pos.items():
        fill = CENTER_FILL if node in sphere.centers else NODE_FILL
        draw.ellipse([x - 9, y - 9, x + 9, y + 9], fill=fill, outline=INK)
        draw.text((x + 11, y + 4), element_text(node), fill=INK, font=font)
    return to_data_uri(image)


def render_solution(S: TilingSystem, sol: Solution, cell: int = 60) -> str:
    """Draw a solution with row 0 at the bottom, one colour per tile."""
    colours = {tile: PALETTE[i % len(PALETTE)] for i, tile in enumerate(S.tiles)}
    side = sol.k * cell
    image = Image.new("RGB", (side + 1, side + 1), "white")
    draw = ImageDraw.Draw(image)
    font = ImageFont.load_default()
    for (x, y), tile in sol.grid.items():
        left, top = x * cell, (sol.k - 1 - y) * cell
        draw.rectangle([left, top, left + cell, top + cell], fill=colours.get(tile, NODE_FILL), outline=INK)
        draw.text((left + cell // 2 - 3, top + cell // 2 - 6), tile, fill=INK, font=font)
    return to_data_uri(image)
