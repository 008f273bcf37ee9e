import base64
import io

import pytest
from PIL import Image

from gtrwfo.gtrs import Gtrs, sphere
from gtrwfo.render import MAX_WIDTH, render_solution, render_sphere, to_data_uri
from gtrwfo.tiling import CHECKERBOARD, STAIRCASE, Solution, brute_solutions
from gtrwfo.trees import leaf, parse_term

PREFIX = "data:image/png;base64,"


def decode(uri: str) -> Image.Image:
    assert uri.startswith(PREFIX)
    return Image.open(io.BytesIO(base64.b64decode(uri[len(PREFIX):])))


class TestDataUri:
    def test_small_image_kept(self):
        image = decode(to_data_uri(Image.new("RGB", (40, 30), "white")))
        assert image.format == "PNG"
        assert image.size == (40, 30)

    def test_wide_image_scaled(self):
        image = decode(to_data_uri(Image.new("RGB", (MAX_WIDTH * 2, 100), "white")))
        assert image.size == (MAX_WIDTH, 50)


class TestSpheres:
    def test_sphere(self, r_swap: Gtrs):
        image = decode(render_sphere(sphere(r_swap, parse_term("f(a,a)"), 2), size=400))
        assert image.size == (400, 400)

    def test_loops_and_single_node(self, r_loop: Gtrs):
        image = decode(render_sphere(sphere(r_loop, leaf("a"), 0)))
        assert image.size == (720, 720)


class TestSolutions:
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_size(self, k: int):
        sol = brute_solutions(STAIRCASE, k)[0]
        image = decode(render_solution(STAIRCASE, sol, cell=20))
        assert image.size == (20 * k + 1, 20 * k + 1)

    def test_tiles_coloured_apart(self):
        sol = Solution((("0", "1"), ("1", "0")))
        image = decode(render_solution(CHECKERBOARD, sol, cell=40)).convert("RGB")
        bottom_left = image.getpixel((5, 75))
        bottom_right = image.getpixel((45, 75))
        top_left = image.getpixel((5, 35))
        assert bottom_left != bottom_right
        assert bottom_right == top_left
