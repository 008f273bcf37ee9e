"""
Streamlit workbench for bounds, spheres and tilings.

Run with ``streamlit run gtrwfo/app.py``.
"""
from typing import Any, Dict

import streamlit as st

from gtrwfo.commands.check import format_bounds
from gtrwfo.commands.tiling import load_system
from gtrwfo.config import RunConfig
from gtrwfo.errors import GtrwfoError
from gtrwfo.fologic import format_formula
from gtrwfo.gtrs import parse_gtrs, sphere
from gtrwfo.reduction import bounds_for
from gtrwfo.render import render_solution, render_sphere
from gtrwfo.tiling import PRESETS, brute_solutions, gen_formulas, parse_tiling
from gtrwfo.trees import RankedAlphabet, parse_term

EXAMPLE_GTRS = """alphabet: a/0 b/0 f/2
actions: s t
a -s-> b
b -t-> f(a,a)
"""
EXAMPLE_TREE = "f(a,b)"
MAX_SHOWN_SOLUTIONS = 4


def init_session_state():
    """
    Initialize session state variables.
    """
    if "config" not in st.session_state:
        try:
            st.session_state.config = RunConfig.from_env()
        except GtrwfoError:
            st.session_state.config = RunConfig()
    if "sphere" not in st.session_state:
        st.session_state.sphere = None
    if "tiling" not in st.session_state:
        st.session_state.tiling = None


def show_bounds():
    st.subheader("Reduction bounds")
    cols = st.columns(4)
    ell = cols[0].number_input("ℓ", min_value=0, max_value=2, value=1)
    r = cols[1].number_input("r", min_value=1, max_value=4, value=2)
    p = cols[2].number_input("p", min_value=1, max_value=4, value=2)
    size = cols[3].number_input("|A|", min_value=2, max_value=50, value=3)
    alphabet = RankedAlphabet((("f", int(p)), *((f"c{i}", 0) for i in range(int(size) - 1))))
    bounds = bounds_for(alphabet, int(r), int(ell))
    st.code(format_bounds(bounds))


def explore_sphere(gtrs_text: str, tree_text: str, radius: int) -> Dict[str, Any]:
    """
    Build and draw a sphere.

    Returns:
        Dictionary with the dump and the image, or the error message
    """
    try:
        R = parse_gtrs(gtrs_text)
        centers = [parse_term(line, R.alphabet) for line in tree_text.splitlines() if line.strip()]
        local = sphere(R, centers, radius, st.session_state.config.max_nodes)
        return {"success": True, "dump": local.dump(), "image": render_sphere(local)}
    except GtrwfoError as e:
        return {"success": False, "message": str(e)}


def show_sphere():
    st.subheader("Spheres in 𝔊(ℛ)")
    gtrs_text = st.text_area("GTRS", value=EXAMPLE_GTRS, height=140)
    tree_text = st.text_area("Centers (one tree per line)", value=EXAMPLE_TREE, height=70)
    radius = st.slider("Radius", min_value=0, max_value=4, value=1)
    if st.button("Explore"):
        st.session_state.sphere = explore_sphere(gtrs_text, tree_text, radius)
    result = st.session_state.sphere
    if result is None:
        return
    if not result["success"]:
        st.error(result["message"])
        return
    st.image(result["image"], caption="Sphere", use_container_width=True)
    with st.expander("Adjacency"):
        st.code(result["dump"])


def solve_tiling(source: str, custom: str, word: str, n: int) -> Dict[str, Any]:
    try:
        S = parse_tiling(custom) if source == "custom" else load_system(source)
        w = word.replace(",", " ").split()
        side = 2 ** 2 ** n
        solutions = brute_solutions(S, side, w)
        formulas = gen_formulas(S, n, w if len(w) == n else None)
        return {
            "success": True,
            "system": S,
            "solutions": solutions,
            "images": [render_solution(S, sol) for sol in solutions[:MAX_SHOWN_SOLUTIONS]],
            "formulas": {name: format_formula(phi) for name, phi in formulas.items()},
        }
    except GtrwfoError as e:
        return {"success": False, "message": str(e)}


def show_tiling():
    st.subheader("Tilings")
    source = st.selectbox("Tiling system", [*PRESETS, "custom"])
    custom = ""
    if source == "custom":
        custom = st.text_area("Tiling file", value="tiles: 0 1\nH: 0 1\nH: 1 0\nV: 0 1\nV: 1 0\n")
    n = st.radio("n", [0, 1], horizontal=True)
    word = st.text_input("Input word", value="")
    if st.button("Solve"):
        st.session_state.tiling = solve_tiling(source, custom, word, int(n))
    result = st.session_state.tiling
    if result is None:
        return
    if not result["success"]:
        st.error(result["message"])
        return
    st.write(f"{len(result['solutions'])} solution(s)")
    for i, image in enumerate(result["images"]):
        st.image(image, caption=f"Solution {i + 1}")
    with st.expander("Formulas"):
        for name, text in result["formulas"].items():
            st.markdown(f"**{name}**")
            st.code(text)


def main():
    """
    Main function for the Streamlit app.
    """
    try:
        st.set_page_config(page_title="gtrwfo workbench", layout="wide")
    except Exception as e:
        st.write(f"Error setting page config: {e}")

    init_session_state()
    st.title("Ground tree rewrite graphs")

    with st.sidebar:
        st.header("Configuration")
        config = st.session_state.config
        config.max_nodes = st.number_input("Node budget", min_value=100, max_value=10_000_000, value=max(100, min(config.max_nodes, 10_000_000)), step=1000)
        if st.button("Clear results"):
            st.session_state.sphere = None
            st.session_state.tiling = None
            st.rerun()

    bounds_tab, sphere_tab, tiling_tab = st.tabs(["Bounds", "Spheres", "Tilings"])
    with bounds_tab:
        show_bounds()
    with sphere_tab:
        show_sphere()
    with tiling_tab:
        show_tiling()


if __name__ == "__main__":
    main()
