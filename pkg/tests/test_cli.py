import json
import os

import pytest

from gtrwfo.__main__ import EXIT_CAP, EXIT_FALSE, EXIT_INPUT, EXIT_TRUE, main
from gtrwfo.commands import COMMANDS
from gtrwfo.fologic import format_formula
from gtrwfo.gtrs import parse_gtrs
from gtrwfo.tiling import CHECKERBOARD, R0Instance, build_tile_tree, r0_gtrs
from gtrwfo.trees import format_term

STEP_GTRS = "alphabet: a/0 b/0 f/2\nactions: s\na -s-> b\n"
ARROW_GRAPH = "nodes: a b\na -e-> b\n"


@pytest.fixture
def write(tmp_path):
    def write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


def run_json(capsys, argv):
    code = main(["--json", *argv])
    return code, json.loads(capsys.readouterr().out)


class TestCheck:
    @pytest.mark.parametrize(
        "text, code",
        [
            ("(exists x (edge s x x))", EXIT_FALSE),
            ("(forall x (not (edge s x x)))", EXIT_TRUE),
            ("(exists x (not (= x x)))", EXIT_FALSE),
        ],
    )
    def test_verdicts(self, write, capsys, text: str, code: int):
        argv = ["check", "--gtrs", write("r.gtrs", STEP_GTRS), "--formula", write("phi.fo", text)]
        assert main(argv) == code
        assert capsys.readouterr().out.strip() == ("TRUE" if code == EXIT_TRUE else "FALSE")

    def test_bounds_only(self, write, capsys):
        code, result = run_json(
            capsys,
            ["check", "--gtrs", write("r.gtrs", STEP_GTRS), "--formula", write("phi.fo", "(exists x (edge s x x))"), "--bounds-only"],
        )
        assert code == EXIT_TRUE
        assert "verdict" not in result
        assert result["bounds"]["gamma"] == 2
        assert result["bounds"]["u_bound"] == "3^4"

    def test_cap(self, write, capsys):
        code, result = run_json(
            capsys,
            [
                "check",
                "--gtrs", write("r.gtrs", STEP_GTRS),
                "--formula", write("phi.fo", "(forall x (exists y (edge s x y)))"),
                "--max-alphabet", "1000",
            ],
        )
        assert code == EXIT_CAP
        assert result["error"] == "cap"
        assert result["cap"]["cap"] == "max_alphabet"
        assert result["bounds"]["ell"] == 1
        assert result["message"].startswith("CAP-EXCEEDED")

    def test_deep_sentence_reports_bounds(self, write, capsys):
        gtrs = write("r.gtrs", "alphabet: a/0 b/0 c/0 d/0 f/2\nactions: s\na -s-> b\n")
        phi = write("phi.fo", "(forall (x y) (exists (z w) (or (edge s x z) (edge s y w) (= z w))))")
        code, result = run_json(capsys, ["check", "--gtrs", gtrs, "--formula", phi, "--max-alphabet", "1000"])
        assert code == EXIT_CAP
        assert result["bounds"]["ell"] == 3
        assert result["bounds"]["alphabet_size"] == 5

    def test_input_errors(self, write, capsys, tmp_path):
        gtrs = write("r.gtrs", STEP_GTRS)
        assert main(["check", "--gtrs", gtrs, "--formula", str(tmp_path / "missing.fo")]) == EXIT_INPUT
        assert main(["check", "--gtrs", gtrs, "--formula", write("bad.fo", "(exists x")]) == EXIT_INPUT
        assert main(["check", "--gtrs", gtrs, "--formula", write("free.fo", "(edge s x x)")]) == EXIT_INPUT
        assert "not found" in capsys.readouterr().err

    def test_invalid_cap(self, write):
        argv = ["check", "--gtrs", write("r.gtrs", STEP_GTRS), "--formula", write("phi.fo", "true"), "--max-words", "0"]
        assert main(argv) == EXIT_INPUT

    def test_memory_variable(self, write, monkeypatch):
        monkeypatch.setenv("GTRWFO_MAX_MEM", "lots")
        argv = ["check", "--gtrs", write("r.gtrs", STEP_GTRS), "--formula", write("phi.fo", "true")]
        assert main(argv) == EXIT_INPUT


class TestBounds:
    def test_parameters(self, capsys):
        code, result = run_json(capsys, ["bounds", "--ell", "1", "--r", "2", "--p", "2", "--alphabet-size", "3"])
        assert code == EXIT_TRUE
        assert result["bounds"]["sigma"] == [46, 520]
        assert result["bounds"]["gamma"] == 268

    def test_from_files(self, write, capsys):
        code, result = run_json(
            capsys,
            ["bounds", "--gtrs", write("r.gtrs", STEP_GTRS), "--formula", write("phi.fo", "(forall x (exists y (edge s x y)))")],
        )
        assert code == EXIT_TRUE
        assert result["bounds"]["gamma"] == 78

    @pytest.mark.parametrize(
        "argv",
        [
            ["bounds", "--ell", "1", "--p", "2", "--alphabet-size", "3"],
            ["bounds", "--ell", "-1", "--r", "1", "--p", "2", "--alphabet-size", "3"],
            ["bounds", "--ell", "0", "--r", "1", "--p", "2", "--alphabet-size", "1"],
        ],
    )
    def test_missing_parameters(self, argv):
        assert main(argv) == EXIT_INPUT


class TestSpheres:
    def test_dump_and_png(self, write, capsys, tmp_path):
        png = tmp_path / "out" / "sphere.png"
        code, result = run_json(
            capsys,
            ["spheres", "--gtrs", write("r.gtrs", STEP_GTRS), "--trees", write("t.txt", "a\n"), "--radius", "1", "--png", str(png)],
        )
        assert code == EXIT_TRUE
        assert result["message"].splitlines()[0] == "radius 1, 2 nodes, 1 edges"
        assert result["sphere"]["edges"] == [["a", "s", "b"]]
        assert png.read_bytes().startswith(b"\x89PNG")

    def test_radius_zero(self, write, capsys):
        argv = ["spheres", "--gtrs", write("r.gtrs", STEP_GTRS), "--trees", write("t.txt", "f(a,b)"), "--radius", "0"]
        assert main(argv) == EXIT_TRUE
        assert capsys.readouterr().out.splitlines() == ["radius 0, 1 nodes, 0 edges", "[0] f(a,b) *c0"]

    def test_tree_string(self, write, capsys):
        code, result = run_json(
            capsys,
            ["spheres", "--gtrs", write("r.gtrs", STEP_GTRS), "--trees", write("t.txt", "a\nb\n"), "--radius", "1", "--string"],
        )
        assert code == EXIT_TRUE
        assert len(result["sphere"]["nodes"]) == 2

    def test_bad_tree(self, write):
        argv = ["spheres", "--gtrs", write("r.gtrs", STEP_GTRS), "--trees", write("t.txt", "a\nf(a)\n"), "--radius", "1"]
        assert main(argv) == EXIT_INPUT

    def test_node_cap(self, write):
        grow = "alphabet: a/0 f/2\nactions: g\na -g-> f(a,a)\n"
        argv = ["spheres", "--gtrs", write("r.gtrs", grow), "--trees", write("t.txt", "a"), "--radius", "6", "--max-nodes", "10"]
        assert main(argv) == EXIT_CAP


class TestOracle:
    @pytest.mark.parametrize("tree, code", [("f(a,b)", EXIT_TRUE), ("f(b,b)", EXIT_FALSE), ("x = f(a,a)", EXIT_TRUE)])
    def test_verdicts(self, write, tree: str, code: int):
        argv = [
            "oracle",
            "--gtrs", write("r.gtrs", STEP_GTRS),
            "--formula", write("phi.fo", "(exists y (edge s x y))"),
            "--tree", write("t.txt", tree),
        ]
        assert main(argv) == code

    def test_marked_tile_tree(self, write):
        inst = R0Instance(CHECKERBOARD, 0)
        argv = [
            "oracle",
            "--gtrs", write("r0.gtrs", str(r0_gtrs(CHECKERBOARD))),
            "--formula", write("marked.fo", format_formula(inst.marked("x"))),
            "--tree", write("t.txt", format_term(build_tile_tree(0, "1", 1, 1, mark=True))),
        ]
        assert main(argv) == EXIT_TRUE

    @pytest.mark.parametrize(
        "formula, tree",
        [
            ("(exists y (not (edge s x y)))", "a"),
            ("(exists z (and (edge s x z) (edge s y z)))", "a"),
            ("(exists z (and (edge s x z) (edge s y z)))", "x = a\nb"),
        ],
    )
    def test_rejected(self, write, formula: str, tree: str):
        argv = ["oracle", "--gtrs", write("r.gtrs", STEP_GTRS), "--formula", write("phi.fo", formula), "--tree", write("t.txt", tree)]
        assert main(argv) == EXIT_INPUT


class TestGenTiling:
    def test_formulas_to_files(self, capsys, tmp_path):
        out = tmp_path / "family"
        code, result = run_json(
            capsys, ["gen-tiling", "--system", "checkerboard", "--word", "0", "--alternating", "--out", str(out)]
        )
        assert code == EXIT_TRUE
        assert {"marked", "sol", "final", "alternating"} <= set(result["formulas"])
        assert (out / "final.fo").read_text(encoding="utf-8").strip() == result["formulas"]["final"]

    def test_trees(self, capsys, tmp_path):
        png = tmp_path / "solution.png"
        code, result = run_json(capsys, ["gen-tiling", "--system", "checkerboard", "--n", "0", "--emit", "trees", "--png", str(png)])
        assert code == EXIT_TRUE
        assert result["solutions"] == 2
        assert set(result["trees"]) == {"grid", "marked_grid"}
        assert os.path.getsize(png) > 0

    def test_gtrs(self, write, capsys):
        system = write("s.tiles", "tiles: 0 1\nH: 0 1\nH: 1 0\nV: 0 1\nV: 1 0\n")
        code, result = run_json(capsys, ["gen-tiling", "--system", system, "--n", "0", "--emit", "gtrs"])
        assert code == EXIT_TRUE
        assert len(parse_gtrs(result["gtrs"]).rules) == 22

    @pytest.mark.parametrize(
        "argv",
        [
            ["gen-tiling", "--system", "checkerboard"],
            ["gen-tiling", "--system", "checkerboard", "--word", "0", "--n", "2"],
            ["gen-tiling", "--system", "checkerboard", "--n", "1", "--alternating"],
            ["gen-tiling", "--system", "checkerboard", "--n", "2", "--emit", "trees"],
            ["gen-tiling", "--system", "no-such-file.tiles", "--n", "0"],
        ],
    )
    def test_rejected(self, argv):
        assert main(argv) == EXIT_INPUT


class TestFrEval:
    @pytest.mark.parametrize(
        "text, code",
        [("(exists x (exists y (edge e x y)))", EXIT_TRUE), ("(forall x (exists y (edge e x y)))", EXIT_FALSE)],
    )
    def test_verdicts(self, write, text: str, code: int):
        assert main(["fr-eval", "--graph", write("g.txt", ARROW_GRAPH), "--formula", write("phi.fo", text)]) == code

    def test_report(self, write, capsys):
        code, result = run_json(
            capsys,
            ["fr-eval", "--graph", write("g.txt", ARROW_GRAPH), "--formula", write("phi.fo", "(forall x (exists y (edge e x y)))")],
        )
        assert code == EXIT_FALSE
        assert result["length_bounds"] == [8, 9]
        assert result["stats"]["words_examined"] > 0

    def test_word_cap(self, write):
        argv = [
            "fr-eval",
            "--graph", write("g.txt", ARROW_GRAPH),
            "--formula", write("phi.fo", "(forall x (exists y (edge e x y)))"),
            "--max-words", "3",
        ]
        assert main(argv) == EXIT_CAP


class TestLemmas:
    def test_subset(self, capsys):
        code, result = run_json(capsys, ["lemmas", "--checks", "bounds,leaf_counts", "--scale", "0.05", "--seed", "4"])
        assert code == EXIT_TRUE
        assert result["verdict"] is True
        assert result["seed"] == 4
        assert [t["name"] for t in result["tallies"]] == ["bounds", "leaf_counts"]

    @pytest.mark.parametrize("argv", [["lemmas", "--checks", "nope"], ["lemmas", "--workers", "0"]])
    def test_rejected(self, argv):
        assert main(argv) == EXIT_INPUT


class TestCommands:
    def test_registry(self):
        assert set(COMMANDS) == {"check", "bounds", "spheres", "oracle", "gen-tiling", "fr-eval", "lemmas"}
        for name, command in COMMANDS.items():
            described = command.to_dict()
            assert described["name"] == name
            assert described["parameters"]["type"] == "object"

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit):
            main([])
