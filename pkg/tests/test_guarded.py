import pytest

from gtrwfo import guarded
from gtrwfo.errors import CapExceeded, InputError
from gtrwfo.fologic import parse_formula
from gtrwfo.gtrs import Gtrs
from gtrwfo.guarded import GuardedEvaluator, eval_guarded, eval_in_sphere, exploration_radius, is_guarded
from gtrwfo.trees import leaf, parse_term

FORMULAS = [
    "(exists y (edge s x y))",
    "(exists y (path x y (s 2)))",
    "(exists y (path y x (s 2)))",
    "(exists (y z) (and (edge s x y) (edge s y z)))",
    "(forall y (implies (edge s x y) (exists z (edge s z y))))",
    "(forall y (implies (edge s y x) (= y x)))",
]


def T(text: str):
    return parse_term(text)


class TestGuardedness:
    @pytest.mark.parametrize("text", FORMULAS)
    def test_guarded(self, text: str):
        assert is_guarded(parse_formula(text))

    @pytest.mark.parametrize(
        "text",
        [
            "(exists y (not (edge s x y)))",
            "(forall y (edge s x y))",
            "(exists y (or (edge s x y) (= y y)))",
            "(exists-in D y (edge s x y))",
        ],
    )
    def test_unguarded(self, text: str):
        assert not is_guarded(parse_formula(text))

    def test_bound_variables(self):
        phi = parse_formula("(exists y (edge s x y))")
        assert not is_guarded(phi, bound=[])
        assert is_guarded(phi, bound=["x"])

    def test_radius(self):
        assert exploration_radius(parse_formula("(exists y (edge s x y))")) == 2
        assert exploration_radius(parse_formula("(exists y (and (edge s x y) (exists z (path y z (s 2)))))")) == 5
        assert exploration_radius(parse_formula("(= x x)")) == 0
        with pytest.raises(InputError):
            exploration_radius(parse_formula("(exists y (= y y))"))


class TestEvaluation:
    @pytest.mark.parametrize(
        "text, tree, expected",
        [
            ("(exists y (edge s x y))", "f(a,b)", True),
            ("(exists y (edge s x y))", "f(b,b)", False),
            ("(exists y (path x y (s 2)))", "f(a,a)", True),
            ("(exists y (path x y (s 2)))", "f(a,b)", False),
            ("(exists y (path y x (s 2)))", "f(b,b)", True),
            ("(exists (y z) (and (edge s x y) (edge s y z)))", "f(a,a)", True),
            ("(exists (y z) (and (edge s x y) (edge s y z)))", "f(a,b)", False),
            ("(forall y (implies (edge s y x) (= y x)))", "f(a,a)", True),
            ("(forall y (implies (edge s y x) (= y x)))", "f(b,a)", False),
        ],
    )
    def test_swap(self, r_swap: Gtrs, text: str, tree: str, expected: bool):
        assert eval_guarded(r_swap, parse_formula(text), {"x": T(tree)}) is expected

    def test_infinite_graph(self, r_grow: Gtrs):
        x = {"x": leaf("a")}
        assert eval_guarded(r_grow, parse_formula("(exists y (edge g x y))"), x)
        assert not eval_guarded(r_grow, parse_formula("(exists y (and (edge g x y) (edge g y x)))"), x)
        assert eval_guarded(r_grow, parse_formula("(exists y (path x y (g 3)))"), x)

    @pytest.mark.parametrize("text", FORMULAS)
    @pytest.mark.parametrize("tree", ["a", "f(a,a)", "f(b,a)", "f(f(a,b),b)"])
    def test_agrees_with_sphere(self, r_swap: Gtrs, text: str, tree: str):
        phi = parse_formula(text)
        env = {"x": T(tree)}
        assert eval_guarded(r_swap, phi, env) == eval_in_sphere(r_swap, phi, env)

    def test_step_budget(self, r_grow: Gtrs):
        phi = parse_formula("(forall y (implies (edge g x y) (edge g x y)))")
        with pytest.raises(CapExceeded) as info:
            eval_guarded(r_grow, phi, {"x": T("f(a,a)")}, step_budget=1)
        assert info.value.cap_name == "step_budget"

    def test_memoized(self, r_swap: Gtrs):
        evaluator = GuardedEvaluator(r_swap)
        phi = parse_formula("(exists (y z) (and (edge s x y) (edge s y z)))")
        assert evaluator.evaluate(phi, {"x": T("f(a,a)")})
        steps = evaluator.steps
        assert evaluator.evaluate(phi, {"x": T("f(a,a)")})
        assert evaluator.steps == steps

    def test_memo_is_bounded(self, r_swap: Gtrs, monkeypatch):
        monkeypatch.setattr(guarded, "MEMO_ENTRIES", 2)
        evaluator = GuardedEvaluator(r_swap)
        phi = parse_formula(FORMULAS[4])
        blocks = ((("s",), 1),)
        for text in ("f(a,a)", "f(a,b)", "f(b,a)", "a", "f(a,a)"):
            assert evaluator.evaluate(phi, {"x": T(text)})
            evaluator.path_targets(T(text), blocks)
            assert len(evaluator._memo) <= 2
            assert len(evaluator._free) <= 2
            assert len(evaluator._paths) <= 2
        assert evaluator.path_targets(T("f(a,a)"), blocks) == {T("f(a,b)"), T("f(b,a)")}

    def test_path_targets(self, r_swap: Gtrs):
        evaluator = GuardedEvaluator(r_swap)
        blocks = ((("s",), 1),)
        assert evaluator.path_targets(T("f(a,a)"), blocks) == {T("f(a,b)"), T("f(b,a)")}
        assert evaluator.path_targets(T("f(a,b)"), blocks, backward=True) == {T("f(a,a)")}

    def test_errors(self, r_swap: Gtrs):
        with pytest.raises(InputError):
            eval_guarded(r_swap, parse_formula("(exists y (not (edge s x y)))"), {"x": leaf("a")})
        with pytest.raises(InputError):
            eval_guarded(r_swap, parse_formula("(exists y (edge s x y))"), {})
        with pytest.raises(InputError):
            eval_guarded(r_swap, parse_formula("(exists-in D y (edge s x y))"), {"x": leaf("a")})
        with pytest.raises(InputError):
            eval_in_sphere(r_swap, parse_formula("(exists y (edge s x y))"), {})
