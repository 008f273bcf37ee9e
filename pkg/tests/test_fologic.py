import pytest

from gtrwfo.errors import InputError
from gtrwfo.fologic import (
    FALSE,
    TRUE,
    And,
    Edge,
    Eq,
    Exists,
    FiniteStructure,
    ForAll,
    FreshNames,
    Implies,
    Not,
    Or,
    Path,
    actions_of,
    conj,
    count_atleast,
    count_exactly,
    disj,
    dist_leq,
    evaluate_finite,
    expand_paths,
    fischer_rabin,
    format_formula,
    free_vars,
    is_prenex,
    literals,
    map_domains,
    membership,
    parse_formula,
    prenex,
    qr,
    seq_formula,
    size,
    step_formula,
    strip_domains,
    substitute,
)


@pytest.fixture
def cycle() -> FiniteStructure:
    return FiniteStructure(range(3), [(0, "s", 1), (1, "s", 2), (2, "s", 0)])


@pytest.fixture
def line() -> FiniteStructure:
    return FiniteStructure(range(3), [(0, "s", 1), (1, "s", 2)])


@pytest.fixture
def lasso() -> FiniteStructure:
    """A tail 0→1→2→3 into the cycle 3→4→5→6→7→3."""
    edges = [(i, "s", i + 1) for i in range(7)] + [(7, "s", 3)]
    return FiniteStructure(range(8), edges)


class TestConstruction:
    def test_conj_and_disj_flatten(self):
        a, b, c = Eq("x", "y"), Edge("s", "x", "y"), Eq("y", "y")
        assert conj(And((a, b)), c) == And((a, b, c))
        assert conj(a) == a
        assert disj(Or((a,)), b) == Or((a, b))
        assert disj() == FALSE

    def test_negative_path_block(self):
        with pytest.raises(InputError):
            Path(((("s",), -1),), "x", "y")

    def test_measures(self):
        phi = parse_formula("(forall x (exists y (or (edge s x y) (path x z (t 1)))))")
        assert free_vars(phi) == {"z"}
        assert actions_of(phi) == {"s", "t"}
        assert qr(phi) == 2
        assert size(phi) == 6


class TestRenaming:
    def test_fresh_names_skip_used(self):
        fresh = FreshNames({"x_1"})
        assert fresh("x") == "x_2"
        assert fresh("x") == "x_3"
        assert fresh("y") == "y_1"

    def test_substitute_avoids_capture(self):
        phi = Exists("y", Edge("s", "x", "y"))
        assert substitute(phi, {"x": "y"}) == Exists("y_1", Edge("s", "y", "y_1"))

    def test_substitute_leaves_bound_variable(self):
        phi = Exists("x", Eq("x", "z"))
        assert substitute(phi, {"x": "w"}) == phi
        assert substitute(phi, {"z": "w"}) == Exists("x", Eq("x", "w"))

    def test_prenex_renames_clashes(self):
        phi = And((Exists("x", Edge("a", "x", "x")), Exists("x", Eq("x", "x"))))
        assert prenex(phi) == Exists("x", Exists("x_1", And((Edge("a", "x", "x"), Eq("x_1", "x_1")))))

    def test_prenex_keeps_free_variables(self):
        phi = And((Edge("a", "x", "x"), Exists("x", Eq("x", "x"))))
        assert prenex(phi) == Exists("x_1", And((Edge("a", "x", "x"), Eq("x_1", "x_1"))))

    def test_prenex_pushes_negation(self):
        result = prenex(Not(ForAll("x", Edge("a", "x", "x"))))
        assert result == Exists("x", Not(Edge("a", "x", "x")))
        assert is_prenex(result)

    def test_prenex_is_equivalent(self, cycle: FiniteStructure):
        phi = parse_formula("(implies (exists x (edge s x x)) (forall y (exists x (edge s y x))))")
        assert is_prenex(prenex(phi))
        assert evaluate_finite(cycle, prenex(phi)) == evaluate_finite(cycle, phi)

    def test_prenex_rejects_domains(self):
        with pytest.raises(InputError):
            prenex(Exists("x", Eq("x", "x"), "D"))

    def test_domains(self):
        phi = parse_formula("(exists-in D x (forall-in E y (edge s x y)))")
        assert strip_domains(phi) == Exists("x", ForAll("y", Edge("s", "x", "y")))
        guarded = map_domains(phi, lambda q: type(q)(q.var, And((Eq(q.var, q.var), q.body))))
        assert guarded == Exists("x", And((Eq("x", "x"), ForAll("y", And((Eq("y", "y"), Edge("s", "x", "y")))))))


class TestGenerators:
    @pytest.mark.parametrize("j", range(17))
    def test_fischer_rabin_on_lasso(self, lasso: FiniteStructure, j: int):
        phi = fischer_rabin(Edge("s", "x", "y"), j)
        assert free_vars(phi) <= {"x", "y"}
        for u in lasso.nodes:
            targets = lasso.path_targets(u, ((("s",), j),))
            assert len(targets) == 1
            for v in lasso.nodes:
                assert evaluate_finite(lasso, phi, {"x": u, "y": v}) is (v in targets)

    @pytest.mark.parametrize("j", range(17))
    def test_dist_leq_on_lasso(self, lasso: FiniteStructure, j: int):
        distance = {0: 0, 1: 1, 2: 2, 3: 3, 4: 4, 7: 4, 5: 5, 6: 5}
        near = dist_leq(["s"], j)
        for v in lasso.nodes:
            assert evaluate_finite(lasso, near, {"x": 0, "y": v}) is (distance[v] <= j)

    def test_fischer_rabin_rank_is_logarithmic(self):
        theta = Edge("s", "x", "y")
        assert fischer_rabin(theta, 0) == Eq("x", "y")
        assert qr(fischer_rabin(theta, 8)) - qr(fischer_rabin(theta, 4)) == 3
        with pytest.raises(InputError):
            fischer_rabin(theta, -1)

    def test_dist_leq_is_undirected(self, line: FiniteStructure):
        near = dist_leq(["s"], 1)
        assert evaluate_finite(line, near, {"x": 1, "y": 0})
        assert evaluate_finite(line, near, {"x": 1, "y": 1})
        assert not evaluate_finite(line, near, {"x": 0, "y": 2})
        assert evaluate_finite(line, dist_leq(["s"], 2), {"x": 2, "y": 0})

    def test_sequences(self):
        assert step_formula(["t", "s"]) == Or((Edge("s", "x", "y"), Edge("t", "x", "y")))
        assert step_formula([]) == FALSE
        assert seq_formula([]) == Eq("x", "y")
        chain = FiniteStructure(range(3), [(0, "s", 1), (1, "t", 2)])
        phi = seq_formula([(["s"], 1), (["t"], 1)])
        assert free_vars(phi) == {"x", "y"}
        assert evaluate_finite(chain, phi, {"x": 0, "y": 2})
        assert not evaluate_finite(chain, phi, {"x": 0, "y": 1})
        assert not evaluate_finite(chain, seq_formula([(["t"], 1), (["s"], 1)]), {"x": 0, "y": 2})

    def test_expand_paths(self, cycle: FiniteStructure):
        atom = Path(((("s",), 2),), "x", "y")
        expanded = expand_paths(atom)
        assert actions_of(expanded) == {"s"}
        for u in range(3):
            for v in range(3):
                env = {"x": u, "y": v}
                assert evaluate_finite(cycle, expanded, env) == evaluate_finite(cycle, atom, env)

    def test_counting(self):
        star = FiniteStructure(range(3), [(0, "s", 1), (0, "t", 2)])
        assert evaluate_finite(star, count_atleast(["s", "t"], 2), {"x": 0})
        assert not evaluate_finite(star, count_atleast(["s", "t"], 3), {"x": 0})
        assert evaluate_finite(star, count_exactly(["s", "t"], 2), {"x": 0})
        assert evaluate_finite(star, count_exactly(["s"], 0), {"x": 1})
        with pytest.raises(InputError):
            count_atleast(["s"], 0)

    def test_membership(self):
        assert membership({"a"}, {"a", "b"}) == Not(Exists("m", Edge("b", "x", "m")))
        assert membership({"a", "b"}, {"a", "b"}) == TRUE

    def test_literals(self):
        eq, edge = Eq("x", "y"), Edge("a", "x", "y")
        assert list(literals(And((eq, Not(edge))))) == [(eq, True), (edge, False)]
        assert list(literals(Not(Implies(eq, edge)))) == [(eq, True), (edge, False)]
        assert list(literals(Or((eq, edge)))) == []


class TestSyntax:
    def test_parse(self):
        phi = parse_formula("(exists (x y) (and (edge s x y) (path x y (s t 2) (s 1))))")
        path = Path(((("s", "t"), 2), (("s",), 1)), "x", "y")
        assert phi == Exists("x", Exists("y", And((Edge("s", "x", "y"), path))))

    @pytest.mark.parametrize(
        "text",
        [
            "(forall x (implies (edge s x x) (not (= x x))))",
            "(exists-in U x (iff (edge |@[a;b]| x x) (path x x)))",
            "(or (= x y) true false)",
        ],
    )
    def test_format_round_trip(self, text: str):
        phi = parse_formula(text)
        assert parse_formula(format_formula(phi)) == phi

    def test_quoted_and_alias_actions(self):
        assert parse_formula("(edge |@[a;b]| x y)").action == "@[a;b]"
        assert parse_formula("(edge oneddag x y)").action == "𝟙‡"

    def test_constants_and_comments(self):
        assert parse_formula("true") == TRUE
        assert parse_formula("; leading comment\n(= x y)") == Eq("x", "y")

    def test_domain_tag(self):
        assert parse_formula("(forall-in D x (= x x))") == ForAll("x", Eq("x", "x"), "D")

    @pytest.mark.parametrize(
        "text",
        ["", "(and (= x y)", "(foo x)", "(= x)", "(= x y) (= y x)", "(path x y (s t))", "()"],
    )
    def test_malformed(self, text: str):
        with pytest.raises(InputError):
            parse_formula(text)

    def test_error_line(self):
        with pytest.raises(InputError) as info:
            parse_formula("(and\n (= x y)\n (bogus))")
        assert info.value.line == 3


class TestEvaluation:
    def test_free_variables_must_be_assigned(self, cycle: FiniteStructure):
        with pytest.raises(InputError):
            evaluate_finite(cycle, Eq("x", "y"), {"x": 0})

    def test_domains(self):
        g = FiniteStructure(range(2), [(1, "s", 1)])
        phi = parse_formula("(exists-in D x (edge s x x))")
        assert not evaluate_finite(g, phi, domains={"D": lambda n, env: n == 0})
        assert evaluate_finite(g, phi, domains={"D": lambda n, env: n == 1})
        with pytest.raises(InputError):
            evaluate_finite(g, phi)

    def test_assignment_restored(self, cycle: FiniteStructure):
        phi = And((Exists("x", Edge("s", "x", "y")), Eq("x", "x")))
        assert evaluate_finite(cycle, phi, {"x": 0, "y": 1})

    def test_bad_edge(self):
        with pytest.raises(InputError):
            FiniteStructure([0], [(0, "s", 1)])
