import math

import pytest

from gtrwfo import fologic, reduction
from gtrwfo.errors import CapExceeded, InputError
from gtrwfo.fologic import Edge, Exists, ForAll, parse_formula
from gtrwfo.gtrs import Gtrs, parse_gtrs
from gtrwfo.guarded import eval_guarded
from gtrwfo.reduction import (
    DOLLAR,
    HASH,
    Witness,
    bounds_for,
    build_alphabets,
    decide,
    gamma,
    minimal_w_words,
    quantifier_depth,
    relativize,
    report_bounds,
    sigma,
    symbol_name,
    word_length_bound,
)
from gtrwfo.trees import leaf, parse_alphabet, parse_term, trees_by_size


def T(text: str):
    return parse_term(text)


@pytest.fixture(scope="module")
def step_instance():
    R = parse_gtrs("alphabet: a/0 b/0 f/2\nactions: s\na -s-> b")
    return reduction.compile(R, parse_formula("(exists x (edge s x x))"))


class TestBounds:
    def test_sigma(self):
        assert sigma(0, 1, 2, 2) == 46
        assert sigma(1, 1, 2, 2) == 520
        with pytest.raises(InputError):
            sigma(2, 1, 2, 2)

    def test_gamma(self):
        assert gamma(1, 2, 2) == 268
        assert gamma(0, 1, 2) == 2
        assert word_length_bound(0, 0, 1, 3) == 1 + 4

    def test_bounds_for(self):
        b = bounds_for(parse_alphabet("a/0 f/2"), 1, 0)
        assert b.sigma == (2,)
        assert b.gamma == 2
        assert b.u_max_size == 4
        assert b.u_bound == 16
        assert b.u2_bound_log10 == pytest.approx(2 * math.log10(17))
        assert b.gamma_size_log10 == pytest.approx(math.log10(291))
        assert b.to_dict()["sigma"] == [2]

    def test_report_bounds(self, r_swap: Gtrs):
        b = report_bounds(r_swap, parse_formula("(forall x (exists y (edge s x y)))"))
        assert (b.ell, b.r, b.p, b.alphabet_size) == (1, 1, 2, 3)
        assert b.gamma == 78

    @pytest.mark.parametrize(
        "text, depth",
        [
            ("true", 0),
            ("(exists x (= x x))", 0),
            ("(and (exists x (= x x)) (exists y (= y y)))", 1),
            ("(not (forall x (exists y (edge s x y))))", 1),
        ],
    )
    def test_quantifier_depth(self, text: str, depth: int):
        assert quantifier_depth(parse_formula(text)) == depth


class TestAlphabets:
    def test_small_alphabets(self, r_swap: Gtrs):
        alphabets = build_alphabets(r_swap, 0)
        assert len(alphabets.U) == 6
        assert set(alphabets.U_i[0]) == {leaf("a"), leaf("b")}
        assert set(alphabets.V_i[0]) == {leaf("a"), leaf("b")}
        assert len(alphabets.W_i[0]) == 4

    def test_z_property(self, r_swap: Gtrs):
        alphabets = build_alphabets(r_swap, 0)
        assert alphabets.z_property((T("f(a,a)"),), 0)
        assert alphabets.z_property((T("f(a,a)"), leaf("a")), 0)
        assert not alphabets.z_property((leaf("a"),), 0)
        assert not alphabets.z_property((T("f(a,a)"), T("f(b,b)")), 0)

    def test_minimal_words(self, r_swap: Gtrs):
        alphabets = build_alphabets(r_swap, 0)
        words = minimal_w_words(alphabets, 0)
        assert sorted(words, key=repr) == sorted(((t,) for t in alphabets.W_i[0]), key=repr)

    def test_cap_carries_bounds(self, r_swap: Gtrs):
        with pytest.raises(CapExceeded) as info:
            build_alphabets(r_swap, 1, max_alphabet=100)
        assert info.value.bounds["gamma"] == 78


class TestRelativize:
    def test_tags(self):
        phi = Exists("x", ForAll("y", Edge("s", "x", "y")))
        assert relativize(phi, 1) == Exists("x", ForAll("y", Edge("s", "x", "y"), "L0(x)"), "L1")

    @pytest.mark.parametrize(
        "phi, ell",
        [
            (Exists("x", Edge("s", "x", "x")), 1),
            (fologic.Not(Exists("x", Edge("s", "x", "x"))), 0),
            (Exists("x", Edge("s", "x", "x"), "L0"), 0),
        ],
    )
    def test_rejected(self, phi, ell: int):
        with pytest.raises(InputError):
            relativize(phi, ell)


class TestCompiledInstance:
    def test_letters(self, step_instance):
        assert step_instance.ell == 0
        assert {DOLLAR, HASH} <= set(step_instance.gamma_letters)
        assert step_instance.u2_size == 6 + 36
        assert len(step_instance.gamma_letters) == 6 + 36 + 2

    def test_graph(self, step_instance):
        G = step_instance.graph
        assert G.has_edge("[a]", "s", "[b]")
        assert G.has_edge("[a;a]", "s", "[b;a]")
        assert G.has_edge("[a]", "@[a]", HASH)
        assert not G.loops("[a]")

    def test_back_map(self, step_instance):
        assert step_instance.back_map(("[a]",)) == Witness(None, (leaf("a"),))
        witness = step_instance.back_map(("[f(a,a)]", DOLLAR))
        assert witness == Witness(1, (T("f(a,a)"),))
        assert str(witness) == "(1, f(a,a))"
        with pytest.raises(InputError):
            step_instance.back_map(("[a]", HASH))

    def test_canonical_word_and_exp(self, step_instance):
        assert step_instance.canonical_word((DOLLAR, "[a]")) == ("[a]", DOLLAR)
        assert step_instance.exp(("[a;b]", DOLLAR)) == (leaf("a"), leaf("b"))
        assert symbol_name((leaf("a"), leaf("b"))) == "[a;b]"

    def test_factorize(self, step_instance):
        assert step_instance.factorize((T("f(a,a)"), leaf("a")), 0) == ("[f(a,a)]", "[a]")
        assert step_instance.factorize((leaf("a"), leaf("b")), 0) is None

    def test_language_domain(self, step_instance):
        domain = step_instance.domains["L0"]
        assert domain.contains(("[f(a,b)]", DOLLAR), {})
        assert domain.contains(("[a]",), {})
        assert not domain.contains(("[f(a,b)]",), {})
        assert not domain.contains((HASH,), {})
        assert not domain.contains(("[a;a]",), {})

    def test_sphere_cache_is_bounded(self, step_instance, monkeypatch):
        monkeypatch.setattr(reduction, "MEMO_ENTRIES", 1)
        domain = reduction.LanguageDomain(step_instance, 0, ["y"])
        near_a = domain.near({"y": ("[a]",)})
        assert ("[b]",) in near_a
        domain.near({"y": ("[f(a,a)]",)})
        assert len(domain._spheres) == 1
        assert domain.near({"y": ("[a]",)}) == near_a
        assert domain.contains(("[b]",), {"y": ("[a]",)})

    def test_spelled_out_sentence(self, step_instance):
        phi4 = step_instance.phi4
        assert not fologic.free_vars(phi4)
        assert not fologic.has_domains(phi4)


class TestDecide:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("(exists x (edge s x x))", False),
            ("(forall x (not (edge s x x)))", True),
            ("(exists x (= x x))", True),
            ("(exists x (path x x))", True),
            ("true", True),
        ],
    )
    def test_step(self, r_step: Gtrs, text: str, expected: bool):
        assert decide(r_step, parse_formula(text)) is expected

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("(exists x (edge s x x))", True),
            ("(forall x (edge s x x))", True),
            ("(exists x (not (edge s x x)))", False),
        ],
    )
    def test_loop(self, r_loop: Gtrs, text: str, expected: bool):
        assert decide(r_loop, parse_formula(text)) is expected

    def test_alphabet_cap(self, r_step: Gtrs):
        with pytest.raises(CapExceeded) as info:
            decide(r_step, parse_formula("(forall x (exists y (edge s x y)))"), max_alphabet=1000)
        assert info.value.cap_name == "max_alphabet"
        assert info.value.bounds["ell"] == 1

    def test_literal_sentence_hits_word_cap(self, r_step: Gtrs):
        with pytest.raises(CapExceeded) as info:
            decide(r_step, parse_formula("(exists x (edge s x x))"), literal=True, max_words=1000)
        assert info.value.cap_name == "max_words"
        assert info.value.bounds["gamma"] == 2

    @pytest.mark.parametrize(
        "gtrs, text",
        [
            ("alphabet: a/0 g/1\nactions: s\na -s-> a", "(exists x (edge s x x))"),
            ("alphabet: a/0 f/2\nactions: s\na -s-> a", "(exists x (edge t x x))"),
            ("alphabet: a/0 f/2\nactions: s\na -s-> a", "(edge s x x)"),
        ],
    )
    def test_rejected(self, gtrs: str, text: str):
        with pytest.raises(InputError):
            decide(parse_gtrs(gtrs), parse_formula(text))


# Self-loop, non-loop and total-successor sentences with their negations;
# the last one is the mixed ∃∀ sentence. None marks a CAP verdict.
CORPUS = [
    pytest.param("r_loop", "(exists x (edge s x x))", True, id="self-loop"),
    pytest.param("r_loop", "(not (exists x (edge s x x)))", False, id="no-self-loop"),
    pytest.param("r_loop", "(exists x (not (edge s x x)))", False, id="non-loop"),
    pytest.param("r_loop", "(not (exists x (not (edge s x x))))", True, id="no-non-loop"),
    pytest.param("r_step", "(forall x (exists y (edge s x y)))", None, id="total-successor"),
    pytest.param("r_step", "(exists x (forall y (not (edge s x y))))", None, id="sink"),
]


class TestCorpus:
    @pytest.mark.parametrize("gtrs, text, expected", CORPUS)
    def test_decide(self, request, gtrs: str, text: str, expected):
        R = request.getfixturevalue(gtrs)
        phi = parse_formula(text)
        if expected is not None:
            assert decide(R, phi, max_alphabet=1000) is expected
            return
        with pytest.raises(CapExceeded) as info:
            decide(R, phi, max_alphabet=1000)
        assert info.value.cap_name == "max_alphabet"
        bounds = info.value.bounds
        assert (bounds["ell"], bounds["r"], bounds["p"], bounds["alphabet_size"]) == (1, 1, 2, 3)
        assert bounds["sigma"] == [16, 148]
        assert bounds["gamma"] == 78
        assert bounds["u_max_size"] == 156
        assert bounds["u_bound"] == 3 ** 156

    def test_most_sentences_decide(self):
        assert sum(param.values[2] is not None for param in CORPUS) >= 4

    @pytest.mark.parametrize(
        "gtrs, text, trees, expected",
        [
            # a is a self-loop witness, so self-loop holds and its negation fails
            ("r_loop", "(edge s x x)", ["a"], True),
            # every small tree carries the loop, so non-loop fails
            ("r_loop", "(edge s x x)", None, True),
            # b has no successor: total-successor fails and the sink sentence holds
            ("r_step", "(exists y (edge s x y))", ["b"], False),
            ("r_step", "(forall y (not (edge s x y)))", ["b", "dot(b,b)"], True),
        ],
    )
    def test_verdicts_agree_with_guarded_evaluation(self, request, gtrs: str, text: str, trees, expected: bool):
        R = request.getfixturevalue(gtrs)
        phi = parse_formula(text)
        if trees is None:
            candidates = [t for stratum in trees_by_size(R.alphabet, 5) for t in stratum]
        else:
            candidates = [T(t) for t in trees]
        assert candidates
        for t in candidates:
            assert eval_guarded(R, phi, {"x": t}) is expected
