import math

import pytest

from gtrwfo.errors import CapExceeded, InputError, NodeNotInDomain
from gtrwfo.trees import (
    RankedAlphabet,
    RankedTree,
    canonical_symbol,
    chain_bottom,
    cut,
    diff,
    domain,
    enumerate_trees,
    format_node,
    format_term,
    int_max,
    internal_nodes,
    is_chain,
    is_prefix_closed,
    label,
    leaf,
    leaf_count_feasible,
    leaves,
    make_chain,
    norm,
    parse_alphabet,
    parse_term,
    replace,
    subtree,
    trees_by_size,
    up,
)


@pytest.fixture
def t(binary: RankedAlphabet) -> RankedTree:
    return parse_term("f(a,f(b,a))", binary)


class TestAlphabet:
    def test_parse(self):
        A = parse_alphabet("a/0 f/2\n# unary next\ng/1")
        assert len(A) == 3
        assert A.rank("f") == 2
        assert A.constants == ["a"]
        assert A.ranks == frozenset({1, 2})
        assert A.p == 2

    def test_aliases(self):
        assert canonical_symbol("oneddag") == "𝟙‡"
        assert canonical_symbol("heart") == "♥"
        assert canonical_symbol("zerodag") == "𝕆†"
        assert canonical_symbol("f") == "f"
        assert parse_alphabet("dot/2 zero/0").rank("•") == 2

    @pytest.mark.parametrize(
        "text",
        ["a0", "a/x", "f/2", "a/0 a/0"],
    )
    def test_invalid(self, text: str):
        with pytest.raises(InputError):
            parse_alphabet(text)

    def test_error_carries_line(self):
        with pytest.raises(InputError) as info:
            parse_alphabet("a/0\nbad")
        assert info.value.line == 2

    def test_constants_only(self):
        A = RankedAlphabet((("a", 0), ("b", 0)))
        assert A.p == 0
        assert A.ranks == frozenset()


class TestTerms:
    def test_round_trip(self, t: RankedTree):
        assert format_term(t) == "f(a,f(b,a))"
        assert parse_term(" f( a , f(b,a) ) ") == t

    def test_alias_symbols(self):
        s = parse_term("dot(one,zeroddag)")
        assert s.symbol == "•"
        assert [c.symbol for c in s.children] == ["𝟙", "𝕆‡"]

    def test_rank_checked_against_alphabet(self, binary: RankedAlphabet):
        with pytest.raises(InputError):
            parse_term("f(a)", binary)
        with pytest.raises(InputError):
            parse_term("g(a,a)", binary)

    @pytest.mark.parametrize("text", ["", "f(a,b", "f(a,b))", "f(,a)", "a b"])
    def test_malformed(self, text: str):
        with pytest.raises(InputError):
            parse_term(text)

    def test_structural_equality_and_hash(self):
        assert parse_term("f(a,b)") == RankedTree("f", [leaf("a"), leaf("b")])
        assert len({parse_term("f(a,b)"), parse_term("f(a,b)"), parse_term("f(b,a)")}) == 2

    def test_immutable(self, t: RankedTree):
        with pytest.raises(AttributeError):
            t.symbol = "g"


class TestNodes:
    def test_domain_and_labels(self, t: RankedTree):
        assert domain(t) == {(), (1,), (2,), (2, 1), (2, 2)}
        assert leaves(t) == [(1,), (2, 1), (2, 2)]
        assert internal_nodes(t) == [(), (2,)]
        assert label(t, (2, 1)) == "b"
        assert t.size == 5

    def test_format_node(self):
        assert format_node(()) == "ε"
        assert format_node((2, 1)) == "21"
        assert format_node((12, 1)) == "12.1"

    def test_subtree_and_replace(self, t: RankedTree):
        assert subtree(t, (2,)) == parse_term("f(b,a)")
        assert replace(t, (2,), leaf("b")) == parse_term("f(a,b)")
        assert replace(t, (), leaf("a")) == leaf("a")

    def test_outside_domain(self, t: RankedTree):
        with pytest.raises(NodeNotInDomain):
            subtree(t, (3,))
        with pytest.raises(NodeNotInDomain):
            replace(t, (1, 1), leaf("a"))

    def test_diff(self, t: RankedTree):
        assert diff(t, leaf("a")) == 4
        assert diff(leaf("a"), t) == 0
        assert diff(t, parse_term("f(f(a,a),a)")) == 2

    def test_norm(self, t: RankedTree):
        assert norm((t, leaf("a"))) == 6
        assert norm(()) == 0


class TestCut:
    def test_up_is_prefix_closed(self, t: RankedTree):
        assert up(t, 1) == {(), (2,)}
        assert up(t, 3) == {()}
        assert up(t, 5) == set()
        assert is_prefix_closed(up(t, 1))

    def test_cut(self, t: RankedTree):
        assert cut(t, set()) == (t,)
        assert cut(t, {()}) == (leaf("a"), parse_term("f(b,a)"))
        assert cut(t, {(), (2,)}) == (leaf("a"), leaf("b"), leaf("a"))

    def test_cut_preserves_nodes(self, t: RankedTree):
        C = {(), (2,)}
        assert norm(cut(t, C)) + len(C) == t.size

    def test_cut_needs_prefix_closed_set(self, t: RankedTree):
        with pytest.raises(InputError):
            cut(t, {(2,)})
        with pytest.raises(NodeNotInDomain):
            cut(t, {(), (3,)})


class TestChains:
    def test_is_chain(self):
        assert is_chain(parse_term("f(a,f(b,a))"))
        assert not is_chain(parse_term("f(f(a,a),f(b,a))"))
        assert not is_chain(leaf("a"))

    def test_chain_bottom(self):
        assert chain_bottom(parse_term("f(a,f(b,a))")) == (2,)
        assert chain_bottom(parse_term("f(a,b)")) == ()
        with pytest.raises(InputError):
            chain_bottom(parse_term("f(f(a,a),f(b,a))"))

    @pytest.mark.parametrize(
        "alphabet, n, feasible",
        [
            ("a/0 f/2", 1, True),
            ("a/0 f/2", 7, True),
            ("a/0 h/3", 2, False),
            ("a/0 h/3", 5, True),
            ("a/0 g/1", 1, True),
            ("a/0 g/1", 2, False),
            ("a/0 h/3 k/4", 6, True),
            ("a/0 k/4", 6, False),
        ],
    )
    def test_leaf_counts(self, alphabet: str, n: int, feasible: bool):
        A = parse_alphabet(alphabet)
        assert leaf_count_feasible(A, n) is feasible
        if feasible:
            chain = make_chain(A, n)
            assert len(leaves(chain)) == n
            assert n == 1 or is_chain(chain)
        else:
            with pytest.raises(InputError):
                make_chain(A, n)

    def test_single_leaf_chain_is_a_constant(self):
        assert make_chain(parse_alphabet("a/0 f/2"), 1) == leaf("a")

    def test_nonpositive_leaf_count(self):
        with pytest.raises(InputError):
            leaf_count_feasible(parse_alphabet("a/0 f/2"), 0)

    def test_int_max(self):
        assert int_max(parse_alphabet("a/0 f/2"), 3) == 2
        assert int_max(parse_alphabet("a/0 f/2 h/3"), 3) == 2
        assert int_max(parse_alphabet("a/0 h/3"), 5) == 2
        assert int_max(parse_alphabet("a/0 f/2 g/1"), 2) == math.inf
        with pytest.raises(InputError):
            int_max(parse_alphabet("a/0 h/3"), 2)


class TestEnumeration:
    def test_strata(self):
        A = parse_alphabet("a/0 f/2")
        strata = trees_by_size(A, 5)
        assert [len(s) for s in strata] == [0, 1, 0, 1, 0, 2]
        assert strata[3] == [parse_term("f(a,a)")]

    def test_order_and_count(self, binary: RankedAlphabet):
        trees = enumerate_trees(binary, 3)
        assert trees[:2] == [leaf("a"), leaf("b")]
        assert len(trees) == 2 + 4
        assert [s.size for s in trees] == sorted(s.size for s in trees)

    def test_cap(self, binary: RankedAlphabet):
        with pytest.raises(CapExceeded) as info:
            enumerate_trees(binary, 5, cap=5)
        assert info.value.cap_name == "max_alphabet"

    def test_nmax_must_be_positive(self, binary: RankedAlphabet):
        with pytest.raises(InputError):
            enumerate_trees(binary, 0)
