"""
Ranked alphabets, ranked trees and their structural operations.

Trees are immutable values with a precomputed structural hash, so they can be
used as set members and dictionary keys throughout the package. Node
addresses are tuples of 1-based child indices; the root is ``()``.
"""
import itertools
import logging
import math
import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from gtrwfo.errors import CapExceeded, InputError, NodeNotInDomain

logger = logging.getLogger(__name__)

Node = Tuple[int, ...]

ALIASES = {
    "heart": "♥",
    "one": "𝟙",
    "zero": "𝕆",
    "dag": "†",
    "ddag": "‡",
    "dot": "•",
}
_ALIAS_TOKEN = re.compile(r"(?:heart|one|zero|ddag|dag|dot)+")
_ALIAS_PART = re.compile(r"heart|one|zero|ddag|dag|dot")
_TERM_TOKEN = re.compile(r"\s*(?:(?P<sym>[^\s(),]+)|(?P<open>\()|(?P<close>\))|(?P<comma>,))")


def canonical_symbol(token: str) -> str:
    """
    Resolve ASCII aliases: ``oneddag`` becomes ``𝟙‡``, ``heart`` becomes ``♥``.
    """
    if _ALIAS_TOKEN.fullmatch(token):
        return _ALIAS_PART.sub(lambda m: ALIASES[m.group(0)], token)
    return token


@dataclass(frozen=True)
class RankedAlphabet:
    """
    Finite set of symbols, each with a fixed rank.
    """

    symbols: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise InputError("symbol names must be unique")
        if any(rank < 0 for _, rank in self.symbols):
            raise InputError("ranks must be non-negative")
        if not any(rank == 0 for _, rank in self.symbols):
            raise InputError("a ranked alphabet needs at least one constant")

    @classmethod
    def from_dict(cls, arity: Mapping[str, int]) -> "RankedAlphabet":
        return cls(tuple((canonical_symbol(k), int(v)) for k, v in arity.items()))

    @property
    def arity(self) -> Dict[str, int]:
        return dict(self.symbols)

    def rank(self, symbol: str) -> int:
        for name, rank in self.symbols:
            if name == symbol:
                return rank
        raise InputError(f"unknown symbol {symbol!r}")

    def __contains__(self, symbol: str) -> bool:
        return any(name == symbol for name, _ in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def of_rank(self, m: int) -> List[str]:
        return [name for name, rank in self.symbols if rank == m]

    @property
    def constants(self) -> List[str]:
        return self.of_rank(0)

    @property
    def ranks(self) -> FrozenSet[int]:
        """Ranks m >= 1 carried by at least one symbol."""
        return frozenset(rank for _, rank in self.symbols if rank >= 1)

    @property
    def p(self) -> int:
        """Maximal rank, 0 for an alphabet of constants."""
        return max([0, *self.ranks])

    def __str__(self) -> str:
        return " ".join(f"{name}/{rank}" for name, rank in self.symbols)


class RankedTree:
    """
    A finite ranked tree ``symbol(children...)``.
    """

    __slots__ = ("symbol", "children", "_hash", "_size")

    def __init__(self, symbol: str, children: Sequence["RankedTree"] = ()):
        children = tuple(children)
        object.__setattr__(self, "symbol", symbol)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "_hash", hash((symbol, tuple(c._hash for c in children))))
        object.__setattr__(self, "_size", 1 + sum(c._size for c in children))

    def __setattr__(self, name, value):
        raise AttributeError("RankedTree is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, RankedTree) or self._hash != other._hash or self._size != other._size:
            return False
        return self.symbol == other.symbol and self.children == other.children

    def __lt__(self, other: "RankedTree") -> bool:
        return sort_key(self) < sort_key(other)

    def __repr__(self) -> str:
        return f"RankedTree({format_term(self)!r})"

    def __str__(self) -> str:
        return format_term(self)

    def __reduce__(self):
        return (RankedTree, (self.symbol, self.children))

    @property
    def size(self) -> int:
        return self._size

    @property
    def rank(self) -> int:
        return len(self.children)

    def is_leaf(self) -> bool:
        return not self.children

    def validate(self, alphabet: RankedAlphabet) -> None:
        """
        Raise InputError unless every node's child count matches its rank.
        """
        for node, sub in iter_nodes(self):
            if sub.symbol not in alphabet:
                raise InputError(f"symbol {sub.symbol!r} at {format_node(node)} is not in the alphabet")
            if alphabet.rank(sub.symbol) != len(sub.children):
                raise InputError(
                    f"symbol {sub.symbol!r} at {format_node(node)} has {len(sub.children)} children, "
                    f"rank is {alphabet.rank(sub.symbol)}"
                )


TreeString = Tuple[RankedTree, ...]


def leaf(symbol: str) -> RankedTree:
    return RankedTree(symbol)


def sort_key(t: RankedTree) -> Tuple:
    """Size first, then symbol, then children: the enumeration order."""
    return (t.size, t.symbol, tuple(sort_key(c) for c in t.children))


def format_node(x: Node) -> str:
    if not x:
        return "ε"
    if all(i < 10 for i in x):
        return "".join(str(i) for i in x)
    return ".".join(str(i) for i in x)


def format_term(t: RankedTree) -> str:
    if not t.children:
        return t.symbol
    return f"{t.symbol}({','.join(format_term(c) for c in t.children)})"


def format_string(w: Iterable[RankedTree]) -> str:
    return "(" + ", ".join(format_term(t) for t in w) + ")"


def parse_term(text: str, alphabet: Optional[RankedAlphabet] = None) -> RankedTree:
    """
    Parse ``name(child1,...,childk)``; constants are written bare.

    Args:
        text: Term text; whitespace is ignored
        alphabet: When given, ranks are checked against it

    Returns:
        The parsed tree
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"unexpected character {text[pos]!r} in term {text!r}")
        pos = m.end()
        if m.group("sym"):
            tokens.append(("sym", canonical_symbol(m.group("sym"))))
        elif m.group("open"):
            tokens.append(("(", "("))
        elif m.group("close"):
            tokens.append((")", ")"))
        elif m.group("comma"):
            tokens.append((",", ","))
    if not tokens:
        raise InputError("empty term")

    index = 0

    def parse() -> RankedTree:
        nonlocal index
        if index >= len(tokens) or tokens[index][0] != "sym":
            raise InputError(f"expected a symbol in term {text!r}")
        symbol = tokens[index][1]
        index += 1
        children = []
        if index < len(tokens) and tokens[index][0] == "(":
            index += 1
            children.append(parse())
            while index < len(tokens) and tokens[index][0] == ",":
                index += 1
                children.append(parse())
            if index >= len(tokens) or tokens[index][0] != ")":
                raise InputError(f"unbalanced parentheses in term {text!r}")
            index += 1
        return RankedTree(symbol, children)

    tree = parse()
    if index != len(tokens):
        raise InputError(f"trailing input in term {text!r}")
    if alphabet is not None:
        tree.validate(alphabet)
    return tree


def parse_alphabet(text: str) -> RankedAlphabet:
    """
    Parse an alphabet file: one ``name/rank`` entry per line or per token.
    Lines starting with ``#`` are comments.
    """
    symbols = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        for entry in line.split():
            name, sep, rank = entry.rpartition("/")
            if not sep or not name or not rank.isdigit():
                raise InputError(f"expected name/rank, got {entry!r}", line=lineno)
            symbols.append((canonical_symbol(name), int(rank)))
    return RankedAlphabet(tuple(symbols))


def iter_nodes(t: RankedTree, prefix: Node = ()) -> Iterator[Tuple[Node, RankedTree]]:
    """Pre-order (hence lexicographic) traversal yielding (address, subtree)."""
    yield prefix, t
    for i, child in enumerate(t.children, start=1):
        yield from iter_nodes(child, prefix + (i,))


def domain(t: RankedTree) -> Set[Node]:
    return {node for node, _ in iter_nodes(t)}


def label(t: RankedTree, x: Node) -> str:
    return subtree(t, x).symbol


def leaves(t: RankedTree) -> List[Node]:
    return [node for node, sub in iter_nodes(t) if sub.is_leaf()]


def internal_nodes(t: RankedTree) -> List[Node]:
    return [node for node, sub in iter_nodes(t) if not sub.is_leaf()]


def size(t: RankedTree) -> int:
    return t.size


def norm(w: Iterable[RankedTree]) -> int:
    """‖w‖: total number of nodes in a tree string."""
    return sum(t.size for t in w)


def subtree(t: RankedTree, x: Node) -> RankedTree:
    current = t
    for i in x:
        if not 1 <= i <= len(current.children):
            raise NodeNotInDomain(format_node(x))
        current = current.children[i - 1]
    return current


def replace(t: RankedTree, x: Node, s: RankedTree) -> RankedTree:
    """t[x/s]: the tree with the subtree at x replaced by s."""
    if not x:
        return s
    i = x[0]
    if not 1 <= i <= len(t.children):
        raise NodeNotInDomain(format_node(x))
    children = list(t.children)
    try:
        children[i - 1] = replace(children[i - 1], x[1:], s)
    except NodeNotInDomain:
        raise NodeNotInDomain(format_node(x))
    return RankedTree(t.symbol, children)


def diff(s: RankedTree, t: RankedTree) -> int:
    """|D_s ∖ D_t|"""
    return len(domain(s) - domain(t))


def up(t: RankedTree, n: int) -> Set[Node]:
    """Nodes whose subtree has more than n nodes; always prefix-closed."""
    return {node for node, sub in iter_nodes(t) if sub.size > n}


def is_prefix_closed(nodes: Iterable[Node]) -> bool:
    nodes = set(nodes)
    return all(node[:-1] in nodes for node in nodes if node)


def cut(t: RankedTree, C: Iterable[Node]) -> TreeString:
    """
    t ∖ C: the maximal subtrees hanging off the prefix-closed set C,
    in lexicographic order of their roots.
    """
    C = set(C)
    if not C:
        return (t,)
    if not is_prefix_closed(C):
        raise InputError("cut set must be prefix-closed")
    dom = domain(t)
    if not C <= dom:
        raise NodeNotInDomain(format_node(min(C - dom)))
    roots = sorted(node for node in dom if node not in C and node[:-1] in C)
    return tuple(subtree(t, node) for node in roots)


def is_chain(t: RankedTree) -> bool:
    """Every internal node has at most one internal child, and t is not a leaf."""
    if t.is_leaf():
        return False
    current = t
    while True:
        inner = [c for c in current.children if not c.is_leaf()]
        if len(inner) > 1:
            return False
        if not inner:
            return True
        current = inner[0]


def chain_bottom(t: RankedTree) -> Node:
    """max(t): the deepest internal node of a chain."""
    if not is_chain(t):
        raise InputError("not a chain")
    node: Node = ()
    current = t
    while True:
        for i, child in enumerate(current.children, start=1):
            if not child.is_leaf():
                node, current = node + (i,), child
                break
        else:
            return node


def _leaf_parts(alphabet: RankedAlphabet, n: int) -> Optional[List[int]]:
    """
    Decompose n-1 into a sum of (m-1) for m in ranks (m >= 2), returning the
    ranks used, or None when impossible.
    """
    parts = sorted((m for m in alphabet.ranks if m >= 2), reverse=True)
    target = n - 1
    back: List[Optional[int]] = [None] * (target + 1)
    reachable = [False] * (target + 1)
    reachable[0] = True
    for value in range(1, target + 1):
        for m in parts:
            if value - (m - 1) >= 0 and reachable[value - (m - 1)]:
                reachable[value] = True
                back[value] = m
                break
    if not reachable[target]:
        return None
    used = []
    value = target
    while value:
        m = back[value]
        used.append(m)
        value -= m - 1
    return used


def leaf_count_feasible(alphabet: RankedAlphabet, n: int) -> bool:
    """n ∈ M = {1 + Σ d_m·(m−1)}, i.e. some tree has exactly n leaves."""
    if n < 1:
        raise InputError("leaf count must be positive")
    return _leaf_parts(alphabet, n) is not None


def make_chain(alphabet: RankedAlphabet, n: int) -> RankedTree:
    """
    A chain with exactly n leaves. For n = 1 a single constant is returned.
    """
    if n < 1:
        raise InputError("leaf count must be positive")
    parts = _leaf_parts(alphabet, n)
    if parts is None:
        raise InputError(f"no tree over {alphabet} has exactly {n} leaves")
    constant = leaf(alphabet.constants[0])
    if not parts:
        return constant
    # Build bottom-up: the first internal child of every node is the next link.
    current: Optional[RankedTree] = None
    for m in sorted(parts):
        symbol = alphabet.of_rank(m)[0]
        first = constant if current is None else current
        current = RankedTree(symbol, [first] + [constant] * (m - 1))
    return current


def int_max(alphabet: RankedAlphabet, m: int) -> Union[int, float]:
    """
    int(m): maximal number of internal nodes over trees with exactly m leaves.

    Returns ``math.inf`` when the alphabet has a unary symbol.
    """
    if m < 1 or not leaf_count_feasible(alphabet, m):
        raise InputError(f"{m} is not a feasible leaf count")
    if 1 in alphabet.ranks:
        return math.inf
    arities = sorted(k for k in alphabet.ranks if k >= 2)
    NONE = -1
    best = [NONE] * (m + 1)
    best[1] = 0
    for leaves_total in range(2, m + 1):
        top = NONE
        for k in arities:
            # combine[j][s]: best internal count of j subtrees with s leaves
            combine = [[NONE] * (leaves_total + 1) for _ in range(k + 1)]
            combine[0][0] = 0
            for j in range(1, k + 1):
                for s in range(j, leaves_total + 1):
                    for part in range(1, s - (j - 1) + 1):
                        if best[part] == NONE or combine[j - 1][s - part] == NONE:
                            continue
                        combine[j][s] = max(combine[j][s], combine[j - 1][s - part] + best[part])
            if combine[k][leaves_total] != NONE:
                top = max(top, combine[k][leaves_total] + 1)
        best[leaves_total] = top
    return best[m]


def trees_by_size(alphabet: RankedAlphabet, nmax: int, cap: Optional[int] = None) -> List[List[RankedTree]]:
    """
    All trees grouped by size: entry s lists the trees with exactly s nodes.
    """
    strata: List[List[RankedTree]] = [[] for _ in range(nmax + 1)]
    count = 0

    def add(tree: RankedTree, s: int):
        nonlocal count
        strata[s].append(tree)
        count += 1
        if cap is not None and count > cap:
            logger.warning("tree enumeration stopped at %d trees (size %d)", count, s)
            raise CapExceeded("max_alphabet", cap, reached=count)

    for s in range(1, nmax + 1):
        for symbol, k in alphabet.symbols:
            if k == 0:
                if s == 1:
                    add(leaf(symbol), s)
                continue
            for sizes in _compositions(s - 1, k):
                if any(not strata[part] for part in sizes):
                    continue
                for children in itertools.product(*(strata[part] for part in sizes)):
                    add(RankedTree(symbol, children), s)
    logger.debug("enumerated %d trees up to size %d", count, nmax)
    return strata


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_trees(alphabet: RankedAlphabet, nmax: int, cap: Optional[int] = None) -> List[RankedTree]:
    """
    All trees of size at most nmax, ordered by size then structure.

    Raises:
        CapExceeded: more than ``cap`` trees exist
    """
    if nmax < 1:
        raise InputError("nmax must be at least 1")
    strata = trees_by_size(alphabet, nmax, cap)
    return [t for stratum in strata for t in stratum]
