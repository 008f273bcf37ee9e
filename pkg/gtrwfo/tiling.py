"""
Tiling systems and the tree encoding of grids over the fixed system ℛ₀.

A grid cell (M, N) carrying tile θ is encoded as a tile tree θ(t′), where t′
is a complete binary •-tree of leaf depth n+1. Read in lexicographic order,
the leaf at position q is a bit of M when q is even (a left child) and a bit
of N when q is odd, bit ⌊q/2⌋ counted from the least significant end. A leaf
𝟙 is a 1 bit, 𝕆 a 0 bit.

ℛ₀ can mark leaves (†), select a marked leaf (‡), hide marked leaves behind
♥ and collapse a tile tree onto its selected leaf. R0Instance generates the
first-order formulas that read grids back through those actions.
"""
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from gtrwfo.errors import InputError
from gtrwfo.fologic import (
    TRUE,
    Edge,
    Exists,
    ForAll,
    Formula,
    FreshNames,
    Iff,
    Implies,
    Not,
    Path,
    conj,
    disj,
    exists,
    forall,
)
from gtrwfo.gtrs import Gtrs, Rule
from gtrwfo.trees import Node, RankedAlphabet, RankedTree, format_node, iter_nodes, leaf, replace, subtree

logger = logging.getLogger(__name__)

ZERO, ONE = "𝕆", "𝟙"
BITS = (ZERO, ONE)
DAG, DDAG = "†", "‡"
HEART = "♥"
DOT = "•"
A0 = (HEART, ONE, ONE + DAG, ONE + DDAG, ZERO, ZERO + DAG, ZERO + DDAG)

LEFT, RIGHT, HIDE, UNITE = "l", "r", "h", "u"
MARK, SELECT = "m" + DAG, "m" + DDAG
CONTROL_ACTIONS = (LEFT, RIGHT, HIDE, UNITE, MARK, SELECT)
RESERVED = frozenset(A0) | {DOT} | frozenset(CONTROL_ACTIONS)

MAX_BRUTE_K = 4
MAX_TILE_TREE_N = 3
MAX_GRID_TREE_N = 1

_TILE_NAME = re.compile(r"[^\s(),|;:]+")

Pair = Tuple[str, str]


@dataclass(frozen=True)
class TilingSystem:
    """
    S = (Θ, H, V): tiles with horizontal and vertical compatibility.
    """

    tiles: Tuple[str, ...]
    H: FrozenSet[Pair]
    V: FrozenSet[Pair]

    def __post_init__(self):
        if not self.tiles:
            raise InputError("a tiling system needs at least one tile")
        if len(set(self.tiles)) != len(self.tiles):
            raise InputError("tile names must be unique")
        for tile in self.tiles:
            if not _TILE_NAME.fullmatch(tile):
                raise InputError(f"invalid tile name {tile!r}")
        clash = RESERVED.intersection(self.tiles)
        if clash:
            raise InputError(f"tile names clash with reserved symbols: {' '.join(sorted(clash))}")
        for name, relation in (("H", self.H), ("V", self.V)):
            for a, b in relation:
                if a not in self.tiles or b not in self.tiles:
                    raise InputError(f"{name} pair ({a}, {b}) uses an unknown tile")

    @classmethod
    def build(cls, tiles: Iterable[str], H: Iterable[Pair], V: Iterable[Pair]) -> "TilingSystem":
        return cls(tuple(tiles), frozenset(tuple(p) for p in H), frozenset(tuple(p) for p in V))

    def __str__(self) -> str:
        return format_tiling(self)


def parse_tiling(text: str) -> TilingSystem:
    """
    Parse a tiling system file.

    Format::

        tiles: 0 1
        H: 0 1
        V: 1 0
    """
    tiles: Optional[List[str]] = None
    pairs: Dict[str, List[Pair]] = {"H": [], "V": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in ("tiles", "H", "V"):
            raise InputError(f"expected 'tiles:', 'H:' or 'V:', got {line!r}", line=lineno)
        values = rest.split()
        if key == "tiles":
            if tiles is not None:
                raise InputError("duplicate tiles line", line=lineno)
            tiles = values
        elif len(values) != 2:
            raise InputError(f"{key} line needs exactly two tiles", line=lineno)
        else:
            pairs[key].append((values[0], values[1]))
    if tiles is None:
        raise InputError("tiling file has no tiles line")
    return TilingSystem.build(tiles, pairs["H"], pairs["V"])


def format_tiling(S: TilingSystem) -> str:
    lines = [f"tiles: {' '.join(S.tiles)}"]
    lines.extend(f"H: {a} {b}" for a, b in sorted(S.H))
    lines.extend(f"V: {a} {b}" for a, b in sorted(S.V))
    return "\n".join(lines)


_ALTERNATE = [("0", "1"), ("1", "0")]
_CYCLE = [("0", "1"), ("1", "2"), ("2", "0")]

CHECKERBOARD = TilingSystem.build(("0", "1"), _ALTERNATE, _ALTERNATE)
STAIRCASE = TilingSystem.build(("0", "1", "2"), _CYCLE, _CYCLE)
PRESETS: Dict[str, TilingSystem] = {"checkerboard": CHECKERBOARD, "staircase": STAIRCASE}


# ---------------------------------------------------------------------------
# Solutions


@dataclass(frozen=True)
class Solution:
    """A k×k tiling; ``rows[y][x]`` is the tile of cell (x, y)."""

    rows: Tuple[Tuple[str, ...], ...]

    @property
    def k(self) -> int:
        return len(self.rows)

    def __getitem__(self, cell: Tuple[int, int]) -> str:
        x, y = cell
        return self.rows[y][x]

    @property
    def grid(self) -> Dict[Tuple[int, int], str]:
        return {(x, y): tile for y, row in enumerate(self.rows) for x, tile in enumerate(row)}

    def is_solution(self, S: TilingSystem) -> bool:
        for y, row in enumerate(self.rows):
            for x, tile in enumerate(row):
                if tile not in S.tiles:
                    return False
                if x + 1 < self.k and (tile, row[x + 1]) not in S.H:
                    return False
                if y + 1 < self.k and (tile, self.rows[y + 1][x]) not in S.V:
                    return False
        return True

    def __str__(self) -> str:
        return "\n".join(" ".join(row) for row in self.rows)

    def to_dict(self) -> Dict[str, object]:
        return {"k": self.k, "rows": [list(row) for row in self.rows]}


def brute_solutions(S: TilingSystem, k: int, w: Sequence[str] = ()) -> List[Solution]:
    """
    Sol_k(S, w): every k-solution whose bottom row starts with w.

    Cells are filled row by row, pruning on H and V as they are placed.

    Raises:
        InputError: k outside [1, 4], |w| > k or an unknown tile in w
    """
    w = tuple(w)
    if k < 1:
        raise InputError("side length must be positive")
    if k > MAX_BRUTE_K:
        raise InputError(f"brute-force solving is limited to k ≤ {MAX_BRUTE_K}")
    if len(w) > k:
        raise InputError(f"initial word of length {len(w)} does not fit a row of length {k}")
    unknown = set(w) - set(S.tiles)
    if unknown:
        raise InputError(f"unknown tiles in initial word: {' '.join(sorted(unknown))}")

    cells = [(x, y) for y in range(k) for x in range(k)]
    placed: Dict[Tuple[int, int], str] = {}
    found: List[Solution] = []

    def fill(i: int) -> None:
        if i == len(cells):
            found.append(Solution(tuple(tuple(placed[x, y] for x in range(k)) for y in range(k))))
            return
        x, y = cells[i]
        options = (w[x],) if y == 0 and x < len(w) else S.tiles
        for tile in options:
            if x > 0 and (placed[x - 1, y], tile) not in S.H:
                continue
            if y > 0 and (placed[x, y - 1], tile) not in S.V:
                continue
            placed[x, y] = tile
            fill(i + 1)
        placed.pop((x, y), None)

    fill(0)
    logger.debug("%d solutions of side %d for w=%s", len(found), k, " ".join(w) or "ε")
    return found


def vertical_extensions(S: TilingSystem, sol: Solution) -> List[Solution]:
    """Sol_k(S, σ): solutions whose bottom row is the top row of σ."""
    return brute_solutions(S, sol.k, sol.rows[-1])


# ---------------------------------------------------------------------------
# ℛ₀


def r0_gtrs(S: TilingSystem) -> Gtrs:
    """
    The GTRS ℛ₀ for the tiles of S: constants A₀, the tiles as unary
    symbols, binary •, and rules (1)-(8).
    """
    alphabet = RankedAlphabet(tuple((a, 0) for a in A0) + tuple((t, 1) for t in S.tiles) + ((DOT, 2),))
    rules = [Rule(leaf(a), a, leaf(a)) for a in A0]
    for bit in BITS:
        rules.append(Rule(leaf(bit), MARK, leaf(bit + DAG)))
    for bit in BITS:
        rules.append(Rule(leaf(bit + DAG), SELECT, leaf(bit + DDAG)))
    for bit in BITS:
        rules.append(Rule(leaf(bit + DAG), HIDE, leaf(HEART)))
    rules.append(Rule(RankedTree(DOT, (leaf(HEART), leaf(HEART))), UNITE, leaf(HEART)))
    for theta in S.tiles:
        for bit in BITS:
            collapsed = RankedTree(theta, (leaf(bit + DDAG),))
            rules.append(Rule(collapsed, theta, collapsed))
    for bit in BITS:
        rules.append(Rule(RankedTree(DOT, (leaf(HEART), leaf(bit + DDAG))), RIGHT, leaf(bit + DDAG)))
    for bit in BITS:
        rules.append(Rule(RankedTree(DOT, (leaf(bit + DDAG), leaf(HEART))), LEFT, leaf(bit + DDAG)))
    return Gtrs(alphabet, CONTROL_ACTIONS + S.tiles + A0, tuple(rules))


def _check_n(n: int, limit: int, what: str) -> None:
    if n < 0:
        raise InputError("n must be non-negative")
    if n > limit:
        raise InputError(f"{what} are limited to n ≤ {limit}")


def join_tiles(trees: Sequence[RankedTree]) -> RankedTree:
    """Balanced •-tree over the given subtrees, left to right."""
    if not trees:
        raise InputError("nothing to join")
    level = list(trees)
    while len(level) > 1:
        paired = [RankedTree(DOT, (level[i], level[i + 1])) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]


def build_tile_tree(n: int, theta: str, M: int, N: int, mark: bool = False) -> RankedTree:
    """
    The tile tree of cell (M, N) labelled θ, with every leaf marked when
    ``mark`` is set.
    """
    _check_n(n, MAX_TILE_TREE_N, "tile trees")
    if theta in RESERVED:
        raise InputError(f"{theta!r} is not a tile name")
    top = 2 ** 2 ** n
    for name, value in (("M", M), ("N", N)):
        if not 0 <= value < top:
            raise InputError(f"{name} = {value} is outside [0, {top - 1}]")
    suffix = DAG if mark else ""
    labels = []
    for q in range(2 ** (n + 1)):
        value = M if q % 2 == 0 else N
        labels.append(leaf(BITS[(value >> (q // 2)) & 1] + suffix))
    return RankedTree(theta, (join_tiles(labels),))


def _bit_of(label: str) -> int:
    base = label.rstrip(DAG + DDAG)
    if base not in BITS or len(label) - len(base) > 1:
        raise InputError(f"leaf label {label!r} is not a bit")
    return BITS.index(base)


def decode_tile_tree(t: RankedTree) -> Tuple[str, int, int]:
    """
    Read (θ, M, N) back from a tile tree; marked and selected leaves are
    read as the bits they carry.
    """
    if len(t.children) != 1:
        raise InputError("a tile tree has a unary root")
    found = [(node, sub) for node, sub in iter_nodes(t) if node]
    leaves = [(node, sub) for node, sub in found if sub.is_leaf()]
    for node, sub in found:
        if not sub.is_leaf() and sub.symbol != DOT:
            raise InputError(f"inner node {format_node(node)} of a tile tree must be {DOT}")
    depths = {len(node) for node, _ in leaves}
    if len(depths) != 1:
        raise InputError("tile tree leaves are not all at the same depth")
    n = depths.pop() - 2
    if n < 0 or len(leaves) != 2 ** (n + 1):
        raise InputError("tile tree is not a complete binary tree of depth at least 1")
    M = N = 0
    for q, (_, sub) in enumerate(sorted(leaves, key=lambda item: item[0])):
        bit = _bit_of(sub.symbol)
        if q % 2 == 0:
            M |= bit << (q // 2)
        else:
            N |= bit << (q // 2)
    return t.symbol, M, N


def build_grid_tree(S: TilingSystem, n: int, sol: Solution) -> RankedTree:
    """
    The grid tree of a 2^{2^n}-solution: one tile tree per cell, joined
    row by row under a balanced •-tree.
    """
    _check_n(n, MAX_GRID_TREE_N, "grid trees")
    side = 2 ** 2 ** n
    if sol.k != side:
        raise InputError(f"a grid tree for n = {n} needs a {side}×{side} solution, got {sol.k}×{sol.k}")
    unknown = {tile for row in sol.rows for tile in row} - set(S.tiles)
    if unknown:
        raise InputError(f"unknown tiles in solution: {' '.join(sorted(unknown))}")
    return join_tiles([build_tile_tree(n, sol[x, y], x, y) for y in range(side) for x in range(side)])


def lex_leaves(t: RankedTree) -> List[Node]:
    return sorted(node for node, sub in iter_nodes(t) if sub.is_leaf())


def tile_roots(t: RankedTree) -> List[Node]:
    """Addresses of the tile subtrees (unary nodes) in lexicographic order."""
    return [node for node, sub in iter_nodes(t) if len(sub.children) == 1]


def marked_leaves(t: RankedTree) -> List[Node]:
    return [node for node in lex_leaves(t) if subtree(t, node).symbol.endswith(DAG)]


def mark_leaves(t: RankedTree, nodes: Iterable[Node]) -> RankedTree:
    for node in nodes:
        label = subtree(t, node).symbol
        if label not in BITS:
            raise InputError(f"leaf {format_node(node)} is labelled {label!r} and cannot be marked")
        t = replace(t, node, leaf(label + DAG))
    return t


def mark_subtree(t: RankedTree, index: int = 0) -> RankedTree:
    """Mark every leaf of the index-th tile subtree."""
    roots = tile_roots(t)
    if not 0 <= index < len(roots):
        raise InputError(f"tree has {len(roots)} tile subtrees, no index {index}")
    root = roots[index]
    return mark_leaves(t, [node for node in lex_leaves(t) if node[: len(root)] == root])


def select_leaf(t: RankedTree, q: int) -> RankedTree:
    """Select the q-th marked leaf, counted in lexicographic order."""
    marked = marked_leaves(t)
    if not 0 <= q < len(marked):
        raise InputError(f"tree has {len(marked)} marked leaves, no position {q}")
    node = marked[q]
    return replace(t, node, leaf(subtree(t, node).symbol[: -len(DAG)] + DDAG))


# ---------------------------------------------------------------------------
# Formulas


@dataclass
class R0Instance:
    """
    ℛ₀ for a tiling system together with the formula generators for grids
    of side 2^{2^n}.

    Every builder takes the names of its free variables and draws its bound
    variables from a shared supply, so results can be nested freely.
    """

    system: TilingSystem
    n: int
    fresh: FreshNames = field(default_factory=FreshNames, repr=False)

    def __post_init__(self):
        if self.n < 0:
            raise InputError("n must be non-negative")

    @cached_property
    def gtrs(self) -> Gtrs:
        return r0_gtrs(self.system)

    @property
    def leaf_count(self) -> int:
        return 2 ** (self.n + 1)

    @property
    def D(self) -> int:
        return 2 ** (self.n + 1) - (self.n + 2)

    @staticmethod
    def _path(blocks: Sequence[Tuple[Sequence[str], int]], x: str, y: str) -> Path:
        return Path(tuple((tuple(actions), count) for actions, count in blocks if count > 0), x, y)

    def _collapse(self, steps: int) -> List[Tuple[Sequence[str], int]]:
        """h^{2^{n+1}−1} u^D {l,r}^steps"""
        return [((HIDE,), self.leaf_count - 1), ((UNITE,), self.D), ((LEFT, RIGHT), steps)]

    def _check_tile(self, theta: str) -> None:
        if theta not in self.system.tiles:
            raise InputError(f"unknown tile {theta!r}")

    def marked(self, x: str = "x") -> Formula:
        """The marked leaves of x are the leaves of one marked tile subtree."""
        y, z = self.fresh("y"), self.fresh("z")
        collapse = self._path(self._collapse(self.n + 1) + [(self.system.tiles, 1)], y, z)
        return ForAll(y, Implies(Edge(SELECT, x, y), Exists(z, collapse)))

    def grid(self, x: str = "x") -> Formula:
        """x is a grid tree."""
        y, z = self.fresh("y"), self.fresh("z")
        plain = [Not(Edge(a, x, x)) for a in A0 if a not in BITS]
        more = self._path([((MARK,), self.leaf_count - 1)], y, z)
        return conj(*plain, ForAll(y, Implies(Edge(MARK, x, y), Exists(z, conj(more, self.marked(z))))))

    def bit(self, i: int, x: str = "x") -> Formula:
        """Bit i (from 1, least significant) of the lex position of the selected leaf."""
        if not 1 <= i <= self.n + 1:
            raise InputError(f"bit index {i} is outside [1, {self.n + 1}]")
        y = self.fresh("y")
        return Exists(y, self._path(self._collapse(i - 1) + [((RIGHT,), 1)], x, y))

    def less(self, x: str = "x", y: str = "y") -> Formula:
        """lex(x) < lex(y) for the selected leaves."""
        top = self.n + 1
        options = []
        for j in range(1, top + 1):
            higher = [Iff(self.bit(i, x), self.bit(i, y)) for i in range(j + 1, top + 1)]
            options.append(conj(Not(self.bit(j, x)), self.bit(j, y), *higher))
        return disj(*options)

    def equal(self, x: str = "x", y: str = "y") -> Formula:
        return conj(*(Iff(self.bit(i, x), self.bit(i, y)) for i in range(1, self.n + 2)))

    def tile(self, theta: str, x: str = "x") -> Formula:
        """The marked tile subtree of x is labelled θ."""
        self._check_tile(theta)
        y = self.fresh("y")
        return Exists(y, self._path([((SELECT,), 1)] + self._collapse(self.n + 1) + [((theta,), 1)], x, y))

    def left(self, z: str = "z") -> Formula:
        """The selected leaf of z is a left child."""
        return self._side(z, LEFT)

    def right(self, z: str = "z") -> Formula:
        return self._side(z, RIGHT)

    def _side(self, z: str, action: str) -> Formula:
        z1, z2 = self.fresh("z"), self.fresh("z")
        return exists([z1, z2], conj(Edge(HIDE, z, z1), Edge(action, z1, z2)))

    def _same(self, x: str, y: str, side) -> Formula:
        u, v = self.fresh("u"), self.fresh("v")
        guard = conj(Edge(SELECT, x, u), Edge(SELECT, y, v), self.equal(u, v), side(u))
        return forall([u, v], Implies(guard, Iff(Edge(ONE + DDAG, u, u), Edge(ONE + DDAG, v, v))))

    def _succ(self, x: str, y: str, side) -> Formula:
        # a position p is 0 in x and 1 in y, lower positions go from 1 to 0, higher ones agree
        xp, yp = self.fresh("x"), self.fresh("y")
        z1, z2 = self.fresh("z"), self.fresh("z")
        u, v = self.fresh("u"), self.fresh("v")
        lower = conj(
            ForAll(z1, Implies(conj(Edge(SELECT, x, z1), self.less(z1, xp), side(z1)), Edge(ONE + DDAG, z1, z1))),
            ForAll(z2, Implies(conj(Edge(SELECT, y, z2), self.less(z2, yp), side(z2)), Edge(ZERO + DDAG, z2, z2))),
        )
        higher = forall(
            [u, v],
            Implies(
                conj(Edge(SELECT, x, u), Edge(SELECT, y, v), self.equal(u, v), self.less(xp, u), side(u)),
                Iff(Edge(ZERO + DDAG, u, u), Edge(ZERO + DDAG, v, v)),
            ),
        )
        return exists(
            [xp, yp],
            conj(
                Edge(SELECT, x, xp),
                Edge(SELECT, y, yp),
                self.equal(xp, yp),
                Edge(ZERO + DDAG, xp, xp),
                Edge(ONE + DDAG, yp, yp),
                side(xp),
                lower,
                higher,
            ),
        )

    def same_m(self, x: str = "x", y: str = "y") -> Formula:
        """M(x) = M(y) for marked grid trees."""
        return self._same(x, y, self.left)

    def succ_m(self, x: str = "x", y: str = "y") -> Formula:
        """M(x) + 1 = M(y)."""
        return self._succ(x, y, self.left)

    def same_n(self, x: str = "x", y: str = "y") -> Formula:
        return self._same(x, y, self.right)

    def succ_n(self, x: str = "x", y: str = "y") -> Formula:
        return self._succ(x, y, self.right)

    def mark(self, x: str, y: str) -> Formula:
        """y is x with exactly one tile subtree marked."""
        return conj(self._path([((MARK,), self.leaf_count)], x, y), self.marked(y))

    def _neighbour(self, x: str, horizontal: bool) -> Formula:
        if horizontal:
            side, succ, same, pairs = self.left, self.succ_m, self.same_n, self.system.H
        else:
            side, succ, same, pairs = self.right, self.succ_n, self.same_m, self.system.V
        y, y2, z = self.fresh("y"), self.fresh("y"), self.fresh("z")
        not_last = Exists(z, conj(Edge(SELECT, y, z), Edge(ZERO + DDAG, z, z), side(z)))
        match = disj(*(conj(self.tile(a, y), self.tile(b, y2)) for a, b in sorted(pairs)))
        return ForAll(
            y,
            Implies(conj(self.mark(x, y), not_last), Exists(y2, conj(self.mark(x, y2), succ(y, y2), same(y, y2), match))),
        )

    def sol(self, x: str = "x") -> Formula:
        """x encodes a 2^{2^n}-solution of the tiling system."""
        y, z = self.fresh("y"), self.fresh("z")
        same_cell = forall(
            [y, z],
            Implies(
                conj(self.mark(x, y), self.mark(x, z), self.same_m(y, z), self.same_n(y, z)),
                conj(*(Iff(self.tile(t, y), self.tile(t, z)) for t in self.system.tiles)),
            ),
        )
        return conj(self.grid(x), same_cell, self._neighbour(x, True), self._neighbour(x, False))

    def phi_w(self, x: str, w: Sequence[str]) -> Formula:
        """Cell (j, 0) of x carries w_j."""
        w = tuple(w)
        for theta in w:
            self._check_tile(theta)
        if not w:
            return TRUE
        ys = [self.fresh("y") for _ in w]
        z = self.fresh("z")
        parts: List[Formula] = []
        for yj, theta in zip(ys, w):
            parts += [self.mark(x, yj), self.tile(theta, yj)]
        parts.append(ForAll(z, Implies(Edge(SELECT, ys[0], z), Edge(ZERO + DDAG, z, z))))
        for prev, cur in zip(ys, ys[1:]):
            parts += [self.succ_m(prev, cur), self.same_n(prev, cur)]
        return exists(ys, conj(*parts))

    def final(self, w: Sequence[str]) -> Formula:
        """∃x (sol(x) ∧ φ_w(x))"""
        return Exists("x", conj(self.sol("x"), self.phi_w("x", w)))

    def _row(self, z: str, bit: str) -> Formula:
        t = self.fresh("z")
        return ForAll(t, Implies(conj(Edge(SELECT, z, t), self.right(t)), Edge(bit + DDAG, t, t)))

    def ext(self, x: str = "x", y: str = "y") -> Formula:
        """
        The solution of y extends that of x vertically: each cell in the top
        row of x carries the tile of the cell in the same column of the
        bottom row of y.
        """
        u, v = self.fresh("u"), self.fresh("v")
        guard = conj(self.mark(x, u), self.mark(y, v), self.same_m(u, v), self._row(u, ONE), self._row(v, ZERO))
        return forall([u, v], Implies(guard, conj(*(Iff(self.tile(t, u), self.tile(t, v)) for t in self.system.tiles))))

    def alternating(self, w: Sequence[str]) -> Formula:
        """
        ∃x₁(sol ∧ φ_w ∧ ∀x₂((sol ∧ ext) → ∃x₃(sol ∧ ext ∧ ⋯))) for |w| = n odd.
        """
        w = tuple(w)
        if len(w) != self.n:
            raise InputError(f"word length {len(w)} does not match n = {self.n}")
        if self.n % 2 == 0:
            raise InputError("the alternating sentence needs an odd word length")
        names = [f"x{k}" for k in range(1, self.n + 1)]
        body: Formula = TRUE
        for k in range(self.n, 0, -1):
            xk = names[k - 1]
            link = self.phi_w(xk, w) if k == 1 else self.ext(names[k - 2], xk)
            if k % 2:
                body = Exists(xk, conj(self.sol(xk), link, body))
            else:
                body = ForAll(xk, Implies(conj(self.sol(xk), link), body))
        return body


def gen_formulas(S: TilingSystem, n: int, w: Optional[Sequence[str]] = None) -> Dict[str, Formula]:
    """
    The named formula family for S at parameter n. ``phi_w`` and the
    sentence ``final`` are included when an input word of length n is given.
    """
    inst = R0Instance(S, n)
    family: Dict[str, Formula] = {"marked": inst.marked("x"), "grid": inst.grid("x")}
    for i in range(1, n + 2):
        family[f"bit_{i}"] = inst.bit(i, "x")
    family["less"] = inst.less("x", "y")
    family["equal"] = inst.equal("x", "y")
    for theta in S.tiles:
        family[f"tile_{theta}"] = inst.tile(theta, "x")
    family["left"] = inst.left("x")
    family["right"] = inst.right("x")
    family["same_m"] = inst.same_m("x", "y")
    family["succ_m"] = inst.succ_m("x", "y")
    family["same_n"] = inst.same_n("x", "y")
    family["succ_n"] = inst.succ_n("x", "y")
    family["mark"] = inst.mark("x", "y")
    family["sol"] = inst.sol("x")
    family["ext"] = inst.ext("x", "y")
    if w is not None:
        if len(w) != n:
            raise InputError(f"word length {len(w)} does not match n = {n}")
        family["phi_w"] = inst.phi_w("x", w)
        family["final"] = inst.final(w)
    logger.debug("generated %d formulas for n=%d", len(family), n)
    return family


def gen_alternating(S: TilingSystem, w: Sequence[str]) -> Formula:
    return R0Instance(S, len(w)).alternating(w)
