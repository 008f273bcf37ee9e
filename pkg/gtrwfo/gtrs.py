"""
Ground tree rewrite systems, the graphs they induce, and bounded
exploration of those graphs.

A GTRS ``(A, Σ, R)`` induces the infinite labelled graph 𝔊(ℛ) on all trees
over ``A``: ``t -a-> t'`` whenever some rule ``s -a-> s'`` rewrites an
occurrence of ``s`` in ``t``. Its lifting 𝔊(ℛ)⁺ acts on tree strings by
rewriting exactly one item.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from gtrwfo.config import DEFAULT_MAX_NODES, MEMO_ENTRIES
from gtrwfo.errors import CapExceeded, InputError
from gtrwfo.trees import RankedAlphabet, RankedTree, TreeString, format_string, format_term, parse_alphabet, parse_term

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rule:
    lhs: RankedTree
    action: str
    rhs: RankedTree

    def __str__(self) -> str:
        return f"{format_term(self.lhs)} -{self.action}-> {format_term(self.rhs)}"


@dataclass(frozen=True)
class Gtrs:
    """
    A ground tree rewrite system.
    """

    alphabet: RankedAlphabet
    actions: Tuple[str, ...]
    rules: Tuple[Rule, ...]
    _forward: Dict[str, Dict[RankedTree, Tuple[RankedTree, ...]]] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )
    _backward: Dict[str, Dict[RankedTree, Tuple[RankedTree, ...]]] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        if len(set(self.actions)) != len(self.actions):
            raise InputError("action names must be unique")
        for rule in self.rules:
            if rule.action not in self.actions:
                raise InputError(f"rule {rule} uses undeclared action {rule.action!r}")
            rule.lhs.validate(self.alphabet)
            rule.rhs.validate(self.alphabet)
        for action in self.actions:
            forward: Dict[RankedTree, List[RankedTree]] = {}
            backward: Dict[RankedTree, List[RankedTree]] = {}
            for rule in self.rules:
                if rule.action == action:
                    forward.setdefault(rule.lhs, []).append(rule.rhs)
                    backward.setdefault(rule.rhs, []).append(rule.lhs)
            self._forward[action] = {k: tuple(v) for k, v in forward.items()}
            self._backward[action] = {k: tuple(v) for k, v in backward.items()}

    @property
    def r(self) -> int:
        """Maximal size of a tree occurring in a rule."""
        return max([1, *(max(rule.lhs.size, rule.rhs.size) for rule in self.rules)])

    @property
    def p(self) -> int:
        return self.alphabet.p

    def table(self, action: str, reverse: bool = False) -> Dict[RankedTree, Tuple[RankedTree, ...]]:
        if action not in self.actions:
            raise InputError(f"unknown action {action!r}")
        return (self._backward if reverse else self._forward)[action]

    def __str__(self) -> str:
        lines = [f"alphabet: {self.alphabet}", f"actions: {' '.join(self.actions)}"]
        lines.extend(str(rule) for rule in self.rules)
        return "\n".join(lines)


def parse_gtrs(text: str, alphabet: Optional[RankedAlphabet] = None) -> Gtrs:
    """
    Parse a GTRS file.

    Format::

        alphabet: a/0 b/0 •/2      (optional when an alphabet is passed in)
        actions: σ τ
        a -σ-> b

    Args:
        text: File contents
        alphabet: Alphabet to use when the file has no ``alphabet:`` header

    Returns:
        The parsed system
    """
    actions: Optional[List[str]] = None
    rule_lines: List[Tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("alphabet:"):
            alphabet = parse_alphabet(line[len("alphabet:"):])
        elif line.startswith("actions:"):
            actions = line[len("actions:"):].split()
        else:
            rule_lines.append((lineno, line))
    if alphabet is None:
        raise InputError("GTRS file has no alphabet header and none was supplied")
    if actions is None:
        raise InputError("GTRS file has no actions header")
    rules = []
    for lineno, line in rule_lines:
        lhs_text, sep, rest = line.partition(" -")
        action, sep2, rhs_text = rest.partition("-> ")
        if not sep or not sep2:
            raise InputError(f"expected 'lhs -action-> rhs', got {line!r}", line=lineno)
        try:
            rules.append(Rule(parse_term(lhs_text, alphabet), action.strip(), parse_term(rhs_text, alphabet)))
        except InputError as e:
            raise InputError(e.message, line=lineno)
    return Gtrs(alphabet, tuple(actions), tuple(rules))


def _rewrite(t: RankedTree, table: Dict[RankedTree, Tuple[RankedTree, ...]]) -> Set[RankedTree]:
    results: Set[RankedTree] = set(table.get(t, ()))
    for i, child in enumerate(t.children):
        for replaced in _rewrite(child, table):
            children = list(t.children)
            children[i] = replaced
            results.add(RankedTree(t.symbol, children))
    return results


@lru_cache(maxsize=MEMO_ENTRIES)
def _one_step(R: Gtrs, t: RankedTree, a: str, reverse: bool) -> FrozenSet[RankedTree]:
    return frozenset(_rewrite(t, R.table(a, reverse)))


def successors(R: Gtrs, t: RankedTree, a: str) -> FrozenSet[RankedTree]:
    """All t[x/s'] for rules s -a-> s' with t↓x = s."""
    return _one_step(R, t, a, False)


def predecessors(R: Gtrs, t: RankedTree, a: str) -> FrozenSet[RankedTree]:
    """All u with u -a-> t."""
    return _one_step(R, t, a, True)


def step_word(R: Gtrs, w: TreeString, a: str) -> Set[TreeString]:
    """Rewrite exactly one item of the tree string w."""
    results = set()
    for i, item in enumerate(w):
        for replaced in successors(R, item, a):
            results.add(w[:i] + (replaced,) + w[i + 1:])
    return results


def step_word_back(R: Gtrs, w: TreeString, a: str) -> Set[TreeString]:
    results = set()
    for i, item in enumerate(w):
        for replaced in predecessors(R, item, a):
            results.add(w[:i] + (replaced,) + w[i + 1:])
    return results


Element = Union[RankedTree, TreeString]
Step = Callable[[Any, str], Iterable[Any]]


@dataclass
class SphereStructure:
    """
    Induced substructure of all elements within undirected distance
    ``radius`` of the centers.
    """

    nodes: Tuple[Any, ...]
    centers: Tuple[Any, ...]
    edges: FrozenSet[Tuple[Any, str, Any]]
    dist: Dict[Any, int]
    radius: int
    actions: Tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, element: Any) -> bool:
        return element in self.dist

    def holds(self, action: str, u: Any, v: Any) -> bool:
        return (u, action, v) in self.edges

    def to_networkx(self) -> nx.DiGraph:
        """
        Labelled DiGraph view: node attribute ``role`` lists the center
        indices a node stands for, edge attribute ``labels`` the actions.
        """
        graph = nx.DiGraph()
        for node in self.nodes:
            roles = tuple(i for i, c in enumerate(self.centers) if c == node)
            graph.add_node(node, role=roles, dist=self.dist[node])
        for u, action, v in self.edges:
            if graph.has_edge(u, v):
                graph[u][v]["labels"] = graph[u][v]["labels"] | {action}
            else:
                graph.add_edge(u, v, labels=frozenset({action}))
        return graph

    def dump(self) -> str:
        """Adjacency list text with center markers and distances."""
        names = {node: element_text(node) for node in self.nodes}
        out = [f"radius {self.radius}, {len(self.nodes)} nodes, {len(self.edges)} edges"]
        for node in sorted(self.nodes, key=lambda n: (self.dist[n], names[n])):
            marks = "".join(f" *c{i}" for i, c in enumerate(self.centers) if c == node)
            targets = sorted(f"-{a}-> {names[v]}" for u, a, v in self.edges if u == node)
            out.append(f"[{self.dist[node]}] {names[node]}{marks}")
            out.extend(f"    {t}" for t in targets)
        return "\n".join(out)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "radius": self.radius,
            "centers": [element_text(c) for c in self.centers],
            "nodes": [{"id": element_text(n), "dist": self.dist[n]} for n in self.nodes],
            "edges": sorted([element_text(u), a, element_text(v)] for u, a, v in self.edges),
        }


def element_text(element: Any) -> str:
    if isinstance(element, RankedTree):
        return format_term(element)
    if isinstance(element, tuple) and element and isinstance(element[0], RankedTree):
        return format_string(element)
    return str(element)


def bfs_sphere(
    centers: Sequence[Any],
    forward: Step,
    backward: Step,
    actions: Sequence[str],
    n: int,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> SphereStructure:
    """
    Undirected breadth-first closure around the centers.

    Args:
        centers: Starting elements
        forward: ``forward(u, a)`` yields the a-successors of u
        backward: ``backward(u, a)`` yields the a-predecessors of u
        actions: Edge labels to follow
        n: Radius
        max_nodes: Node budget

    Returns:
        The sphere with exact distances and all induced edges
    """
    if n < 0:
        raise InputError("radius must be non-negative")
    dist: Dict[Any, int] = {}
    order: List[Any] = []
    queue: deque = deque()
    for c in centers:
        if c not in dist:
            dist[c] = 0
            order.append(c)
            queue.append(c)
    while queue:
        u = queue.popleft()
        if dist[u] == n:
            continue
        for a in actions:
            for step in (forward, backward):
                for v in step(u, a):
                    if v in dist:
                        continue
                    dist[v] = dist[u] + 1
                    order.append(v)
                    queue.append(v)
                    if len(order) > max_nodes:
                        logger.warning("sphere exploration hit the node budget at radius %d", dist[v])
                        raise CapExceeded("max_nodes", max_nodes, reached=len(order))
    edges = set()
    for u in order:
        for a in actions:
            for v in forward(u, a):
                if v in dist:
                    edges.add((u, a, v))
    logger.debug("sphere of radius %d: %d nodes, %d edges", n, len(order), len(edges))
    return SphereStructure(tuple(order), tuple(centers), frozenset(edges), dist, n, tuple(actions))


def _as_centers(centers: Union[Any, Sequence[Any]], kind: type) -> Tuple[Any, ...]:
    if isinstance(centers, kind):
        return (centers,)
    return tuple(centers)


def sphere(
    R: Gtrs, centers: Union[RankedTree, Sequence[RankedTree]], n: int, max_nodes: int = DEFAULT_MAX_NODES
) -> SphereStructure:
    """S_n(𝔊(ℛ), t₁,…,t_k)"""
    return bfs_sphere(
        _as_centers(centers, RankedTree),
        lambda t, a: successors(R, t, a),
        lambda t, a: predecessors(R, t, a),
        R.actions,
        n,
        max_nodes,
    )


def sphere_word(
    R: Gtrs, centers: Union[TreeString, Sequence[TreeString]], n: int, max_nodes: int = DEFAULT_MAX_NODES
) -> SphereStructure:
    """S_n(𝔊(ℛ)⁺, w₁,…,w_k)"""
    if centers and isinstance(centers[0], RankedTree):
        centers = (tuple(centers),)
    centers = tuple(tuple(w) for w in centers)
    if any(not w for w in centers):
        raise InputError("tree strings must be non-empty")
    return bfs_sphere(
        centers,
        lambda w, a: step_word(R, w, a),
        lambda w, a: step_word_back(R, w, a),
        R.actions,
        n,
        max_nodes,
    )


def distance(
    R: Gtrs, s: RankedTree, t: RankedTree, cap: int, max_nodes: int = DEFAULT_MAX_NODES
) -> Optional[int]:
    """
    Undirected distance from s to t, or None when it exceeds ``cap``.
    """
    if cap < 0:
        raise InputError("cap must be non-negative")
    if s == t:
        return 0
    seen = {s}
    frontier = [s]
    for d in range(1, cap + 1):
        next_frontier = []
        for u in frontier:
            for a in R.actions:
                for v in successors(R, u, a) | predecessors(R, u, a):
                    if v == t:
                        return d
                    if v not in seen:
                        seen.add(v)
                        next_frontier.append(v)
        if len(seen) > max_nodes:
            raise CapExceeded("max_nodes", max_nodes, reached=len(seen))
        if not next_frontier:
            return None
        frontier = next_frontier
    return None


def spheres_disjoint(R: Gtrs, s: RankedTree, t: RankedTree, n: int, max_nodes: int = DEFAULT_MAX_NODES) -> bool:
    """Whether S_n(s) and S_n(t) share no element."""
    return distance(R, s, t, 2 * n, max_nodes) is None


def find_iso(s1: SphereStructure, s2: SphereStructure) -> Optional[Dict[Any, Any]]:
    """
    A bijection between the spheres that maps the i-th center to the i-th
    center and preserves labelled edges, or None.
    """
    if len(s1.nodes) != len(s2.nodes) or len(s1.edges) != len(s2.edges) or len(s1.centers) != len(s2.centers):
        return None
    if sorted(s1.dist.values()) != sorted(s2.dist.values()):
        return None
    g1, g2 = s1.to_networkx(), s2.to_networkx()
    matcher = DiGraphMatcher(
        g1,
        g2,
        node_match=lambda a, b: a["role"] == b["role"] and a["dist"] == b["dist"],
        edge_match=lambda a, b: a["labels"] == b["labels"],
    )
    for mapping in matcher.isomorphisms_iter():
        return dict(mapping)
    return None
