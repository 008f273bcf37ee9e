"""
Finite labelled graphs, their word liftings 𝔊⁺, the count equivalences
used for small-witness arguments, and the bounded evaluator for
first-order sentences over 𝔊⁺.

In 𝔊⁺ the universe is the set of non-empty words over the nodes of 𝔊, and
``u -a-> v`` holds when v arises from u by rewriting exactly one letter
along an a-edge of 𝔊.
"""
import itertools
import logging
import math
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from gtrwfo import fologic
from gtrwfo.config import DEFAULT_MAX_NODES, DEFAULT_MAX_WORDS
from gtrwfo.errors import CapExceeded, InputError
from gtrwfo.fologic import And, Edge, Eq, Exists, Formula, Iff, Implies, Not, Or, Path
from gtrwfo.gtrs import SphereStructure, bfs_sphere

logger = logging.getLogger(__name__)

Word = Tuple[Hashable, ...]


@dataclass(frozen=True)
class FiniteLabelledGraph:
    """
    A finite graph with action-labelled edges ``(u, a, v)``.
    """

    nodes: Tuple[str, ...]
    actions: Tuple[str, ...]
    edges: FrozenSet[Tuple[str, str, str]]
    _out: Dict[Tuple[str, str], Tuple[str, ...]] = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)
    _in: Dict[Tuple[str, str], Tuple[str, ...]] = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)
    _loops: Dict[str, FrozenSet[str]] = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.nodes:
            raise InputError("a graph needs at least one node")
        if len(set(self.nodes)) != len(self.nodes):
            raise InputError("node names must be unique")
        node_set = set(self.nodes)
        out: Dict[Tuple[str, str], List[str]] = {}
        inc: Dict[Tuple[str, str], List[str]] = {}
        loops: Dict[str, Set[str]] = {v: set() for v in self.nodes}
        for u, a, v in sorted(self.edges):
            if u not in node_set or v not in node_set:
                raise InputError(f"edge {u} -{a}-> {v} leaves the node set")
            if a not in self.actions:
                raise InputError(f"edge {u} -{a}-> {v} uses undeclared action {a!r}")
            out.setdefault((u, a), []).append(v)
            inc.setdefault((v, a), []).append(u)
            if u == v:
                loops[u].add(a)
        self._out.update({k: tuple(v) for k, v in out.items()})
        self._in.update({k: tuple(v) for k, v in inc.items()})
        self._loops.update({k: frozenset(v) for k, v in loops.items()})

    @classmethod
    def build(cls, nodes: Iterable[str], edges: Iterable[Tuple[str, str, str]], actions: Optional[Iterable[str]] = None):
        edges = frozenset(edges)
        if actions is None:
            actions = sorted({a for _, a, _ in edges})
        return cls(tuple(nodes), tuple(actions), edges)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def targets(self, letter: str, action: str) -> Tuple[str, ...]:
        return self._out.get((letter, action), ())

    def sources(self, letter: str, action: str) -> Tuple[str, ...]:
        return self._in.get((letter, action), ())

    def loops(self, letter: str) -> FrozenSet[str]:
        """Actions with a self-loop at the letter."""
        return self._loops.get(letter, frozenset())

    def has_edge(self, u: str, action: str, v: str) -> bool:
        return v in self._out.get((u, action), ())

    def successors(self, w: Word, action: str) -> Set[Word]:
        """All a-successors of w in 𝔊⁺."""
        results = set()
        for i, letter in enumerate(w):
            for target in self.targets(letter, action):
                results.add(w[:i] + (target,) + w[i + 1:])
        return results

    def predecessors(self, w: Word, action: str) -> Set[Word]:
        results = set()
        for i, letter in enumerate(w):
            for source in self.sources(letter, action):
                results.add(w[:i] + (source,) + w[i + 1:])
        return results

    def holds(self, action: str, u: Word, v: Word) -> bool:
        """u -a-> v in 𝔊⁺."""
        if len(u) != len(v):
            return False
        diff = [i for i in range(len(u)) if u[i] != v[i]]
        if not diff:
            return any(action in self.loops(letter) for letter in u)
        if len(diff) > 1:
            return False
        i = diff[0]
        return self.has_edge(u[i], action, v[i])

    def check_word(self, w: Word) -> Word:
        w = tuple(w)
        if not w:
            raise InputError("words must be non-empty")
        for letter in w:
            if letter not in self._loops:
                raise InputError(f"letter {letter!r} is not a node of the graph")
        return w

    def __str__(self) -> str:
        return format_graph(self)


def parse_graph(text: str) -> FiniteLabelledGraph:
    """
    Parse a graph file::

        nodes: a b c
        actions: e f        (optional; defaults to the labels used)
        a -e-> b
    """
    nodes: Optional[List[str]] = None
    actions: Optional[List[str]] = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("nodes:"):
            nodes = line[len("nodes:"):].split()
            continue
        if line.startswith("actions:"):
            actions = line[len("actions:"):].split()
            continue
        source, sep, rest = line.partition(" -")
        action, sep2, target = rest.partition("-> ")
        if not sep or not sep2 or not source.strip() or not target.strip():
            raise InputError(f"expected 'u -action-> v', got {line!r}", line=lineno)
        edges.append((source.strip(), action.strip(), target.strip()))
    if nodes is None:
        raise InputError("graph file has no nodes header")
    return FiniteLabelledGraph.build(nodes, edges, actions)


def format_graph(G: FiniteLabelledGraph) -> str:
    lines = [f"nodes: {' '.join(G.nodes)}", f"actions: {' '.join(G.actions)}"]
    lines.extend(f"{u} -{a}-> {v}" for u, a, v in sorted(G.edges))
    return "\n".join(lines)


def canonicalize(G: FiniteLabelledGraph) -> Tuple[FiniteLabelledGraph, Dict[str, Tuple[str, ...]]]:
    """
    Relabel so that the edge from a to b carries the action ``(a,b)``.

    Returns:
        The relabelled graph and, for every original action, the pair
        actions that replace it
    """
    pairs = sorted({(u, v) for u, _, v in G.edges})
    name = {pair: f"({pair[0]},{pair[1]})" for pair in pairs}
    edges = {(u, name[(u, v)], v) for u, v in pairs}
    translation = {a: tuple(sorted(name[(u, v)] for u, b, v in G.edges if b == a)) for a in G.actions}
    return FiniteLabelledGraph.build(G.nodes, edges, [name[p] for p in pairs]), translation


def translate_actions(phi: Formula, translation: Mapping[str, Sequence[str]]) -> Formula:
    """Rewrite edge atoms a(x,y) into ⋁ of their canonical pair actions."""
    if isinstance(phi, Edge):
        return fologic.disj(*(Edge(b, phi.x, phi.y) for b in translation.get(phi.action, ())))
    if isinstance(phi, Path):
        blocks = tuple((tuple(b for a in actions for b in translation.get(a, ())), count) for actions, count in phi.blocks)
        return Path(blocks, phi.x, phi.y)
    if isinstance(phi, Eq):
        return phi
    if isinstance(phi, Not):
        return Not(translate_actions(phi.body, translation))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(translate_actions(p, translation) for p in phi.parts))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(translate_actions(phi.left, translation), translate_actions(phi.right, translation))
    return type(phi)(phi.var, translate_actions(phi.body, translation), phi.domain)


# ---------------------------------------------------------------------------
# Count equivalences


def equiv_d(u: Sequence[Hashable], v: Sequence[Hashable], d: int) -> bool:
    """
    u ≡_d v: every letter occurs equally often in both, or at least d
    times in each.
    """
    if d < 1:
        raise InputError("d must be positive")
    cu, cv = Counter(u), Counter(v)
    return all(cu[a] == cv[a] or (cu[a] >= d and cv[a] >= d) for a in set(cu) | set(cv))


def _as_tuple(letter: Hashable) -> Tuple:
    return letter if isinstance(letter, tuple) else (letter,)


def convolution(*words: Sequence[Hashable]) -> Tuple[Tuple, ...]:
    """
    Positionwise tupling u ⊗ v ⊗ ⋯ of equal-length words. Letters that are
    already tuples are flattened, so nesting is associative.
    """
    if not words:
        raise InputError("convolution needs at least one word")
    length = len(words[0])
    if any(len(w) != length for w in words):
        raise InputError("convolution needs words of equal length")
    return tuple(tuple(x for letter in column for x in _as_tuple(letter)) for column in zip(*words))


def solve_counts(
    u: Sequence[Hashable],
    u_prime: Sequence[Hashable],
    v: Sequence[Hashable],
    alpha: int,
    n: int,
    gamma_size: Optional[int] = None,
) -> Tuple[Hashable, ...]:
    """
    Find v′ with |v′| = |v| and u ⊗ u′ ≡_α v ⊗ v′.

    Requires |u| = |u′|, u ≡_{α·n} v and |v| ≥ α·n·|Γ|, where n is the size of
    the alphabet u′ is drawn from and Γ the alphabet of u and v.

    Args:
        u: Word over Γ
        u_prime: Word over V, same length as u
        v: Word over Γ
        alpha: Threshold α
        n: |V|
        gamma_size: |Γ|; defaults to the number of distinct letters in u and v

    Returns:
        The word v′

    Raises:
        InputError: a hypothesis does not hold
    """
    if alpha < 1 or n < 1:
        raise InputError("alpha and n must be positive")
    if len(u) != len(u_prime):
        raise InputError("u and u' must have equal length")
    if len(set(u_prime)) > n:
        raise InputError(f"u' uses more than n = {n} letters")
    if gamma_size is None:
        gamma_size = len(set(u) | set(v))
    if not equiv_d(u, v, alpha * n):
        raise InputError("u and v are not equivalent at threshold alpha*n")
    if len(v) < alpha * n * gamma_size:
        raise InputError(f"|v| = {len(v)} is shorter than alpha*n*|Gamma| = {alpha * n * gamma_size}")

    pair_counts = Counter(zip(u, u_prime))
    v_counts = Counter(v)
    plan: Dict[Hashable, List[Tuple[Hashable, int]]] = {}
    for a, total in v_counts.items():
        m = {b: c for (x, b), c in pair_counts.items() if x == a}
        counts = dict(m)
        delta = total - sum(m.values())
        if delta > 0:
            top = max(sorted(counts, key=repr), key=lambda b: counts[b])
            counts[top] += delta
        elif delta < 0:
            for b in sorted(counts, key=lambda b: (-counts[b], repr(b))):
                if counts[b] < alpha:
                    continue
                cut = min(counts[b] - alpha, -delta)
                counts[b] -= cut
                delta += cut
                if delta == 0:
                    break
        plan[a] = sorted(((b, c) for b, c in counts.items() if c > 0), key=lambda item: repr(item[0]))

    queues: Dict[Hashable, Iterator[Hashable]] = {
        a: iter([b for b, c in items for _ in range(c)]) for a, items in plan.items()
    }
    return tuple(next(queues[a]) for a in v)


def _length_groups(words: Sequence[Sequence[Hashable]]) -> Dict[int, List[int]]:
    groups: Dict[int, List[int]] = {}
    for i, w in enumerate(words):
        groups.setdefault(len(w), []).append(i)
    return groups


def equiv_kl(us: Sequence[Sequence[Hashable]], vs: Sequence[Sequence[Hashable]], ell: int, n: int) -> bool:
    """
    ū ≡_{k,ℓ} v̄ for k-tuples of words over an n-letter alphabet.

    Holds when (a) the tuples have the same length-equality pattern, (b)
    each pair is identical or both words have length ≥ n^{k+ℓ+1}, and (c)
    the convolutions of each equal-length group are ≡_α with α = n^{ℓ+1}.
    """
    k = len(us)
    if len(vs) != k:
        raise InputError("tuples must have the same length")
    threshold = n ** (k + ell + 1)
    alpha = n ** (ell + 1)
    for i in range(k):
        for j in range(k):
            if (len(us[i]) == len(us[j])) != (len(vs[i]) == len(vs[j])):
                return False
    for a, b in zip(us, vs):
        if tuple(a) != tuple(b) and not (len(a) >= threshold and len(b) >= threshold):
            return False
    for indices in _length_groups(us).values():
        if not equiv_d(convolution(*(us[i] for i in indices)), convolution(*(vs[i] for i in indices)), alpha):
            return False
    return True


def extend_witness(
    us: Sequence[Sequence[Hashable]],
    vs: Sequence[Sequence[Hashable]],
    u_next: Sequence[Hashable],
    ell: int,
    n: int,
) -> Tuple[Hashable, ...]:
    """
    Answer the move u_next with a word v_next such that the extended tuples
    are ≡_{k+1,ℓ−1}.

    Moves shorter than n^{k+ℓ+1} are copied. A move of a new length gets an
    answer of a new length in [n^{k+ℓ+1}, n^{k+ℓ+1}+k]. A move as long as
    some u_i gets an answer as long as v_i, so |v_next| ≤ n^{k+ℓ+1}+k only
    holds when the words of vs respect that bound.

    Raises:
        InputError: ℓ = 0 or the tuples are not ≡_{k,ℓ}
    """
    if ell < 1:
        raise InputError("witness extension needs ell > 0")
    if not equiv_kl(us, vs, ell, n):
        raise InputError("the given tuples are not equivalent")
    k = len(us)
    u_next = tuple(u_next)
    threshold = n ** (k + ell + 1)
    alpha = n ** ell
    same = [i for i in range(k) if len(us[i]) == len(u_next)]

    if len(u_next) < threshold:
        # short words are copied: identical partners exist for every short word
        return u_next

    if not same:
        taken = {len(v) for v in vs}
        target = next(lam for lam in range(threshold, threshold + k + 1) if lam not in taken)
        word = list(u_next)
        counts = Counter(word)
        if target >= len(word):
            letter = max(sorted(counts, key=repr), key=lambda a: counts[a])
            word.extend([letter] * (target - len(word)))
        else:
            while len(word) > target:
                letter = next(a for a in sorted(counts, key=repr) if counts[a] > alpha)
                word.remove(letter)
                counts[letter] -= 1
        return tuple(word)

    u = convolution(*(us[i] for i in same))
    v = convolution(*(vs[i] for i in same))
    return solve_counts(u, u_next, v, alpha, n, gamma_size=n ** len(same))


# ---------------------------------------------------------------------------
# Quantifier-free evaluation


def word_path_targets(G: FiniteLabelledGraph, source: Word, blocks: Sequence[fologic.Block]) -> Set[Word]:
    current = {source}
    for actions, count in blocks:
        for _ in range(count):
            current = {t for w in current for a in actions for t in G.successors(w, a)}
            if not current:
                return current
    return current


def qf_eval(G: FiniteLabelledGraph, psi: Formula, assignment: Mapping[str, Word]) -> bool:
    """
    Truth of a quantifier-free formula in 𝔊⁺ under an assignment of words.

    Path atoms are evaluated by forward search.

    Raises:
        InputError: unknown action, uncovered variable or a quantifier
    """
    env = {k: tuple(v) for k, v in assignment.items()}
    missing = fologic.free_vars(psi) - set(env)
    if missing:
        raise InputError(f"unassigned free variables: {', '.join(sorted(missing))}")
    return _qf(G, psi, env)


def _qf(G: FiniteLabelledGraph, f: Formula, env: Mapping[str, Word]) -> bool:
    if isinstance(f, Eq):
        return env[f.x] == env[f.y]
    if isinstance(f, Edge):
        if f.action not in G.actions:
            raise InputError(f"unknown action {f.action!r}")
        return G.holds(f.action, env[f.x], env[f.y])
    if isinstance(f, Path):
        return env[f.y] in word_path_targets(G, env[f.x], f.blocks)
    if isinstance(f, Not):
        return not _qf(G, f.body, env)
    if isinstance(f, And):
        return all(_qf(G, p, env) for p in f.parts)
    if isinstance(f, Or):
        return any(_qf(G, p, env) for p in f.parts)
    if isinstance(f, Implies):
        return (not _qf(G, f.left, env)) or _qf(G, f.right, env)
    if isinstance(f, Iff):
        return _qf(G, f.left, env) == _qf(G, f.right, env)
    raise InputError("quantifier in a quantifier-free position")


def atom_basis(G: FiniteLabelledGraph, variables: Sequence[str]) -> List[Formula]:
    """Every equality and edge atom over the variables."""
    atoms: List[Formula] = []
    for x, y in itertools.product(variables, repeat=2):
        atoms.append(Eq(x, y))
        atoms.extend(Edge(a, x, y) for a in G.actions)
    return atoms


def satisfies_same_qf(G: FiniteLabelledGraph, us: Sequence[Word], vs: Sequence[Word]) -> bool:
    """Whether the tuples agree on every atom of the basis."""
    names = [f"x{i}" for i in range(len(us))]
    env_u = dict(zip(names, map(tuple, us)))
    env_v = dict(zip(names, map(tuple, vs)))
    return all(_qf(G, atom, env_u) == _qf(G, atom, env_v) for atom in atom_basis(G, names))


def word_sphere(
    G: FiniteLabelledGraph,
    centers: Sequence[Word],
    n: int,
    actions: Optional[Sequence[str]] = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> SphereStructure:
    """S_n(𝔊⁺, w₁,…,w_k), optionally restricted to some actions."""
    return bfs_sphere(
        [G.check_word(w) for w in centers],
        G.successors,
        G.predecessors,
        tuple(actions) if actions is not None else G.actions,
        n,
        max_nodes,
    )


def word_distance(
    G: FiniteLabelledGraph, u: Word, v: Word, cap: int, max_nodes: int = DEFAULT_MAX_NODES
) -> Optional[int]:
    """Undirected distance in 𝔊⁺, or None beyond ``cap``."""
    u, v = G.check_word(u), G.check_word(v)
    if len(u) != len(v):
        return None
    sphere = word_sphere(G, [u], cap, max_nodes=max_nodes)
    return sphere.dist.get(v)


# ---------------------------------------------------------------------------
# Bounded evaluation


class WordDomain(ABC):
    """
    A set of words a tagged quantifier ranges over, possibly depending on
    the words bound so far.

    Implementations must be invariant under every permutation of positions
    that fixes all bound words, and under renaming nothing else.
    """

    #: Quantifier rank of a formula defining the domain
    membership_rank: int = 0

    @abstractmethod
    def contains(self, word: Word, bound: Mapping[str, Word]) -> bool:
        pass

    def finite_part(self, bound: Mapping[str, Word]) -> Iterable[Word]:
        """Members that must be tried explicitly."""
        return ()

    @abstractmethod
    def profile_representatives(
        self, profile_of: Callable[[Hashable], FrozenSet[str]], avoid_lengths: Set[int]
    ) -> Iterable[Word]:
        """
        One member for every achievable self-loop profile among the members
        outside the finite part, with length not in ``avoid_lengths``.
        """

    def letters(self, bound: Mapping[str, Word]) -> Optional[FrozenSet[Hashable]]:
        """A superset of the letters members may use, or None for all."""
        return None


@dataclass
class FrStats:
    words_examined: int = 0
    qf_evaluations: int = 0
    guarded: int = 0
    exact: int = 0
    bounded: int = 0


class FrEvaluator:
    """
    Decides sentences over 𝔊⁺ by quantifier recursion over finite candidate
    sets.

    A quantifier is resolved in one of three ways:

    - guarded: the matrix forces the variable to be equal or adjacent to a
      bound word, so its neighbours are the complete range;
    - innermost: the quantifier-free body only sees equality, adjacency and
      self-loops, so the bound words, their one-letter variants and one
      word per self-loop profile are complete;
    - bounded: words of length up to n^{k+q+1}+k, one per orbit of the
      position permutations fixing the bound words.
    """

    def __init__(
        self,
        graph: FiniteLabelledGraph,
        domains: Optional[Mapping[str, WordDomain]] = None,
        max_words: int = DEFAULT_MAX_WORDS,
        slack: int = 0,
    ):
        self.graph = graph
        self.domains = dict(domains or {})
        self.max_words = max_words
        self.slack = slack
        self.stats = FrStats()

    @property
    def n_eff(self) -> int:
        return max(self.graph.n, 2)

    def bounds(self, phi: Formula) -> List[int]:
        """Length bound of every quantifier in the prepared prefix."""
        prefix, _ = fologic.split_prefix(self._prepare(phi))
        ranks = self._ranks(prefix)
        return [self.n_eff ** (j + ranks[j] + 1) + j + self.slack for j in range(len(prefix))]

    def evaluate(self, phi: Formula) -> bool:
        phi = self._prepare(phi)
        prefix, matrix = fologic.split_prefix(phi)
        names = [q.var for q in prefix]
        if len(set(names)) != len(names):
            raise InputError("quantified variables must be distinct")
        for q in prefix:
            if q.domain is not None and q.domain not in self.domains:
                raise InputError(f"unknown domain tag {q.domain!r}")
        self._prefix = prefix
        self._matrix = matrix
        self._ranks_cache = self._ranks(prefix)
        self._matrix_actions = fologic.actions_of(matrix)
        self._guards = [self._find_guards(j) for j in range(len(prefix))]
        result = self._eval(0, {})
        logger.debug(
            "evaluated %d quantifiers: %d words, %d matrix evaluations", len(prefix),
            self.stats.words_examined, self.stats.qf_evaluations,
        )
        return result

    def _prepare(self, phi: Formula) -> Formula:
        if fologic.free_vars(phi):
            raise InputError(f"sentence has free variables: {', '.join(sorted(fologic.free_vars(phi)))}")
        if fologic.has_paths(phi):
            phi = fologic.expand_paths(phi)
        if fologic.has_domains(phi):
            if not fologic.is_prenex(phi):
                raise InputError("domain-tagged sentences must already be in prenex form")
            return phi
        return fologic.prenex(phi)

    def _ranks(self, prefix: Sequence[fologic.Quantifier]) -> List[int]:
        ranks = [0] * (len(prefix) + 1)
        for j in range(len(prefix) - 1, -1, -1):
            domain_rank = self.domains[prefix[j].domain].membership_rank if prefix[j].domain else 0
            ranks[j] = 1 + max(domain_rank, ranks[j + 1])
        return ranks

    def _find_guards(self, j: int) -> List[Formula]:
        q = self._prefix[j]
        earlier = {p.var for p in self._prefix[:j]}
        positive = isinstance(q, Exists)
        guards = []
        for atom, sign in fologic.literals(self._matrix, positive):
            if not sign or isinstance(atom, Path):
                continue
            ends = (atom.x, atom.y)
            if q.var in ends:
                other = atom.y if atom.x == q.var else atom.x
                if other in earlier:
                    guards.append(atom)
        return guards

    def _charge(self, count: int = 1) -> None:
        self.stats.words_examined += count
        if self.stats.words_examined > self.max_words:
            logger.warning("word budget of %d exhausted", self.max_words)
            raise CapExceeded("max_words", self.max_words, reached=self.stats.words_examined)

    def _eval(self, j: int, env: Dict[str, Word]) -> bool:
        if j == len(self._prefix):
            self.stats.qf_evaluations += 1
            return _qf(self.graph, self._matrix, env)
        q = self._prefix[j]
        want = isinstance(q, Exists)
        for word in self._candidates(j, env):
            self._charge()
            env[q.var] = word
            try:
                if self._eval(j + 1, env) == want:
                    return want
            finally:
                del env[q.var]
        return not want

    def _candidates(self, j: int, env: Mapping[str, Word]) -> Iterator[Word]:
        # the caller rebinds env while this generator is live
        env = dict(env)
        q = self._prefix[j]
        domain = self.domains.get(q.domain) if q.domain else None
        seen: Set[Word] = set()

        def admit(words: Iterable[Word]) -> Iterator[Word]:
            for w in words:
                if w in seen:
                    continue
                seen.add(w)
                if domain is None or domain.contains(w, env):
                    yield w

        if self._guards[j]:
            self.stats.guarded += 1
            yield from admit(self._guard_candidates(self._guards[j], q.var, env))
            return
        if j == len(self._prefix) - 1:
            self.stats.exact += 1
            yield from admit(self._local_words(env))
            if domain is not None:
                yield from admit(domain.finite_part(env))
                avoid = {len(w) for w in env.values()}
                yield from admit(domain.profile_representatives(self._profile, avoid))
            else:
                yield from admit(self._generic_words({len(w) for w in env.values()}))
            return
        self.stats.bounded += 1
        bound = self.n_eff ** (j + self._ranks_cache[j] + 1) + j + self.slack
        letters = domain.letters(env) if domain is not None else None
        letters = tuple(self.graph.nodes if letters is None else [a for a in self.graph.nodes if a in letters])
        estimate = self._orbit_count(env, bound, len(letters))
        if self.stats.words_examined + estimate > self.max_words:
            logger.warning("quantifier %s needs about %d candidate words (bound %d)", q.var, estimate, bound)
            raise CapExceeded("max_words", self.max_words, reached=self.stats.words_examined + estimate)
        if domain is not None:
            yield from admit(domain.finite_part(env))
        yield from admit(self._orbit_words(env, bound, letters))

    def _guard_candidates(self, guards: Sequence[Formula], var: str, env: Mapping[str, Word]) -> Set[Word]:
        best: Optional[Set[Word]] = None
        for atom in guards:
            if isinstance(atom, Eq):
                other = atom.y if atom.x == var else atom.x
                found = {env[other]}
            elif atom.x == var:
                found = self.graph.predecessors(env[atom.y], atom.action)
            else:
                found = self.graph.successors(env[atom.x], atom.action)
            if best is None or len(found) < len(best):
                best = found
        return sorted(best, key=repr)

    def _local_words(self, env: Mapping[str, Word]) -> Iterator[Word]:
        for w in env.values():
            yield w
            for i in range(len(w)):
                for letter in self.graph.nodes:
                    if letter != w[i]:
                        yield w[:i] + (letter,) + w[i + 1:]

    def _profile(self, letter: Hashable) -> FrozenSet[str]:
        return self.graph.loops(letter) & self._matrix_actions

    def _generic_words(self, avoid_lengths: Set[int]) -> Iterator[Word]:
        groups: Dict[FrozenSet[str], Hashable] = {}
        for letter in self.graph.nodes:
            groups.setdefault(self._profile(letter), letter)
        return generic_representatives(list(groups.items()), avoid_lengths)

    def _orbit_count(self, env: Mapping[str, Word], bound: int, alphabet_size: int) -> int:
        if alphabet_size == 0:
            return 0
        total = 0
        for length in range(1, bound + 1):
            product = 1
            for positions in _column_classes(env.values(), length):
                product *= math.comb(len(positions) + alphabet_size - 1, alphabet_size - 1)
            total += product
            if total > self.max_words:
                break
        return total

    def _orbit_words(self, env: Mapping[str, Word], bound: int, letters: Sequence[Hashable]) -> Iterator[Word]:
        for length in range(1, bound + 1):
            classes = _column_classes(env.values(), length)
            choices = [itertools.combinations_with_replacement(letters, len(c)) for c in classes]
            for pick in itertools.product(*choices):
                word: List[Hashable] = [None] * length
                for positions, multiset in zip(classes, pick):
                    for p, letter in zip(positions, multiset):
                        word[p] = letter
                yield tuple(word)


def _column_classes(bound_words: Iterable[Word], length: int) -> List[List[int]]:
    """
    Positions of a word of the given length grouped by the letters the
    bound words of that length carry there.
    """
    columns = sorted({w for w in bound_words if len(w) == length}, key=repr)
    classes: Dict[Tuple, List[int]] = {}
    for p in range(length):
        classes.setdefault(tuple(w[p] for w in columns), []).append(p)
    return list(classes.values())


def generic_representatives(
    groups: Sequence[Tuple[FrozenSet[str], Hashable]],
    avoid_lengths: Set[int],
    required: Sequence[Hashable] = (),
    required_profile: FrozenSet[str] = frozenset(),
    pad: Optional[Hashable] = None,
) -> Iterator[Word]:
    """
    One word per distinct union of group profiles.

    Args:
        groups: (profile, letter) pairs, one letter per profile
        avoid_lengths: Lengths the words must not have
        required: Letters every word starts with
        required_profile: Self-loop profile of the required letters
        pad: Letter used to reach an admissible length; defaults to the
            first letter of the word

    Yields:
        Words over the chosen letters, each of an admissible length
    """
    seen: Set[FrozenSet[str]] = set()
    subsets: Iterable[Tuple[int, ...]] = itertools.chain.from_iterable(
        itertools.combinations(range(len(groups)), size) for size in range(0 if required else 1, len(groups) + 1)
    )
    for subset in subsets:
        profile = required_profile.union(*(groups[i][0] for i in subset))
        if profile in seen:
            continue
        seen.add(profile)
        word = list(required) + [groups[i][1] for i in subset]
        filler = pad if pad is not None else word[0]
        while len(word) in avoid_lengths:
            word.append(filler)
        yield tuple(word)


def fr_evaluate(
    G: FiniteLabelledGraph,
    phi: Formula,
    domains: Optional[Mapping[str, WordDomain]] = None,
    max_words: int = DEFAULT_MAX_WORDS,
    slack: int = 0,
) -> bool:
    """
    Decide 𝔊⁺ ⊨ φ.

    Args:
        G: The finite graph
        phi: A sentence; untagged input is converted to prenex form,
            domain-tagged input must already be prenex
        domains: Resolution of domain tags
        max_words: Budget of candidate words
        slack: Added to every length bound

    Returns:
        The truth value

    Raises:
        CapExceeded: the candidate words exceed the budget
    """
    return FrEvaluator(G, domains, max_words, slack).evaluate(phi)
