"""
Reduction from first-order model checking over a ground tree rewrite graph
𝔊(ℛ) to model checking over the word lifting 𝔗⁺ of a finite graph 𝔗.

Pipeline:

1. ``report_bounds`` computes σ(i), γ and the alphabet-size bounds
   symbolically.
2. ``build_alphabets`` enumerates the tree alphabets U, U_i, V_i and W_i.
3. ``compile`` builds Γ = U″ ∪ U′ ∪ {$, #}, the graph 𝔗 and the relativized
   sentence. Quantifier domains stay as tags resolved by ``LanguageDomain``;
   ``CompiledInstance.phi4`` spells them out as plain first-order formulas.
4. ``decide`` runs the bounded evaluator on 𝔗⁺.
"""
import itertools
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from gtrwfo import fologic
from gtrwfo.config import DEFAULT_MAX_ALPHABET, DEFAULT_MAX_NODES, DEFAULT_MAX_WORDS, MEMO_ENTRIES
from gtrwfo.errors import CapExceeded, InputError
from gtrwfo.fologic import Exists, ForAll, Formula
from gtrwfo.gtrs import Gtrs, bfs_sphere, step_word
from gtrwfo.trees import RankedAlphabet, RankedTree, TreeString, format_term, int_max, leaf_count_feasible, norm, trees_by_size
from gtrwfo.wordfr import FiniteLabelledGraph, FrEvaluator, Word, WordDomain, generic_representatives

logger = logging.getLogger(__name__)

DOLLAR = "$"
HASH = "#"
MARKER_PREFIX = "@"


def sigma(i: int, ell: int, r: int, p: int) -> int:
    """σ(i) = ℓ·r·7·4^i·((p−1)·r·4^i + 1) + p·r·4^i"""
    if not 0 <= i <= ell:
        raise InputError(f"i must lie in [0, {ell}]")
    return ell * r * 7 * 4 ** i * ((p - 1) * r * 4 ** i + 1) + p * r * 4 ** i


def word_length_bound(i: int, ell: int, r: int, p: int) -> int:
    """⌈σ(i)/p⌉ + (p−1)²·r·4^i, the length bound for W′_i words."""
    return -(-sigma(i, ell, r, p) // p) + (p - 1) ** 2 * r * 4 ** i


def gamma(ell: int, r: int, p: int) -> int:
    return word_length_bound(ell, ell, r, p)


@dataclass(frozen=True)
class ReductionBounds:
    """
    Symbolic sizes of the reduction for a GTRS and a quantifier count.
    """

    ell: int
    r: int
    p: int
    alphabet_size: int
    sigma: Tuple[int, ...]
    gamma: int
    #: trees in U have size at most this
    u_max_size: int
    #: |A|^{u_max_size}
    u_bound: int
    #: log10 of (u_bound + 1)^γ, the bound on |U″|
    u2_bound_log10: float
    #: log10 of 2 + (u_bound + 1)^γ, the bound on |Γ|
    gamma_size_log10: float

    def to_dict(self) -> Dict[str, Any]:
        values = asdict(self)
        values["sigma"] = list(self.sigma)
        return values


def bounds_for(alphabet: RankedAlphabet, r: int, ell: int) -> ReductionBounds:
    p = alphabet.p
    sigmas = tuple(sigma(i, ell, r, p) for i in range(ell + 1))
    g = gamma(ell, r, p)
    u_max = sigmas[-1] + r * p * 4 ** ell
    u_bound = len(alphabet) ** u_max
    u2_log = g * math.log10(u_bound + 1)
    return ReductionBounds(
        ell=ell,
        r=r,
        p=p,
        alphabet_size=len(alphabet),
        sigma=sigmas,
        gamma=g,
        u_max_size=u_max,
        u_bound=u_bound,
        u2_bound_log10=u2_log,
        gamma_size_log10=math.log10(2 + (u_bound + 1) ** g) if u2_log < 15 else u2_log,
    )


def quantifier_depth(phi: Formula) -> int:
    """ℓ: the number of quantifiers of the prenex form minus one."""
    return max(fologic.count_quantifiers(fologic.prenex(phi)) - 1, 0)


def report_bounds(R: Gtrs, phi: Formula) -> ReductionBounds:
    """
    All bound values of the reduction, computed without enumeration.
    """
    return bounds_for(R.alphabet, R.r, quantifier_depth(phi))


@dataclass
class TreeAlphabets:
    """
    The enumerated tree alphabets for a GTRS and quantifier depth ℓ.

    ``U`` is ordered by size then structure; ``U_i``, ``V_i`` and ``W_i`` are
    indexed by i ∈ [0, ℓ].
    """

    alphabet: RankedAlphabet
    bounds: ReductionBounds
    U: Tuple[RankedTree, ...]
    U_i: Tuple[Tuple[RankedTree, ...], ...]
    V_i: Tuple[Tuple[RankedTree, ...], ...]
    W_i: Tuple[Tuple[RankedTree, ...], ...]
    _v_sets: List[FrozenSet[RankedTree]] = field(default_factory=list, init=False, repr=False)
    _w_sets: List[FrozenSet[RankedTree]] = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        self._v_sets = [frozenset(v) for v in self.V_i]
        self._w_sets = [frozenset(w) for w in self.W_i]

    @property
    def ell(self) -> int:
        return self.bounds.ell

    def length_in_m(self, n: int) -> bool:
        return n >= 1 and leaf_count_feasible(self.alphabet, n)

    def in_z(self, w: Sequence[RankedTree]) -> bool:
        """w ∈ Z, i.e. |w| ∈ M."""
        return self.length_in_m(len(w))

    def weight(self, w: Sequence[RankedTree]) -> float:
        """‖w‖ + int(|w|)"""
        return norm(w) + int_max(self.alphabet, len(w))

    def z_property(self, w: Sequence[RankedTree], i: int) -> bool:
        """
        w ∈ Z_i: w ∈ V_i* W_i V_i* ∩ Z and ‖w‖ + int(|w|) > σ(i).
        """
        if not self.in_z(w):
            return False
        in_w = [t in self._w_sets[i] for t in w]
        if sum(in_w) != 1:
            return False
        if not all(hit or t in self._v_sets[i] for t, hit in zip(w, in_w)):
            return False
        return self.weight(w) > self.bounds.sigma[i]


def build_alphabets(R: Gtrs, ell: int, max_alphabet: int = DEFAULT_MAX_ALPHABET) -> TreeAlphabets:
    """
    Enumerate U = T[1, σ(ℓ)+r·p·4^ℓ] and its subalphabets.

    Raises:
        CapExceeded: more than ``max_alphabet`` trees, with the bounds attached
    """
    if ell < 0:
        raise InputError("ell must be non-negative")
    A = R.alphabet
    bounds = bounds_for(A, R.r, ell)
    try:
        strata = trees_by_size(A, bounds.u_max_size, max_alphabet)
    except CapExceeded as exc:
        exc.bounds = bounds.to_dict()
        raise
    U = tuple(t for stratum in strata for t in stratum)

    def upto(n: int) -> Tuple[RankedTree, ...]:
        return tuple(t for t in U if t.size <= n)

    U_i = tuple(upto(bounds.sigma[i]) for i in range(ell + 1))
    V_i = tuple(upto(R.r * 4 ** i) for i in range(ell + 1))
    W_i = []
    for i in range(ell + 1):
        v_set = set(V_i[i])
        found = []
        for symbol, k in A.symbols:
            if k == 0:
                continue
            for children in itertools.product(V_i[i], repeat=k):
                t = RankedTree(symbol, children)
                if t not in v_set:
                    found.append(t)
        W_i.append(tuple(found))
    logger.debug(
        "alphabets for ell=%d: |U|=%d, |U_i|=%s, |V_i|=%s, |W_i|=%s",
        ell, len(U), [len(x) for x in U_i], [len(x) for x in V_i], [len(x) for x in W_i],
    )
    return TreeAlphabets(A, bounds, U, U_i, V_i, tuple(W_i))


def minimal_w_words(alphabets: TreeAlphabets, i: int, max_alphabet: int = DEFAULT_MAX_ALPHABET) -> List[TreeString]:
    """
    W′_i: the factor-minimal words of V_i* W_i V_i* with |w| ∈ M and
    ‖w‖ + int(|w|) > σ(i), by increasing length.
    """
    b = alphabets.bounds
    limit = word_length_bound(i, b.ell, b.r, b.p)
    V, W = alphabets.V_i[i], alphabets.W_i[i]
    found: Set[TreeString] = set()
    ordered: List[TreeString] = []
    tried = 0
    for length in range(1, limit + 1):
        if not alphabets.length_in_m(length):
            continue
        for pos in range(length):
            for middle in W:
                for rest in itertools.product(V, repeat=length - 1):
                    tried += 1
                    if tried > max_alphabet:
                        logger.warning("W'_%d enumeration stopped after %d words", i, tried)
                        raise CapExceeded("max_alphabet", max_alphabet, reached=tried, bounds=b.to_dict())
                    w = rest[:pos] + (middle,) + rest[pos:]
                    if alphabets.weight(w) <= b.sigma[i]:
                        continue
                    if any(
                        w[lo:hi] in found
                        for lo in range(pos + 1)
                        for hi in range(pos + 1, length + 1)
                        if (lo, hi) != (0, length)
                    ):
                        continue
                    found.add(w)
                    ordered.append(w)
    logger.debug("|W'_%d| = %d", i, len(ordered))
    return ordered


def _words(letters: Sequence[RankedTree], lengths: Iterable[int]) -> Iterator[TreeString]:
    for length in lengths:
        yield from itertools.product(letters, repeat=length)


def symbol_name(w: Sequence[RankedTree]) -> str:
    """Letter name of a tree string in Γ, e.g. ``[a;•(a,a)]``."""
    return "[" + ";".join(format_term(t) for t in w) + "]"


def marker(letter: str) -> str:
    return MARKER_PREFIX + letter


def relativize(phi: Formula, ell: int) -> Formula:
    """
    Tag the quantifiers of a prenex sentence with their domains.

    The i-th quantifier from the inside, binding x_i, is tagged
    ``L<i>(x_{i+1},…,x_ℓ)``; the outermost one is tagged ``L<ℓ>``.

    Raises:
        InputError: phi is not prenex, is already tagged or has a
            different number of quantifiers
    """
    if fologic.has_domains(phi):
        raise InputError("sentence is already relativized")
    if not fologic.is_prenex(phi):
        raise InputError("relativization needs a prenex sentence")
    prefix, matrix = fologic.split_prefix(phi)
    if len(prefix) != ell + 1:
        raise InputError(f"expected {ell + 1} quantifiers, found {len(prefix)}")
    names = [q.var for q in prefix]
    body = matrix
    for position in range(len(prefix) - 1, -1, -1):
        q = prefix[position]
        i = ell - position
        body = type(q)(q.var, body, domain_tag(i, names[:position][::-1]))
    return body


def domain_tag(i: int, params: Sequence[str]) -> str:
    return f"L{i}({','.join(params)})" if params else f"L{i}"


@dataclass(frozen=True)
class Witness:
    """
    A 𝔗⁺ word read back in 𝔖₁: either a tree of U (``copy`` is None) or the
    copy-indexed tree string (copy, w).
    """

    copy: Optional[int]
    items: TreeString

    def __str__(self) -> str:
        text = " ".join(format_term(t) for t in self.items)
        return text if self.copy is None else f"({self.copy}, {text})"


@dataclass
class CompiledInstance:
    """
    The finite graph 𝔗 over Γ and the relativized sentence for a GTRS and a
    sentence.
    """

    gtrs: Gtrs
    sentence: Formula
    prenex: Formula
    alphabets: TreeAlphabets
    #: letter name to the tree string it stands for; $ and # are absent
    symbols: Dict[str, TreeString]
    v_prime: Tuple[FrozenSet[str], ...]
    w_prime: Tuple[FrozenSet[str], ...]
    u_letters: FrozenSet[str]
    u2_size: int
    graph: FiniteLabelledGraph
    phi3: Formula
    domains: Dict[str, "LanguageDomain"] = field(default_factory=dict)
    _phi4: Optional[Formula] = field(default=None, init=False, repr=False)

    @property
    def ell(self) -> int:
        return self.alphabets.ell

    @property
    def bounds(self) -> ReductionBounds:
        return self.alphabets.bounds

    @property
    def gamma_letters(self) -> Tuple[str, ...]:
        return self.graph.nodes

    @property
    def sigma_actions(self) -> Tuple[str, ...]:
        return self.gtrs.actions

    @property
    def phi4(self) -> Formula:
        """The relativized sentence with every domain spelled out."""
        if self._phi4 is None:
            self._phi4 = fologic.map_domains(self.phi3, self._expand_domain)
        return self._phi4

    def u_i_letters(self, i: int) -> FrozenSet[str]:
        return frozenset(symbol_name((t,)) for t in self.alphabets.U_i[i])

    def language_formula(self, i: int, x: str, params: Sequence[str]) -> Formula:
        """
        x ∈ L_i ∪ S_{3·4^i}(x_{i+1},…,x_ℓ) over the signature of 𝔗⁺.
        """
        all_markers = [marker(a) for a in self.gamma_letters]

        def letters_only(allowed: Iterable[str], var: str) -> Formula:
            return fologic.membership([marker(a) for a in allowed], all_markers, var)

        def single_letter(allowed: Iterable[str], var: str) -> Formula:
            allowed = sorted(allowed)
            return fologic.conj(letters_only(allowed, var), fologic.count_exactly([marker(a) for a in allowed], 1, var))

        xv = "x_"
        infinite = fologic.conj(
            letters_only(self.v_prime[i] | self.w_prime[i] | {DOLLAR}, xv),
            fologic.count_exactly([marker(a) for a in sorted(self.w_prime[i])], 1, xv),
            fologic.Not(single_letter(self.u_letters, xv)),
        )
        language = fologic.disj(infinite, single_letter(self.u_i_letters(i), xv))
        placeholders = [f"p_{k}" for k in range(len(params))]
        near = [fologic.dist_leq(self.sigma_actions, 3 * 4 ** i, xv, y) for y in placeholders]
        formula = fologic.disj(language, *near)
        return fologic.substitute(formula, dict(zip([xv] + placeholders, [x] + list(params))))

    def _expand_domain(self, q: fologic.Quantifier) -> Formula:
        domain = self.domains[q.domain]
        constraint = self.language_formula(domain.i, q.var, domain.params)
        if isinstance(q, Exists):
            return Exists(q.var, fologic.conj(constraint, q.body))
        return ForAll(q.var, fologic.Implies(constraint, q.body))

    def exp(self, word: Sequence[str]) -> TreeString:
        """Concatenate the tree strings of the letters; $ and # expand to nothing."""
        return tuple(t for letter in word for t in self.symbols.get(letter, ()))

    def canonical_word(self, word: Sequence[str]) -> Word:
        """The same copy with every $ moved to the end."""
        kept = [a for a in word if a != DOLLAR]
        return tuple(kept) + (DOLLAR,) * (len(word) - len(kept))

    def back_map(self, word: Sequence[str]) -> Witness:
        """
        Read a domain word back as an element of 𝔖₁. The copy index is the
        number of $ letters.
        """
        word = tuple(word)
        if HASH in word:
            raise InputError("words containing # lie outside every domain")
        if len(word) == 1 and word[0] in self.u_letters:
            return Witness(None, self.symbols[word[0]])
        return Witness(word.count(DOLLAR), self.exp(word))

    def factorize(self, w: Sequence[RankedTree], i: int) -> Optional[Tuple[str, ...]]:
        """
        A word over V′_i* W′_i V′_i* whose expansion is w, or None.
        """
        w = tuple(w)
        pieces = {}
        for name in self.v_prime[i]:
            pieces[self.symbols[name]] = (name, False)
        for name in self.w_prime[i]:
            pieces[self.symbols[name]] = (name, True)
        longest = max((len(s) for s in pieces), default=0)
        # reach[(pos, used)] is a factorization of w[:pos] using `used` W′ letters
        reach: Dict[Tuple[int, bool], Tuple[str, ...]] = {(0, False): ()}
        for pos in range(len(w)):
            for used in (False, True):
                prefix = reach.get((pos, used))
                if prefix is None:
                    continue
                for length in range(1, min(longest, len(w) - pos) + 1):
                    piece = pieces.get(w[pos:pos + length])
                    if piece is None or (piece[1] and used):
                        continue
                    reach.setdefault((pos + length, used or piece[1]), prefix + (piece[0],))
        return reach.get((len(w), True))


class LanguageDomain(WordDomain):
    """
    L_i(x_{i+1},…,x_ℓ) as a set of 𝔗⁺ words: the $-padded copies of Z_i
    words, the one-letter words of U_i and the words within distance 3·4^i
    of a bound parameter along the GTRS actions.
    """

    def __init__(self, instance: CompiledInstance, i: int, params: Sequence[str], max_nodes: int = DEFAULT_MAX_NODES):
        self.instance = instance
        self.i = i
        self.params = tuple(params)
        self.max_nodes = max_nodes
        self.radius = 3 * 4 ** i
        self.body_letters = instance.v_prime[i] | instance.w_prime[i] | {DOLLAR}
        self.u_i = instance.u_i_letters(i)
        self.membership_rank = fologic.qr(instance.language_formula(i, "x", self.params))
        self._spheres: Dict[Tuple[Word, ...], FrozenSet[Word]] = {}

    def in_language(self, word: Word) -> bool:
        if len(word) == 1 and word[0] in self.u_i:
            return True
        if not all(a in self.body_letters for a in word):
            return False
        if sum(a in self.instance.w_prime[self.i] for a in word) != 1:
            return False
        return not (len(word) == 1 and word[0] in self.instance.u_letters)

    def near(self, bound: Mapping[str, Word]) -> FrozenSet[Word]:
        centers = tuple(bound[p] for p in self.params if p in bound)
        if not centers:
            return frozenset()
        cached = self._spheres.get(centers)
        if cached is None:
            graph = self.instance.graph
            sphere = bfs_sphere(
                list(dict.fromkeys(centers)), graph.successors, graph.predecessors,
                self.instance.sigma_actions, self.radius, self.max_nodes,
            )
            cached = frozenset(sphere.nodes)
            if len(self._spheres) >= MEMO_ENTRIES:
                self._spheres.clear()
            self._spheres[centers] = cached
        return cached

    def contains(self, word: Word, bound: Mapping[str, Word]) -> bool:
        return self.in_language(word) or word in self.near(bound)

    def finite_part(self, bound: Mapping[str, Word]) -> Iterable[Word]:
        yield from ((a,) for a in sorted(self.u_i))
        yield from sorted(self.near(bound))

    def profile_representatives(
        self, profile_of: Callable[[str], FrozenSet[str]], avoid_lengths: Set[int]
    ) -> Iterator[Word]:
        # one-letter words may coincide with U letters, which are excluded
        avoid = set(avoid_lengths) | {1}
        w_groups: Dict[FrozenSet[str], str] = {}
        for a in sorted(self.instance.w_prime[self.i]):
            w_groups.setdefault(profile_of(a), a)
        v_groups: Dict[FrozenSet[str], str] = {}
        for a in sorted(self.instance.v_prime[self.i]):
            v_groups.setdefault(profile_of(a), a)
        for profile, letter in w_groups.items():
            yield from generic_representatives(
                list(v_groups.items()), avoid, required=(letter,), required_profile=profile, pad=DOLLAR
            )

    def letters(self, bound: Mapping[str, Word]) -> FrozenSet[str]:
        near_letters = {a for w in self.near(bound) for a in w}
        return frozenset(self.body_letters | self.u_i | near_letters)


def _check_input(R: Gtrs, phi: Formula) -> None:
    if R.p < 2:
        raise InputError("the reduction needs a symbol of rank at least 2")
    if any(a.startswith(MARKER_PREFIX) for a in R.actions):
        raise InputError(f"action names must not start with {MARKER_PREFIX!r}")
    unknown = fologic.actions_of(phi) - set(R.actions)
    if unknown:
        raise InputError(f"sentence uses actions the GTRS does not declare: {', '.join(sorted(unknown))}")
    if fologic.free_vars(phi):
        raise InputError("the formula must be a sentence")


def compile(
    R: Gtrs,
    phi: Formula,
    max_alphabet: int = DEFAULT_MAX_ALPHABET,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> CompiledInstance:
    """
    Build 𝔗 and the relativized sentence for 𝔊(ℛ) ⊨ φ.

    Raises:
        InputError: p < 2, an action outside the GTRS, or no quantifier
        CapExceeded: an alphabet exceeds ``max_alphabet``; the bounds are attached
    """
    _check_input(R, phi)
    if fologic.has_paths(phi):
        phi = fologic.expand_paths(phi)
    prenexed = fologic.prenex(phi)
    count = fologic.count_quantifiers(prenexed)
    if count == 0:
        raise InputError("the sentence has no quantifier")
    ell = count - 1
    alphabets = build_alphabets(R, ell, max_alphabet)
    bounds = alphabets.bounds
    ranks = alphabets.alphabet.ranks
    U = alphabets.U

    def estimate(size: int, lengths: Iterable[int], what: str) -> None:
        total = sum(size ** n for n in lengths)
        if total > max_alphabet:
            logger.warning("%s would have %d words", what, total)
            raise CapExceeded("max_alphabet", max_alphabet, reached=total, bounds=bounds.to_dict())

    u_prime_lengths = sorted(m - 1 for m in ranks if m >= 2)
    u2_lengths = [n for n in range(1, bounds.gamma + 1) if alphabets.length_in_m(n)]
    estimate(len(U), u_prime_lengths, "U'")
    estimate(len(U), u2_lengths, "U''")
    u_prime = list(_words(U, u_prime_lengths))
    u2 = list(_words(U, u2_lengths))

    symbols: Dict[str, TreeString] = {}
    for w in itertools.chain(u2, u_prime):
        symbols.setdefault(symbol_name(w), w)
    letters = list(symbols) + [DOLLAR, HASH]

    v_prime = []
    w_prime = []
    for i in range(ell + 1):
        v_set = set(alphabets.V_i[i])
        v_prime.append(frozenset(symbol_name(w) for w in u_prime if all(t in v_set for t in w)))
        minimal = minimal_w_words(alphabets, i, max_alphabet)
        w_prime.append(frozenset(symbol_name(w) for w in minimal))

    index = {w: name for name, w in symbols.items()}
    edges = set()
    for name, w in symbols.items():
        for a in R.actions:
            for target in step_word(R, w, a):
                target_name = index.get(target)
                if target_name is not None:
                    edges.add((name, a, target_name))
    markers = {(a, marker(a), HASH) for a in letters}
    graph = FiniteLabelledGraph.build(letters, edges | markers, list(R.actions) + [marker(a) for a in letters])
    logger.debug(
        "compiled: |U|=%d, |U''|=%d, |U'|=%d, |Gamma|=%d, |W'_i|=%s, %d edges",
        len(U), len(u2), len(u_prime), len(letters), [len(w) for w in w_prime], len(graph.edges),
    )

    instance = CompiledInstance(
        gtrs=R,
        sentence=phi,
        prenex=prenexed,
        alphabets=alphabets,
        symbols=symbols,
        v_prime=tuple(v_prime),
        w_prime=tuple(w_prime),
        u_letters=frozenset(symbol_name((t,)) for t in U),
        u2_size=len(u2),
        graph=graph,
        phi3=relativize(prenexed, ell),
    )
    prefix, _ = fologic.split_prefix(instance.phi3)
    names = [q.var for q in prefix]
    for position, q in enumerate(prefix):
        instance.domains[q.domain] = LanguageDomain(instance, ell - position, names[:position][::-1], max_nodes)
    return instance


def decide(
    R: Gtrs,
    phi: Formula,
    literal: bool = False,
    max_alphabet: int = DEFAULT_MAX_ALPHABET,
    max_words: int = DEFAULT_MAX_WORDS,
    max_nodes: int = DEFAULT_MAX_NODES,
    slack: int = 0,
) -> bool:
    """
    Decide 𝔊(ℛ) ⊨ φ through 𝔗⁺.

    Args:
        R: The GTRS
        phi: A sentence over the actions of R
        literal: Evaluate the fully spelled-out sentence instead of the
            domain-tagged one
        max_alphabet: Cap on enumerated trees and Γ letters
        max_words: Cap on candidate words of the evaluator
        max_nodes: Cap on sphere exploration
        slack: Added to every length bound of the evaluator

    Raises:
        CapExceeded: any cap; the reduction bounds are attached
    """
    _check_input(R, phi)
    if fologic.count_quantifiers(phi) == 0:
        return fologic.evaluate_finite(fologic.FiniteStructure([], []), phi)
    instance = compile(R, phi, max_alphabet, max_nodes)
    evaluator = FrEvaluator(
        instance.graph,
        None if literal else instance.domains,
        max_words=max_words,
        slack=slack,
    )
    try:
        result = evaluator.evaluate(instance.phi4 if literal else instance.phi3)
    except CapExceeded as exc:
        exc.bounds = instance.bounds.to_dict()
        raise
    logger.debug("decided %s with %d candidate words", result, evaluator.stats.words_examined)
    return result
