"""
Randomized checks of the structural facts the decision procedure rests on.

Every check draws small random instances from a seeded ``random.Random``,
tests one property on each and returns a :class:`Tally`. A trial whose
instance runs into a resource cap is counted as skipped, never as failed.
"""
import inspect
import itertools
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from gtrwfo import fologic
from gtrwfo.errors import CapExceeded, InputError
from gtrwfo.fologic import Edge, Eq, Exists, ForAll, Formula, Implies, Not
from gtrwfo.gtrs import Gtrs, Rule, find_iso, sphere, sphere_word
from gtrwfo.guarded import eval_guarded, eval_in_sphere
from gtrwfo.reduction import bounds_for, gamma, sigma, word_length_bound
from gtrwfo.trees import (
    RankedAlphabet,
    RankedTree,
    cut,
    diff,
    is_chain,
    iter_nodes,
    leaf,
    leaf_count_feasible,
    leaves,
    make_chain,
    size,
    up,
)
from gtrwfo.wordfr import FiniteLabelledGraph, equiv_kl, extend_witness, fr_evaluate, satisfies_same_qf

logger = logging.getLogger(__name__)

MAX_REPORTED_FAILURES = 5
SPHERE_NODES = 5_000
CONSTANT_NAMES = "abcd"
FUNCTION_NAMES = "fgh"


@dataclass
class Tally:
    """Outcome counts of one randomized check."""

    name: str
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    failures: List[str] = field(default_factory=list)

    def record(self, ok: bool, detail: str = "") -> None:
        if ok:
            self.passed += 1
            return
        self.failed += 1
        if len(self.failures) < MAX_REPORTED_FAILURES:
            self.failures.append(detail)
        logger.warning("%s failed: %s", self.name, detail)

    def skip(self) -> None:
        self.skipped += 1

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "failures": list(self.failures),
        }

    def __str__(self) -> str:
        return f"{self.name}: {self.passed} passed, {self.failed} failed, {self.skipped} skipped"


# ---------------------------------------------------------------------------
# Random instances


def random_alphabet(rng: random.Random, max_symbols: int = 4, max_rank: int = 3) -> RankedAlphabet:
    """At least one constant and at least one symbol of positive rank."""
    total = rng.randint(2, max_symbols)
    constants = rng.randint(1, min(total - 1, len(CONSTANT_NAMES)))
    functions = min(total - constants, len(FUNCTION_NAMES))
    symbols = [(CONSTANT_NAMES[i], 0) for i in range(constants)]
    symbols += [(FUNCTION_NAMES[i], rng.randint(1, max_rank)) for i in range(functions)]
    return RankedAlphabet(tuple(symbols))


def random_tree(rng: random.Random, alphabet: RankedAlphabet, max_size: int) -> RankedTree:
    """A tree of at most ``max_size`` nodes."""

    def grow(budget: int) -> RankedTree:
        options = [(s, k) for s, k in alphabet.symbols if k and k + 1 <= budget]
        if not options or rng.random() < 0.35:
            return leaf(rng.choice(alphabet.constants))
        symbol, k = rng.choice(options)
        shares = [1] * k
        for _ in range(budget - 1 - k):
            shares[rng.randrange(k)] += 1
        return RankedTree(symbol, [grow(s) for s in shares])

    return grow(max(max_size, 1))


def random_gtrs(
    rng: random.Random,
    alphabet: RankedAlphabet,
    max_rules: int = 3,
    max_size: int = 3,
    actions: Sequence[str] = ("a", "b"),
) -> Gtrs:
    rules = tuple(
        Rule(random_tree(rng, alphabet, max_size), rng.choice(actions), random_tree(rng, alphabet, max_size))
        for _ in range(rng.randint(1, max_rules))
    )
    return Gtrs(alphabet, tuple(actions), rules)


def random_prefix_closed(rng: random.Random, t: RankedTree, within: Optional[Set[Tuple[int, ...]]] = None) -> Set[Tuple[int, ...]]:
    """A random prefix-closed set of internal nodes of t, inside ``within`` if given."""
    chosen: Set[Tuple[int, ...]] = set()
    for node, sub in iter_nodes(t):
        if sub.is_leaf() or (within is not None and node not in within):
            continue
        if (not node or node[:-1] in chosen) and rng.random() < 0.6:
            chosen.add(node)
    return chosen


def random_graph(rng: random.Random, max_nodes: int = 3, actions: Sequence[str] = ("e", "f"), density: float = 0.3) -> FiniteLabelledGraph:
    nodes = [f"v{i}" for i in range(rng.randint(1, max_nodes))]
    edges = [(u, a, v) for u in nodes for a in actions for v in nodes if rng.random() < density]
    return FiniteLabelledGraph.build(nodes, edges, actions)


def random_qf(rng: random.Random, variables: Sequence[str], actions: Sequence[str], depth: int = 2) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        x, y = rng.choice(variables), rng.choice(variables)
        return Eq(x, y) if rng.random() < 0.25 else Edge(rng.choice(actions), x, y)
    op = rng.choice(("not", "and", "or", "implies"))
    if op == "not":
        return Not(random_qf(rng, variables, actions, depth - 1))
    left = random_qf(rng, variables, actions, depth - 1)
    right = random_qf(rng, variables, actions, depth - 1)
    if op == "and":
        return fologic.conj(left, right)
    if op == "or":
        return fologic.disj(left, right)
    return Implies(left, right)


def random_sentence(rng: random.Random, actions: Sequence[str], max_quantifiers: int = 2) -> Formula:
    variables = [f"x{i}" for i in range(rng.randint(1, max_quantifiers))]
    body = random_qf(rng, variables, actions)
    for var in reversed(variables):
        body = Exists(var, body) if rng.random() < 0.5 else ForAll(var, body)
    return body


def random_guarded(rng: random.Random, actions: Sequence[str], depth: int, x: str, fresh: fologic.FreshNames) -> Formula:
    """A guarded formula with the single free variable x."""
    if depth == 0 or rng.random() < 0.3:
        return Edge(rng.choice(actions), x, x)
    y = fresh("y")
    a = rng.choice(actions)
    guard = Edge(a, x, y) if rng.random() < 0.5 else Edge(a, y, x)
    body = random_guarded(rng, actions, depth - 1, y, fresh)
    if rng.random() < 0.3:
        body = Not(body)
    if rng.random() < 0.5:
        return Exists(y, fologic.conj(guard, body))
    return ForAll(y, Implies(guard, body))


def _trial(tally: Tally, check: Callable[[], Tuple[bool, str]]) -> None:
    try:
        ok, detail = check()
    except CapExceeded as exc:
        logger.debug("%s skipped a trial: %s", tally.name, exc)
        tally.skip()
        return
    tally.record(ok, detail)


# ---------------------------------------------------------------------------
# Trees


def _leaf_counts_by_composition(alphabet: RankedAlphabet, limit: int) -> Set[int]:
    """Leaf counts up to ``limit`` of trees assembled from smaller trees."""
    counts = {1}
    changed = True
    while changed:
        changed = False
        for k in alphabet.ranks:
            if k < 2:
                continue
            for combo in itertools.combinations_with_replacement(sorted(counts), k):
                total = sum(combo)
                if total <= limit and total not in counts:
                    counts.add(total)
                    changed = True
    return counts


def check_leaf_counts(rng: random.Random, trials: int = 200, max_leaves: int = 12) -> Tally:
    """
    Feasibility of a leaf count agrees with tree composition, and
    ``make_chain`` builds a chain with that many leaves exactly when it is
    feasible.
    """
    tally = Tally("leaf_counts")
    for _ in range(trials):
        alphabet = random_alphabet(rng)
        n = rng.randint(1, max_leaves)

        def check() -> Tuple[bool, str]:
            feasible = leaf_count_feasible(alphabet, n)
            composed = n in _leaf_counts_by_composition(alphabet, n)
            try:
                chain = make_chain(alphabet, n)
                built = len(leaves(chain)) == n and (n == 1 or is_chain(chain))
            except InputError:
                built = False
            return feasible == composed == built, f"{alphabet} n={n}: feasible={feasible} composed={composed} built={built}"

        _trial(tally, check)
    return tally


def check_cut_lengths(rng: random.Random, trials: int = 200, max_size: int = 10) -> Tally:
    """Cutting a prefix-closed set C leaves a feasible number of subtrees of total size |t|−|C|."""
    tally = Tally("cut_lengths")
    for _ in range(trials):
        alphabet = random_alphabet(rng)
        t = random_tree(rng, alphabet, max_size)
        C = random_prefix_closed(rng, t)

        def check() -> Tuple[bool, str]:
            pieces = cut(t, C)
            ok = leaf_count_feasible(alphabet, len(pieces)) and sum(size(s) for s in pieces) + len(C) == size(t)
            return ok, f"t={t} C={sorted(C)} pieces={len(pieces)}"

        _trial(tally, check)
    return tally


# ---------------------------------------------------------------------------
# Spheres


def check_sphere_growth(rng: random.Random, trials: int = 200, max_size: int = 10, max_radius: int = 2) -> Tally:
    """
    Within a sphere every tree t at distance d from the center s has
    |t| ≤ |s| + r·d, and s and t differ in at most r·d nodes both ways.
    """
    tally = Tally("sphere_growth")
    for _ in range(trials):
        alphabet = random_alphabet(rng)
        R = random_gtrs(rng, alphabet)
        s = random_tree(rng, alphabet, max_size)
        n = rng.randint(1, max_radius)

        def check() -> Tuple[bool, str]:
            local = sphere(R, s, n, SPHERE_NODES)
            for t in local.nodes:
                d = local.dist[t]
                if size(t) > size(s) + R.r * d:
                    return False, f"{R.rules} s={s} t={t}: size grew past r*d"
                if diff(s, t) > R.r * d or diff(t, s) > R.r * d:
                    return False, f"{R.rules} s={s} t={t}: diff exceeds r*d"
            return True, ""

        _trial(tally, check)
    return tally


def check_cut_spheres(rng: random.Random, trials: int = 200, max_size: int = 10, max_radius: int = 2) -> Tally:
    """
    The sphere around a tree t is isomorphic to the word sphere around its
    cut t∖C when C avoids the nodes whose subtree is small enough to be
    rewritten, also after permuting the cut.
    """
    tally = Tally("cut_spheres")
    for _ in range(trials):
        alphabet = random_alphabet(rng)
        R = random_gtrs(rng, alphabet)
        t = random_tree(rng, alphabet, max_size)
        n = rng.randint(1, max_radius)
        C = random_prefix_closed(rng, t, within=up(t, R.r * n))

        def check() -> Tuple[bool, str]:
            pieces = list(cut(t, C))
            trees = sphere(R, t, n, SPHERE_NODES)
            if find_iso(trees, sphere_word(R, tuple(pieces), n, SPHERE_NODES)) is None:
                return False, f"{R.rules} t={t} C={sorted(C)} n={n}"
            rng.shuffle(pieces)
            if find_iso(trees, sphere_word(R, tuple(pieces), n, SPHERE_NODES)) is None:
                return False, f"{R.rules} t={t} C={sorted(C)} n={n} (permuted)"
            return True, ""

        _trial(tally, check)
    return tally


def check_guarded_evaluation(rng: random.Random, trials: int = 50, max_size: int = 4, max_depth: int = 3) -> Tally:
    """Guarded evaluation on 𝔊(ℛ) agrees with brute force in the surrounding sphere."""
    tally = Tally("guarded_evaluation")
    for _ in range(trials):
        alphabet = random_alphabet(rng)
        R = random_gtrs(rng, alphabet)
        t = random_tree(rng, alphabet, max_size)
        phi = random_guarded(rng, R.actions, rng.randint(1, max_depth), "x", fologic.FreshNames({"x"}))

        def check() -> Tuple[bool, str]:
            direct = eval_guarded(R, phi, {"x": t}, step_budget=200_000)
            local = eval_in_sphere(R, phi, {"x": t}, max_nodes=SPHERE_NODES)
            return direct == local, f"{R.rules} t={t} phi={fologic.format_formula(phi)}"

        _trial(tally, check)
    return tally


# ---------------------------------------------------------------------------
# Formulas


def _undirected_distances(structure: fologic.FiniteStructure, source: Any, actions: Iterable[str]) -> Dict[Any, int]:
    back: Dict[Any, Set[Any]] = {}
    for u, a, v in structure.edges:
        back.setdefault(v, set()).add(u)
    dist = {source: 0}
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in structure.step([u], actions) | back.get(u, set()):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def check_path_formulas(rng: random.Random, trials: int = 100, max_nodes: int = 8, max_length: int = 16) -> Tally:
    """
    The halving formula for paths of length j and the distance formula
    agree with direct search on small graphs, for every j up to
    ``max_length``.
    """
    tally = Tally("path_formulas")
    actions = ("e", "f")
    for _ in range(trials):
        graph = random_graph(rng, max_nodes, actions)
        structure = fologic.FiniteStructure(graph.nodes, graph.edges)
        used = tuple(sorted(rng.sample(actions, rng.randint(1, len(actions)))))
        x, y = rng.choice(graph.nodes), rng.choice(graph.nodes)
        distance = _undirected_distances(structure, x, actions).get(y)
        theta = fologic.step_formula(used)

        def check() -> Tuple[bool, str]:
            for j in range(max_length + 1):
                expected = y in structure.path_targets(x, ((used, j),))
                got = fologic.evaluate_finite(structure, fologic.fischer_rabin(theta, j), {"x": x, "y": y})
                if got != expected:
                    return False, f"{sorted(graph.edges)} {used}^{j}({x}, {y}): formula {got}, search {expected}"
                near = distance is not None and distance <= j
                got = fologic.evaluate_finite(structure, fologic.dist_leq(actions, j), {"x": x, "y": y})
                if got != near:
                    return False, f"{sorted(graph.edges)} dist({x}, {y}) <= {j}: formula {got}, search {near}"
            return True, ""

        _trial(tally, check)
    return tally


# ---------------------------------------------------------------------------
# Words


def _permuted_partner(rng: random.Random, us: Sequence[Tuple[str, ...]], threshold: int) -> List[Tuple[str, ...]]:
    """
    Permute the positions of each group of equal-length long words by one
    shared permutation; short words are kept.
    """
    vs = list(us)
    groups: Dict[int, List[int]] = {}
    for i, w in enumerate(us):
        groups.setdefault(len(w), []).append(i)
    for length, members in groups.items():
        if length < threshold:
            continue
        order = list(range(length))
        rng.shuffle(order)
        for i in members:
            vs[i] = tuple(us[i][p] for p in order)
    return vs


def _random_word(rng: random.Random, letters: Sequence[str], length: int) -> Tuple[str, ...]:
    return tuple(rng.choice(letters) for _ in range(length))


def check_witness_extension(rng: random.Random, trials: int = 200) -> Tally:
    """
    For ≡_{k,ℓ} tuples, the answer to a new word keeps the length bound and
    makes the extended tuples ≡_{k+1,ℓ−1}.
    """
    tally = Tally("witness_extension")
    letters = ("a", "b")
    n = len(letters)
    for _ in range(trials):
        k = rng.randint(1, 2)
        ell = rng.randint(1, 2)
        threshold = n ** (k + ell + 1)
        us = [_random_word(rng, letters, rng.randint(0, threshold + 6)) for _ in range(k)]
        vs = _permuted_partner(rng, us, threshold)
        u_next = _random_word(rng, letters, rng.randint(0, threshold + 6))

        def check() -> Tuple[bool, str]:
            if not equiv_kl(us, vs, ell, n):
                return False, f"premise fails for {us} {vs}"
            v_next = extend_witness(us, vs, u_next, ell, n)
            if len(v_next) > threshold + k:
                return False, f"answer of length {len(v_next)} exceeds {threshold + k}"
            ok = equiv_kl([*us, u_next], [*vs, v_next], ell - 1, n)
            return ok, f"us={us} vs={vs} u'={u_next} v'={v_next} ell={ell}"

        _trial(tally, check)
    return tally


def check_qf_preservation(rng: random.Random, trials: int = 200, max_graph_nodes: int = 3) -> Tally:
    """Tuples that are ≡_{k,0} satisfy the same quantifier-free formulas."""
    tally = Tally("qf_preservation")
    for _ in range(trials):
        graph = random_graph(rng, max_graph_nodes)
        letters = graph.nodes
        n = max(len(letters), 2)
        k = rng.randint(1, 2)
        threshold = n ** (k + 1)
        us = [_random_word(rng, letters, rng.randint(0, threshold + 3)) for _ in range(k)]
        vs = _permuted_partner(rng, us, threshold)

        def check() -> Tuple[bool, str]:
            if not equiv_kl(us, vs, 0, n):
                return False, f"premise fails for {us} {vs}"
            return satisfies_same_qf(graph, us, vs), f"{sorted(graph.edges)} us={us} vs={vs}"

        _trial(tally, check)
    return tally


def check_stabilization(rng: random.Random, trials: int = 50, max_graph_nodes: int = 3, max_words: int = 200_000) -> Tally:
    """Raising the word length bounds never changes the truth value."""
    tally = Tally("stabilization")
    for _ in range(trials):
        graph = random_graph(rng, max_graph_nodes)
        phi = random_sentence(rng, graph.actions)

        def check() -> Tuple[bool, str]:
            base = fr_evaluate(graph, phi, max_words=max_words)
            for slack in (1, 2, 5):
                if fr_evaluate(graph, phi, max_words=max_words, slack=slack) != base:
                    return False, f"{sorted(graph.edges)} {fologic.format_formula(phi)} changes at slack {slack}"
            return True, ""

        _trial(tally, check)
    return tally


# ---------------------------------------------------------------------------
# Bounds


def check_bounds(rng: random.Random, trials: int = 50) -> Tally:
    """Monotonicity and closed forms of the reduction's bound values."""
    tally = Tally("bounds")
    for _ in range(trials):
        ell, r, p = rng.randint(0, 2), rng.randint(1, 4), rng.randint(2, 4)
        extra = rng.randint(0, 3)
        alphabet = RankedAlphabet((("a", 0), ("f", p), *((f"c{i}", 0) for i in range(extra))))

        def check() -> Tuple[bool, str]:
            sig = [sigma(i, ell, r, p) for i in range(ell + 1)]
            g = gamma(ell, r, p)
            tag = f"ell={ell} r={r} p={p}"
            if any(sig[i + 1] < sig[i] + 3 * p * r * 4 ** i for i in range(ell)):
                return False, f"{tag}: sigma grows too slowly {sig}"
            if any(word_length_bound(i, ell, r, p) > g for i in range(ell + 1)):
                return False, f"{tag}: a word length bound exceeds gamma={g}"
            b = bounds_for(alphabet, r, ell)
            if b.gamma != g or list(b.sigma) != sig:
                return False, f"{tag}: bounds_for disagrees with sigma/gamma"
            if b.u_max_size != sig[-1] + r * p * 4 ** ell or b.u_bound != len(alphabet) ** b.u_max_size:
                return False, f"{tag}: wrong size bound for U"
            return abs(b.u2_bound_log10 - g * math.log10(b.u_bound + 1)) < 1e-6 * max(1.0, b.u2_bound_log10), tag

        _trial(tally, check)
    return tally


# ---------------------------------------------------------------------------


CHECKS: Dict[str, Callable[..., Tally]] = {
    "leaf_counts": check_leaf_counts,
    "cut_lengths": check_cut_lengths,
    "sphere_growth": check_sphere_growth,
    "cut_spheres": check_cut_spheres,
    "path_formulas": check_path_formulas,
    "witness_extension": check_witness_extension,
    "qf_preservation": check_qf_preservation,
    "stabilization": check_stabilization,
    "bounds": check_bounds,
    "guarded_evaluation": check_guarded_evaluation,
}


def run_check(name: str, seed: int = 0, scale: float = 1.0) -> Tally:
    """
    Run one check with its own generator, seeded from the run seed and the
    check name, so results do not depend on which other checks run.
    """
    if name not in CHECKS:
        raise InputError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    check = CHECKS[name]
    default = inspect.signature(check).parameters["trials"].default
    tally = check(random.Random(f"{seed}:{name}"), trials=max(1, int(default * scale)))
    logger.info("%s", tally)
    return tally


def run_checks(
    seed: int = 0,
    names: Optional[Iterable[str]] = None,
    scale: float = 1.0,
    workers: int = 1,
) -> List[Tally]:
    """
    Run the selected checks (all by default).

    Args:
        seed: Run seed
        names: Check names, keys of CHECKS
        scale: Factor applied to every check's default trial count
        workers: Size of the process pool; 1 runs in-process

    Returns:
        One tally per check, in the order requested
    """
    selected = list(CHECKS) if names is None else list(names)
    unknown = [name for name in selected if name not in CHECKS]
    if unknown:
        raise InputError(f"unknown check(s): {', '.join(unknown)}")
    if workers < 1:
        raise InputError("workers must be positive")
    if workers == 1 or len(selected) == 1:
        return [run_check(name, seed, scale) for name in selected]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_check, selected, [seed] * len(selected), [scale] * len(selected)))
