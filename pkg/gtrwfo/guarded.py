"""
Evaluation of guarded first-order formulas directly on 𝔊(ℛ).

A quantifier block is guarded when each of its variables is tied to an
already bound variable by an atom of the body: an edge ``a(x, y)`` or
``a(y, x)``, an equality, or a path atom. The atom turns the infinite range
of the quantifier into the finite set of neighbours of a bound tree.
"""
import logging
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from gtrwfo import fologic
from gtrwfo.config import DEFAULT_MAX_NODES, DEFAULT_STEP_BUDGET, MEMO_ENTRIES
from gtrwfo.errors import CapExceeded, InputError
from gtrwfo.fologic import And, Edge, Eq, Exists, Formula, Iff, Implies, Not, Or, Path
from gtrwfo.gtrs import Gtrs, predecessors, sphere, successors
from gtrwfo.trees import RankedTree, sort_key

logger = logging.getLogger(__name__)

Blocks = Tuple[fologic.Block, ...]


def _block(phi: fologic.Quantifier) -> Tuple[List[str], Formula]:
    """Split a run of same-kind untagged quantifiers off phi."""
    kind = type(phi)
    names: List[str] = []
    body: Formula = phi
    while isinstance(body, kind):
        if body.domain is not None:
            raise InputError("guarded evaluation does not resolve domain tags")
        names.append(body.var)
        body = body.body
    return names, body


def _guard_end(atom: Formula, var: str) -> Optional[str]:
    """The other endpoint when the atom can guard var, else None."""
    if not isinstance(atom, (Eq, Edge, Path)) or var not in (atom.x, atom.y):
        return None
    other = atom.y if atom.x == var else atom.x
    return None if other == var else other


def _guard_length(atom: Formula) -> int:
    if isinstance(atom, Eq):
        return 0
    if isinstance(atom, Edge):
        return 1
    return atom.length


def _guard_order(names: Iterable[str], body: Formula, positive: bool, known: Set[str]) -> Optional[List[Tuple[str, Formula]]]:
    """
    An order in which the block variables can be guarded, with the guard
    chosen for each, or None when some variable stays unguarded.
    """
    guards = [atom for atom, sign in fologic.literals(body, positive) if sign]
    pending = list(names)
    known = set(known) - set(pending)
    order = []
    while pending:
        for var in pending:
            usable = [g for g in guards if _guard_end(g, var) in known]
            if usable:
                best = min(usable, key=_guard_length)
                order.append((var, best))
                known.add(var)
                pending.remove(var)
                break
        else:
            return None
    return order


def is_guarded(phi: Formula, bound: Optional[Iterable[str]] = None) -> bool:
    """
    Whether every quantifier of phi is guarded, given the variables already
    bound (by default the free variables of phi).
    """
    return _is_guarded(phi, frozenset(fologic.free_vars(phi) if bound is None else bound))


def _is_guarded(phi: Formula, bound: FrozenSet[str]) -> bool:
    if isinstance(phi, fologic.ATOMS):
        return True
    if isinstance(phi, Not):
        return _is_guarded(phi.body, bound)
    if isinstance(phi, (And, Or)):
        return all(_is_guarded(p, bound) for p in phi.parts)
    if isinstance(phi, (Implies, Iff)):
        return _is_guarded(phi.left, bound) and _is_guarded(phi.right, bound)
    if phi.domain is not None:
        return False
    names, body = _block(phi)
    if _guard_order(names, body, isinstance(phi, Exists), set(bound)) is None:
        return False
    return _is_guarded(body, bound | set(names))


def exploration_radius(phi: Formula) -> int:
    """
    A radius around the free variables that contains every tree the
    guarded evaluation of phi can visit.
    """
    if isinstance(phi, (Eq, Edge, Path)):
        return _guard_length(phi)
    if isinstance(phi, Not):
        return exploration_radius(phi.body)
    if isinstance(phi, (And, Or)):
        return max((exploration_radius(p) for p in phi.parts), default=0)
    if isinstance(phi, (Implies, Iff)):
        return max(exploration_radius(phi.left), exploration_radius(phi.right))
    names, body = _block(phi)
    order = _guard_order(names, body, isinstance(phi, Exists), fologic.free_vars(phi))
    if order is None:
        raise InputError(f"quantifier over {names[0]} is not guarded")
    return sum(_guard_length(g) for _, g in order) + exploration_radius(body)


class GuardedEvaluator:
    """
    Memoizing evaluator for guarded formulas over 𝔊(ℛ).

    Results are cached per (subformula, values of its free variables), path
    searches per (tree, blocks, direction). A table that reaches
    ``MEMO_ENTRIES`` entries is cleared.
    """

    def __init__(self, R: Gtrs, step_budget: int = DEFAULT_STEP_BUDGET):
        self.R = R
        self.step_budget = step_budget
        self.steps = 0
        self._memo: Dict[Tuple[int, Tuple[RankedTree, ...]], bool] = {}
        self._free: Dict[int, Tuple[Formula, Tuple[str, ...]]] = {}
        self._paths: Dict[Tuple[RankedTree, Blocks, bool], FrozenSet[RankedTree]] = {}

    def _forget(self) -> None:
        # memo keys hold ids of the formulas pinned in _free
        self._memo.clear()
        self._free.clear()

    def _tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.step_budget:
            logger.warning("guarded evaluation exhausted its budget of %d steps", self.step_budget)
            raise CapExceeded("step_budget", self.step_budget, reached=self.steps)

    def evaluate(self, phi: Formula, assignment: Mapping[str, RankedTree]) -> bool:
        missing = fologic.free_vars(phi) - set(assignment)
        if missing:
            raise InputError(f"unassigned free variables: {', '.join(sorted(missing))}")
        for var, tree in assignment.items():
            tree.validate(self.R.alphabet)
        return self._ev(phi, dict(assignment))

    def path_targets(self, t: RankedTree, blocks: Blocks, backward: bool = False) -> FrozenSet[RankedTree]:
        """Trees reachable from t along the block sequence (or reaching t)."""
        key = (t, blocks, backward)
        cached = self._paths.get(key)
        if cached is not None:
            return cached
        step = predecessors if backward else successors
        current: Set[RankedTree] = {t}
        for actions, count in (reversed(blocks) if backward else blocks):
            for _ in range(count):
                current = {s for u in current for a in actions for s in step(self.R, u, a)}
                self._tick(len(current) + 1)
                if not current:
                    break
        result = frozenset(current)
        if len(self._paths) >= MEMO_ENTRIES:
            self._paths.clear()
        self._paths[key] = result
        return result

    def _ev(self, f: Formula, env: Dict[str, RankedTree]) -> bool:
        if isinstance(f, Eq):
            return env[f.x] == env[f.y]
        if isinstance(f, Edge):
            return env[f.y] in successors(self.R, env[f.x], f.action)
        if isinstance(f, Path):
            return env[f.y] in self.path_targets(env[f.x], f.blocks)
        if isinstance(f, Not):
            return not self._ev(f.body, env)
        if isinstance(f, And):
            return all(self._ev(p, env) for p in f.parts)
        if isinstance(f, Or):
            return any(self._ev(p, env) for p in f.parts)
        if isinstance(f, Implies):
            return (not self._ev(f.left, env)) or self._ev(f.right, env)
        if isinstance(f, Iff):
            return self._ev(f.left, env) == self._ev(f.right, env)
        return self._quantified(f, env)

    def _quantified(self, f: fologic.Quantifier, env: Dict[str, RankedTree]) -> bool:
        entry = self._free.get(id(f))
        if entry is None:
            if len(self._free) >= MEMO_ENTRIES:
                self._forget()
            entry = (f, tuple(sorted(fologic.free_vars(f))))
            self._free[id(f)] = entry
        key = (id(f), tuple(env[v] for v in entry[1]))
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        names, body = _block(f)
        positive = isinstance(f, Exists)
        order = _guard_order(names, body, positive, set(env))
        if order is None:
            raise InputError(f"quantifier over {names[0]} is not guarded")
        # ∀ȳ B is evaluated as ¬∃ȳ ¬B
        found = self._search(order, body, dict(env), positive)
        result = found if positive else not found
        if len(self._memo) >= MEMO_ENTRIES:
            self._forget()
        self._free.setdefault(id(f), entry)
        self._memo[key] = result
        return result

    def _search(self, order: List[Tuple[str, Formula]], body: Formula, env: Dict[str, RankedTree], want: bool) -> bool:
        if not order:
            self._tick()
            return self._ev(body, env) == want
        (var, guard), rest = order[0], order[1:]
        for candidate in sorted(self._candidates(guard, var, env), key=sort_key):
            env[var] = candidate
            if self._search(rest, body, env, want):
                return True
        return False

    def _candidates(self, atom: Formula, var: str, env: Mapping[str, RankedTree]) -> Iterable[RankedTree]:
        other = _guard_end(atom, var)
        if isinstance(atom, Eq):
            return (env[other],)
        if isinstance(atom, Edge):
            if atom.x == other:
                return successors(self.R, env[other], atom.action)
            return predecessors(self.R, env[other], atom.action)
        return self.path_targets(env[other], atom.blocks, backward=atom.x == var)


def eval_guarded(
    R: Gtrs,
    phi: Formula,
    assignment: Mapping[str, RankedTree],
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> bool:
    """
    Truth of a guarded formula in 𝔊(ℛ).

    Raises:
        InputError: an unguarded quantifier or an unassigned free variable
        CapExceeded: more than ``step_budget`` evaluation steps
    """
    return GuardedEvaluator(R, step_budget).evaluate(phi, assignment)


def eval_in_sphere(
    R: Gtrs,
    phi: Formula,
    assignment: Mapping[str, RankedTree],
    max_nodes: int = DEFAULT_MAX_NODES,
) -> bool:
    """
    Brute-force truth of a guarded formula inside the sphere of
    ``exploration_radius(phi)`` around the assigned trees.
    """
    missing = fologic.free_vars(phi) - set(assignment)
    if missing:
        raise InputError(f"unassigned free variables: {', '.join(sorted(missing))}")
    centers = list(dict.fromkeys(assignment.values()))
    if not centers:
        raise InputError("sphere evaluation needs at least one assigned tree")
    local = sphere(R, centers, exploration_radius(phi), max_nodes)
    structure = fologic.FiniteStructure(local.nodes, local.edges)
    return fologic.evaluate_finite(structure, phi, dict(assignment))
