"""
First-order formulas over action-labelled graphs.

Atoms are equalities ``x = y``, edges ``a(x, y)`` and path atoms
``[Γ₁^{j₁} ⋯ Γ_k^{j_k}](x, y)``. Quantifiers may carry a domain tag; the tag
is an opaque name that only the evaluating module resolves.
"""
import itertools
import re
from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from gtrwfo.errors import InputError
from gtrwfo.trees import canonical_symbol

Block = Tuple[Tuple[str, ...], int]


@dataclass(frozen=True)
class Eq:
    x: str
    y: str


@dataclass(frozen=True)
class Edge:
    action: str
    x: str
    y: str


@dataclass(frozen=True)
class Path:
    """
    A directed path from x to y whose edges spell the block pattern: first
    ``j₁`` edges labelled from ``Γ₁``, then ``j₂`` from ``Γ₂``, and so on.
    """

    blocks: Tuple[Block, ...]
    x: str
    y: str

    def __post_init__(self):
        for actions, count in self.blocks:
            if count < 0:
                raise InputError("path block counts must be non-negative")

    @property
    def length(self) -> int:
        return sum(count for _, count in self.blocks)


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"
    domain: Optional[str] = None


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"
    domain: Optional[str] = None


Formula = Union[Eq, Edge, Path, Not, And, Or, Implies, Iff, Exists, ForAll]
Quantifier = Union[Exists, ForAll]
ATOMS = (Eq, Edge, Path)
QUANTIFIERS = (Exists, ForAll)

TRUE: Formula = And(())
FALSE: Formula = Or(())


def conj(*parts: Formula) -> Formula:
    """Conjunction with nested Ands flattened; a single part is returned as is."""
    flat: List[Formula] = []
    for part in parts:
        if isinstance(part, And):
            flat.extend(part.parts)
        else:
            flat.append(part)
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts: Formula) -> Formula:
    flat: List[Formula] = []
    for part in parts:
        if isinstance(part, Or):
            flat.extend(part.parts)
        else:
            flat.append(part)
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def exists(variables: Union[str, Sequence[str]], body: Formula, domain: Optional[str] = None) -> Formula:
    if isinstance(variables, str):
        variables = [variables]
    for var in reversed(list(variables)):
        body = Exists(var, body, domain)
    return body


def forall(variables: Union[str, Sequence[str]], body: Formula, domain: Optional[str] = None) -> Formula:
    if isinstance(variables, str):
        variables = [variables]
    for var in reversed(list(variables)):
        body = ForAll(var, body, domain)
    return body


def neq(x: str, y: str) -> Formula:
    return Not(Eq(x, y))


# ---------------------------------------------------------------------------
# Structural measures


def free_vars(phi: Formula) -> FrozenSet[str]:
    if isinstance(phi, (Eq, Edge, Path)):
        return frozenset({phi.x, phi.y})
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (And, Or)):
        return frozenset().union(*(free_vars(p) for p in phi.parts))
    if isinstance(phi, (Implies, Iff)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, QUANTIFIERS):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi: Formula) -> FrozenSet[str]:
    """Free and bound variable names."""
    if isinstance(phi, (Eq, Edge, Path)):
        return frozenset({phi.x, phi.y})
    if isinstance(phi, Not):
        return all_vars(phi.body)
    if isinstance(phi, (And, Or)):
        return frozenset().union(*(all_vars(p) for p in phi.parts))
    if isinstance(phi, (Implies, Iff)):
        return all_vars(phi.left) | all_vars(phi.right)
    return all_vars(phi.body) | {phi.var}


def actions_of(phi: Formula) -> FrozenSet[str]:
    """Action names occurring in edge and path atoms."""
    if isinstance(phi, Eq):
        return frozenset()
    if isinstance(phi, Edge):
        return frozenset({phi.action})
    if isinstance(phi, Path):
        return frozenset(a for actions, _ in phi.blocks for a in actions)
    if isinstance(phi, Not):
        return actions_of(phi.body)
    if isinstance(phi, (And, Or)):
        return frozenset().union(*(actions_of(p) for p in phi.parts))
    if isinstance(phi, (Implies, Iff)):
        return actions_of(phi.left) | actions_of(phi.right)
    return actions_of(phi.body)


def qr(phi: Formula) -> int:
    """Quantifier rank: the maximal nesting depth of quantifiers."""
    if isinstance(phi, ATOMS):
        return 0
    if isinstance(phi, Not):
        return qr(phi.body)
    if isinstance(phi, (And, Or)):
        return max([0, *(qr(p) for p in phi.parts)])
    if isinstance(phi, (Implies, Iff)):
        return max(qr(phi.left), qr(phi.right))
    return 1 + qr(phi.body)


def size(phi: Formula) -> int:
    """Number of syntax nodes; a path atom counts its blocks."""
    if isinstance(phi, (Eq, Edge)):
        return 1
    if isinstance(phi, Path):
        return 1 + len(phi.blocks)
    if isinstance(phi, Not):
        return 1 + size(phi.body)
    if isinstance(phi, (And, Or)):
        return 1 + sum(size(p) for p in phi.parts)
    if isinstance(phi, (Implies, Iff)):
        return 1 + size(phi.left) + size(phi.right)
    return 1 + size(phi.body)


def count_quantifiers(phi: Formula) -> int:
    if isinstance(phi, ATOMS):
        return 0
    if isinstance(phi, Not):
        return count_quantifiers(phi.body)
    if isinstance(phi, (And, Or)):
        return sum(count_quantifiers(p) for p in phi.parts)
    if isinstance(phi, (Implies, Iff)):
        return count_quantifiers(phi.left) + count_quantifiers(phi.right)
    return 1 + count_quantifiers(phi.body)


def is_quantifier_free(phi: Formula) -> bool:
    return count_quantifiers(phi) == 0


def has_domains(phi: Formula) -> bool:
    if isinstance(phi, ATOMS):
        return False
    if isinstance(phi, Not):
        return has_domains(phi.body)
    if isinstance(phi, (And, Or)):
        return any(has_domains(p) for p in phi.parts)
    if isinstance(phi, (Implies, Iff)):
        return has_domains(phi.left) or has_domains(phi.right)
    return phi.domain is not None or has_domains(phi.body)


def has_paths(phi: Formula) -> bool:
    if isinstance(phi, Path):
        return True
    if isinstance(phi, (Eq, Edge)):
        return False
    if isinstance(phi, Not):
        return has_paths(phi.body)
    if isinstance(phi, (And, Or)):
        return any(has_paths(p) for p in phi.parts)
    if isinstance(phi, (Implies, Iff)):
        return has_paths(phi.left) or has_paths(phi.right)
    return has_paths(phi.body)


# ---------------------------------------------------------------------------
# Renaming and substitution


class FreshNames:
    """
    Deterministic supply of variable names avoiding a given set.
    """

    def __init__(self, avoid: Iterable[str] = ()):
        self.used: Set[str] = set(avoid)
        self.counters: Dict[str, int] = {}

    def __call__(self, base: str) -> str:
        index = self.counters.get(base, 0)
        while True:
            index += 1
            name = f"{base}_{index}"
            if name not in self.used:
                self.counters[base] = index
                self.used.add(name)
                return name

    def reserve(self, names: Iterable[str]) -> None:
        self.used.update(names)


def substitute(phi: Formula, mapping: Mapping[str, str], fresh: Optional[FreshNames] = None) -> Formula:
    """
    Replace free variables by variables, renaming bound variables that
    would capture a substituted name.
    """
    if fresh is None:
        fresh = FreshNames(all_vars(phi) | set(mapping) | set(mapping.values()))

    def rename(v: str) -> str:
        return mapping.get(v, v)

    if isinstance(phi, Eq):
        return Eq(rename(phi.x), rename(phi.y))
    if isinstance(phi, Edge):
        return Edge(phi.action, rename(phi.x), rename(phi.y))
    if isinstance(phi, Path):
        return Path(phi.blocks, rename(phi.x), rename(phi.y))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, mapping, fresh))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(substitute(p, mapping, fresh) for p in phi.parts))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(substitute(phi.left, mapping, fresh), substitute(phi.right, mapping, fresh))
    inner = {k: v for k, v in mapping.items() if k != phi.var}
    if not inner:
        return phi
    var = phi.var
    body_free = free_vars(phi.body)
    if var in {inner[k] for k in inner if k in body_free}:
        new_var = fresh(var)
        inner[var] = new_var
        var = new_var
    return type(phi)(var, substitute(phi.body, inner, fresh), phi.domain)


def strip_domains(phi: Formula) -> Formula:
    if isinstance(phi, ATOMS):
        return phi
    if isinstance(phi, Not):
        return Not(strip_domains(phi.body))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(strip_domains(p) for p in phi.parts))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(strip_domains(phi.left), strip_domains(phi.right))
    return type(phi)(phi.var, strip_domains(phi.body))


def map_domains(phi: Formula, fn: Callable[[Quantifier], Formula]) -> Formula:
    """
    Rebuild phi bottom-up, letting ``fn`` replace every domain-tagged
    quantifier (whose body has already been rebuilt).
    """
    if isinstance(phi, ATOMS):
        return phi
    if isinstance(phi, Not):
        return Not(map_domains(phi.body, fn))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(map_domains(p, fn) for p in phi.parts))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(map_domains(phi.left, fn), map_domains(phi.right, fn))
    rebuilt = type(phi)(phi.var, map_domains(phi.body, fn), phi.domain)
    return fn(rebuilt) if phi.domain is not None else rebuilt


# ---------------------------------------------------------------------------
# Prenex normal form


def _nnf(phi: Formula, positive: bool = True) -> Formula:
    if isinstance(phi, ATOMS):
        return phi if positive else Not(phi)
    if isinstance(phi, Not):
        return _nnf(phi.body, not positive)
    if isinstance(phi, And):
        parts = tuple(_nnf(p, positive) for p in phi.parts)
        return And(parts) if positive else Or(parts)
    if isinstance(phi, Or):
        parts = tuple(_nnf(p, positive) for p in phi.parts)
        return Or(parts) if positive else And(parts)
    if isinstance(phi, Implies):
        return _nnf(Or((Not(phi.left), phi.right)), positive)
    if isinstance(phi, Iff):
        both = And((phi.left, phi.right))
        neither = And((Not(phi.left), Not(phi.right)))
        return _nnf(Or((both, neither)), positive)
    if isinstance(phi, Exists):
        body = _nnf(phi.body, positive)
        return Exists(phi.var, body) if positive else ForAll(phi.var, body)
    body = _nnf(phi.body, positive)
    return ForAll(phi.var, body) if positive else Exists(phi.var, body)


def _rename_apart(phi: Formula, fresh: FreshNames, seen: Set[str], env: Dict[str, str]) -> Formula:
    if isinstance(phi, ATOMS):
        return substitute(phi, env) if env else phi
    if isinstance(phi, Not):
        return Not(_rename_apart(phi.body, fresh, seen, env))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(_rename_apart(p, fresh, seen, env) for p in phi.parts))
    var = phi.var
    if var in seen:
        var = fresh(phi.var)
    seen.add(var)
    inner = dict(env)
    inner[phi.var] = var
    return type(phi)(var, _rename_apart(phi.body, fresh, seen, inner))


def _pull(phi: Formula) -> Tuple[List[Tuple[type, str]], Formula]:
    if isinstance(phi, QUANTIFIERS):
        prefix, matrix = _pull(phi.body)
        return [(type(phi), phi.var)] + prefix, matrix
    if isinstance(phi, (And, Or)):
        prefix: List[Tuple[type, str]] = []
        parts = []
        for part in phi.parts:
            sub_prefix, sub_matrix = _pull(part)
            prefix.extend(sub_prefix)
            parts.append(sub_matrix)
        return prefix, type(phi)(tuple(parts))
    return [], phi


def prenex(phi: Formula) -> Formula:
    """
    A logically equivalent prenex formula.

    The input is brought into negation normal form, bound variables that
    clash are renamed to ``<name>_<k>``, and quantifiers are pulled to the
    front left to right.

    Raises:
        InputError: the formula carries domain tags
    """
    if has_domains(phi):
        raise InputError("prenex conversion does not accept domain-tagged quantifiers")
    nnf = _nnf(phi)
    fresh = FreshNames(all_vars(nnf))
    renamed = _rename_apart(nnf, fresh, set(free_vars(nnf)), {})
    prefix, matrix = _pull(renamed)
    for kind, var in reversed(prefix):
        matrix = kind(var, matrix)
    return matrix


def split_prefix(phi: Formula) -> Tuple[List[Quantifier], Formula]:
    """
    The leading quantifier chain and the remaining body.
    """
    prefix: List[Quantifier] = []
    while isinstance(phi, QUANTIFIERS):
        prefix.append(phi)
        phi = phi.body
    return prefix, phi


def is_prenex(phi: Formula) -> bool:
    _, matrix = split_prefix(phi)
    return is_quantifier_free(matrix)


# ---------------------------------------------------------------------------
# Formula generators


def fischer_rabin(theta: Formula, j: int, x: str = "x", y: str = "y", params: Tuple[str, str] = ("x", "y")) -> Formula:
    """
    θ^j(x, y): a path of length exactly j in the graph whose edges are the
    pairs satisfying θ.

    The formula for length 2^k is built by halving:
    ``ψ_{k+1}(x,y) = ∃z ∀u ∀v (((u=x ∧ v=z) ∨ (u=z ∧ v=y)) → ψ_k(u,v))``
    and the blocks for the 1-bits of j are chained. For j = 0 the result
    is ``x = y``.

    Args:
        theta: Formula whose free variables are among ``params``
        j: Path length
        x: Name of the source variable in the result
        y: Name of the target variable in the result
        params: The two free variables of theta, source first

    Returns:
        A formula with free variables x and y
    """
    if j < 0:
        raise InputError("path length must be non-negative")
    if j == 0:
        return Eq(x, y)
    fresh = FreshNames(all_vars(theta) | {x, y} | set(params))
    bits = [h for h in range(j.bit_length()) if (j >> h) & 1]
    names = {}
    for level in range(1, bits[-1] + 1):
        names[level] = (fresh("z"), fresh("u"), fresh("v"))

    def psi(k: int, a: str, b: str) -> Formula:
        if k == 0:
            return substitute(theta, {params[0]: a, params[1]: b})
        z, u, v = names[k]
        links = Or((And((Eq(u, a), Eq(v, z))), And((Eq(u, z), Eq(v, b)))))
        return Exists(z, ForAll(u, ForAll(v, Implies(links, psi(k - 1, u, v)))))

    chain = [fresh("w") for _ in range(len(bits) + 1)]
    body = conj(Eq(chain[0], x), Eq(chain[-1], y), *(psi(h, chain[i], chain[i + 1]) for i, h in enumerate(bits)))
    return exists(chain, body)


def step_formula(actions: Iterable[str], x: str = "x", y: str = "y") -> Formula:
    """⋁_{a ∈ Γ} a(x, y)"""
    actions = sorted(set(actions))
    return disj(*(Edge(a, x, y) for a in actions)) if actions else FALSE


def dist_leq(actions: Iterable[str], d: int, x: str = "x", y: str = "y") -> Formula:
    """
    Undirected distance at most d over the given actions.
    """
    if d < 0:
        raise InputError("distance must be non-negative")
    if d == 0:
        return Eq(x, y)
    theta = disj(Eq("x", "y"), *(Edge(a, "x", "y") for a in sorted(actions)), *(Edge(a, "y", "x") for a in sorted(actions)))
    return fischer_rabin(theta, d, x, y)


def seq_formula(blocks: Sequence[Tuple[Iterable[str], int]], x: str = "x", y: str = "y") -> Formula:
    """
    ``[Γ₁^{j₁} ⋯ Γ_k^{j_k}](x, y)`` as a plain first-order formula.
    """
    blocks = [(tuple(actions), count) for actions, count in blocks]
    if not blocks:
        return Eq(x, y)
    fresh = FreshNames({x, y})
    points = [fresh("p") for _ in range(len(blocks) + 1)]
    steps = []
    for i, (actions, count) in enumerate(blocks):
        if count < 0:
            raise InputError("path block counts must be non-negative")
        steps.append(fischer_rabin(step_formula(actions), count, points[i], points[i + 1]))
    return exists(points, conj(Eq(points[0], x), Eq(points[-1], y), *steps))


def literals(f: Formula, positive: bool = True) -> Iterator[Tuple[Formula, bool]]:
    """
    Atom literals implied by f (or by ¬f when ``positive`` is false),
    as (atom, sign) pairs, looking through ∧, ¬, and the dual connectives.
    """
    if isinstance(f, ATOMS):
        yield f, positive
    elif isinstance(f, Not):
        yield from literals(f.body, not positive)
    elif isinstance(f, And) and positive:
        for part in f.parts:
            yield from literals(part, True)
    elif isinstance(f, Or) and not positive:
        for part in f.parts:
            yield from literals(part, False)
    elif isinstance(f, Implies) and not positive:
        yield from literals(f.left, True)
        yield from literals(f.right, False)


def expand_paths(phi: Formula) -> Formula:
    """Replace every path atom by its seq_formula expansion."""
    if isinstance(phi, Path):
        return seq_formula(phi.blocks, phi.x, phi.y)
    if isinstance(phi, (Eq, Edge)):
        return phi
    if isinstance(phi, Not):
        return Not(expand_paths(phi.body))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(expand_paths(p) for p in phi.parts))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(expand_paths(phi.left), expand_paths(phi.right))
    return type(phi)(phi.var, expand_paths(phi.body), phi.domain)


def count_atleast(actions: Iterable[str], k: int, x: str = "x", prefix: str = "c") -> Formula:
    """
    x has at least k distinct successors along the given actions.
    """
    if k < 1:
        raise InputError("count must be positive")
    actions = sorted(actions)
    fresh = FreshNames({x})
    ys = [fresh(prefix) for _ in range(k)]
    distinct = [neq(a, b) for a, b in itertools.combinations(ys, 2)]
    steps = [step_formula(actions, x, yy) for yy in ys]
    return exists(ys, conj(*distinct, *steps))


def count_exactly(actions: Iterable[str], k: int, x: str = "x") -> Formula:
    actions = list(actions)
    if k == 0:
        return Not(count_atleast(actions, 1, x))
    return conj(count_atleast(actions, k, x), Not(count_atleast(actions, k + 1, x)))


def membership(allowed: Iterable[str], alphabet: Iterable[str], x: str = "x", y: str = "m") -> Formula:
    """
    x uses only the allowed letters, given the marker action of every
    letter of the alphabet: ⋀_{a ∈ Γ∖Ω} ¬∃y a(x, y).
    """
    allowed = set(allowed)
    name = y if y != x else f"{y}_1"
    excluded = sorted(set(alphabet) - allowed)
    if not excluded:
        return TRUE
    return conj(*(Not(Exists(name, Edge(a, x, name))) for a in excluded))


# ---------------------------------------------------------------------------
# Text syntax

_TOKEN = re.compile(r"\s*(?:(?P<open>\()|(?P<close>\))|\|(?P<quoted>[^|]*)\||(?P<atom>[^\s()|;]+)|(?P<comment>;[^\n]*))")
_BARE = re.compile(r"[^\s()|;]+")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if not text[pos:].strip():
                break
            raise InputError(f"unexpected character {text[pos]!r}", line=text.count("\n", 0, pos) + 1)
        pos = m.end()
        kind = m.lastgroup
        if kind == "comment":
            continue
        tokens.append((kind, m.group(kind), text.count("\n", 0, m.start(kind)) + 1))
    return tokens


def _read(tokens: List[Tuple[str, str, int]], index: int) -> Tuple[Any, int]:
    if index >= len(tokens):
        raise InputError("unexpected end of formula")
    kind, value, line = tokens[index]
    if kind == "open":
        items = []
        index += 1
        while True:
            if index >= len(tokens):
                raise InputError("unbalanced parentheses", line=line)
            if tokens[index][0] == "close":
                return (items, line), index + 1
            item, index = _read(tokens, index)
            items.append(item)
    if kind == "close":
        raise InputError("unexpected ')'", line=line)
    return ("quoted" if kind == "quoted" else "atom", value), index + 1


def _name(item: Any, what: str) -> str:
    if isinstance(item, tuple) and item[0] in ("atom", "quoted"):
        return item[1]
    raise InputError(f"expected {what}")


def _action(item: Any) -> str:
    kind, value = item if isinstance(item, tuple) and len(item) == 2 and isinstance(item[1], str) else (None, None)
    if kind == "atom":
        return canonical_symbol(value)
    if kind == "quoted":
        return value
    raise InputError("expected an action name")


def _build(item: Any) -> Formula:
    if not (isinstance(item, tuple) and isinstance(item[0], list)):
        if item == ("atom", "true"):
            return TRUE
        if item == ("atom", "false"):
            return FALSE
        raise InputError(f"expected a parenthesised formula, got {item[1]!r}")
    items, line = item
    if not items:
        raise InputError("empty formula", line=line)
    head = _name(items[0], "an operator")
    args = items[1:]

    def arity(n: int):
        if len(args) != n:
            raise InputError(f"'{head}' takes {n} arguments, got {len(args)}", line=line)

    try:
        if head == "=":
            arity(2)
            return Eq(_name(args[0], "a variable"), _name(args[1], "a variable"))
        if head == "edge":
            arity(3)
            return Edge(_action(args[0]), _name(args[1], "a variable"), _name(args[2], "a variable"))
        if head == "path":
            if len(args) < 2:
                raise InputError("'path' needs two variables", line=line)
            blocks = []
            for block in args[2:]:
                if not isinstance(block[0], list) or not block[0]:
                    raise InputError("path blocks are lists ending in a count", line=line)
                parts = block[0]
                count_text = _name(parts[-1], "a count")
                if not count_text.isdigit():
                    raise InputError(f"path block count must be a number, got {count_text!r}", line=line)
                blocks.append((tuple(_action(a) for a in parts[:-1]), int(count_text)))
            return Path(tuple(blocks), _name(args[0], "a variable"), _name(args[1], "a variable"))
        if head == "not":
            arity(1)
            return Not(_build(args[0]))
        if head == "and":
            return And(tuple(_build(a) for a in args))
        if head == "or":
            return Or(tuple(_build(a) for a in args))
        if head == "implies":
            arity(2)
            return Implies(_build(args[0]), _build(args[1]))
        if head == "iff":
            arity(2)
            return Iff(_build(args[0]), _build(args[1]))
        if head in ("exists", "forall"):
            arity(2)
            kind = Exists if head == "exists" else ForAll
            if isinstance(args[0][0], list):
                names = [_name(v, "a variable") for v in args[0][0]]
                body = _build(args[1])
                for var in reversed(names):
                    body = kind(var, body)
                return body
            return kind(_name(args[0], "a variable"), _build(args[1]))
        if head in ("exists-in", "forall-in"):
            arity(3)
            kind = Exists if head == "exists-in" else ForAll
            return kind(_name(args[1], "a variable"), _build(args[2]), _name(args[0], "a domain tag"))
    except InputError as e:
        if e.line is None:
            raise InputError(e.message, line=line)
        raise
    raise InputError(f"unknown operator {head!r}", line=line)


def parse_formula(text: str) -> Formula:
    """
    Parse the s-expression syntax, e.g.
    ``(exists x (and (edge sigma x y) (= x y)))``.

    Names containing whitespace, parentheses or ``;`` are written between
    bars: ``(edge |@[a;b]| x y)``. Path atoms list their blocks as
    ``(path x y (h 3) (l r 2))``.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise InputError("empty formula")
    item, index = _read(tokens, 0)
    if index != len(tokens):
        raise InputError("trailing input after formula", line=tokens[index][2])
    return _build(item)


def _quote(name: str) -> str:
    if _BARE.fullmatch(name) and name not in ("true", "false"):
        return name
    if "|" in name:
        raise InputError(f"name {name!r} cannot be written")
    return f"|{name}|"


def format_formula(phi: Formula) -> str:
    if isinstance(phi, Eq):
        return f"(= {_quote(phi.x)} {_quote(phi.y)})"
    if isinstance(phi, Edge):
        return f"(edge {_quote(phi.action)} {_quote(phi.x)} {_quote(phi.y)})"
    if isinstance(phi, Path):
        blocks = " ".join("(" + " ".join([*(_quote(a) for a in actions), str(count)]) + ")" for actions, count in phi.blocks)
        return f"(path {_quote(phi.x)} {_quote(phi.y)}{' ' + blocks if blocks else ''})"
    if isinstance(phi, Not):
        return f"(not {format_formula(phi.body)})"
    if isinstance(phi, (And, Or)):
        head = "and" if isinstance(phi, And) else "or"
        return "(" + " ".join([head, *(format_formula(p) for p in phi.parts)]) + ")"
    if isinstance(phi, Implies):
        return f"(implies {format_formula(phi.left)} {format_formula(phi.right)})"
    if isinstance(phi, Iff):
        return f"(iff {format_formula(phi.left)} {format_formula(phi.right)})"
    head = "exists" if isinstance(phi, Exists) else "forall"
    if phi.domain is not None:
        return f"({head}-in {_quote(phi.domain)} {_quote(phi.var)} {format_formula(phi.body)})"
    return f"({head} {_quote(phi.var)} {format_formula(phi.body)})"


# ---------------------------------------------------------------------------
# Finite structures


class FiniteStructure:
    """
    A finite labelled graph given as nodes and (u, action, v) triples.
    """

    def __init__(self, nodes: Iterable[Hashable], edges: Iterable[Tuple[Hashable, str, Hashable]]):
        self.nodes = tuple(nodes)
        self.node_set = set(self.nodes)
        self.edges = set(edges)
        self.out: Dict[Tuple[Hashable, str], Set[Hashable]] = {}
        for u, a, v in self.edges:
            if u not in self.node_set or v not in self.node_set:
                raise InputError("edge endpoint outside the node set")
            self.out.setdefault((u, a), set()).add(v)

    def step(self, sources: Iterable[Hashable], actions: Iterable[str]) -> Set[Hashable]:
        result: Set[Hashable] = set()
        for u in sources:
            for a in actions:
                result |= self.out.get((u, a), set())
        return result

    def path_targets(self, source: Hashable, blocks: Sequence[Block]) -> Set[Hashable]:
        current = {source}
        for actions, count in blocks:
            for _ in range(count):
                current = self.step(current, actions)
                if not current:
                    return current
        return current


DomainCheck = Callable[[Hashable, Mapping[str, Hashable]], bool]


def evaluate_finite(
    structure: FiniteStructure,
    phi: Formula,
    assignment: Optional[Mapping[str, Hashable]] = None,
    domains: Optional[Mapping[str, DomainCheck]] = None,
) -> bool:
    """
    Brute-force truth of phi in a finite structure.

    Args:
        structure: The finite graph
        phi: Formula whose free variables the assignment covers
        assignment: Values of the free variables
        domains: For each domain tag, a predicate on (candidate, assignment)

    Returns:
        Whether phi holds
    """
    env = dict(assignment or {})
    missing = free_vars(phi) - set(env)
    if missing:
        raise InputError(f"unassigned free variables: {', '.join(sorted(missing))}")
    domains = domains or {}

    def ev(f: Formula) -> bool:
        if isinstance(f, Eq):
            return env[f.x] == env[f.y]
        if isinstance(f, Edge):
            return env[f.y] in structure.out.get((env[f.x], f.action), ())
        if isinstance(f, Path):
            return env[f.y] in structure.path_targets(env[f.x], f.blocks)
        if isinstance(f, Not):
            return not ev(f.body)
        if isinstance(f, And):
            return all(ev(p) for p in f.parts)
        if isinstance(f, Or):
            return any(ev(p) for p in f.parts)
        if isinstance(f, Implies):
            return (not ev(f.left)) or ev(f.right)
        if isinstance(f, Iff):
            return ev(f.left) == ev(f.right)
        saved = env.get(f.var, _UNSET)
        want = isinstance(f, Exists)
        result = not want
        for node in structure.nodes:
            if f.domain is not None:
                if f.domain not in domains:
                    raise InputError(f"unknown domain tag {f.domain!r}")
                if not domains[f.domain](node, env):
                    continue
            env[f.var] = node
            if ev(f.body) == want:
                result = want
                break
        if saved is _UNSET:
            env.pop(f.var, None)
        else:
            env[f.var] = saved
        return result

    return ev(phi)


_UNSET = object()
