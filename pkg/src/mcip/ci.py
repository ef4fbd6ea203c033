"""Symbolic conditional-independence statements and the relation families a
graph induces: pairwise, local, separation and mutual (one statement per
maximal independent set).

Statements are stored in a canonical form in which the two independent sides
are ordered, so ``A _||_ B | C`` and ``B _||_ A | C`` compare equal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations, product

from ._validation import as_label_set, check_disjoint, check_members, check_nonempty
from .exceptions import InputError
from .graph import UndirectedGraph, enumerate_maximal_independent_sets, separates

SEP = " _||_ "


def _key(s: frozenset) -> tuple:
    return tuple(sorted(s))


def _fmt(s: frozenset) -> str:
    return ",".join(sorted(s))


@dataclass(frozen=True, init=False)
class CIStatement:
    """``left _||_ right | given`` with the two sides in canonical order."""

    left: frozenset
    right: frozenset
    given: frozenset

    def __init__(self, left, right, given=()):
        left, right, given = as_label_set(left), as_label_set(right), as_label_set(given)
        check_nonempty(left=left, right=right)
        check_disjoint(left=left, right=right, given=given)
        if _key(right) < _key(left):
            left, right = right, left
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "given", given)

    @property
    def variables(self) -> frozenset:
        return self.left | self.right | self.given

    def sort_key(self):
        return (_key(self.left), _key(self.right), _key(self.given))

    def __str__(self):
        text = _fmt(self.left) + SEP + _fmt(self.right)
        return f"{text} | {_fmt(self.given)}" if self.given else text

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True, init=False)
class MutualCIStatement:
    """``X1 _||_ X2 _||_ ... _||_ Xk | given`` for k >= 2 disjoint blocks."""

    blocks: tuple
    given: frozenset

    def __init__(self, blocks, given=()):
        blks = [as_label_set(b) for b in blocks]
        given = as_label_set(given)
        if len(blks) < 2:
            raise InputError("a mutual statement needs at least two blocks")
        check_nonempty(**{f"block {i}": b for i, b in enumerate(blks)})
        check_disjoint(given=given, **{f"block {i}": b for i, b in enumerate(blks)})
        object.__setattr__(self, "blocks", tuple(sorted(blks, key=_key)))
        object.__setattr__(self, "given", given)

    @property
    def variables(self) -> frozenset:
        return frozenset().union(*self.blocks) | self.given

    def sort_key(self):
        return (tuple(_key(b) for b in self.blocks), _key(self.given))

    def __str__(self):
        text = SEP.join(_fmt(b) for b in self.blocks)
        return f"{text} | {_fmt(self.given)}" if self.given else text

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()


def parse_statement(text: str):
    """Parse the ``A,B _||_ C | D`` text form into a statement object."""
    body, _, given = text.replace("_||_", "\0").partition("|")
    parts = [p.strip() for p in body.split("\0")]
    if len(parts) < 2 or not all(parts):
        raise InputError(f"cannot parse statement {text!r}")
    blocks = [[x.strip() for x in p.split(",") if x.strip()] for p in parts]
    given = [x.strip() for x in given.split(",") if x.strip()]
    if len(blocks) == 2:
        return CIStatement(blocks[0], blocks[1], given)
    return MutualCIStatement(blocks, given)


def pairwise_relations(g: UndirectedGraph) -> list[CIStatement]:
    """``x _||_ y | V - {x, y}`` for every non-adjacent pair."""
    verts = frozenset(g.vertices)
    return sorted(
        CIStatement({x}, {y}, verts - {x, y})
        for x, y in combinations(g.vertices, 2) if not g.has_edge(x, y))


def local_relations(g: UndirectedGraph) -> list[CIStatement]:
    """``x _||_ non-neighbours(x) | bd(x)`` for each vertex with non-neighbours."""
    verts = frozenset(g.vertices)
    out = set()
    for x in g.vertices:
        bd = g.neighbors(x)
        rest = verts - bd - {x}
        if rest:
            out.add(CIStatement({x}, rest, bd))
    return sorted(out)


def mcip_relations(g: UndirectedGraph) -> list[MutualCIStatement]:
    """One mutual statement per maximal independent set with two or more members.

    Singleton maximal independent sets are dropped: a one-block statement
    asserts nothing.
    """
    verts = frozenset(g.vertices)
    return sorted(
        MutualCIStatement([{v} for v in s], verts - s)
        for s in enumerate_maximal_independent_sets(g) if len(s) >= 2)


def separation_relations(g: UndirectedGraph) -> list[CIStatement]:
    """Every canonical ``A _||_ B | C`` over disjoint vertex sets where C separates A and B.

    Exponential in |V| (4^|V| assignments); meant for small graphs.
    """
    verts = g.vertices
    out = set()
    for roles in product(range(4), repeat=len(verts)):
        a = frozenset(v for v, r in zip(verts, roles) if r == 1)
        b = frozenset(v for v, r in zip(verts, roles) if r == 2)
        if not a or not b or _key(b) < _key(a):
            continue
        c = frozenset(v for v, r in zip(verts, roles) if r == 3)
        if separates(g, a, b, c):
            out.add(CIStatement(a, b, c))
    return sorted(out)


def global_query(g: UndirectedGraph, s: CIStatement) -> bool:
    """Whether the global Markov property of ``g`` implies ``s``."""
    check_members(g.vertices, s.variables)
    return separates(g, s.left, s.right, s.given)


def weak_union_expand(m: MutualCIStatement) -> list[CIStatement]:
    """Pairwise statements obtained from a mutual one by weak union.

    Each pair of blocks becomes ``Xi _||_ Xj | given + other blocks``.
    """
    out = []
    for i, j in combinations(range(len(m.blocks)), 2):
        others = frozenset().union(*(b for k, b in enumerate(m.blocks) if k not in (i, j)))
        out.append(CIStatement(m.blocks[i], m.blocks[j], m.given | others))
    return sorted(out)


class Axiom(str, enum.Enum):
    SYMMETRY = "symmetry"
    DECOMPOSITION = "decomposition"
    WEAK_UNION = "weak_union"
    CONTRACTION = "contraction"
    INTERSECTION = "intersection"


def _orientations(s: CIStatement):
    yield s.left, s.right
    yield s.right, s.left


def apply_axiom(axiom, inputs, selection=()) -> CIStatement | None:
    """Apply a single graphoid rewrite rule.

    Parameters
    ----------
    axiom : Axiom or str
        One of symmetry, decomposition, weak_union, contraction, intersection.
    inputs : CIStatement or sequence of CIStatement
        One statement for the unary rules, two for contraction and
        intersection.
    selection : iterable of str
        For decomposition and weak union, the part ``W`` split off one side
        of ``X _||_ (Y u W) | Z``.  Ignored by the other rules.

    Returns
    -------
    CIStatement or None
        The conclusion, or None when the inputs do not have the shape the
        rule requires.
    """
    try:
        axiom = Axiom(axiom)
    except ValueError:
        raise InputError(f"unknown axiom {axiom!r}") from None
    stmts = [inputs] if isinstance(inputs, CIStatement) else list(inputs)
    for s in stmts:
        if not isinstance(s, CIStatement):
            raise InputError(f"expected CIStatement, got {type(s).__name__}")
    arity = 2 if axiom in (Axiom.CONTRACTION, Axiom.INTERSECTION) else 1
    if len(stmts) != arity:
        raise InputError(f"{axiom.value} takes {arity} statement(s), got {len(stmts)}")

    if axiom is Axiom.SYMMETRY:
        s = stmts[0]
        return CIStatement(s.right, s.left, s.given)

    if arity == 1:
        s = stmts[0]
        w = as_label_set(selection)
        if not w:
            return s
        for x, yw in _orientations(s):
            if w <= yw:
                y = yw - w
                if not y:
                    return None
                if axiom is Axiom.DECOMPOSITION:
                    return CIStatement(x, y, s.given)
                return CIStatement(x, y, s.given | w)
        return None

    s1, s2 = stmts
    for x, y in _orientations(s1):
        for x2, w in _orientations(s2):
            if x2 != x or w & y:
                continue
            if axiom is Axiom.CONTRACTION:
                # X _||_ Y | Z  and  X _||_ W | Z u Y
                z = s1.given
                if s2.given == z | y and not (w & z):
                    return CIStatement(x, y | w, z)
            else:
                # X _||_ Y | Z u W  and  X _||_ W | Z u Y
                if w <= s1.given and y <= s2.given and s1.given - w == s2.given - y:
                    return CIStatement(x, y | w, s1.given - w)
    return None


def pairwise_from_mcip(g: UndirectedGraph) -> list[CIStatement]:
    """Pairwise-Markov-shaped statements derived from the mutual relations by weak union."""
    verts = frozenset(g.vertices)
    out = set()
    for m in mcip_relations(g):
        for s in weak_union_expand(m):
            if len(s.left) == 1 and len(s.right) == 1 and s.given == verts - s.left - s.right:
                out.add(s)
    return sorted(out)


def format_statements(statements) -> str:
    """One statement per line, in the given (already canonical) order."""
    return "".join(f"{s}\n" for s in statements)


__all__ = [
    "CIStatement",
    "MutualCIStatement",
    "Axiom",
    "parse_statement",
    "pairwise_relations",
    "local_relations",
    "mcip_relations",
    "separation_relations",
    "global_query",
    "weak_union_expand",
    "apply_axiom",
    "pairwise_from_mcip",
    "format_statements",
]
