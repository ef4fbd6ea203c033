"""Undirected simple graphs: independent sets, cliques, separation and
reconstruction of a graph from its maximal independent sets.

Vertices keep their declaration order, which is the canonical order used to
sort every returned set and family.  Graph equality is structural and does
not depend on that order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from collections.abc import Iterable, Sequence

from ._validation import check_disjoint, check_members, check_nonempty
from .exceptions import InputError

MAX_ENUMERATION_VERTICES = 64


class UndirectedGraph:
    """An immutable simple undirected graph over string labels.

    Parameters
    ----------
    vertices : iterable of str
        Distinct vertex labels; their order is the canonical vertex order.
    edges : iterable of pairs of str
        Unordered vertex pairs.  Self-loops, duplicates and unknown endpoints
        are rejected.
    """

    __slots__ = ("_vertices", "_index", "_edges", "_adj")

    def __init__(self, vertices: Iterable[str], edges: Iterable[Sequence[str]] = ()):
        verts = tuple(str(v) for v in vertices)
        index = {}
        for v in verts:
            if not v or any(ch.isspace() for ch in v) or "," in v:
                raise InputError(f"invalid vertex label {v!r}")
            if v in index:
                raise InputError(f"duplicate vertex label {v!r}")
            index[v] = len(index)
        adj = {v: set() for v in verts}
        edge_set = set()
        for e in edges:
            pair = tuple(str(x) for x in e)
            if len(pair) != 2:
                raise InputError(f"an edge needs exactly two endpoints, got {pair!r}")
            x, y = pair
            for end in pair:
                if end not in index:
                    raise InputError(f"edge {x}-{y} uses unknown vertex label {end!r}")
            if x == y:
                raise InputError(f"self-loop on vertex {x!r}")
            key = frozenset(pair)
            if key in edge_set:
                raise InputError(f"duplicate edge {x}-{y}")
            edge_set.add(key)
            adj[x].add(y)
            adj[y].add(x)
        self._vertices = verts
        self._index = index
        self._edges = frozenset(edge_set)
        self._adj = {v: frozenset(n) for v, n in adj.items()}

    @classmethod
    def complete(cls, vertices: Iterable[str]) -> "UndirectedGraph":
        verts = list(vertices)
        return cls(verts, combinations(verts, 2))

    @classmethod
    def edgeless(cls, vertices: Iterable[str]) -> "UndirectedGraph":
        return cls(vertices)

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> frozenset:
        return self._edges

    def __len__(self):
        return len(self._vertices)

    def __contains__(self, v):
        return v in self._index

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise InputError(f"unknown vertex label {v!r}") from None

    def neighbors(self, v: str) -> frozenset:
        self.index(v)
        return self._adj[v]

    def has_edge(self, x: str, y: str) -> bool:
        return y in self.neighbors(x)

    def ordered(self, labels: Iterable[str]) -> tuple[str, ...]:
        """Labels sorted by canonical vertex order."""
        return tuple(sorted(labels, key=self.index))

    def edge_list(self) -> list[tuple[str, str]]:
        """Edges as canonically ordered pairs, sorted."""
        pairs = [self.ordered(e) for e in self._edges]
        return sorted(pairs, key=lambda p: (self._index[p[0]], self._index[p[1]]))

    def sort_family(self, family: Iterable[Iterable[str]]) -> list[frozenset]:
        """Sort a family of vertex sets lexicographically by canonical order."""
        fam = [frozenset(s) for s in family]
        return sorted(fam, key=lambda s: tuple(sorted(self._index[v] for v in s)))

    def complement(self) -> "UndirectedGraph":
        return UndirectedGraph(
            self._vertices,
            ((x, y) for x, y in combinations(self._vertices, 2)
             if y not in self._adj[x]))

    def subgraph(self, keep: Iterable[str]) -> "UndirectedGraph":
        keep = check_members(self._vertices, keep)
        verts = [v for v in self._vertices if v in keep]
        return UndirectedGraph(verts, (tuple(e) for e in self._edges if e <= keep))

    def _key(self):
        return tuple(sorted(self._vertices)), tuple(sorted(tuple(sorted(e)) for e in self._edges))

    def __eq__(self, other):
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        edges = ", ".join(f"{x}-{y}" for x, y in self.edge_list())
        return f"UndirectedGraph(vertices={list(self._vertices)}, edges=[{edges}])"


def _adjacency_masks(g: UndirectedGraph, complement: bool = False) -> list[int]:
    n = len(g)
    full = (1 << n) - 1
    masks = []
    for i, v in enumerate(g.vertices):
        m = 0
        for u in g.neighbors(v):
            m |= 1 << g.index(u)
        if complement:
            m = full & ~m & ~(1 << i)
        masks.append(m)
    return masks


def _bron_kerbosch(adj: list[int]) -> list[int]:
    """All maximal cliques of the graph given by bitmask adjacency, with pivoting."""
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(r)
            return
        px = p | x
        # pivot maximising |P ∩ N(u)|; lowest index wins ties
        pivot, best = -1, -1
        while px:
            low = px & -px
            u = low.bit_length() - 1
            c = bin(p & adj[u]).count("1")
            if c > best:
                pivot, best = u, c
            px ^= low
        cand = p & ~adj[pivot]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            expand(r | low, p & adj[v], x & adj[v])
            p &= ~low
            x |= low
            cand ^= low

    if adj:
        expand(0, (1 << len(adj)) - 1, 0)
    return out


def _masks_to_family(g: UndirectedGraph, masks: list[int]) -> list[frozenset]:
    verts = g.vertices
    fam = [frozenset(verts[i] for i in range(len(verts)) if m >> i & 1) for m in masks]
    return g.sort_family(fam)


def _check_enumeration_size(g: UndirectedGraph) -> None:
    if len(g) > MAX_ENUMERATION_VERTICES:
        raise InputError(
            f"refusing to enumerate on {len(g)} vertices "
            f"(limit {MAX_ENUMERATION_VERTICES}; output size is exponential)")


def is_independent_set(g: UndirectedGraph, s: Iterable[str]) -> bool:
    """True iff no two members of ``s`` are adjacent in ``g``."""
    s = check_members(g.vertices, s)
    return all(not (g.neighbors(v) & s) for v in s)


def enumerate_maximal_independent_sets(g: UndirectedGraph) -> list[frozenset]:
    """All maximal independent sets of ``g`` in canonical order.

    Runs Bron-Kerbosch with pivoting on the complement graph.  An isolated
    vertex belongs to every maximal independent set, so the union of the
    returned family is always the full vertex set.
    """
    _check_enumeration_size(g)
    if len(g) == 0:
        return []
    return _masks_to_family(g, _bron_kerbosch(_adjacency_masks(g, complement=True)))


def enumerate_maximal_cliques(g: UndirectedGraph) -> list[frozenset]:
    """All maximal cliques of ``g`` in canonical order."""
    _check_enumeration_size(g)
    if len(g) == 0:
        return []
    return _masks_to_family(g, _bron_kerbosch(_adjacency_masks(g)))


def natural_key(label: str) -> tuple:
    """Sort key treating digit runs numerically, so V2 sorts before V10."""
    return tuple((0, int(part), "") if part.isdigit() else (1, 0, part)
                 for part in re.split(r"(\d+)", label) if part)


def reconstruct_from_amis(families: Iterable[Iterable[str]]) -> UndirectedGraph:
    """Rebuild the unique graph whose maximal independent sets are ``families``.

    The vertex set is the union of the families; ``{x, y}`` is an edge iff no
    family contains both.  Vertices are declared in natural label order.
    """
    fams = []
    for fam in families:
        members = frozenset(str(v) for v in fam)
        if not members:
            raise InputError("an independent set family member is empty")
        fams.append(members)
    if not fams:
        raise InputError("need at least one maximal independent set")
    for a, b in combinations(fams, 2):
        if a < b or b < a:
            small, big = (a, b) if a < b else (b, a)
            raise InputError(
                f"set {sorted(small)} is strictly contained in {sorted(big)}; "
                "input is not a family of maximal independent sets")
    verts = sorted(frozenset().union(*fams), key=natural_key)
    together = set()
    for fam in fams:
        together.update(frozenset(p) for p in combinations(fam, 2))
    edges = [(x, y) for x, y in combinations(verts, 2) if frozenset((x, y)) not in together]
    return UndirectedGraph(verts, edges)


def separates(g: UndirectedGraph, a, b, c) -> bool:
    """True iff every path from ``a`` to ``b`` in ``g`` passes through ``c``."""
    a = check_members(g.vertices, a)
    b = check_members(g.vertices, b)
    c = check_members(g.vertices, c)
    check_nonempty(a=a, b=b)
    check_disjoint(a=a, b=b, c=c)
    seen = set(a)
    stack = list(a)
    while stack:
        v = stack.pop()
        for u in g.neighbors(v):
            if u in c or u in seen:
                continue
            if u in b:
                return False
            seen.add(u)
            stack.append(u)
    return True


def boundary(g: UndirectedGraph, x: str) -> frozenset:
    """The neighbours of ``x``."""
    return g.neighbors(x)


@dataclass(frozen=True)
class Decomposition:
    """Outcome of a chordality test.

    ``cliques`` are the maximal cliques in an order with the running
    intersection property; ``separators[j]`` is the intersection of clique j
    with all earlier cliques and ``parents[j]`` an earlier clique containing
    it.  The sequence fields are empty when the graph is not chordal.
    Truthiness follows ``chordal``.
    """

    chordal: bool
    visit_order: tuple
    elimination_order: tuple | None = None
    cliques: tuple = ()
    separators: tuple = ()
    parents: tuple = ()

    def __bool__(self):
        return self.chordal


def maximum_cardinality_search(g: UndirectedGraph) -> tuple[str, ...]:
    """Visit order of maximum-cardinality search, ties broken by canonical order."""
    weight = {v: 0 for v in g.vertices}
    order = []
    remaining = list(g.vertices)
    while remaining:
        v = max(remaining, key=lambda u: (weight[u], -g.index(u)))
        remaining.remove(v)
        order.append(v)
        for u in g.neighbors(v):
            if u in weight and u in remaining:
                weight[u] += 1
    return tuple(order)


def is_decomposable(g: UndirectedGraph) -> Decomposition:
    """Test chordality by maximum-cardinality search.

    For a chordal graph the reverse visit order is a perfect elimination
    ordering, and the sets ``{v} ∪ (earlier neighbours of v)`` that are
    maximal, taken in visit order, are the maximal cliques in a running
    intersection order.
    """
    order = maximum_cardinality_search(g)
    pos = {v: i for i, v in enumerate(order)}
    earlier = {v: frozenset(u for u in g.neighbors(v) if pos[u] < pos[v]) for v in order}
    for v in order:
        for x, y in combinations(earlier[v], 2):
            if not g.has_edge(x, y):
                return Decomposition(chordal=False, visit_order=order)
    candidates = [earlier[v] | {v} for v in order]
    cliques = [c for c in candidates if not any(c < d for d in candidates)]
    seps, parents = [], []
    seen = set()
    for j, c in enumerate(cliques):
        sep = frozenset(c & seen)
        seps.append(sep)
        parents.append(None if j == 0 else next(i for i in range(j) if sep <= cliques[i]))
        seen |= c
    return Decomposition(
        chordal=True,
        visit_order=order,
        elimination_order=tuple(reversed(order)),
        cliques=tuple(cliques),
        separators=tuple(seps),
        parents=tuple(parents),
    )


__all__ = [
    "UndirectedGraph",
    "Decomposition",
    "MAX_ENUMERATION_VERTICES",
    "is_independent_set",
    "enumerate_maximal_independent_sets",
    "enumerate_maximal_cliques",
    "reconstruct_from_amis",
    "natural_key",
    "separates",
    "boundary",
    "maximum_cardinality_search",
    "is_decomposable",
]
