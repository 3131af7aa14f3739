"""Finite groups as multiplication tables, plus structural queries.

Elements are integer indices 0..order-1.  ``table[i, j]`` is the product of
element ``i`` by element ``j``, left factor first; every derived notion
(permutation composition, word evaluation, commutators) follows the same
left-to-right convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import (
    IndexOutOfRange,
    NoIdentity,
    NonAssociative,
    NoInverse,
    TrivialElement,
)

ASSOC_EXHAUSTIVE_LIMIT = 400
ASSOC_SAMPLES = 100_000

_IDENT_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def _is_identifier(name: str) -> bool:
    return bool(name) and name[0].isalpha() and set(name) <= _IDENT_CHARS


@dataclass(frozen=True, eq=False)
class GroupTable:
    """A validated finite group given by its multiplication table.

    ``names`` are optional display labels; ``tags`` map role names such as
    "a", "g" or "shift" to element indices and are the preferred handles in
    the word DSL.  Instances are immutable after validation and safe to
    share across parallel workers.
    """

    order: int
    table: np.ndarray
    identity: int
    inverse: np.ndarray
    name: str = ""
    names: tuple[str, ...] | None = None
    tags: dict[str, int] = field(default_factory=dict)

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inv(self, i: int) -> int:
        return int(self.inverse[i])

    def conj(self, x: int, z: int) -> int:
        """z^-1 * x * z."""
        t = self.table
        return int(t[t[self.inverse[z], x], z])

    def comm(self, x: int, y: int) -> int:
        """[x, y] = x^-1 * y^-1 * x * y."""
        t = self.table
        return int(t[t[self.inverse[x], self.inverse[y]], t[x, y]])

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inv(x), -k
        acc = self.identity
        for _ in range(k):
            acc = int(self.table[acc, x])
        return acc

    def elements(self) -> range:
        return range(self.order)

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def element_name(self, i: int) -> str:
        """Printable handle that `resolve` maps back to `i`."""
        for tag in sorted(self.tags):
            if self.tags[tag] == i:
                return tag
        if self.names is not None:
            cand = self.names[i]
            if _is_identifier(cand) and cand not in self.tags and self.names.index(cand) == i:
                return cand
        return f"#{i}"

    def resolve(self, name: str) -> int:
        """Map a tag, display name, or '#index' handle to an element index."""
        if name.startswith("#"):
            idx = int(name[1:])
            if not 0 <= idx < self.order:
                raise KeyError(name)
            return idx
        if name in self.tags:
            return self.tags[name]
        if self.names is not None and name in self.names:
            return self.names.index(name)
        raise KeyError(name)

    def check_element(self, i: int) -> int:
        if not 0 <= i < self.order:
            raise IndexOutOfRange(f"element {i} outside 0..{self.order - 1}")
        return int(i)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "order": self.order,
            "identity": self.identity,
            "table": self.table.tolist(),
        }
        if self.names is not None:
            out["names"] = list(self.names)
        if self.tags:
            out["tags"] = dict(self.tags)
        return out


def validate_group(
    candidate,
    name: str = "",
    names=None,
    tags: dict[str, int] | None = None,
    assoc_limit: int = ASSOC_EXHAUSTIVE_LIMIT,
    sample_seed: int = 0,
) -> GroupTable:
    """Validate raw table data and return a GroupTable.

    All three group axioms are checked: identity and inverses exhaustively,
    associativity exhaustively up to ``assoc_limit`` and by at least
    ``ASSOC_SAMPLES`` seeded random triples above it.
    """
    table = np.asarray(candidate)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise IndexOutOfRange(f"table shape {table.shape} is not square")
    n = int(table.shape[0])
    if n == 0:
        raise NoIdentity("empty table has no identity")
    if not np.issubdtype(table.dtype, np.integer):
        raise IndexOutOfRange("table entries must be integers")
    if table.min() < 0 or table.max() >= n:
        bad = np.argwhere((table < 0) | (table >= n))[0]
        raise IndexOutOfRange(
            f"entry table[{bad[0]}][{bad[1]}] = {table[bad[0], bad[1]]} outside 0..{n - 1}"
        )
    table = np.ascontiguousarray(table, dtype=np.int32)

    rng = np.arange(n, dtype=np.int32)
    identity = -1
    for e in range(n):
        if np.array_equal(table[e], rng) and np.array_equal(table[:, e], rng):
            identity = e
            break
    if identity < 0:
        raise NoIdentity("no two-sided identity row/column")

    inverse = np.empty(n, dtype=np.int32)
    for i in range(n):
        right = np.nonzero(table[i] == identity)[0]
        ok = [j for j in right if table[j, i] == identity]
        if not ok:
            raise NoInverse(i)
        inverse[i] = ok[0]

    if n <= assoc_limit:
        witness = _kernels.assoc_violation(table)
    else:
        witness = _kernels.assoc_violation_sampled(table, ASSOC_SAMPLES, seed=sample_seed)
    if witness is not None:
        raise NonAssociative(*witness)

    return GroupTable(
        order=n,
        table=table,
        identity=identity,
        inverse=inverse,
        name=name,
        names=tuple(names) if names is not None else None,
        tags=dict(tags) if tags else {},
    )


def load_group(source) -> GroupTable:
    """Load a group from a JSON file path, JSON text, or a parsed dict."""
    if isinstance(source, (str, Path)):
        try:
            is_file = Path(str(source)).exists()
        except OSError:
            is_file = False
        text = Path(source).read_text() if is_file else str(source)
        data = json.loads(text)
    else:
        data = source
    g = validate_group(
        data["table"],
        name=data.get("name", ""),
        names=data.get("names"),
        tags=data.get("tags"),
    )
    if "identity" in data and int(data["identity"]) != g.identity:
        raise NoIdentity(
            f"declared identity {data['identity']} but table identity is {g.identity}"
        )
    return g


# ---------------------------------------------------------------------------
# element and subgroup queries


def element_order(G: GroupTable, g: int) -> int:
    """Least k >= 1 with g^k = identity."""
    G.check_element(g)
    acc = g
    k = 1
    while acc != G.identity:
        acc = G.mul(acc, g)
        k += 1
    return k


def conjugacy_closure(G: GroupTable, S) -> np.ndarray:
    """All conjugates z^-1 s z of members of S, as a sorted index array."""
    s = np.asarray(sorted(set(int(x) for x in S)), dtype=np.int64)
    z = np.arange(G.order, dtype=np.int64)
    t = G.table
    conj = t[t[G.inverse[z][:, None], s[None, :]], z[:, None]]
    return np.unique(conj)


def closure(G: GroupTable, S, mode: str = "subgroup") -> tuple[int, ...]:
    """Least subgroup (or normal subgroup) containing S, by BFS saturation.

    Subgroup mode saturates products of the generators; normal mode first
    closes S under conjugation by all of G, then saturates products.  For a
    finite group the product saturation alone already yields inverses and
    the identity.
    """
    if mode not in ("subgroup", "normal"):
        raise ValueError(f"mode must be subgroup or normal, not {mode!r}")
    items = [G.check_element(x) for x in S]
    if not items:
        raise ValueError("S must be nonempty")
    if mode == "normal":
        gens = conjugacy_closure(G, items)
    else:
        gens = np.asarray(sorted(set(items)), dtype=np.int64)
    member = np.zeros(G.order, dtype=bool)
    member[G.identity] = True
    frontier = np.asarray([G.identity], dtype=np.int64)
    while frontier.size:
        prods = np.unique(G.table[frontier[:, None], gens[None, :]])
        fresh = prods[~member[prods]]
        member[fresh] = True
        frontier = fresh
    return tuple(int(x) for x in np.nonzero(member)[0])


@dataclass(frozen=True)
class ConjugateExpression:
    """g written as a product of conjugates of h^{+-1}, shortest first found.

    ``factors`` is a sequence of (sign, conjugator) pairs; the left-to-right
    product of (base^sign)^conjugator equals the expressed element.  BFS
    order guarantees minimal length, with ties broken by sign (+1 first)
    and ascending conjugator index.
    """

    base: int
    factors: tuple[tuple[int, int], ...]

    def replay(self, G: GroupTable) -> int:
        acc = G.identity
        for sign, z in self.factors:
            x = self.base if sign > 0 else G.inv(self.base)
            acc = G.mul(acc, G.conj(x, z))
        return acc


def express_in_normal_closure(
    G: GroupTable, h: int, g: int
) -> ConjugateExpression | None:
    """Express g as a minimal product of conjugates of h^{+-1}, or None.

    Breadth-first search over right multiplication by conjugates of h and
    h^-1, recording the move that first reaches each element.
    """
    G.check_element(g)
    if G.check_element(h) == G.identity:
        raise TrivialElement("base element must be nontrivial")
    z = np.arange(G.order, dtype=np.int64)
    t = G.table
    conj_h = t[t[G.inverse[z], h], z]
    conj_hinv = t[t[G.inverse[z], G.inverse[h]], z]
    moves = [(1, conj_h), (-1, conj_hinv)]

    parent = np.full(G.order, -1, dtype=np.int64)
    move_sign = np.zeros(G.order, dtype=np.int64)
    move_conj = np.zeros(G.order, dtype=np.int64)
    seen = np.zeros(G.order, dtype=bool)
    seen[G.identity] = True
    frontier = [G.identity]
    while frontier and not seen[g]:
        nxt = []
        for state in frontier:
            for sign, conj in moves:
                row = t[state]
                for zi in range(G.order):
                    dest = int(row[conj[zi]])
                    if not seen[dest]:
                        seen[dest] = True
                        parent[dest] = state
                        move_sign[dest] = sign
                        move_conj[dest] = zi
                        nxt.append(dest)
        frontier = nxt
    if not seen[g]:
        return None
    path = []
    cur = g
    while cur != G.identity:
        path.append((int(move_sign[cur]), int(move_conj[cur])))
        cur = int(parent[cur])
    path.reverse()
    return ConjugateExpression(base=h, factors=tuple(path))


# ---------------------------------------------------------------------------
# structure


def center(G: GroupTable) -> tuple[int, ...]:
    mask = (G.table == G.table.T).all(axis=1)
    return tuple(int(x) for x in np.nonzero(mask)[0])


def commutator_elements(G: GroupTable, left, right) -> np.ndarray:
    """Set of commutators [x, y] with x in `left`, y in `right`."""
    x = np.asarray(sorted(set(int(v) for v in left)), dtype=np.int64)
    y = np.asarray(sorted(set(int(v) for v in right)), dtype=np.int64)
    t = G.table
    xv = x[:, None]
    yv = y[None, :]
    comm = t[t[G.inverse[xv], G.inverse[yv]], t[xv, yv]]
    return np.unique(comm)


def derived_subgroup(G: GroupTable, of=None) -> tuple[int, ...]:
    """Subgroup generated by commutators of `of` (default: all of G)."""
    of = tuple(G.elements()) if of is None else of
    comms = commutator_elements(G, of, of)
    nontrivial = [int(c) for c in comms if c != G.identity]
    if not nontrivial:
        return (G.identity,)
    return closure(G, nontrivial, "subgroup")


@dataclass(frozen=True)
class StructureReport:
    """Class-membership facts computed by exhaustive series saturation."""

    is_abelian: bool
    nilpotency_class: int | None
    derived_length: int | None
    element_orders: tuple[int, ...]
    prime_set: frozenset[int]
    center_size: int
    derived_size: int


def _primes_dividing(n: int) -> frozenset[int]:
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return frozenset(out)


def structure_report(G: GroupTable) -> StructureReport:
    """Derived and lower central series by iterated commutator saturation."""
    trivial = (G.identity,)

    derived_length: int | None = 0 if G.order == 1 else None
    term = tuple(G.elements())
    if G.order > 1:
        for step in range(1, G.order + 2):
            nxt = derived_subgroup(G, term)
            if nxt == trivial:
                derived_length = step
                break
            if nxt == term:
                break
            term = nxt

    nilpotency_class: int | None = 0 if G.order == 1 else None
    gamma = tuple(G.elements())
    if G.order > 1:
        for step in range(1, G.order + 2):
            comms = commutator_elements(G, gamma, tuple(G.elements()))
            nontrivial = [int(c) for c in comms if c != G.identity]
            nxt = closure(G, nontrivial, "subgroup") if nontrivial else trivial
            if nxt == trivial:
                nilpotency_class = step
                break
            if nxt == gamma:
                break
            gamma = nxt

    orders = tuple(sorted(element_order(G, g) for g in G.elements()))
    return StructureReport(
        is_abelian=G.is_abelian,
        nilpotency_class=nilpotency_class,
        derived_length=derived_length,
        element_orders=orders,
        prime_set=_primes_dividing(G.order),
        center_size=len(center(G)),
        derived_size=len(derived_subgroup(G)),
    )


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True, eq=False)
class Homomorphism:
    """A map between groups given elementwise; target may be any object
    exposing ``order``, ``identity``, ``mul`` and ``inv`` (a GroupTable or a
    packed product such as WreathCyclic)."""

    source: GroupTable
    target: object
    map: np.ndarray
    embedding: bool = False
    name: str = ""

    def __post_init__(self):
        object.__setattr__(
            self, "map", np.ascontiguousarray(np.asarray(self.map, dtype=np.int64))
        )

    def __call__(self, i: int) -> int:
        return int(self.map[i])


@dataclass(frozen=True)
class MapReport:
    ok: bool
    multiplicative: bool
    injective: bool
    violation: tuple[int, int] | None


def identity_hom(G: GroupTable) -> Homomorphism:
    return Homomorphism(G, G, np.arange(G.order), embedding=True, name="id")


def verify_map(f: Homomorphism) -> MapReport:
    """Check multiplicativity on all pairs; report the first violator."""
    src = f.source
    if len(f.map) != src.order:
        return MapReport(False, False, False, (0, 0))
    tgt = f.target
    if isinstance(tgt, GroupTable):
        m = f.map
        lhs = tgt.table[m[:, None], m[None, :]]
        rhs = m[src.table]
        bad = lhs != rhs
        if bad.any():
            i, j = (int(v) for v in np.argwhere(bad)[0])
            return MapReport(False, False, False, (i, j))
        multiplicative = True
    else:
        multiplicative = True
        violation = None
        for i in range(src.order):
            for j in range(src.order):
                if tgt.mul(int(f.map[i]), int(f.map[j])) != int(f.map[src.table[i, j]]):
                    multiplicative = False
                    violation = (i, j)
                    break
            if not multiplicative:
                break
        if not multiplicative:
            return MapReport(False, False, False, violation)
    injective = len(set(int(x) for x in f.map)) == src.order
    ok = multiplicative and (injective or not f.embedding)
    return MapReport(ok, multiplicative, injective, None)
