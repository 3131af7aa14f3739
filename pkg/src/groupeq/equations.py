"""Equation systems over a finite group and the exhaustive solver.

Also houses the explicit equation constructors (the torsion unsolvability
words, the two-unknown star equation, the commutator / power / antipodal
equations) together with their finite witness overgroups, and the
univariate reduction that trades n unknowns for a single one via the fixed
exponent schedule 20i+1 .. 20i+20.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .construct import TABLE_CAP, WreathCyclic, central_product, heisenberg_mod, \
    semidirect_product, wreath_cyclic
from .errors import (
    ArityMismatch,
    BadParameters,
    SearchSpaceTooLarge,
    TrivialElement,
    VerificationFailed,
)
from .groups import (
    GroupTable,
    Homomorphism,
    _primes_dividing,
    element_order,
    identity_hom,
    verify_map,
)
from .words import (
    Assignment,
    Coeff,
    Letter,
    Word,
    coeff_word,
    compile_programs,
    empty_word,
    evaluate,
    letter_word,
    parse_system,
    substitute,
)

DEFAULT_MAX_SPACE = 10 ** 8


def _ordered_unknowns(words) -> tuple[str, ...]:
    seen: list[str] = []
    for w in words:
        for name in w.unknowns:
            if name not in seen:
                seen.append(name)
    return tuple(seen)


@dataclass(frozen=True)
class EquationSystem:
    """A finite list of words, each equated to the identity."""

    group: GroupTable
    equations: tuple[Word, ...]
    unknowns: tuple[str, ...]

    def __post_init__(self):
        declared = set(self.unknowns)
        for w in self.equations:
            missing = set(w.unknowns) - declared
            if missing:
                raise ArityMismatch(f"undeclared unknowns {sorted(missing)}")

    @classmethod
    def from_words(cls, group: GroupTable, words) -> "EquationSystem":
        words = tuple(w.rebind(group) for w in words)
        return cls(group, words, _ordered_unknowns(words))

    @classmethod
    def from_text(cls, text: str, group: GroupTable) -> "EquationSystem":
        return cls.from_words(group, parse_system(text, group))

    def to_text(self) -> str:
        return "; ".join(f"{w.to_text()} = 1" for w in self.equations)


@dataclass(frozen=True)
class SolveReport:
    """Solutions in ascending lexicographic order of value tuples."""

    solutions: tuple[tuple[int, ...], ...]
    exhaustive: bool
    search_space_size: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "solutions": [list(s) for s in self.solutions],
                "exhaustive": self.exhaustive,
                "space": self.search_space_size,
            },
            sort_keys=True,
        )


def _decode_assignment(linear: int, n_unknowns: int, order: int) -> tuple[int, ...]:
    vals = []
    for u in range(n_unknowns - 1, -1, -1):
        vals.append(linear % order)
        linear //= order
    return tuple(reversed(vals))


def solve(
    sys: EquationSystem,
    K: GroupTable | None = None,
    embed: Homomorphism | None = None,
    mode: str = "all",
    max_space: int = DEFAULT_MAX_SPACE,
    jobs: int = 1,
) -> SolveReport:
    """Exhaustively scan K^n in lexicographic order for solutions.

    ``embed`` must be a verified embedding of the system's coefficient
    group into K; it defaults to the identity when K is the coefficient
    group itself.  ``mode="first"`` stops at the first solution.
    """
    if mode not in ("all", "first"):
        raise ValueError(f"mode must be all or first, not {mode!r}")
    if K is None:
        K = sys.group
    if embed is None:
        if K is not sys.group:
            raise BadParameters("an embedding is required when solving in an overgroup")
        embed = identity_hom(sys.group)
    report = verify_map(embed)
    if not report.multiplicative or not report.injective:
        raise VerificationFailed("coefficient embedding failed verification")
    if not isinstance(K, GroupTable):
        raise BadParameters("solve requires a materialized multiplication table")

    n = len(sys.unknowns)
    space = K.order ** n
    if space > max_space:
        raise SearchSpaceTooLarge(space, max_space)
    codes, args, bounds = compile_programs(sys.equations, sys.unknowns, embed.map)
    hits = _kernels.scan_assignments(
        K.table,
        K.inverse,
        K.identity,
        n,
        codes,
        args,
        bounds,
        negate_last=False,
        find_all=(mode == "all"),
        jobs=jobs,
    )
    sols = tuple(_decode_assignment(int(L), n, K.order) for L in hits)
    exhaustive = mode == "all" or len(sols) == 0
    return SolveReport(solutions=sols, exhaustive=exhaustive, search_space_size=space)


# ---------------------------------------------------------------------------
# explicit unsolvability words


def unsolvable_word(G: GroupTable, a: int) -> Word:
    """A one-unknown word w(x) whose equation w = 1 has no solution in any
    finite group containing a: the torsion doubling word a^(a^x) * a^-2 when
    a has order > 2, and the order-two variant a^(x^2) * [a, a^x]^-1."""
    G.check_element(a)
    if a == G.identity:
        raise TrivialElement("coefficient must be nontrivial")
    aw = coeff_word(G, a)
    x = letter_word("x", group=G)
    if element_order(G, a) > 2:
        return aw.conjugate(aw.conjugate(x)) * (aw * aw).inverse()
    lhs = aw.conjugate(x * x)
    rhs = aw.commutator(aw.conjugate(x))
    return lhs * rhs.inverse()


def star_equation(w: Word) -> EquationSystem:
    """The two-unknown system (w(x))^((w(x))^y) = (w(x))^2."""
    if w.group is None:
        raise ArityMismatch("the inner word needs a coefficient group")
    if tuple(w.unknowns) not in ((), ("x",)):
        raise ArityMismatch(f"expected a word in x alone, got unknowns {w.unknowns}")
    y = letter_word("y", group=w.group)
    eq = w.conjugate(w.conjugate(y)) * (w * w).inverse()
    return EquationSystem(w.group, (eq,), ("x", "y"))


# ---------------------------------------------------------------------------
# named equations and their witnesses


def _prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def commutator_equation(G: GroupTable, g: int) -> EquationSystem:
    """[x, y] = g."""
    G.check_element(g)
    if g == G.identity:
        raise BadParameters("g must be nontrivial")
    x = letter_word("x", group=G)
    y = letter_word("y", group=G)
    eq = x.commutator(y) * coeff_word(G, g).inverse()
    return EquationSystem(G, (eq,), ("x", "y"))


def power_equation(G: GroupTable, a: int, q: int, k: int) -> EquationSystem:
    """(a x)^(q^k) = x^(q^k), with q a prime outside the group's prime set,
    q^k exceeding the order of a, and a of prime order."""
    G.check_element(a)
    if a == G.identity:
        raise BadParameters("a must be nontrivial")
    if not _prime(q):
        raise BadParameters(f"q = {q} is not prime")
    if q in _primes_dividing(G.order):
        raise BadParameters(f"q = {q} divides the group order")
    m = q ** k
    if m <= element_order(G, a):
        raise BadParameters(f"q^k = {m} does not exceed the order of a")
    if not _prime(element_order(G, a)):
        raise BadParameters("a must have prime order")
    x = letter_word("x", group=G)
    eq = ((coeff_word(G, a) * x) ** m) * (x ** m).inverse()
    return EquationSystem(G, (eq,), ("x",))


def antipodal_equation(G: GroupTable, g: int) -> EquationSystem:
    """g^x = g^-1."""
    G.check_element(g)
    if g == G.identity:
        raise BadParameters("g must be nontrivial")
    gw = coeff_word(G, g)
    eq = gw.conjugate(letter_word("x", group=G)) * gw
    return EquationSystem(G, (eq,), ("x",))


_NAMED = {
    "commutator": commutator_equation,
    "power": power_equation,
    "antipodal": antipodal_equation,
}


def named_equation(kind: str, G: GroupTable, *params) -> EquationSystem:
    if kind not in _NAMED:
        raise BadParameters(f"unknown equation kind {kind!r}")
    return _NAMED[kind](G, *params)


@dataclass(frozen=True)
class Witness:
    """A verified solution of a system in an explicit overgroup."""

    overgroup: object
    embedding: Homomorphism
    solution: tuple[int, ...]


def verify_witness(sys: EquationSystem, witness: Witness) -> bool:
    """Re-evaluate every equation at the witness; also verifies the embedding."""
    if not verify_map(witness.embedding).ok:
        return False
    asg = Assignment(
        witness.overgroup,
        dict(zip(sys.unknowns, witness.solution)),
        embed=witness.embedding,
    )
    return all(
        evaluate(w, asg) == witness.overgroup.identity for w in sys.equations
    )


def witness_construction(kind: str, G: GroupTable, *params) -> Witness:
    """Build the explicit finite witness for the named equation.

    power: the wreath product G wr Z_{q^k} with the p-copy prefix embedding
    and the coordinate shift as the solution (kept packed above the table
    cap).  commutator: the central product of the mod-n Heisenberg group
    with G, identifying the commutator generator with g.  antipodal: the
    semidirect extension of an abelian G by the inverting involution.
    """
    sys = named_equation(kind, G, *params)
    if kind == "power":
        a, q, k = params
        m = q ** k
        p = element_order(G, a)
        packed = WreathCyclic(G, m)
        if packed.order <= TABLE_CAP:
            W, homs = wreath_cyclic(G, m, prefix_copies=p)
            witness = Witness(W, homs["prefix"], (W.tags["shift"],))
        else:
            emb = packed.embeddings(prefix_copies=p)["prefix"]
            witness = Witness(packed, emb, (packed.shift,))
    elif kind == "commutator":
        (g,) = params
        n = element_order(G, g)
        H = heisenberg_mod(n)
        Q, homs = central_product(H, G, H.tags["c"], g)
        witness = Witness(
            Q, homs["right"], (int(homs["left"].map[H.tags["a"]]),
                               int(homs["left"].map[H.tags["b"]])),
        )
    elif kind == "antipodal":
        (g,) = params
        if not G.is_abelian:
            raise BadParameters("the inverting involution needs an abelian group")
        act = np.stack([np.arange(G.order, dtype=np.int64), G.inverse.astype(np.int64)])
        from .construct import cyclic

        S, homs = semidirect_product(G, cyclic(2), act)
        flip = int(homs["top"].map[1])
        witness = Witness(S, homs["normal"], (flip,))
    else:
        raise BadParameters(f"unknown witness kind {kind!r}")
    if not verify_witness(sys, witness):
        raise VerificationFailed(f"{kind} witness failed re-evaluation")
    return witness


# ---------------------------------------------------------------------------
# univariate reduction


def reduction_substitution(G: GroupTable, a: int, i: int, unknown: str) -> Word:
    """The image of the i-th unknown: a t^(20i+1) a t^(20i+2) ... a t^(20i+20)."""
    toks: list = []
    for j in range(1, 21):
        toks.append(Coeff(a))
        toks.extend([Letter(unknown, 1)] * (20 * i + j))
    return Word(G, tuple(toks)).reduce()


def univariate_reduce(sys: EquationSystem, a: int, unknown: str = "t") -> EquationSystem:
    """Rewrite every equation over the single unknown by the fixed schedule."""
    sys.group.check_element(a)
    if a == sys.group.identity:
        raise TrivialElement("anchor element must be nontrivial")
    name = unknown
    while name in sys.unknowns:
        name += "_"
    sub = {
        u: reduction_substitution(sys.group, a, i, name)
        for i, u in enumerate(sys.unknowns, start=1)
    }
    new_words = tuple(substitute(w, sub) for w in sys.equations)
    return EquationSystem(sys.group, new_words, (name,))
