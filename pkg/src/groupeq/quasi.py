"""Quasi-identities: Horn sentences over coefficient-free words.

A quasi-identity asserts that whenever all hypothesis words evaluate to the
identity, so does the conclusion.  Deciding it in a finite group is an
exhaustive scan of all variable valuations; the first counterexample in
lexicographic order is reported.

The separating-system builder turns a quasi-identity that fails in H into
a finite system over G that is solvable in a host K containing both (via
an explicit conjugate expression of g inside the normal closure of the
violated conclusion value) but unsolvable wherever the quasi-identity
holds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import _kernels
from .equations import (
    DEFAULT_MAX_SPACE,
    EquationSystem,
    Witness,
    verify_witness,
)
from .errors import (
    CoefficientNotAllowed,
    GeneratorMismatch,
    NotInNormalClosure,
    ParseError,
    SearchSpaceTooLarge,
    TrivialElement,
    VerificationFailed,
    WitnessInvalid,
)
from .groups import GroupTable, Homomorphism, express_in_normal_closure, verify_map
from .words import (
    Assignment,
    Coeff,
    Word,
    _Scanner,
    _WordParser,
    coeff_word,
    compile_programs,
    evaluate,
    letter_word,
)


def _require_coefficient_free(w: Word) -> Word:
    if any(isinstance(tok, Coeff) for tok in w.tokens):
        raise CoefficientNotAllowed("quasi-identity words must be coefficient-free")
    return Word(None, w.tokens)


@dataclass(frozen=True)
class QuasiIdentity:
    """Hypothesis words and one conclusion word, all coefficient-free."""

    variables: tuple[str, ...]
    hypotheses: tuple[Word, ...]
    conclusion: Word

    def __post_init__(self):
        declared = set(self.variables)
        for w in (*self.hypotheses, self.conclusion):
            _require_coefficient_free(w)
            missing = set(w.unknowns) - declared
            if missing:
                raise GeneratorMismatch(f"undeclared variables {sorted(missing)}")

    def to_text(self) -> str:
        hyp = " & ".join(f"{w.to_text()} = 1" for w in self.hypotheses)
        return f"{hyp} => {self.conclusion.to_text()} = 1".lstrip()


def parse_qi(text: str) -> QuasiIdentity:
    """Parse ``w1 = 1 & ... & wn = 1 => v = 1`` (coefficients rejected)."""
    if "=>" not in text:
        raise ParseError("a quasi-identity needs '=>'", len(text))
    s = _Scanner(text)
    p = _WordParser(s, None)

    def equation() -> Word:
        lhs = p.parse_word()
        if s.accept("="):
            rhs = p.parse_word()
            lhs = lhs * rhs.inverse()
        return lhs

    hypotheses: list[Word] = []
    if s.peek() != "=>":
        hypotheses.append(equation())
        while s.accept("&"):
            hypotheses.append(equation())
    s.expect("=>")
    conclusion = equation()
    if s.peek() is not None:
        raise ParseError(f"unexpected trailing token {s.peek()!r}", s.pos())
    seen: list[str] = []
    for w in (*hypotheses, conclusion):
        for name in w.unknowns:
            if name not in seen:
                seen.append(name)
    return QuasiIdentity(tuple(seen), tuple(hypotheses), conclusion)


@dataclass(frozen=True)
class QiVerdict:
    holds: bool
    counterexample: tuple[int, ...] | None

    def to_json(self) -> str:
        return json.dumps(
            {
                "holds": self.holds,
                "counterexample": list(self.counterexample)
                if self.counterexample is not None
                else None,
            },
            sort_keys=True,
        )


def qi_holds(G: GroupTable, qi: QuasiIdentity, max_space: int = DEFAULT_MAX_SPACE) -> QiVerdict:
    """Exhaustive check; the first lexicographic counterexample is reported."""
    n = len(qi.variables)
    space = G.order ** n
    if space > max_space:
        raise SearchSpaceTooLarge(space, max_space)
    codes, args, bounds = compile_programs(
        [*qi.hypotheses, qi.conclusion], qi.variables
    )
    hits = _kernels.scan_assignments(
        G.table,
        G.inverse,
        G.identity,
        n,
        codes,
        args,
        bounds,
        negate_last=True,
        find_all=False,
    )
    if hits.size == 0:
        return QiVerdict(holds=True, counterexample=None)
    linear = int(hits[0])
    vals = []
    for _ in range(n):
        vals.append(linear % G.order)
        linear //= G.order
    return QiVerdict(holds=False, counterexample=tuple(reversed(vals)))


# shipped quasi-identities, usable in any group
SHIPPED_QI = {
    "involution-free": "x^2 = 1 => x = 1",
    "self-commutator": "x*[x,y]^-1 = 1 => x = 1",
    "double-inversion": "y^(2)^x*y^2 = 1 & x^(2)^y*x^2 = 1 => x = 1",
}


def qi_from_presentation(relators, target: Word, generators=None) -> QuasiIdentity:
    """Hypotheses from relators, conclusion from the target word.

    The target must be spelled in the declared generators (by default the
    union of all names appearing in the relators and the target).
    """
    relators = tuple(_require_coefficient_free(w) for w in relators)
    target = _require_coefficient_free(target)
    if generators is not None:
        declared = tuple(generators)
        used = set()
        for w in (*relators, target):
            used |= set(w.unknowns)
        extra = used - set(declared)
        if extra:
            raise GeneratorMismatch(f"words use undeclared generators {sorted(extra)}")
    else:
        seen: list[str] = []
        for w in (*relators, target):
            for name in w.unknowns:
                if name not in seen:
                    seen.append(name)
        declared = tuple(seen)
    return QuasiIdentity(declared, relators, target)


# ---------------------------------------------------------------------------
# the separating-system builder


@dataclass(frozen=True)
class SeparatingSystem:
    """A system over G, solvable in the host K, refuted wherever qi holds."""

    system: EquationSystem
    witness: Witness
    qi: QuasiIdentity

    def to_json(self) -> str:
        host = self.witness.overgroup
        return json.dumps(
            {
                "system": self.system.to_text(),
                "overgroup": getattr(host, "name", "") or "",
                "witness": list(self.witness.solution),
            },
            sort_keys=True,
        )


def build_separating_system(
    qi: QuasiIdentity,
    H: GroupTable,
    witness_values,
    G: GroupTable,
    g: int,
    K: GroupTable,
    embed_g: Homomorphism,
    embed_h: Homomorphism,
) -> SeparatingSystem:
    """Assemble {hypotheses = 1, prod_i v^(+-z_i) = g} with its K-witness.

    ``witness_values`` must violate the quasi-identity in H: hypotheses
    hold, conclusion evaluates to some h != 1.  Conjugators z_i come from a
    shortest conjugate expression of g inside the normal closure of the
    embedded h in K; their discovery order fixes the product order.
    """
    G.check_element(g)
    if g == G.identity:
        raise TrivialElement("target element g must be nontrivial")
    for emb, src, tgt in ((embed_g, G, K), (embed_h, H, K)):
        if emb.source is not src or emb.target is not tgt:
            raise WitnessInvalid("embedding endpoints do not match the given groups")
        rep = verify_map(emb)
        if not rep.multiplicative or not rep.injective:
            raise VerificationFailed("an embedding failed verification")

    values = tuple(int(v) for v in witness_values)
    if len(values) != len(qi.variables):
        raise WitnessInvalid(
            f"expected {len(qi.variables)} witness values, got {len(values)}"
        )
    asg_h = Assignment(H, dict(zip(qi.variables, values)))
    for w in qi.hypotheses:
        if evaluate(w, asg_h) != H.identity:
            raise WitnessInvalid("witness values do not satisfy a hypothesis in H")
    h = evaluate(qi.conclusion, asg_h)
    if h == H.identity:
        raise WitnessInvalid("witness values satisfy the conclusion; no violation")

    h_k = int(embed_h.map[h])
    g_k = int(embed_g.map[g])
    expr = express_in_normal_closure(K, h_k, g_k)
    if expr is None:
        raise NotInNormalClosure(
            "g does not lie in the normal closure of the violated conclusion in K"
        )

    z_names = []
    existing = set(qi.variables)
    for i in range(1, len(expr.factors) + 1):
        name = f"z{i}"
        while name in existing:
            name += "_"
        z_names.append(name)
        existing.add(name)

    v_g = qi.conclusion.rebind(G)
    product = Word(G, ())
    for (sign, _), z in zip(expr.factors, z_names):
        piece = v_g if sign > 0 else v_g.inverse()
        product = product * piece.conjugate(letter_word(z, group=G))
    final = product * coeff_word(G, g).inverse()
    system = EquationSystem(
        G,
        tuple(w.rebind(G) for w in qi.hypotheses) + (final,),
        tuple(qi.variables) + tuple(z_names),
    )

    solution = tuple(int(embed_h.map[v]) for v in values) + tuple(
        z for (_, z) in expr.factors
    )
    witness = Witness(K, embed_g, solution)
    if not verify_witness(system, witness):
        raise VerificationFailed("assembled separating witness failed re-evaluation")
    return SeparatingSystem(system=system, witness=witness, qi=qi)


def _z_word(G: GroupTable, name: str) -> Word:
    from .words import letter_word

    return letter_word(name, group=G)
