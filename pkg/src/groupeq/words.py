"""Words over G * F_n: coefficient tokens interleaved with unknown letters.

A token is either ``Coeff(elem)`` (an element index of the coefficient
group) or ``Letter(name, sign)`` with sign +1 or -1.  The reduced form has
no identity coefficients, no adjacent coefficients, and no adjacent
cancelling letters.  Integer exponents in the DSL expand eagerly into
repeated tokens.

DSL grammar (whitespace insensitive)::

    system   := equation (";" equation)*
    equation := word "=" word
    word     := "1" | factor ("*"? factor)*
    factor   := atom ("^" exp)*
    atom     := coeff | var | "(" word ")" | "[" word "," word "]"
    exp      := signed_integer | "(" signed_integer ")" | atom
    coeff    := "@" name | "@#" index
    var      := name

``u^v`` with a non-integer exponent is the conjugate v^-1 u v, ``[u,v]``
is u^-1 v^-1 u v, and ``u = v`` is stored as the single word u v^-1
equated to the identity.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    CoefficientNotAllowed,
    MissingAssignment,
    MissingSubstitute,
    ParseError,
    UnknownCoefficient,
    ZeroExponentWarning,
)
from .groups import GroupTable, Homomorphism


class Coeff(NamedTuple):
    elem: int


class Letter(NamedTuple):
    name: str
    sign: int


def _reduce_tokens(group: GroupTable | None, tokens) -> tuple:
    out: list = []
    for tok in tokens:
        if isinstance(tok, Coeff):
            if group is None:
                raise CoefficientNotAllowed("coefficient token in a group-free word")
            if tok.elem == group.identity:
                continue
            if out and isinstance(out[-1], Coeff):
                merged = group.mul(out[-1].elem, tok.elem)
                out.pop()
                if merged != group.identity:
                    out.append(Coeff(merged))
            else:
                out.append(tok)
        else:
            if out and isinstance(out[-1], Letter) and out[-1].name == tok.name \
                    and out[-1].sign == -tok.sign:
                out.pop()
            else:
                out.append(tok)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A word over (coeff_group) * F_n.  Construction does not reduce."""

    group: GroupTable | None
    tokens: tuple

    @property
    def arity(self) -> int:
        return len(self.unknowns)

    @property
    def unknowns(self) -> tuple[str, ...]:
        seen: list[str] = []
        for tok in self.tokens:
            if isinstance(tok, Letter) and tok.name not in seen:
                seen.append(tok.name)
        return tuple(seen)

    @property
    def is_reduced(self) -> bool:
        return self.tokens == _reduce_tokens(self.group, self.tokens)

    def reduce(self) -> "Word":
        return Word(self.group, _reduce_tokens(self.group, self.tokens))

    def __mul__(self, other: "Word") -> "Word":
        group = self.group if self.group is not None else other.group
        if other.group is not None and self.group is not None and other.group is not self.group:
            raise CoefficientNotAllowed("cannot multiply words over different groups")
        return Word(group, _reduce_tokens(group, self.tokens + other.tokens))

    def inverse(self) -> "Word":
        inv = []
        for tok in reversed(self.tokens):
            if isinstance(tok, Coeff):
                inv.append(Coeff(self.group.inv(tok.elem)))
            else:
                inv.append(Letter(tok.name, -tok.sign))
        return Word(self.group, _reduce_tokens(self.group, tuple(inv)))

    def conjugate(self, by: "Word") -> "Word":
        return by.inverse() * self * by

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        out = Word(self.group, ())
        for _ in range(abs(k)):
            out = out * base
        return out

    def commutator(self, other: "Word") -> "Word":
        return self.inverse() * other.inverse() * self * other

    def rebind(self, group: GroupTable) -> "Word":
        """Reinterpret the same tokens over another coefficient group."""
        for tok in self.tokens:
            if isinstance(tok, Coeff):
                group.check_element(tok.elem)
        return Word(group, _reduce_tokens(group, self.tokens))

    def to_text(self) -> str:
        if not self.tokens:
            return "1"
        parts = []
        run_name, run_sign, run_len = None, 0, 0

        def flush():
            nonlocal run_name, run_len
            if run_name is not None:
                exp = run_sign * run_len
                parts.append(run_name if exp == 1 else f"{run_name}^{exp}")
                run_name, run_len = None, 0

        for tok in self.tokens:
            if isinstance(tok, Coeff):
                flush()
                parts.append("@" + self.group.element_name(tok.elem))
            else:
                if run_name == tok.name and run_sign == tok.sign:
                    run_len += 1
                else:
                    flush()
                    run_name, run_sign, run_len = tok.name, tok.sign, 1
        flush()
        return "*".join(parts)

    def __str__(self) -> str:
        return self.to_text()


def empty_word(group: GroupTable | None = None) -> Word:
    return Word(group, ())


def coeff_word(group: GroupTable, elem: int) -> Word:
    return Word(group, _reduce_tokens(group, (Coeff(group.check_element(elem)),)))


def letter_word(name: str, sign: int = 1, group: GroupTable | None = None) -> Word:
    return Word(group, (Letter(name, 1 if sign >= 0 else -1),))


def reduce(w: Word) -> Word:
    return w.reduce()


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"=>|[A-Za-z][A-Za-z0-9_]*|\d+|[@#()\[\],^*=;&-]")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            self.toks.append((m.group(), pos))
            pos = m.end()
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def accept(self, tok: str) -> bool:
        if self.peek() == tok:
            self.i += 1
            return True
        return False

    def expect(self, tok: str) -> None:
        if not self.accept(tok):
            raise ParseError(f"expected {tok!r}", self.pos())


_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class _WordParser:
    def __init__(self, scanner: _Scanner, group: GroupTable | None):
        self.s = scanner
        self.group = group

    def _resolve(self, name: str) -> int:
        if self.group is None:
            raise CoefficientNotAllowed(
                "coefficients are not allowed in this context"
            )
        try:
            return self.group.resolve(name)
        except (KeyError, ValueError):
            raise UnknownCoefficient(name) from None

    def parse_word(self) -> Word:
        word = empty_word(self.group)
        while True:
            tok = self.s.peek()
            if tok is None or tok in (")", "]", ",", "=", ";", "&", "=>"):
                break
            if tok == "*":
                self.s.next()
                continue
            word = word * self.parse_factor()
        return word

    def parse_factor(self) -> Word:
        word = self.parse_atom()
        while self.s.accept("^"):
            exp = self.parse_exponent()
            if isinstance(exp, int):
                if exp == 0:
                    warnings.warn(
                        "exponent 0 normalized to the identity", ZeroExponentWarning
                    )
                word = word ** exp
            else:
                word = word.conjugate(exp)
        return word

    def parse_atom(self) -> Word:
        pos = self.s.pos()
        tok = self.s.next()
        if tok == "@":
            nxt = self.s.next()
            if nxt == "#":
                idx = self.s.next()
                if not idx.isdigit():
                    raise ParseError("expected an index after '@#'", pos)
                nxt = "#" + idx
            elif not _NAME_RE.match(nxt):
                raise ParseError("expected a coefficient name after '@'", pos)
            return coeff_word(self.group, self._resolve(nxt))
        if tok == "(":
            inner = self.parse_word()
            self.s.expect(")")
            return inner
        if tok == "[":
            left = self.parse_word()
            self.s.expect(",")
            right = self.parse_word()
            self.s.expect("]")
            return left.commutator(right)
        if tok == "1":
            return empty_word(self.group)
        if _NAME_RE.match(tok):
            return letter_word(tok, group=self.group)
        raise ParseError(f"unexpected token {tok!r}", pos)

    def parse_exponent(self):
        pos = self.s.pos()
        tok = self.s.peek()
        if tok == "-":
            self.s.next()
            digits = self.s.next()
            if not digits.isdigit():
                raise ParseError("expected digits after '-'", pos)
            return -int(digits)
        if tok is not None and tok.isdigit():
            return int(self.s.next())
        if tok == "(":
            save = self.s.i
            self.s.next()
            sign = -1 if self.s.accept("-") else 1
            inner = self.s.peek()
            if inner is not None and inner.isdigit():
                self.s.next()
                if self.s.accept(")"):
                    return sign * int(inner)
            self.s.i = save
        return self.parse_atom()


def parse_word(text: str, coeff_group: GroupTable | None = None) -> Word:
    """Parse a single word; trailing input is an error."""
    s = _Scanner(text)
    w = _WordParser(s, coeff_group).parse_word()
    if s.peek() is not None:
        raise ParseError(f"unexpected trailing token {s.peek()!r}", s.pos())
    return w


def parse_equation(text: str, coeff_group: GroupTable | None = None) -> Word:
    """Parse "u" or "u = v", returning the single word u * v^-1."""
    s = _Scanner(text)
    p = _WordParser(s, coeff_group)
    lhs = p.parse_word()
    if s.accept("="):
        rhs = p.parse_word()
        lhs = lhs * rhs.inverse()
    if s.peek() is not None:
        raise ParseError(f"unexpected trailing token {s.peek()!r}", s.pos())
    return lhs


def parse_system(text: str, coeff_group: GroupTable | None = None) -> tuple[Word, ...]:
    """Parse ";"-separated equations into words equated to the identity."""
    chunks = [c for c in text.split(";") if c.strip()]
    return tuple(parse_equation(c, coeff_group) for c in chunks)


# ---------------------------------------------------------------------------
# evaluation and substitution


@dataclass(frozen=True)
class Assignment:
    """Values for unknowns in a target group, with the coefficient embedding.

    ``embed`` may be None when the word's coefficient group is the target
    itself (or the word is coefficient-free)."""

    target: object
    values: dict
    embed: Homomorphism | None = None

    def value(self, name: str) -> int:
        if name not in self.values:
            raise MissingAssignment(name)
        return int(self.values[name])


def evaluate(w: Word, asg: Assignment) -> int:
    """Left-to-right product of embedded coefficients and assigned letters."""
    target = asg.target
    emb = asg.embed.map if asg.embed is not None else None
    acc = target.identity
    for tok in w.tokens:
        if isinstance(tok, Coeff):
            val = int(emb[tok.elem]) if emb is not None else tok.elem
        else:
            val = asg.value(tok.name)
            if tok.sign < 0:
                val = target.inv(val)
        acc = target.mul(acc, val)
    return acc


def substitute(w: Word, sub: dict, strict: bool = True) -> Word:
    """Replace each letter by its image word (inverted for sign -1)."""
    group = w.group
    for img in sub.values():
        if img.group is not None:
            if group is None:
                group = img.group
            elif img.group is not group:
                raise CoefficientNotAllowed(
                    "substituted words must share the coefficient group"
                )
    out: list = []
    for tok in w.tokens:
        if isinstance(tok, Coeff):
            out.append(tok)
        elif tok.name in sub:
            img = sub[tok.name] if tok.sign > 0 else sub[tok.name].inverse()
            out.extend(img.tokens)
        elif strict:
            raise MissingSubstitute(tok.name)
        else:
            out.append(tok)
    return Word(group, _reduce_tokens(group, tuple(out)))


# ---------------------------------------------------------------------------
# straight-line compilation for the scan kernels


def compile_programs(
    word_list,
    unknown_order: tuple[str, ...],
    embed_map: np.ndarray | None = None,
):
    """Compile words to (codes, args, bounds) opcode arrays for the kernels."""
    pos = {name: i for i, name in enumerate(unknown_order)}
    codes: list[int] = []
    args: list[int] = []
    bounds = [0]
    for w in word_list:
        for tok in w.tokens:
            if isinstance(tok, Coeff):
                codes.append(0)
                args.append(int(embed_map[tok.elem]) if embed_map is not None else tok.elem)
            else:
                if tok.name not in pos:
                    raise MissingAssignment(tok.name)
                codes.append(1 if tok.sign > 0 else 2)
                args.append(pos[tok.name])
        bounds.append(len(codes))
    return (
        np.asarray(codes, dtype=np.int32),
        np.asarray(args, dtype=np.int32),
        np.asarray(bounds, dtype=np.int64),
    )
