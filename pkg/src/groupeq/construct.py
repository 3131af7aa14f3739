"""Constructors for every witness group the toolkit uses.

Atomic families: cyclic, dihedral, symmetric/alternating (degree <= 5),
quaternion, unitriangular 3x3 matrices mod n, and the affine line over a
prime field.  Composites: direct, semidirect, wreath-by-cyclic-top, and
central products.  Wreath products too large to tabulate are kept as
packed-coordinate :class:`WreathCyclic` objects that expose the same
``order / identity / mul / inv`` surface as a table.
"""

from __future__ import annotations

import functools
import re
from itertools import permutations

import numpy as np

from .errors import (
    ActionNotAutomorphic,
    NonCentralIdentification,
    OrderMismatch,
    UnsupportedSize,
    VerificationFailed,
)
from .groups import (
    GroupTable,
    Homomorphism,
    center,
    element_order,
    validate_group,
    verify_map,
)

TABLE_CAP = 5000

# ---------------------------------------------------------------------------
# atomic constructors


def _table_from(elements, mult) -> np.ndarray:
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(elements):
        row = table[i]
        for j, b in enumerate(elements):
            row[j] = index[mult(a, b)]
    return table


def cyclic(n: int) -> GroupTable:
    if n < 1:
        raise UnsupportedSize("cyclic order must be >= 1")
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    names = ["e"] + [f"g{i}" if i > 1 else "g" for i in range(1, n)]
    tags = {"g": 1, "a": 1} if n > 1 else {}
    return validate_group(table, name=f"Z{n}", names=names, tags=tags)


def dihedral(n: int) -> GroupTable:
    """Symmetries of the regular n-gon, order 2n; elements r^i f^j."""
    if n < 1:
        raise UnsupportedSize("dihedral parameter must be >= 1")
    elements = [(i, j) for j in (0, 1) for i in range(n)]

    def mult(a, b):
        i1, j1 = a
        i2, j2 = b
        return ((i1 + (i2 if j1 == 0 else -i2)) % n, j1 ^ j2)

    names = [("e" if i == 0 else "r" if i == 1 else f"r{i}") + ("f" if j else "")
             for (i, j) in elements]
    names = [nm if nm != "ef" else "f" for nm in names]
    tags = {"f": n}
    if n > 1:
        tags.update({"r": 1, "a": 1})
        if n % 2 == 0:
            tags["g"] = n // 2
    else:
        tags["a"] = n
    return validate_group(_table_from(elements, mult), name=f"D{n}", names=names, tags=tags)


def _compose(p, q):
    # left-to-right: apply p first, then q
    return tuple(q[x] for x in p)


def _perm_parity(p) -> int:
    seen = [False] * len(p)
    parity = 0
    for i in range(len(p)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def _cycle_name(p) -> str:
    seen = [False] * len(p)
    parts = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        parts.append("(" + " ".join(str(x + 1) for x in cyc) + ")")
    return "".join(parts) if parts else "e"


def _perm_group(m: int, even_only: bool, name: str) -> GroupTable:
    if m < 1 or m > 5:
        raise UnsupportedSize("permutation degree limited to 1..5")
    elements = [p for p in permutations(range(m)) if not even_only or _perm_parity(p) == 0]
    elements.sort()
    index = {p: i for i, p in enumerate(elements)}
    tags = {}
    if m >= 2 and not even_only:
        tags["t"] = index[(1, 0) + tuple(range(2, m))]
    if m >= 3:
        tags["c3"] = index[(1, 2, 0) + tuple(range(3, m))]
        tags["a"] = tags.get("t", tags["c3"])
    if m >= 4:
        tags["dd"] = index[(1, 0, 3, 2) + tuple(range(4, m))]
    if "t" in tags and "a" not in tags:
        tags["a"] = tags["t"]
    names = [_cycle_name(p) for p in elements]
    return validate_group(_table_from(elements, _compose), name=name, names=names, tags=tags)


def symmetric(m: int) -> GroupTable:
    return _perm_group(m, even_only=False, name=f"S{m}")


def alternating(m: int) -> GroupTable:
    return _perm_group(m, even_only=True, name=f"A{m}")


def quaternion() -> GroupTable:
    """Q8 as the unit quaternions +-1, +-i, +-j, +-k."""
    units = {
        "e": (1, 0, 0, 0), "m1": (-1, 0, 0, 0),
        "i": (0, 1, 0, 0), "mi": (0, -1, 0, 0),
        "j": (0, 0, 1, 0), "mj": (0, 0, -1, 0),
        "k": (0, 0, 0, 1), "mk": (0, 0, 0, -1),
    }
    elements = list(units.values())
    names = list(units)

    def mult(a, b):
        w1, x1, y1, z1 = a
        w2, x2, y2, z2 = b
        return (
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    tags = {"i": 2, "j": 4, "k": 6, "g": 1, "a": 2}
    return validate_group(_table_from(elements, mult), name="Q8", names=names, tags=tags)


def heisenberg_mod(n: int) -> GroupTable:
    """Unitriangular 3x3 matrices over Z_n, encoded as (x, y, z) triples.

    Tags: a is the (1,2)-elementary matrix, b the (2,3)-elementary, c the
    (1,3)-elementary; [a, b] = c and c has order n.
    """
    if n < 1:
        raise UnsupportedSize("heisenberg modulus must be >= 1")
    elements = [(x, y, z) for x in range(n) for y in range(n) for z in range(n)]

    def mult(a, b):
        x1, y1, z1 = a
        x2, y2, z2 = b
        return ((x1 + x2) % n, (y1 + y2) % n, (z1 + z2 + x1 * y2) % n)

    index = {e: i for i, e in enumerate(elements)}
    names = ["e" if e == (0, 0, 0) else f"m{e[0]}_{e[1]}_{e[2]}" for e in elements]
    tags = {}
    if n > 1:
        tags = {
            "a": index[(1, 0, 0)],
            "b": index[(0, 1, 0)],
            "c": index[(0, 0, 1)],
            "g": index[(0, 0, 1)],
        }
    return validate_group(_table_from(elements, mult), name=f"H{n}", names=names, tags=tags)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def agl1(p: int) -> GroupTable:
    """Affine maps x -> u*x + v over Z_p, composed left to right; order p(p-1)."""
    if not _is_prime(p):
        raise UnsupportedSize(f"agl1 needs a prime modulus, got {p}")
    elements = [(u, v) for u in range(1, p) for v in range(p)]

    def mult(a, b):
        u1, v1 = a
        u2, v2 = b
        return ((u1 * u2) % p, (u2 * v1 + v2) % p)

    index = {e: i for i, e in enumerate(elements)}
    names = [f"u{u}v{v}" for (u, v) in elements]
    tags = {"t": index[(1, 1 % p)], "g": index[(1, 1 % p)], "a": index[(1, 1 % p)]}
    if p > 2:
        tags["m2"] = index[(2, 0)]
    return validate_group(_table_from(elements, mult), name=f"AGL1_{p}", names=names, tags=tags)


_ATOMIC = {
    "cyclic": cyclic,
    "dihedral": dihedral,
    "symmetric": symmetric,
    "alternating": alternating,
    "quaternion": quaternion,
    "heisenberg_mod": heisenberg_mod,
    "agl1": agl1,
}


def build_atomic(kind: str, *params: int) -> GroupTable:
    """Dispatch over the atomic constructor family."""
    if kind not in _ATOMIC:
        raise UnsupportedSize(f"unknown atomic constructor {kind!r}")
    return _ATOMIC[kind](*params)


# ---------------------------------------------------------------------------
# wreath products, packed representation


class WreathCyclic:
    """G wr Z_n: base G^n extended by the coordinate shift, packed indices.

    Element x encodes base values b_0..b_{n-1} (coordinate 0 most
    significant) and a shift s as x = (sum b_u * |G|^(n-1-u)) * n + s.
    Multiplication follows (f1; s1)(f2; s2) = (f1 * shifted f2; s1 + s2)
    where the shifted copy reads f2 at coordinate u - s1.
    """

    def __init__(self, base: GroupTable, top: int):
        if top < 1:
            raise UnsupportedSize("wreath top order must be >= 1")
        self.base = base
        self.top = top
        self.order = base.order ** top * top
        self.identity = 0
        self._place = base.order ** np.arange(top - 1, -1, -1, dtype=np.int64)

    @property
    def name(self) -> str:
        return f"{self.base.name}wrZ{self.top}"

    @property
    def shift(self) -> int:
        return self.encode([self.base.identity] * self.top, 1 % self.top)

    def decode(self, x: int) -> tuple[list[int], int]:
        s = x % self.top
        r = x // self.top
        digits = [(r // int(p)) % self.base.order for p in self._place]
        return digits, s

    def encode(self, digits, s: int) -> int:
        r = 0
        for d in digits:
            r = r * self.base.order + int(d)
        return r * self.top + (s % self.top)

    def mul(self, i: int, j: int) -> int:
        di, si = self.decode(i)
        dj, sj = self.decode(j)
        t = self.base.table
        dk = [int(t[di[u], dj[(u - si) % self.top]]) for u in range(self.top)]
        return self.encode(dk, si + sj)

    def inv(self, i: int) -> int:
        di, si = self.decode(i)
        inv = self.base.inverse
        dk = [int(inv[di[(u + si) % self.top]]) for u in range(self.top)]
        return self.encode(dk, -si)

    def base_embedding_map(self, pattern) -> np.ndarray:
        """Map array g -> base tuple where coordinate u holds g iff pattern[u]."""
        out = np.empty(self.base.order, dtype=np.int64)
        for g in range(self.base.order):
            digits = [g if pattern[u] else self.base.identity for u in range(self.top)]
            out[g] = self.encode(digits, 0)
        return out

    def embeddings(self, prefix_copies: int | None = None) -> dict[str, Homomorphism]:
        n = self.top
        out = {
            "first_factor": Homomorphism(
                self.base, self, self.base_embedding_map([u == 0 for u in range(n)]),
                embedding=True, name="first_factor"),
            "diagonal": Homomorphism(
                self.base, self, self.base_embedding_map([True] * n),
                embedding=True, name="diagonal"),
        }
        if prefix_copies is not None:
            if not 1 <= prefix_copies <= n:
                raise UnsupportedSize("prefix copies must lie in 1..top")
            out["prefix"] = Homomorphism(
                self.base, self, self.base_embedding_map([u < prefix_copies for u in range(n)]),
                embedding=True, name="prefix")
        return out

    def materialize(self) -> GroupTable:
        """Tabulate the full multiplication table (vectorized per row)."""
        if self.order > TABLE_CAP:
            raise UnsupportedSize(
                f"wreath order {self.order} exceeds table cap {TABLE_CAP}"
            )
        n, m, N = self.top, self.base.order, self.order
        E = np.arange(N, dtype=np.int64)
        S = E % n
        R = E // n
        D = np.empty((N, n), dtype=np.int64)
        for u in range(n):
            D[:, u] = (R // int(self._place[u])) % m
        table = np.empty((N, N), dtype=np.int32)
        bt = self.base.table
        for i in range(N):
            si = int(S[i])
            perm = (np.arange(n) - si) % n
            cols = D[:, perm]
            digs = bt[D[i][None, :], cols]
            enc = (digs * self._place[None, :]).sum(axis=1) * n + (si + S) % n
            table[i] = enc
        return validate_group(table, name=self.name, tags={"shift": int(self.shift)})


# ---------------------------------------------------------------------------
# composite constructors


def direct_product(A: GroupTable, B: GroupTable):
    nb = B.order
    table = (A.table[:, None, :, None].astype(np.int64) * nb
             + B.table[None, :, None, :]).reshape(A.order * nb, A.order * nb)
    G = validate_group(table, name=f"{A.name}x{B.name}")
    left = Homomorphism(A, G, np.arange(A.order, dtype=np.int64) * nb + B.identity,
                        embedding=True, name="left")
    right = Homomorphism(B, G, A.identity * nb + np.arange(nb, dtype=np.int64),
                         embedding=True, name="right")
    return G, {"left": left, "right": right}


def _check_action(N: GroupTable, H: GroupTable, action) -> np.ndarray:
    act = np.asarray(action, dtype=np.int64)
    if act.shape != (H.order, N.order):
        raise ActionNotAutomorphic(
            f"action shape {act.shape} does not match |H| x |N|"
        )
    for h in range(H.order):
        perm = act[h]
        if sorted(perm) != list(range(N.order)):
            raise ActionNotAutomorphic(f"action of {h} is not a permutation")
        if not np.array_equal(perm[N.table], N.table[perm[:, None], perm[None, :]]):
            raise ActionNotAutomorphic(f"action of {h} is not an automorphism")
    for h1 in range(H.order):
        composed = act[h1][act]  # composed[h2] = act[h1] after act[h2]
        if not np.array_equal(act[H.table[h1]], composed):
            raise ActionNotAutomorphic(
                f"action is not a homomorphism at top element {h1}"
            )
    return act


def semidirect_product(N: GroupTable, H: GroupTable, action):
    """N x| H with (n1, h1)(n2, h2) = (n1 * act[h1](n2), h1 h2).

    ``action`` is an |H| x |N| array of permutations satisfying
    act[h1 h2] = act[h1] composed after act[h2].
    """
    act = _check_action(N, H, action)
    nh = H.order

    def enc(n, h):
        return n * nh + h

    size = N.order * nh
    table = np.empty((size, size), dtype=np.int32)
    for n1 in range(N.order):
        for h1 in range(nh):
            row = table[enc(n1, h1)]
            for n2 in range(N.order):
                moved = act[h1][n2]
                prod_n = N.table[n1, moved]
                for h2 in range(nh):
                    row[enc(n2, h2)] = enc(prod_n, H.table[h1, h2])
    G = validate_group(table, name=f"{N.name}sd{H.name}")
    normal = Homomorphism(N, G, np.arange(N.order, dtype=np.int64) * nh + H.identity,
                          embedding=True, name="normal")
    top = Homomorphism(H, G, N.identity * nh + np.arange(nh, dtype=np.int64),
                       embedding=True, name="top")
    return G, {"normal": normal, "top": top}


def wreath_cyclic(G: GroupTable, n: int, prefix_copies: int | None = None):
    """Materialized G wr Z_n with its diagonal/first-factor/prefix embeddings."""
    packed = WreathCyclic(G, n)
    W = packed.materialize()
    homs = {}
    for key, h in packed.embeddings(prefix_copies).items():
        homs[key] = Homomorphism(G, W, h.map, embedding=True, name=key)
    for h in homs.values():
        if not verify_map(h).ok:
            raise VerificationFailed(f"wreath embedding {h.name} failed verification")
    return W, homs


def central_product(H: GroupTable, G: GroupTable, c: int, g: int):
    """(H x G) / <(c, g^-1)> identifying central elements of equal order."""
    H.check_element(c)
    G.check_element(g)
    if c not in center(H):
        raise NonCentralIdentification(f"element {c} is not central in {H.name or 'H'}")
    if g not in center(G):
        raise NonCentralIdentification(f"element {g} is not central in {G.name or 'G'}")
    n = element_order(H, c)
    if n != element_order(G, g):
        raise OrderMismatch(
            f"order of c is {n} but order of g is {element_order(G, g)}"
        )
    nb = G.order
    size = H.order * nb
    prod = (H.table[:, None, :, None].astype(np.int64) * nb
            + G.table[None, :, None, :]).reshape(size, size)
    z = c * nb + G.inv(g)
    ident = H.identity * nb + G.identity
    zpows = [ident]
    cur = ident
    for _ in range(n - 1):
        cur = int(prod[cur, z])
        zpows.append(cur)
    zpows = sorted(set(zpows))  # the cyclic identification subgroup
    orbit = prod[:, zpows]
    coset = orbit.min(axis=1)
    reps = np.unique(coset)
    compress = np.full(size, -1, dtype=np.int64)
    compress[reps] = np.arange(len(reps))
    cid = compress[coset]
    table = cid[prod[reps[:, None], reps[None, :]]].astype(np.int32)
    Q = validate_group(table, name=f"({H.name}o{G.name})")
    left = Homomorphism(H, Q, cid[np.arange(H.order, dtype=np.int64) * nb + G.identity],
                        embedding=True, name="left")
    right = Homomorphism(G, Q, cid[H.identity * nb + np.arange(nb, dtype=np.int64)],
                         embedding=True, name="right")
    for h in (left, right):
        if not verify_map(h).ok:
            raise VerificationFailed(
                f"central product embedding {h.name} failed verification"
            )
    return Q, {"left": left, "right": right}


def build_composite(kind: str, *args, **kwargs):
    """Dispatch over composite constructors; returns (GroupTable, embeddings)."""
    builders = {
        "direct": direct_product,
        "semidirect": semidirect_product,
        "wreath_cyclic": wreath_cyclic,
        "central": central_product,
    }
    if kind not in builders:
        raise UnsupportedSize(f"unknown composite constructor {kind!r}")
    return builders[kind](*args, **kwargs)


# ---------------------------------------------------------------------------
# built-in catalog

CATALOG_REFS = (
    [f"Z{n}" for n in range(1, 13)]
    + [f"D{n}" for n in range(3, 9)]
    + ["S3", "S4", "S5", "A4", "A5", "Q8", "H2", "H3", "AGL1_5", "AGL1_7"]
)

_BUILTIN_RE = re.compile(r"^(Z|D|S|A|H)(\d+)$|^Q8$|^AGL1_(\d+)$")


@functools.lru_cache(maxsize=None)
def builtin(ref: str) -> GroupTable:
    """Resolve a catalog name like Z6, D4, S5, A5, Q8, H2 or AGL1_7."""
    name = ref.split(":", 1)[1] if ref.startswith("builtin:") else ref
    m = _BUILTIN_RE.match(name)
    if not m:
        raise UnsupportedSize(f"unknown builtin group {name!r}")
    if name == "Q8":
        return quaternion()
    if name.startswith("AGL1_"):
        return agl1(int(m.group(3)))
    family, param = m.group(1), int(m.group(2))
    builder = {"Z": cyclic, "D": dihedral, "S": symmetric, "A": alternating,
               "H": heisenberg_mod}[family]
    return builder(param)


def catalog_groups(max_order: int | None = None) -> list[GroupTable]:
    out = [builtin(ref) for ref in CATALOG_REFS]
    if max_order is not None:
        out = [g for g in out if g.order <= max_order]
    return out
