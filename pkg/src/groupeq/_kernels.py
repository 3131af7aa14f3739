"""Hot scan kernels: numba-compiled fast path with a pure-numpy fallback.

Two operations dominate runtime: exhaustive associativity validation of a
multiplication table, and the scan of an assignment space K^n evaluating
straight-line word programs against it.  Both exist in two implementations
that return bit-identical results:

* ``*_nb`` -- numba ``@njit`` loops (compiled lazily, cached on disk);
* ``*_np`` -- vectorized numpy over batches of linear indices.

The active backend is chosen per call by :func:`backend`: set
``GEQ_BACKEND=numpy`` to force the fallback, ``GEQ_BACKEND=numba`` to insist
on numba (raises if unavailable); unset, numba is used when importable.

Word programs are straight-line opcode arrays.  For each step ``t``:
``codes[t] == 0`` multiplies the accumulator by the fixed element
``args[t]``; ``1`` multiplies by the value of unknown ``args[t]``;
``2`` multiplies by the inverse of that value.  A system of ``p`` programs
is concatenated with ``bounds`` holding the ``p + 1`` offsets.

Linear index ``L`` decodes to the assignment with the first unknown as the
most significant digit, so ascending ``L`` is ascending lexicographic order
of value tuples.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "GEQ_BACKEND"
_BATCH = 1 << 16

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


def backend() -> str:
    """Resolve the active backend name, honoring the env flag per call."""
    choice = os.environ.get(_ENV_FLAG, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not _HAVE_NUMBA:
            raise RuntimeError("GEQ_BACKEND=numba but numba is not importable")
        return "numba"
    return "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# associativity


def _assoc_violation_py(table: np.ndarray) -> int:
    n = table.shape[0]
    for i in range(n):
        lhs = table[table[i], :]
        rhs = table[i][table]
        bad = lhs != rhs
        if bad.any():
            j, k = np.argwhere(bad)[0]
            return i * n * n + int(j) * n + int(k)
    return -1


if _HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _assoc_violation_nb(table):  # pragma: no cover - exercised via wrapper
        n = table.shape[0]
        for i in range(n):
            for j in range(n):
                ij = table[i, j]
                for k in range(n):
                    if table[ij, k] != table[i, table[j, k]]:
                        return np.int64(i) * n * n + np.int64(j) * n + np.int64(k)
        return np.int64(-1)


def assoc_violation(table: np.ndarray) -> tuple[int, int, int] | None:
    """First triple (i, j, k) violating associativity, scanning row-major."""
    table = np.ascontiguousarray(table, dtype=np.int32)
    if backend() == "numba":
        enc = int(_assoc_violation_nb(table))
    else:
        enc = _assoc_violation_py(table)
    if enc < 0:
        return None
    n = table.shape[0]
    return enc // (n * n), (enc // n) % n, enc % n


def assoc_violation_sampled(
    table: np.ndarray, samples: int, seed: int = 0
) -> tuple[int, int, int] | None:
    """Check `samples` seeded random triples; used above the exhaustive cap."""
    n = table.shape[0]
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=samples)
    j = rng.integers(0, n, size=samples)
    k = rng.integers(0, n, size=samples)
    bad = table[table[i, j], k] != table[i, table[j, k]]
    if bad.any():
        at = int(np.argmax(bad))
        return int(i[at]), int(j[at]), int(k[at])
    return None


# ---------------------------------------------------------------------------
# assignment-space scans


if _HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _scan_nb(
        table,
        inv,
        identity,
        n_unknowns,
        codes,
        args,
        bounds,
        negate_last,
        find_all,
        start,
        stop,
    ):  # pragma: no cover - exercised via wrapper
        order = table.shape[0]
        place = np.empty(n_unknowns, np.int64)
        v = np.int64(1)
        for u in range(n_unknowns - 1, -1, -1):
            place[u] = v
            v *= order
        vals = np.empty(n_unknowns, np.int64)
        out = np.empty(256, np.int64)
        count = 0
        nprog = bounds.shape[0] - 1
        for L in range(start, stop):
            for u in range(n_unknowns):
                vals[u] = (L // place[u]) % order
            ok = True
            for p in range(nprog):
                acc = identity
                for t in range(bounds[p], bounds[p + 1]):
                    c = codes[t]
                    a = args[t]
                    if c == 0:
                        acc = table[acc, a]
                    elif c == 1:
                        acc = table[acc, vals[a]]
                    else:
                        acc = table[acc, inv[vals[a]]]
                hit = acc == identity
                if negate_last and p == nprog - 1:
                    hit = not hit
                if not hit:
                    ok = False
                    break
            if ok:
                if count == out.shape[0]:
                    grown = np.empty(out.shape[0] * 2, np.int64)
                    grown[:count] = out
                    out = grown
                out[count] = L
                count += 1
                if not find_all:
                    break
        return out[:count]


def _scan_np(
    table,
    inv,
    identity,
    n_unknowns,
    codes,
    args,
    bounds,
    negate_last,
    find_all,
    start,
    stop,
):
    order = table.shape[0]
    place = order ** np.arange(n_unknowns - 1, -1, -1, dtype=np.int64)
    nprog = len(bounds) - 1
    hits = []
    lo = start
    while lo < stop:
        hi = min(lo + _BATCH, stop)
        idx = np.arange(lo, hi, dtype=np.int64)
        vals = [(idx // place[u]) % order for u in range(n_unknowns)]
        mask = np.ones(idx.shape[0], dtype=bool)
        for p in range(nprog):
            if not mask.any():
                break
            acc = np.full(idx.shape[0], identity, dtype=np.int64)
            for t in range(bounds[p], bounds[p + 1]):
                c = codes[t]
                a = args[t]
                if c == 0:
                    acc = table[acc, a]
                elif c == 1:
                    acc = table[acc, vals[a]]
                else:
                    acc = table[acc, inv[vals[a]]]
            ok = acc == identity
            if negate_last and p == nprog - 1:
                ok = ~ok
            mask &= ok
        found = idx[mask]
        if found.size:
            if not find_all:
                return found[:1]
            hits.append(found)
        lo = hi
    if hits:
        return np.concatenate(hits)
    return np.empty(0, dtype=np.int64)


def scan_assignments(
    table: np.ndarray,
    inverse: np.ndarray,
    identity: int,
    n_unknowns: int,
    codes: np.ndarray,
    args: np.ndarray,
    bounds: np.ndarray,
    negate_last: bool = False,
    find_all: bool = True,
    start: int = 0,
    stop: int | None = None,
    jobs: int = 1,
) -> np.ndarray:
    """Scan linear indices [start, stop) and return the matching ones.

    A match means every program evaluates to the identity, except that with
    ``negate_last`` the final program must evaluate to a non-identity
    element (the quasi-identity counterexample semantics).  With
    ``find_all=False`` the scan stops at the first match.  ``jobs > 1``
    partitions the range into contiguous slices whose results are merged in
    slice order, so the output is independent of the job count.
    """
    table = np.ascontiguousarray(table, dtype=np.int32)
    inverse = np.ascontiguousarray(inverse, dtype=np.int32)
    codes = np.ascontiguousarray(codes, dtype=np.int32)
    args = np.ascontiguousarray(args, dtype=np.int32)
    bounds = np.ascontiguousarray(bounds, dtype=np.int64)
    if stop is None:
        stop = int(table.shape[0]) ** n_unknowns
    run = _scan_nb if backend() == "numba" else _scan_np

    def _one(lo: int, hi: int) -> np.ndarray:
        return run(
            table,
            inverse,
            identity,
            n_unknowns,
            codes,
            args,
            bounds,
            negate_last,
            find_all,
            lo,
            hi,
        )

    if jobs <= 1 or not find_all or stop - start < 4 * jobs:
        return _one(start, stop)

    from concurrent.futures import ThreadPoolExecutor

    edges = np.linspace(start, stop, jobs + 1, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(lambda ab: _one(int(ab[0]), int(ab[1])), zip(edges, edges[1:])))
    parts = [p for p in parts if p.size]
    if parts:
        return np.concatenate(parts)
    return np.empty(0, dtype=np.int64)
