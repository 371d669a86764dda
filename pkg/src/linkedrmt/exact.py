"""Exact spectral moments of companion ensembles and their limit combinatorics.

Two independent routes to the same rational numbers:

* :func:`companion_moment_exact` expands E[Tr H^m] of the K x K companion
  ensemble into cyclic products and evaluates each one with the Isserlis
  pairing sum over the companion's covariance structure.
* :func:`limit_moment_via_matchings` counts, pattern by pattern, the pair
  matchings that survive the N -> oo limit of the real f-linked ensemble,
  using only the generic-diagonal :func:`~linkedrmt.classes.pair_compatibility_table`.

All arithmetic is in Python integers and :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .classes import EntryClassMap, build_companion_classes, pair_compatibility_table
from .linkfn import LinkFunction

BUDGET = 10**9


class BudgetExceededError(ValueError):
    """The requested enumeration is larger than :data:`BUDGET` elementary steps."""


def double_factorial(n: int) -> int:
    """n!! with the conventions (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _check_budget(K: int, m: int) -> None:
    steps = K**m * double_factorial(m - 1)
    if steps > BUDGET:
        raise BudgetExceededError(
            f"K^m * (m-1)!! = {steps} exceeds the budget of {BUDGET} steps (K={K}, m={m})"
        )


# ---------------------------------------------------------------- patterns

def _necklaces(n: int, k: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Lexicographically least rotations of length-n words over k letters,
    with the size of each rotation orbit (FKM algorithm)."""
    a = [0] * (n + 1)

    def gen(t: int, p: int):
        if t > n:
            if n % p == 0:
                yield tuple(a[1:]), p
            return
        a[t] = a[t - p]
        yield from gen(t + 1, p)
        for j in range(a[t - p] + 1, k):
            a[t] = j
            yield from gen(t + 1, t)

    yield from gen(1, 1)


def enumerate_patterns(k: int, length: int, reduced: bool = False):
    """All k**length residue tuples.

    With ``reduced=True`` yields ``(representative, multiplicity)`` pairs, one
    per orbit under cyclic rotation.
    """
    if k < 1 or length < 1:
        raise ValueError("need k >= 1 and length >= 1")
    if k**length > BUDGET:
        raise BudgetExceededError(f"k^length = {k**length} exceeds the budget of {BUDGET}")
    if reduced:
        return _necklaces(length, k)
    return itertools.product(range(k), repeat=length)


# ---------------------------------------------------------------- Isserlis

def isserlis_expectation(cov) -> int:
    """Sum over all pair partitions of the product of pairwise covariances.

    Pairs the lowest unpaired index with every remaining one, recursively.
    """
    cov = [[int(x) for x in row] for row in np.asarray(cov).tolist()]
    n = len(cov)
    if any(len(row) != n for row in cov):
        raise ValueError("covariance must be square")
    if any(cov[i][j] != cov[j][i] for i in range(n) for j in range(i)):
        raise ValueError("covariance must be symmetric")
    if n % 2:
        warnings.warn("odd number of Gaussian factors; expectation is 0", stacklevel=2)
        return 0

    def rec(rest: tuple[int, ...]) -> int:
        if not rest:
            return 1
        i, others = rest[0], rest[1:]
        total = 0
        for pos, j in enumerate(others):
            w = cov[i][j]
            if w:
                total += w * rec(others[:pos] + others[pos + 1:])
        return total

    return rec(tuple(range(n)))


def _count_pairings(adj: Sequence[int], mask: int) -> int:
    """Perfect matchings of the vertex set ``mask`` in the 0/1 graph ``adj`` (bitmasks)."""
    if not mask:
        return 1
    low = mask & -mask
    i = low.bit_length() - 1
    rest = mask ^ low
    cand = adj[i] & rest
    total = 0
    while cand:
        lb = cand & -cand
        total += _count_pairings(adj, rest ^ lb)
        cand ^= lb
    return total


# ---------------------------------------------------------------- companion route

def _entry_table(cmap: EntryClassMap):
    """Per position (class id, conjugated, real) as nested lists for fast lookup."""
    cid = cmap.class_id.tolist()
    conj = cmap.conjugated.tolist()
    real = cmap.class_is_real.tolist()
    return [[(cid[i][j], conj[i][j], real[cid[i][j]]) for j in range(cmap.N)]
            for i in range(cmap.N)]


def _adjacency(table, p: Sequence[int]) -> list[int]:
    n = len(p)
    ents = [table[p[l]][p[(l + 1) % n]] for l in range(n)]
    adj = [0] * n
    for l in range(n):
        cl, jl, rl = ents[l]
        for t in range(l + 1, n):
            ct, jt, _ = ents[t]
            if cl == ct and (rl or jl != jt):
                adj[l] |= 1 << t
                adj[t] |= 1 << l
    return adj


def cyclic_covariance(cmap: EntryClassMap, p: Sequence[int]) -> np.ndarray:
    """0/1 matrix of E[x_l x_t] for the factors x_l = c[p_l, p_{l+1}] of a cyclic product."""
    if any(not 0 <= r < cmap.N for r in p):
        raise ValueError(f"pattern entries must lie in [0, {cmap.N})")
    adj = _adjacency(_entry_table(cmap), p)
    n = len(p)
    return np.array([[(adj[l] >> t) & 1 for t in range(n)] for l in range(n)], dtype=np.int64)


def _companion_chunk(table, items) -> int:
    total = 0
    for p, mult in items:
        n = len(p)
        total += mult * _count_pairings(_adjacency(table, p), (1 << n) - 1)
    return total


def _companion_chunk_remote(args) -> int:
    k, table_rows, K, items = args
    f = LinkFunction(k, np.array(table_rows))
    return _companion_chunk(_entry_table(build_companion_classes(f, K)), items)


def companion_cyclic_sum(f: LinkFunction, K: int, m: int, reduced: bool = True,
                         workers: int = 1) -> int:
    """sum over index tuples in [0,K)^m of E[c_{i1 i2} ... c_{im i1}] for the K x K companion."""
    _check_budget(K, m)
    cmap = build_companion_classes(f, K)
    if reduced:
        items = list(enumerate_patterns(K, m, reduced=True))
    else:
        items = [(p, 1) for p in enumerate_patterns(K, m)]
    if workers <= 1 or len(items) < 1000:
        return _companion_chunk(_entry_table(cmap), items)
    chunks = [items[i::workers] for i in range(workers)]
    args = [(f.k, f.table.tolist(), K, c) for c in chunks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return sum(ex.map(_companion_chunk_remote, args))


def companion_moment_exact(f: LinkFunction, K: int, m: int, reduced: bool = True,
                           workers: int = 1) -> Fraction:
    """E[nu^{(m)}] of the K x K complex companion ensemble of f, exactly."""
    if m < 0:
        raise ValueError("moment order must be non-negative")
    if K % f.k:
        raise ValueError(f"k={f.k} must divide K={K}")
    if m == 0:
        return Fraction(1)
    if m % 2:
        return Fraction(0)
    total = companion_cyclic_sum(f, K, m, reduced=reduced, workers=workers)
    return Fraction(total, K ** (1 + m // 2))


# ---------------------------------------------------------------- matching route

def count_limit_matchings(p: Sequence[int], ok: np.ndarray, k: int) -> int:
    """Pair matchings of the cyclic positions of ``p`` whose every pair sits on
    transposed diagonals (r_l - r_{l+1} = -(r_t - r_{t+1}) mod k) and is
    link-compatible."""
    n = len(p)
    if n % 2:
        return 0
    adj = [0] * n
    for l in range(n):
        a, b = p[l], p[(l + 1) % n]
        for t in range(l + 1, n):
            c, d = p[t], p[(t + 1) % n]
            if (b - a + d - c) % k == 0 and ok[a, b, c, d]:
                adj[l] |= 1 << t
                adj[t] |= 1 << l
    return _count_pairings(adj, (1 << n) - 1)


def limit_moment_via_matchings(f: LinkFunction, m: int, reduced: bool = False) -> Fraction:
    """lim E[nu^{(m)}] of the real f-linked family, from surviving pair matchings."""
    if m < 0:
        raise ValueError("moment order must be non-negative")
    if m == 0:
        return Fraction(1)
    if m % 2:
        return Fraction(0)
    k = f.k
    _check_budget(k, m)
    ok = pair_compatibility_table(f).ok
    if reduced:
        total = sum(mult * count_limit_matchings(p, ok, k)
                    for p, mult in enumerate_patterns(k, m, reduced=True))
    else:
        total = sum(count_limit_matchings(p, ok, k) for p in enumerate_patterns(k, m))
    return Fraction(total, k ** (1 + m // 2))


# ---------------------------------------------------------------- literal per-pattern count

@dataclass(frozen=True)
class DifferenceProfile:
    """Positions j of a cyclic pattern grouped by d_j = r_j - r_{j+1} mod k.

    ``S[r]`` holds positions with d_j = r and ``S_bar[r]`` those with d_j = -r,
    for 1 <= r <= ceil(k/2) - 1; ``S0`` has d_j = 0 and ``S_half`` has
    d_j = k/2 (always empty for odd k).
    """

    k: int
    S0: tuple[int, ...]
    S_half: tuple[int, ...]
    S: dict
    S_bar: dict

    @property
    def balanced(self) -> bool:
        return (len(self.S0) % 2 == 0 and len(self.S_half) % 2 == 0
                and all(len(self.S[r]) == len(self.S_bar[r]) for r in self.S))


def difference_profile(p: Sequence[int], k: int) -> DifferenceProfile:
    n = len(p)
    diffs = [(p[j] - p[(j + 1) % n]) % k for j in range(n)]
    half = k // 2 if k % 2 == 0 else None
    upper = math.ceil(k / 2) - 1
    S = {r: tuple(j for j, d in enumerate(diffs) if d == r) for r in range(1, upper + 1)}
    S_bar = {r: tuple(j for j, d in enumerate(diffs) if d == (-r) % k) for r in range(1, upper + 1)}
    S0 = tuple(j for j, d in enumerate(diffs) if d == 0)
    S_half = tuple(j for j, d in enumerate(diffs) if d == half) if half is not None else ()
    return DifferenceProfile(k, S0, S_half, S, S_bar)


def paper_matching_count(p: Sequence[int], k: int) -> int:
    """(2n0-1)!! (2n_half-1)!! prod n_r!, counting by diagonal differences only.

    This ignores whether the link function actually lets transposed entries be
    equal, so for some (f, pattern) pairs it exceeds :func:`count_limit_matchings`.
    Kept as a diagnostic.
    """
    if len(p) % 2:
        raise ValueError("pattern length must be even")
    prof = difference_profile(p, k)
    if not prof.balanced:
        return 0
    out = double_factorial(len(prof.S0) - 1) * double_factorial(len(prof.S_half) - 1)
    for r in prof.S:
        out *= math.factorial(len(prof.S[r]))
    return out


# ---------------------------------------------------------------- bounds

def moment_bound(k: int, m: int) -> int:
    """k^{m/2-1} (m-1)!!: the cap on the m-th companion moment (m even, m >= 2)."""
    if m < 2 or m % 2:
        raise ValueError(f"moment bound needs an even order m >= 2, got {m}")
    return k ** (m // 2 - 1) * double_factorial(m - 1)


def carleman_partial_sums(k: int, M: int) -> list[float]:
    """Partial sums of bound(k, m)^(-1/m) for m = 2, 4, ..., 2M."""
    if M < 1:
        raise ValueError("M must be >= 1")
    out, acc = [], 0.0
    for j in range(1, M + 1):
        m = 2 * j
        acc += math.exp(-math.log(moment_bound(k, m)) / m)
        out.append(acc)
    return out


def exact_report(f: LinkFunction, K: int, orders: Sequence[int], method: str = "isserlis",
                 workers: int = 1) -> dict:
    """Exact moments in the report layout used by the CLI."""
    import time

    t0 = time.perf_counter()
    rows = []
    for m in orders:
        if method == "isserlis":
            v = companion_moment_exact(f, K, m, workers=workers)
        elif method == "matching":
            if K != f.k:
                raise ValueError("the matching method computes the limit moment; use K = k")
            v = limit_moment_via_matchings(f, m)
        else:
            raise ValueError(f"unknown method {method!r}")
        rows.append({"m": m, "numerator": v.numerator, "denominator": v.denominator,
                     "decimal": float(v)})
    return {"link": f.descriptor, "K": K, "orders": rows, "method": method,
            "elapsed_ms": round((time.perf_counter() - t0) * 1000, 3)}
