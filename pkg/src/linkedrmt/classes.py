"""Entry-equality structure of f-linked ensembles and their complex companions.

Both ensembles are described by an :class:`EntryClassMap`: a labelling of the
N x N positions by the independent random variable each position holds.  The
closure is computed with a parity-tracking disjoint-set union over
(wrapped diagonal, f-value) slots; every position in a slot holds the same
variable, so only transpose links have to be added explicitly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .linkfn import LinkFunction

REAL = "real"
COMPANION = "companion"

REAL_GAUSSIAN = "real-gaussian"
COMPLEX_GAUSSIAN = "complex-gaussian"
GENERIC = "generic"


class ClassConsistencyError(RuntimeError):
    """The computed closure violates a structural invariant (a bug)."""


class _ParityDSU:
    """Union-find where each edge carries a parity bit (0 = equal, 1 = conjugate).

    A component that closes an odd cycle is marked ``odd``: its variable equals
    its own conjugate and must be real.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.parity = [0] * n  # parity relative to parent
        self.odd = [False] * n

    def find(self, x: int) -> tuple[int, int]:
        path = []
        p = 0
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        # path compression; recompute parity to root from the top down
        acc = 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parity[node] = acc
            self.parent[node] = root
        if path:
            p = self.parity[path[0]]
        return root, p

    def union(self, a: int, b: int, par: int = 0) -> None:
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            if pa ^ pb != par:
                self.odd[ra] = True
            return
        self.parent[rb] = ra
        self.parity[rb] = pa ^ pb ^ par
        self.odd[ra] = self.odd[ra] or self.odd[rb]


@dataclass(frozen=True, eq=False)
class EntryClassMap:
    """Partition of the N x N positions into equality classes.

    ``class_id[i, j]`` names the variable at (i, j); ``conjugated[i, j]`` says
    the position holds its conjugate.  Class ids are assigned in row-major order
    of first appearance, and the first position of every class is
    unconjugated.  ``class_is_real[c]`` is True for real-valued classes (all
    classes of a ``real``-kind map).
    """

    N: int
    kind: str
    class_id: np.ndarray = field(repr=False)
    conjugated: np.ndarray = field(repr=False)
    class_is_real: np.ndarray = field(repr=False)

    @property
    def n_classes(self) -> int:
        return len(self.class_is_real)

    def class_of(self, i: int, j: int) -> tuple[int, bool]:
        return int(self.class_id[i, j]), bool(self.conjugated[i, j])

    def class_kind(self, cid: int) -> str:
        if self.kind == REAL:
            return GENERIC
        return REAL_GAUSSIAN if self.class_is_real[cid] else COMPLEX_GAUSSIAN

    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.class_id.ravel(), minlength=self.n_classes)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "class_id", "conjugated", "kind"])
        for i in range(self.N):
            for j in range(self.N):
                cid = int(self.class_id[i, j])
                w.writerow([i, j, cid, int(self.conjugated[i, j]), self.class_kind(cid)])
        return buf.getvalue()


def wrapped_diagonal_index(i: int, j: int, N: int) -> int:
    return (j - i) % N


def _check_divides(f: LinkFunction, N: int) -> None:
    if N < 1 or N % f.k:
        raise ValueError(f"k={f.k} must divide N={N}")


def _relabel(roots: np.ndarray, parity: np.ndarray, odd_root: dict, kind: str, N: int):
    """Turn per-position (root, parity) arrays into canonical class labels."""
    flat_roots = roots.ravel()
    uniq, first = np.unique(flat_roots, return_index=True)
    order = np.argsort(first)
    uniq, first = uniq[order], first[order]
    lookup = {int(r): c for c, r in enumerate(uniq)}
    class_id = np.fromiter((lookup[int(r)] for r in flat_roots), dtype=np.int64,
                           count=flat_roots.size).reshape(N, N)
    if kind == REAL:
        is_real = np.ones(len(uniq), dtype=bool)
        conj = np.zeros((N, N), dtype=bool)
    else:
        is_real = np.array([odd_root[int(r)] for r in uniq], dtype=bool)
        base_parity = parity.ravel()[first]
        conj = (parity != base_parity[class_id]) & ~is_real[class_id]
    class_id.setflags(write=False)
    conj.setflags(write=False)
    is_real.setflags(write=False)
    return EntryClassMap(N, kind, class_id, conj, is_real)


def _build(f: LinkFunction, N: int, kind: str) -> EntryClassMap:
    _check_divides(f, N)
    k = f.k
    dsu = _ParityDSU(N * k)
    par = 1 if kind == COMPANION else 0
    for D in range(N):
        nD = (-D) % N
        for a in range(k):
            # position (i, i+D) with i = a mod k, transposed onto diagonal -D
            s = D * k + f(a, a + D)
            t = nD * k + f(a + D, a)
            dsu.union(s, t, par)
    idx = np.arange(N)
    diag = (idx[None, :] - idx[:, None]) % N
    slots = diag * k + f.table[(idx % k)[:, None], (idx % k)[None, :]]
    found = [dsu.find(s) for s in range(N * k)]
    slot_root = np.array([r for r, _ in found], dtype=np.int64)
    slot_par = np.array([p for _, p in found], dtype=np.int8)
    odd_root = {r: dsu.odd[r] for r in set(slot_root.tolist())}
    cmap = _relabel(slot_root[slots], slot_par[slots], odd_root, kind, N)
    check_invariants(cmap)
    return cmap


def build_real_classes(f: LinkFunction, N: int) -> EntryClassMap:
    """Equality classes of the N x N real f-linked ensemble."""
    return _build(f, N, REAL)


def build_companion_classes(f: LinkFunction, N: int) -> EntryClassMap:
    """Equality/conjugation classes of the N x N complex companion ensemble."""
    return _build(f, N, COMPANION)


def check_invariants(cmap: EntryClassMap) -> None:
    """Raise :class:`ClassConsistencyError` if symmetry/Hermitian structure fails."""
    cid, conj = cmap.class_id, cmap.conjugated
    if not np.array_equal(cid, cid.T):
        raise ClassConsistencyError("class map is not transpose-symmetric")
    if cmap.kind == REAL:
        if conj.any():
            raise ClassConsistencyError("real-kind map carries conjugation flags")
        return
    complex_pos = ~cmap.class_is_real[cid]
    if np.any(complex_pos & (conj == conj.T)):
        raise ClassConsistencyError("complex class position not conjugate to its transpose")
    if np.any(np.diagonal(complex_pos)):
        raise ClassConsistencyError("main-diagonal entry in a complex class")


def build_classes_bruteforce(f: LinkFunction, N: int, kind: str) -> EntryClassMap:
    """Position-level closure straight from the generating relations.

    Quadratic in N^2; meant as an independent check for small N.
    """
    _check_divides(f, N)
    pos = [(i, j) for i in range(N) for j in range(N)]
    dsu = _ParityDSU(N * N)
    par = 1 if kind == COMPANION else 0
    for p, (i, j) in enumerate(pos):
        dsu.union(p, j * N + i, par)
        for q in range(p, N * N):
            m, n = pos[q]
            if (i - j) % N == (m - n) % N and f(i, j) == f(m, n):
                dsu.union(p, q, 0)
    found = [dsu.find(p) for p in range(N * N)]
    roots = np.array([r for r, _ in found], dtype=np.int64).reshape(N, N)
    parity = np.array([p for _, p in found], dtype=np.int8).reshape(N, N)
    odd_root = {r: dsu.odd[r] for r in set(roots.ravel().tolist())}
    return _relabel(roots, parity, odd_root, kind, N)


@dataclass(frozen=True, eq=False)
class PairCompatibility:
    """``ok[rl, rl1, rt, rt1]``: can the entry at residues (rl, rl1) on a generic
    diagonal d equal the entry at residues (rt, rt1) on the transposed diagonal -d?
    """

    k: int
    ok: np.ndarray = field(repr=False)

    def __call__(self, rl: int, rl1: int, rt: int, rt1: int) -> bool:
        k = self.k
        return bool(self.ok[rl % k, rl1 % k, rt % k, rt1 % k])


def pair_compatibility_table(f: LinkFunction) -> PairCompatibility:
    """Limit compatibility of transposed-diagonal entry pairs.

    For each residue d of a generic diagonal, a 2k-slot union-find over the row
    residues on d (slots 0..k-1) and on -d (slots k..2k-1), merged by equal
    f-values within a diagonal and by the transpose map.
    """
    k = f.k
    ok = np.zeros((k, k, k, k), dtype=bool)
    for d in range(k):
        dsu = _ParityDSU(2 * k)
        for a in range(k):
            for b in range(a + 1, k):
                if f(a, a + d) == f(b, b + d):
                    dsu.union(a, b)
                if f(a, a - d) == f(b, b - d):
                    dsu.union(k + a, k + b)
            dsu.union(a, k + (a + d) % k)
        for rl in range(k):
            for rt in range(k):
                if dsu.find(rl)[0] == dsu.find(k + rt)[0]:
                    ok[rl, (rl + d) % k, rt, (rt - d) % k] = True
    ok.setflags(write=False)
    return PairCompatibility(k, ok)


def generic_diagonal(d: int, N: int, k: int) -> int:
    """Smallest D > 0 with D = d mod k whose wrapped diagonal is not self-transposed."""
    for D in range(d % k or k, N, k):
        if (2 * D) % N:
            return D
    raise ValueError(f"no generic diagonal with residue {d} for N={N}, k={k}")


def finite_pair_compatibility(f: LinkFunction, N: int) -> PairCompatibility:
    """Pair compatibility read off the finite-N real class map (test oracle)."""
    k = f.k
    cmap = build_real_classes(f, N)
    ok = np.zeros((k, k, k, k), dtype=bool)
    for rl in range(k):
        for rl1 in range(k):
            d = (rl1 - rl) % k
            D = generic_diagonal(d, N, k)
            for rt in range(k):
                rt1 = (rt - d) % k
                # position on D with row = rl, and on -D with row = rt
                p = cmap.class_id[rl, (rl + D) % N]
                q = cmap.class_id[rt, (rt - D) % N]
                ok[rl, rl1, rt, rt1] = p == q
    ok.setflags(write=False)
    return PairCompatibility(k, ok)
