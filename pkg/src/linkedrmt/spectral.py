"""Eigenvalues, normalised empirical spectral measures, moments and histograms."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-10


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SpectralSample:
    N: int
    values: np.ndarray = field(repr=False)
    provenance: object = None


@dataclass(frozen=True, eq=False)
class HistogramTable:
    edges: np.ndarray
    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0
    density: bool = False

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow

    def densities(self) -> np.ndarray:
        widths = np.diff(self.edges)
        n = self.total
        return self.counts / (n * widths) if n else np.zeros_like(widths)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count", "density"])
        for lo, hi, c, d in zip(self.edges[:-1], self.edges[1:], self.counts, self.densities()):
            w.writerow([repr(float(lo)), repr(float(hi)), int(c), repr(float(d))])
        return buf.getvalue()


def is_hermitian(H: np.ndarray) -> bool:
    H = np.asarray(H)
    return H.ndim == 2 and H.shape[0] == H.shape[1] and np.array_equal(H, H.conj().T)


def hermitian_eigenvalues(H: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Ascending eigenvalues of an exactly Hermitian matrix.

    Backed by LAPACK (``numpy.linalg.eigvalsh``); the trace and Frobenius
    identities are checked on the result to within ``tol`` relative error.
    """
    H = np.asarray(H)
    if not is_hermitian(H):
        raise ValueError("matrix is not exactly Hermitian")
    try:
        eigs = np.linalg.eigvalsh(H)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    fro2 = float(np.vdot(H, H).real)
    fro = math.sqrt(fro2)
    tr = float(np.trace(H).real)
    if abs(eigs.sum() - tr) > tol * fro or abs(np.dot(eigs, eigs) - fro2) > tol * fro2:
        raise EigensolverError("eigenvalues violate trace identities")
    return eigs


def circulant_eigenvalues_oracle(first_row) -> np.ndarray:
    """Eigenvalues sum_i a_{0i} zeta^i of the circulant with the given first row,
    one per N-th root of unity zeta = exp(-2 pi i j / N)."""
    return np.fft.fft(np.asarray(first_row))


def normalized_spectrum(eigs, N: int, provenance=None) -> SpectralSample:
    eigs = np.asarray(eigs, dtype=float)
    if eigs.shape != (N,):
        raise ValueError(f"expected {N} eigenvalues, got shape {eigs.shape}")
    return SpectralSample(N, np.sort(eigs) / math.sqrt(N), provenance)


def spectral_moment(s: SpectralSample, m: int) -> float:
    if m < 0:
        raise ValueError("moment order must be non-negative")
    if m == 0:
        return 1.0
    return float(np.mean(s.values ** m))


def trace_power_moment(H: np.ndarray, m: int) -> float:
    """(1/N^{m/2+1}) Tr H^m by repeated multiplication."""
    N = H.shape[0]
    P = np.linalg.matrix_power(H, m)
    return float(np.trace(P).real) / N ** (m / 2 + 1)


def histogram(values, bins: int = 64, range: tuple = (-3.0, 3.0)) -> HistogramTable:
    lo, hi = range
    if bins < 1 or not lo < hi:
        raise ValueError(f"invalid histogram settings bins={bins}, range={range}")
    v = np.asarray(values, dtype=float).ravel()
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(v, bins=edges)
    under = int(np.count_nonzero(v < lo))
    over = int(np.count_nonzero(v > hi))
    return HistogramTable(edges, counts, under, over)


def freedman_diaconis_bins(values, range: tuple = (-3.0, 3.0), fallback: int = 64) -> int:
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        return fallback
    q75, q25 = np.percentile(v, [75, 25])
    width = 2 * (q75 - q25) / v.size ** (1 / 3)
    if width <= 0:
        return fallback
    return max(1, int(math.ceil((range[1] - range[0]) / width)))
