"""Seeded realisation of matrices from an :class:`EntryClassMap`.

Every (master_seed, sample_index, class_id) triple owns its own Philox
substream, so a matrix depends only on its own coordinates and never on how
samples are scheduled across workers.  Gaussians come from numpy's ziggurat
sampler (``Generator.standard_normal``), which is deterministic given the
stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classes import COMPANION, REAL, EntryClassMap

STANDARD_NORMAL = "standard-normal"
RADEMACHER = "rademacher"
UNIFORM_SCALED = "uniform-scaled"
DISTRIBUTIONS = (STANDARD_NORMAL, RADEMACHER, UNIFORM_SCALED)

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Provenance:
    seed: int
    sample_index: int
    distribution: str
    link: str = ""


@dataclass(frozen=True, eq=False)
class SampledMatrix:
    N: int
    kind: str
    entries: np.ndarray = field(repr=False)
    provenance: Provenance


def _key(master_seed: int) -> np.ndarray:
    return np.random.SeedSequence(master_seed & (2**64 - 1)).generate_state(2, dtype=np.uint64)


def derive_stream(master_seed: int, sample_index: int, class_id: int) -> np.random.Generator:
    """Independent generator for one class of one sample.

    The seed fixes the Philox key; (sample_index, class_id) occupy the high
    counter words, leaving 2**128 draws per substream before overlap.
    """
    counter = [0, 0, class_id & (2**64 - 1), sample_index & (2**64 - 1)]
    return np.random.Generator(np.random.Philox(key=_key(master_seed), counter=counter))


def _draw(gen: np.random.Generator, dist: str) -> float:
    if dist == STANDARD_NORMAL:
        return float(gen.standard_normal())
    if dist == RADEMACHER:
        return 1.0 if gen.random() < 0.5 else -1.0
    if dist == UNIFORM_SCALED:
        return float(gen.uniform(-_SQRT3, _SQRT3))
    raise ValueError(f"unknown distribution {dist!r}; expected one of {DISTRIBUTIONS}")


def _streams(master_seed: int, sample_index: int, n: int):
    key = _key(master_seed)
    s = sample_index & (2**64 - 1)
    for c in range(n):
        yield np.random.Generator(np.random.Philox(key=key, counter=[0, 0, c, s]))


def class_values_real(n_classes: int, dist: str, master_seed: int, sample_index: int) -> np.ndarray:
    if dist not in DISTRIBUTIONS:
        raise ValueError(f"unknown distribution {dist!r}; expected one of {DISTRIBUTIONS}")
    return np.array([_draw(g, dist) for g in _streams(master_seed, sample_index, n_classes)])


def class_values_companion(is_real: np.ndarray, master_seed: int, sample_index: int) -> np.ndarray:
    vals = np.empty(len(is_real), dtype=np.complex128)
    for c, g in enumerate(_streams(master_seed, sample_index, len(is_real))):
        if is_real[c]:
            vals[c] = g.standard_normal()
        else:
            a, b = g.standard_normal(2)
            vals[c] = complex(a, b) / math.sqrt(2.0)
    return vals


def sample_real_matrix(cmap: EntryClassMap, dist: str = STANDARD_NORMAL,
                       master_seed: int = 0, sample_index: int = 0,
                       link: str = "") -> SampledMatrix:
    """One draw of the real f-linked ensemble: one value per class, broadcast."""
    if cmap.kind != REAL:
        raise ValueError(f"expected a real-kind class map, got {cmap.kind!r}")
    vals = class_values_real(cmap.n_classes, dist, master_seed, sample_index)
    H = vals[cmap.class_id]
    return SampledMatrix(cmap.N, REAL, H, Provenance(master_seed, sample_index, dist, link))


def sample_companion_matrix(cmap: EntryClassMap, master_seed: int = 0,
                            sample_index: int = 0, link: str = "") -> SampledMatrix:
    """One draw of the complex companion ensemble."""
    if cmap.kind != COMPANION:
        raise ValueError(f"expected a companion-kind class map, got {cmap.kind!r}")
    vals = class_values_companion(cmap.class_is_real, master_seed, sample_index)
    H = vals[cmap.class_id]
    H = np.where(cmap.conjugated, H.conj(), H)
    return SampledMatrix(cmap.N, COMPANION, H,
                         Provenance(master_seed, sample_index, STANDARD_NORMAL, link))
