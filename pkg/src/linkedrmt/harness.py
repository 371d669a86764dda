"""Monte Carlo and exact experiments, verification suites and their file outputs."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import platform
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .classes import build_real_classes, finite_pair_compatibility, pair_compatibility_table
from .exact import (
    BudgetExceededError,
    carleman_partial_sums,
    companion_cyclic_sum,
    companion_moment_exact,
    limit_moment_via_matchings,
    moment_bound,
)
from .linkfn import LinkFunction, block_circulant, f2, f3, resolve_link
from .sampler import DISTRIBUTIONS, STANDARD_NORMAL, sample_real_matrix
from .spectral import hermitian_eigenvalues, histogram, normalized_spectrum, spectral_moment

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    link: str = "builtin:block:2"
    sizes: list = field(default_factory=lambda: [256])
    samples: int = 200
    orders: list = field(default_factory=lambda: [2, 4, 6])
    dist: str = STANDARD_NORMAL
    seed: int = 0
    out: str | None = None
    bins: int = 64
    range: tuple = (-3.0, 3.0)
    spectra: bool = False
    workers: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.range = tuple(cfg.range)
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["range"] = list(self.range)
        return d

    def link_function(self) -> LinkFunction:
        try:
            return resolve_link(self.link)
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self) -> LinkFunction:
        f = self.link_function()
        if not self.sizes:
            raise ConfigError("at least one size is required")
        bad = [N for N in self.sizes if N < 1 or N % f.k]
        if bad:
            raise ConfigError(f"sizes {bad} are not positive multiples of k={f.k}")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if not self.orders or any(m < 0 for m in self.orders):
            raise ConfigError("orders must be a non-empty list of non-negative integers")
        if self.dist not in DISTRIBUTIONS:
            raise ConfigError(f"dist must be one of {DISTRIBUTIONS}")
        lo, hi = self.range
        if self.bins < 1 or not lo < hi:
            raise ConfigError("need bins >= 1 and range lo < hi")
        return f


@dataclass
class MomentRow:
    N: int
    m: int
    estimate: float
    std_error: float
    exact: Fraction | None

    @property
    def abs_err(self) -> float | None:
        return None if self.exact is None else abs(self.estimate - float(self.exact))


@dataclass
class MomentTable:
    rows: list = field(default_factory=list)

    def row(self, N: int, m: int) -> MomentRow:
        for r in self.rows:
            if r.N == N and r.m == m:
                return r
        raise KeyError((N, m))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "m", "estimate", "std_error", "exact_num", "exact_den", "abs_err"])
        for r in self.rows:
            if r.exact is None:
                num = den = err = ""
            else:
                num, den, err = r.exact.numerator, r.exact.denominator, repr(r.abs_err)
            w.writerow([r.N, r.m, repr(r.estimate), repr(r.std_error), num, den, err])
        return buf.getvalue()


def build_id() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True,
                             text=True, cwd=Path(__file__).parent, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"linkedrmt-{__version__}"


def versions() -> dict:
    return {"linkedrmt": __version__, "numpy": np.__version__,
            "python": platform.python_version()}


def sample_spectra(f: LinkFunction, N: int, samples: int, dist: str = STANDARD_NORMAL,
                   seed: int = 0, workers: int = 1, first_index: int = 0) -> np.ndarray:
    """Normalised spectra (samples x N) of the real f-linked ensemble.

    Row s is sample index ``first_index + s``; its content does not depend on
    ``workers``.
    """
    cmap = build_real_classes(f, N)

    def one(s: int) -> np.ndarray:
        H = sample_real_matrix(cmap, dist, seed, s, link=f.descriptor).entries
        return normalized_spectrum(hermitian_eigenvalues(H), N).values

    idx = range(first_index, first_index + samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(one, idx))
    else:
        rows = [one(s) for s in idx]
    return np.vstack(rows)


def moment_estimates(spectra: np.ndarray, m: int) -> np.ndarray:
    """Per-sample moments nu^{(m)} of each row of ``spectra``."""
    if m == 0:
        return np.ones(spectra.shape[0])
    return np.mean(spectra ** m, axis=1)


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    if np.all(x == x[0]):
        return float(x[0]), 0.0
    if len(x) < 2:
        return float(x[0]), math.nan
    return float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(len(x)))


def exact_limit_moment(f: LinkFunction, m: int) -> Fraction | None:
    try:
        return companion_moment_exact(f, f.k, m)
    except BudgetExceededError:
        log.warning("exact moment of order %d is over budget; column omitted", m)
        return None


@dataclass
class MCResult:
    config: ExperimentConfig
    table: MomentTable
    spectra: dict
    checks: list


def run_mc_experiment(cfg: ExperimentConfig) -> MCResult:
    """Sample each configured size, estimate moments and compare to exact limits."""
    f = cfg.validate()
    exact = {m: exact_limit_moment(f, m) for m in cfg.orders}
    table = MomentTable()
    spectra = {}
    checks = []
    for N in cfg.sizes:
        spec = sample_spectra(f, N, cfg.samples, cfg.dist, cfg.seed, cfg.workers)
        spectra[N] = spec
        for m in cfg.orders:
            est, se = _mean_se(moment_estimates(spec, m))
            row = MomentRow(N, m, est, se, exact[m])
            table.rows.append(row)
            if row.exact is not None and m > 0:
                checks.append({"name": "mc_within_3se", "params": {"N": N, "m": m},
                               "pass": bool(row.abs_err <= 3 * se),
                               "lhs": row.abs_err, "rhs": 3 * se})
    result = MCResult(cfg, table, spectra, checks)
    if cfg.out:
        write_mc_outputs(result)
    return result


def spectra_csv(spectra: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample_index", "eig_index", "value"])
    for s, row in enumerate(spectra):
        for i, v in enumerate(row):
            w.writerow([s, i, repr(float(v))])
    return buf.getvalue()


def _write_common(out: Path, cfg_dict: dict, report: dict, seed: int) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(cfg_dict, indent=2, sort_keys=True) + "\n")
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    meta = {"seed": seed, "build": build_id(), "versions": versions(),
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def write_mc_outputs(result: MCResult) -> Path:
    cfg = result.config
    out = Path(cfg.out)
    report = {"checks": result.checks, "seed": cfg.seed, "versions": versions()}
    _write_common(out, cfg.to_dict(), report, cfg.seed)
    (out / "moments.csv").write_text(result.table.to_csv())
    N = max(result.spectra)
    hist = histogram(result.spectra[N], cfg.bins, tuple(cfg.range))
    (out / "histogram.csv").write_text(hist.to_csv())
    if cfg.spectra:
        for N, spec in result.spectra.items():
            name = "spectra.csv" if len(result.spectra) == 1 else f"spectra_N{N}.csv"
            (out / name).write_text(spectra_csv(spec))
    return out


# ---------------------------------------------------------------- verification

def _check(name: str, params: dict, ok: bool, lhs, rhs) -> dict:
    def enc(v):
        return str(v) if isinstance(v, Fraction) else v
    return {"name": name, "params": params, "pass": bool(ok), "lhs": enc(lhs), "rhs": enc(rhs)}


def default_links(k_max: int = 3) -> list[LinkFunction]:
    return [block_circulant(k) for k in range(1, k_max + 1)] + [f2(), f3()]


def run_verify(links: Sequence[LinkFunction] | None = None, k_max: int = 3, m_max: int = 8,
               stability_m_max: int = 6, ts: Sequence[int] = (2, 3)) -> dict:
    """Exact-arithmetic consistency checks; returns a report with one entry per check."""
    links = list(links) if links is not None else default_links(k_max)
    checks = []
    limit = {}
    for f in links:
        name = f.descriptor
        for m in range(1, m_max + 1):
            a = limit_moment_via_matchings(f, m)
            b = companion_moment_exact(f, f.k, m)
            limit[name, m] = b
            checks.append(_check("isserlis_vs_matching", {"link": name, "m": m}, a == b, b, a))
        for t in ts:
            for m in range(2, stability_m_max + 1, 2):
                a = companion_moment_exact(f, t * f.k, m)
                b = limit[name, m] if (name, m) in limit else companion_moment_exact(f, f.k, m)
                checks.append(_check("size_stability", {"link": name, "K": t * f.k, "m": m},
                                     a == b, a, b))
        for m in range(1, m_max + 1, 2):
            s = companion_cyclic_sum(f, f.k, m, reduced=False)
            checks.append(_check("odd_moment_vanishes", {"link": name, "m": m}, s == 0, s, 0))
        for m in range(2, m_max + 1, 2):
            v, cap = limit[name, m], moment_bound(f.k, m)
            checks.append(_check("moment_bound", {"link": name, "m": m}, v <= cap, v, cap))
        sums = carleman_partial_sums(f.k, 50)
        inc = all(b > a for a, b in zip(sums, sums[1:]))
        checks.append(_check("carleman_increasing", {"link": name, "M": 50}, inc,
                             sums[-1], sums[0]))
        table = pair_compatibility_table(f).ok
        for M in (5, 6):
            fin = finite_pair_compatibility(f, f.k * M).ok
            agree = bool(np.array_equal(table, fin))
            checks.append(_check("pair_compatibility_finite_n", {"link": name, "N": f.k * M},
                                 agree, int(table.sum()), int(fin.sum())))
        if f.k == 1:
            want = {2: 1, 4: 3, 6: 15, 8: 105}
            for m, v in want.items():
                if m <= m_max:
                    checks.append(_check("gaussian_endpoint", {"link": name, "m": m},
                                         limit[name, m] == v, limit[name, m], v))
    names = {f.descriptor for f in links}
    if {"builtin:f2", "builtin:f3"} <= names and m_max >= 4:
        a, b = limit["builtin:f2", 4], limit["builtin:f3", 4]
        checks.append(_check("pattern_order_matters", {"links": ["builtin:f2", "builtin:f3"],
                                                       "m": 4}, a != b, a, b))
    return {"checks": checks, "pass": all(c["pass"] for c in checks)}


# ---------------------------------------------------------------- concentration

def run_concentration(cfg: ExperimentConfig, m: int = 4) -> dict:
    """Empirical fourth central moment of nu^{(m)} at each configured size."""
    f = cfg.validate()
    if len(cfg.sizes) < 3:
        raise ConfigError("concentration needs at least three sizes")
    if cfg.samples < 2:
        raise ConfigError("concentration needs at least two samples per size")
    sizes = sorted(cfg.sizes)
    fourth = []
    for N in sizes:
        x = moment_estimates(sample_spectra(f, N, cfg.samples, cfg.dist, cfg.seed, cfg.workers), m)
        fourth.append(float(np.mean((x - x.mean()) ** 4)))
    decreasing = all(b < a for a, b in zip(fourth, fourth[1:])) if m > 0 else True
    checks = [_check("fourth_central_moment_decreasing",
                     {"link": f.descriptor, "m": m, "sizes": sizes, "samples": cfg.samples},
                     decreasing, fourth, None)]
    report = {"checks": checks, "seed": cfg.seed, "versions": versions(),
              "sizes": sizes, "m": m, "fourth_central_moments": fourth}
    if cfg.out:
        _write_common(Path(cfg.out), cfg.to_dict(), report, cfg.seed)
    return report
