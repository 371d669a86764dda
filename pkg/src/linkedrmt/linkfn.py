"""Periodic link functions f: (Z/kZ)^2 -> Z/kZ stored as explicit tables."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class LinkFormatError(ValueError):
    """Raised when a link document cannot be parsed."""


class LinkShapeError(LinkFormatError):
    """Raised when the table is not k x k."""


class LinkRangeError(LinkFormatError):
    """Raised when a table entry is not a residue mod k."""


@dataclass(frozen=True, eq=False)
class LinkFunction:
    """A k-link function.

    ``table[i, j]`` holds f(i, j) for 0 <= i, j < k. Arguments outside that
    range are reduced mod k before lookup.
    """

    k: int
    table: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        table = np.array(self.table, dtype=np.int64)
        if table.shape != (self.k, self.k):
            raise LinkShapeError(
                f"table must be {self.k}x{self.k}, got shape {table.shape}"
            )
        if table.size and (table.min() < 0 or table.max() >= self.k):
            raise LinkRangeError(f"table entries must lie in [0, {self.k})")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def __call__(self, i: int, j: int) -> int:
        return int(self.table[i % self.k, j % self.k])

    def __eq__(self, other):
        if not isinstance(other, LinkFunction):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.k, self.table.tobytes()))

    @property
    def descriptor(self) -> str:
        return self.name or f"table:{self.k}:{self.table.ravel().tolist()}"

    def to_dict(self) -> dict:
        return {"k": self.k, "table": self.table.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def eval_link(f: LinkFunction, i: int, j: int) -> int:
    return f(i, j)


def parse_link_function(text: str) -> LinkFunction:
    """Parse the canonical JSON link format ``{"k": int, "table": [[...]]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LinkFormatError(f"link document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "k" not in doc or "table" not in doc:
        raise LinkFormatError('link document must be an object with "k" and "table"')
    k = doc["k"]
    rows = doc["table"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise LinkFormatError(f'"k" must be a positive integer, got {k!r}')
    if not isinstance(rows, list) or len(rows) != k:
        raise LinkShapeError(f"table must have {k} rows")
    for row in rows:
        if not isinstance(row, list) or len(row) != k:
            raise LinkShapeError(f"every table row must have {k} entries")
        for v in row:
            if not isinstance(v, int) or isinstance(v, bool):
                raise LinkFormatError(f"table entries must be integers, got {v!r}")
            if not 0 <= v < k:
                raise LinkRangeError(f"residue {v} out of range for k={k}")
    return LinkFunction(k, np.array(rows, dtype=np.int64))


def from_callable(k: int, func, name: str = "") -> LinkFunction:
    table = [[func(i, j) % k for j in range(k)] for i in range(k)]
    return LinkFunction(k, np.array(table, dtype=np.int64), name=name)


def block_circulant(k: int) -> LinkFunction:
    """f(i, j) = i mod k, the k-block circulant link."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return from_callable(k, lambda i, j: i, name=f"builtin:block:{k}")


def f1() -> LinkFunction:
    return block_circulant(2)


def f2() -> LinkFunction:
    """f(i, j) = (i - j) * i mod 2."""
    return from_callable(2, lambda i, j: (i - j) * i, name="builtin:f2")


def f3() -> LinkFunction:
    """f(i, j) = (i - j + 1) * i mod 2."""
    return from_callable(2, lambda i, j: (i - j + 1) * i, name="builtin:f3")


def resolve_link(spec: str) -> LinkFunction:
    """Resolve a CLI link descriptor: a builtin tag or a path to a JSON file."""
    if spec.startswith("builtin:"):
        tag = spec[len("builtin:"):]
        if tag == "f2":
            return f2()
        if tag == "f3":
            return f3()
        if tag == "f1":
            return f1()
        if tag.startswith("block:"):
            try:
                k = int(tag[len("block:"):])
            except ValueError:
                raise LinkFormatError(f"bad builtin descriptor {spec!r}") from None
            return block_circulant(k)
        raise LinkFormatError(f"unknown builtin link {spec!r}")
    with open(spec, encoding="utf-8") as fh:
        f = parse_link_function(fh.read())
    return LinkFunction(f.k, f.table, name=spec)
