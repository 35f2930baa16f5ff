"""Run-off triangles of incremental payments.

Indices are 1-based: origin year ``i`` and development year ``j`` both run
over ``1..k``.  A cell is observed iff ``i + j <= k + 1`` and future iff
``i + j >= k + 2``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError

Cell = tuple[int, int]


class TriangleError(InputError):
    """Base class for triangle parsing/validation failures."""


class MissingCell(TriangleError):
    def __init__(self, i: int, j: int):
        super().__init__(f"MissingCell: observed cell ({i},{j}) is absent")
        self.cell = (i, j)


class NonPositiveAmount(TriangleError):
    def __init__(self, i: int, j: int, amount: float):
        super().__init__(f"NonPositiveAmount: cell ({i},{j}) has amount {amount!r}")
        self.cell = (i, j)
        self.amount = amount


class RaggedLayout(TriangleError):
    pass


class DuplicateCell(TriangleError):
    def __init__(self, i: int, j: int):
        super().__init__(f"DuplicateCell: cell ({i},{j}) given more than once")
        self.cell = (i, j)


def observed_positions(k: int) -> list[Cell]:
    return [(i, j) for i in range(1, k + 1) for j in range(1, k + 2 - i)]


def future_positions(k: int) -> list[Cell]:
    return [(i, j) for i in range(1, k + 1) for j in range(k + 2 - i, k + 1)]


@dataclass(frozen=True)
class RunOffTriangle:
    """Validated incremental run-off triangle.

    Parameters
    ----------
    k : int
        Number of origin years (equal to the number of development years).
    cells : mapping
        ``(i, j) -> amount`` for every observed position.  Amounts must be
        strictly positive and finite.
    """

    k: int
    cells: Mapping[Cell, float] = field(repr=False)

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise TriangleError(f"k must be a positive integer, got {self.k!r}")
        k = int(self.k)
        clean: dict[Cell, float] = {}
        for (i, j), amount in self.cells.items():
            i, j = int(i), int(j)
            if not (1 <= i <= k and 1 <= j <= k and i + j <= k + 1):
                raise RaggedLayout(f"cell ({i},{j}) lies outside the observed triangle for k={k}")
            amount = float(amount)
            if not math.isfinite(amount) or amount <= 0:
                raise NonPositiveAmount(i, j, amount)
            clean[(i, j)] = amount
        for i, j in observed_positions(k):
            if (i, j) not in clean:
                raise MissingCell(i, j)
        ordered = {c: clean[c] for c in observed_positions(k)}
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "cells", MappingProxyType(ordered))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[float]]) -> "RunOffTriangle":
        """Build from ragged rows, row ``i`` holding ``k - i + 1`` amounts."""
        rows = [list(r) for r in rows]
        k = len(rows)
        cells = {}
        for i, row in enumerate(rows, start=1):
            if len(row) != k - i + 1:
                raise RaggedLayout(f"row {i} has {len(row)} values, expected {k - i + 1}")
            for j, v in enumerate(row, start=1):
                cells[(i, j)] = v
        return cls(k, cells)

    def __reduce__(self):
        return (RunOffTriangle, (self.k, dict(self.cells)))

    def __getitem__(self, cell: Cell) -> float:
        return self.cells[cell]

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def n_observed(self) -> int:
        return self.k * (self.k + 1) // 2

    def observed_cells(self) -> list[Cell]:
        return observed_positions(self.k)

    def future_cells(self) -> list[Cell]:
        return future_positions(self.k)

    def values(self) -> np.ndarray:
        """Amounts in row-major observed-cell order."""
        return np.array([self.cells[c] for c in observed_positions(self.k)])

    def with_values(self, values: Iterable[float]) -> "RunOffTriangle":
        """Same shape, new amounts (row-major order)."""
        return RunOffTriangle(self.k, dict(zip(observed_positions(self.k), values)))

    def to_array(self) -> np.ndarray:
        """``k x k`` array with NaN in the future cells."""
        out = np.full((self.k, self.k), np.nan)
        for (i, j), v in self.cells.items():
            out[i - 1, j - 1] = v
        return out

    def to_csv(self, layout: str = "long") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if layout == "long":
            w.writerow(["i", "j", "amount"])
            for (i, j), v in self.cells.items():
                w.writerow([i, j, repr(v)])
        elif layout == "wide":
            for i in range(1, self.k + 1):
                w.writerow([repr(self.cells[(i, j)]) for j in range(1, self.k + 2 - i)])
        else:
            raise ValueError(f"unknown layout {layout!r}")
        return buf.getvalue()


def observed_cells(t: RunOffTriangle) -> list[Cell]:
    return t.observed_cells()


def future_cells(t: RunOffTriangle) -> list[Cell]:
    return t.future_cells()


def _number(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise TriangleError(f"non-numeric value {token!r} at {where}") from None


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def parse_triangle(text: str) -> RunOffTriangle:
    """Parse a CSV document in long (``i,j,amount``) or wide layout.

    The layout is detected from the first row: a non-numeric first row is a
    header and selects the long layout.
    """
    rows = [[tok.strip() for tok in r] for r in csv.reader(io.StringIO(text))]
    rows = [r for r in rows if any(r)]
    if not rows:
        raise TriangleError("empty triangle file")
    if not all(_is_number(tok) for tok in rows[0] if tok):
        return _parse_long(rows)
    return _parse_wide(rows)


def _parse_long(rows: list[list[str]]) -> RunOffTriangle:
    header = [h.lower() for h in rows[0]]
    if header[:3] != ["i", "j", "amount"]:
        raise TriangleError(f"expected header 'i,j,amount', got {','.join(rows[0])!r}")
    cells: dict[Cell, float] = {}
    for line, r in enumerate(rows[1:], start=2):
        if len(r) < 3:
            raise RaggedLayout(f"line {line}: expected 3 fields, got {len(r)}")
        i = int(_number(r[0], f"line {line}"))
        j = int(_number(r[1], f"line {line}"))
        if (i, j) in cells:
            raise DuplicateCell(i, j)
        cells[(i, j)] = _number(r[2], f"cell ({i},{j})")
    if not cells:
        raise TriangleError("no cells in long-format triangle")
    k = max(max(i for i, _ in cells), max(j for _, j in cells))
    return RunOffTriangle(k, cells)


def _parse_wide(rows: list[list[str]]) -> RunOffTriangle:
    k = len(rows)
    cells: dict[Cell, float] = {}
    for i, r in enumerate(rows, start=1):
        width = k - i + 1
        while r and r[-1] == "":
            r = r[:-1]
        if len(r) > width:
            raise RaggedLayout(f"row {i} has {len(r)} values, expected {width}")
        for j in range(1, width + 1):
            if j > len(r) or r[j - 1] == "":
                raise MissingCell(i, j)
            cells[(i, j)] = _number(r[j - 1], f"cell ({i},{j})")
    return RunOffTriangle(k, cells)


def read_triangle(path) -> RunOffTriangle:
    with open(path, newline="") as fh:
        return parse_triangle(fh.read())


@dataclass(frozen=True)
class Reserves:
    """Per-origin reserves (index 0 is origin year 1) and their total."""

    per_origin: tuple[float, ...]
    total: float

    @classmethod
    def from_cells(cls, k: int, values: Mapping[Cell, float]) -> "Reserves":
        per = [0.0] * k
        for (i, _), v in values.items():
            per[i - 1] += v
        return cls(tuple(per), float(math.fsum(per)))
