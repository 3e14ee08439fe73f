"""Sparse matrices over the group ring."""
from __future__ import annotations

from typing import Dict, Iterable, List, Sequence, Tuple

from .groupring import LaurentPoly


class PolyMatrix:
    """nrows x ncols matrix with LaurentPoly entries; only nonzero entries are stored."""

    __slots__ = ("nrows", "ncols", "rank", "entries")

    def __init__(self, nrows: int, ncols: int, entries=None, rank: int = 1):
        self.nrows = nrows
        self.ncols = ncols
        self.rank = rank
        self.entries: Dict[Tuple[int, int], LaurentPoly] = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry ({i}, {j}) outside {nrows}x{ncols}")
            if v:
                self.entries[(i, j)] = v

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[LaurentPoly]], rank: int, ncols: int | None = None):
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(nrows, ncols, {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row)}, rank)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, rank: int):
        return cls(nrows, ncols, {}, rank)

    def __getitem__(self, ij) -> LaurentPoly:
        return self.entries.get(ij) or LaurentPoly.zero(self.rank)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def dense(self) -> List[List[LaurentPoly]]:
        z = LaurentPoly.zero(self.rank)
        out = [[z] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def column(self, j: int) -> List[LaurentPoly]:
        z = LaurentPoly.zero(self.rank)
        col = [z] * self.nrows
        for (i, jj), v in self.entries.items():
            if jj == j:
                col[i] = v
        return col

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.ncols, self.nrows, {(j, i): v for (i, j), v in self.entries.items()}, self.rank)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: Dict[int, List[Tuple[int, LaurentPoly]]] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        acc: Dict[Tuple[int, int], LaurentPoly] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                acc[key] = acc[key] + a * b if key in acc else a * b
        return PolyMatrix(self.nrows, other.ncols, acc, self.rank)

    def apply(self, vec: Sequence[LaurentPoly]) -> List[LaurentPoly]:
        if len(vec) != self.ncols:
            raise ValueError(f"vector of length {len(vec)} for {self.ncols} columns")
        out = [LaurentPoly.zero(self.rank)] * self.nrows
        for (i, j), v in self.entries.items():
            if vec[j]:
                out[i] = out[i] + v * vec[j]
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def map(self, fn, rank: int | None = None) -> "PolyMatrix":
        return PolyMatrix(self.nrows, self.ncols, {k: fn(v) for k, v in self.entries.items()},
                          self.rank if rank is None else rank)

    def __eq__(self, other):
        return (isinstance(other, PolyMatrix) and self.shape == other.shape
                and self.entries == other.entries)

    def __repr__(self):
        return f"PolyMatrix({self.nrows}x{self.ncols}, nnz={len(self.entries)})"


def vector_is_zero(vec: Iterable[LaurentPoly]) -> bool:
    return all(v.is_zero() for v in vec)
