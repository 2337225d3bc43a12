"""A small immutable container for point sets of uniform dimension."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ordered set of points, one row each, with stable integer row ids.

    ``points`` is a read-only (n, dim) float64 array with n >= 1 and
    dim >= 1; every entry must be finite.  ``ids`` defaults to
    ``0 .. n-1`` and must be unique non-negative integers, one per row.
    Ids survive the pipeline operations, so a row can be traced through
    every level of a chain even when other rows get dropped.
    """

    points: np.ndarray
    ids: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        arr = np.array(self.points, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got shape {arr.shape}")
        n, dim = arr.shape
        if n < 1 or dim < 1:
            raise ValueError("a dataset needs at least one row and one column")
        if not np.all(np.isfinite(arr)):
            raise ValueError("dataset entries must be finite")
        ids = self.ids if self.ids else tuple(range(n))
        ids = tuple(int(i) for i in ids)
        if len(ids) != n:
            raise ValueError(f"{len(ids)} ids for {n} rows")
        if any(i < 0 for i in ids):
            raise ValueError("row ids must be non-negative")
        if len(set(ids)) != n:
            raise ValueError("row ids must be unique")
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)
        object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def row(self, index: int) -> np.ndarray:
        return self.points[index]

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, dim={self.dim})"
