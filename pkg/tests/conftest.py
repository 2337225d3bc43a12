from pathlib import Path

import numpy as np

DATA_DIR = Path(__file__).parent / "data"


def nondegenerate_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """Random rows that stay clear of the zero vector and the pole ray."""
    rows = rng.uniform(-1.0, 1.0, size=(n, dim))
    for _ in range(100):
        norms = np.linalg.norm(rows, axis=1)
        bad = norms < 1e-6
        ok = ~bad
        bad[ok] |= rows[ok, -1] / norms[ok] > 1.0 - 1e-6
        if not bad.any():
            return rows
        rows[bad] = rng.uniform(-1.0, 1.0, size=(int(bad.sum()), dim))
    raise RuntimeError("could not draw nondegenerate rows")
