"""Operation-count sweeps over chain size and dimensionality.

The interesting output is the measured counter totals against the
closed-form predictions, plus fitted log-log exponents.  Wall-clock
times are recorded for curiosity and never asserted anywhere; counts
are deterministic, times are not.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .chain import (
    DEFAULT_POLICY,
    OpCounter,
    increase_dataset,
    itemized_ops_increase,
    predicted_ops_increase,
    predicted_ops_reduce,
    reduce_dataset,
)
from .dataset import Dataset
from .errors import InfeasibleGridError
from .sphere import DEFAULT_TOLERANCES


@dataclass(frozen=True)
class SweepSpec:
    """Grid description for one sweep.

    For ``mode="reduce"``, ``dim_values`` are the dataset input
    dimensions and ``target_dim`` is the fixed output dimension.  For
    ``mode="increase"``, ``dim_values`` are the lift offsets (how many
    dimensions get added, the quantity the cost grows quadratically in)
    and ``target_dim`` is the fixed input dimension.
    """

    mode: str
    n_values: tuple[int, ...]
    dim_values: tuple[int, ...]
    target_dim: int
    repetitions: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("reduce", "increase"):
            raise ValueError(f"unknown sweep mode {self.mode!r}")
        for name, values in (("n_values", self.n_values), ("dim_values", self.dim_values)):
            if not values or any(v < 1 for v in values):
                raise ValueError(f"{name} must be a non-empty list of positive integers")
            if list(values) != sorted(set(values)):
                raise ValueError(f"{name} must be strictly ascending")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.mode == "reduce":
            if min(self.dim_values) < 3:
                raise InfeasibleGridError("reduce sweeps need input dimension >= 3")
            if not (1 <= self.target_dim < min(self.dim_values)):
                raise InfeasibleGridError(
                    f"target dimension {self.target_dim} is not below every "
                    f"grid dimension (smallest is {min(self.dim_values)})"
                )
        else:
            if self.target_dim < 1:
                raise InfeasibleGridError("increase sweeps need input dimension >= 1")


@dataclass(frozen=True)
class SweepRow:
    """One timed run of one grid point.

    There is one row per (n, dim) grid point per repetition.  Counts
    are identical across repetitions of a grid point because they
    depend only on the grid shape; only ``wall_time`` varies.
    """

    n: int
    dim: int
    target: int
    repetition: int
    ops: OpCounter
    predicted_paper: int
    predicted_measured: int
    wall_time: float


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]
    fitted_exponent_dim: float | None
    fitted_exponent_n: float | None
    fit_r2: float | None


def _loglog_slope(xs, ys) -> tuple[float, float]:
    """Least-squares slope and r-squared of log(ys) against log(xs)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def _sweep_dataset(n: int, dim: int, seed_key: list[int]) -> Dataset:
    """Seeded uniform data in [-1, 1]^dim with degenerate rows resampled.

    A row is degenerate when its norm sits at the zero cutoff or its
    direction falls inside the pole band.  Uniform data essentially
    never triggers this, but the guard keeps sweeps well defined.
    """
    rng = np.random.default_rng(seed_key)
    pts = rng.uniform(-1.0, 1.0, size=(n, dim))
    for _ in range(100):
        norms = np.linalg.norm(pts, axis=1)
        bad = norms <= max(DEFAULT_TOLERANCES.eps_zero, 1e-12)
        good = ~bad
        last = np.zeros(n)
        last[good] = pts[good, -1] / norms[good]
        bad |= last > 1.0 - DEFAULT_TOLERANCES.eps_pole
        if not bad.any():
            break
        pts[bad] = rng.uniform(-1.0, 1.0, size=(int(bad.sum()), dim))
    return Dataset(pts, tuple(range(n)))


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run every grid point and fit log-log exponents.

    Rows are ordered by (n, dim, repetition).  The exponent fits use
    one total per grid point (the counts do not vary across
    repetitions).
    """
    rows: list[SweepRow] = []
    for n in spec.n_values:
        for dim_value in spec.dim_values:
            if spec.mode == "reduce":
                data_dim, chain_target = dim_value, spec.target_dim
            else:
                data_dim, chain_target = spec.target_dim, spec.target_dim + dim_value
            data = _sweep_dataset(n, data_dim, [spec.seed, n, dim_value])
            if spec.mode == "reduce":
                published = predicted_ops_reduce(n, data_dim - 1, chain_target - 1)
                measured_formula = published
            else:
                published = predicted_ops_increase(n, data_dim - 1, chain_target - 1)
                measured_formula = itemized_ops_increase(n, data_dim - 1, chain_target - 1)
            for rep in range(spec.repetitions):
                start = time.perf_counter()
                if spec.mode == "reduce":
                    _, _, counter = reduce_dataset(
                        data, chain_target, DEFAULT_POLICY, endpoints_only=True
                    )
                else:
                    _, _, counter = increase_dataset(
                        data, chain_target, endpoints_only=True
                    )
                elapsed = time.perf_counter() - start
                rows.append(
                    SweepRow(
                        n=n,
                        dim=dim_value,
                        target=chain_target,
                        repetition=rep,
                        ops=counter,
                        predicted_paper=published,
                        predicted_measured=measured_formula,
                        wall_time=float(elapsed),
                    )
                )
    first_rep = [r for r in rows if r.repetition == 0]
    exponent_dim, exponent_n, r2_values = None, None, []
    if len(spec.dim_values) >= 2:
        slopes = []
        for n in spec.n_values:
            totals = [r.ops.total() for r in first_rep if r.n == n]
            slope, r2 = _loglog_slope(spec.dim_values, totals)
            slopes.append(slope)
            r2_values.append(r2)
        exponent_dim = float(np.mean(slopes))
    if len(spec.n_values) >= 2:
        slopes = []
        for dim_value in spec.dim_values:
            totals = [r.ops.total() for r in first_rep if r.dim == dim_value]
            slope, r2 = _loglog_slope(spec.n_values, totals)
            slopes.append(slope)
            r2_values.append(r2)
        exponent_n = float(np.mean(slopes))
    return SweepResult(
        spec=spec,
        rows=tuple(rows),
        fitted_exponent_dim=exponent_dim,
        fitted_exponent_n=exponent_n,
        fit_r2=min(r2_values) if r2_values else None,
    )


def compare_counts(
    measured: OpCounter | int, n: int, dim_from: int, d_or_offset: int, mode: str
) -> dict:
    """Line up a measured total with both prediction routes.

    ``dim_from`` is the starting sphere dimension (coordinate count
    minus one).  For ``mode="reduce"``, ``d_or_offset`` is the target
    sphere dimension; for ``mode="increase"`` it is the offset.  The
    increase entry also reports the per-lift constant implied by the
    measured total next to the published constant of 8.
    """
    total = measured.total() if isinstance(measured, OpCounter) else int(measured)
    if mode == "reduce":
        predicted_measured = predicted_ops_reduce(n, dim_from, d_or_offset)
        predicted_paper = predicted_measured
        extra = {}
    elif mode == "increase":
        dim_to = dim_from + d_or_offset
        predicted_measured = itemized_ops_increase(n, dim_from, dim_to)
        predicted_paper = predicted_ops_increase(n, dim_from, dim_to)
        # solve total/n = sum_{l} (4 l + c) for the constant c
        linear_part = 4 * sum(range(dim_from, dim_to))
        constant = (total / n - linear_part) / d_or_offset
        extra = {
            "per_lift_constant_measured": int(constant) if constant == int(constant) else constant,
            "per_lift_constant_published": 8,
        }
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return {
        "mode": mode,
        "n": n,
        "dim_from": dim_from,
        "d_or_offset": d_or_offset,
        "measured_total": total,
        "predicted_paper": predicted_paper,
        "predicted_measured_formula": predicted_measured,
        "difference_paper": total - predicted_paper,
        "difference_measured": total - predicted_measured,
        **extra,
    }
