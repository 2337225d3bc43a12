"""Distortion measurements between a dataset and its mapped image.

The chain maps are conformal pointwise but not isometric, so finite
point sets pick up angle and distance distortion.  This module measures
both, plus the classical circle-image behaviour of the projection on
the ordinary sphere (circles through the pole flatten to lines, all
other circles stay circles).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .dataset import Dataset
from .errors import (
    DegenerateTripleError,
    EmptyCircleError,
    PoleBandError,
    TooFewPointsError,
    ZeroVectorError,
)
from .sphere import (
    DEFAULT_TOLERANCES,
    SpherePoint,
    ToleranceConfig,
    angle_between,
    as_vector,
    stereo_project,
)

HISTOGRAM_BINS = 64

# Exhaustive enumeration is used whenever the full count of measurements
# fits under the caller's budget; above that, seeded sampling.
DEFAULT_MAX_TRIPLES = 20000
DEFAULT_MAX_PAIRS = 20000


@dataclass(frozen=True)
class AngleDistortionReport:
    """Vertex-angle changes between two matched datasets.

    ``histogram`` has 64 integer bins spanning [0, pi] over the absolute
    angle deltas; the bin counts sum to ``samples``.  ``skipped`` counts
    triples that were degenerate in either dataset.
    """

    samples: int
    skipped: int
    max_abs_delta: float
    mean_abs_delta: float
    histogram: tuple[int, ...]
    seed: int
    exhaustive: bool


@dataclass(frozen=True)
class DistanceDistortionReport:
    """Pairwise-distance ratios (after over before) between matched datasets."""

    samples: int
    skipped: int
    min_ratio: float
    max_ratio: float
    log_ratio_stddev: float
    seed: int
    exhaustive: bool


@dataclass(frozen=True)
class CircleImageReport:
    """Result of fitting the projected image of a sphere circle."""

    kind: str  # "line" | "circle"
    residual: float
    fit_params: dict


def vertex_angle(a, vertex, c, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Angle at ``vertex`` in the triangle (a, vertex, c), in [0, pi].

    Raises DegenerateTripleError when either leg has norm at or below
    the zero cutoff.
    """
    u = as_vector(a) - as_vector(vertex)
    w = as_vector(c) - as_vector(vertex)
    try:
        return angle_between(u, w, tol)
    except ZeroVectorError as exc:
        raise DegenerateTripleError("a leg of the vertex triple has zero length") from exc


def _check_matched(before: Dataset, after: Dataset, minimum: int, what: str) -> None:
    if before.ids != after.ids:
        raise ValueError("datasets must carry identical row ids in the same order")
    if before.n < minimum:
        raise TooFewPointsError(f"{what} needs at least {minimum} rows, got {before.n}")


def _sample_index_triples(n: int, count: int, seed: int) -> np.ndarray:
    """Seeded (a, vertex, c) index triples with three distinct entries."""
    rng = np.random.default_rng([seed, 3])
    chunks = []
    need = count
    while need > 0:
        cand = rng.integers(0, n, size=(2 * need + 8, 3))
        ok = (
            (cand[:, 0] != cand[:, 1])
            & (cand[:, 0] != cand[:, 2])
            & (cand[:, 1] != cand[:, 2])
        )
        cand = cand[ok][:need]
        chunks.append(cand)
        need -= len(cand)
    return np.concatenate(chunks)


def angle_distortion(
    before: Dataset,
    after: Dataset,
    max_triples: int = DEFAULT_MAX_TRIPLES,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> AngleDistortionReport:
    """Compare vertex angles over matched triples of the two datasets.

    When the exhaustive count (three vertex choices per 3-subset) fits
    within ``max_triples`` every triple is measured; otherwise
    ``max_triples`` seeded triples are drawn with replacement.  Triples
    degenerate in either dataset are skipped and counted.  Aggregation
    uses compensated summation and is independent of iteration order.
    """
    _check_matched(before, after, 3, "angle distortion")
    if max_triples < 1:
        raise ValueError("max_triples must be positive")
    n = before.n
    exhaustive = 3 * math.comb(n, 3) <= max_triples
    if exhaustive:
        triples = np.array(
            [
                (i, j, k)
                for combo in combinations(range(n), 3)
                for (i, j, k) in (
                    (combo[1], combo[0], combo[2]),
                    (combo[0], combo[1], combo[2]),
                    (combo[0], combo[2], combo[1]),
                )
            ]
        )
    else:
        triples = _sample_index_triples(n, max_triples, seed)
    deltas = []
    skipped = 0
    B, A = before.points, after.points
    for a, v, c in triples:
        try:
            tb = vertex_angle(B[a], B[v], B[c], tol)
            ta = vertex_angle(A[a], A[v], A[c], tol)
        except DegenerateTripleError:
            skipped += 1
            continue
        deltas.append(abs(ta - tb))
    hist, _ = np.histogram(deltas, bins=HISTOGRAM_BINS, range=(0.0, math.pi))
    return AngleDistortionReport(
        samples=len(deltas),
        skipped=skipped,
        max_abs_delta=max(deltas) if deltas else 0.0,
        mean_abs_delta=(math.fsum(deltas) / len(deltas)) if deltas else 0.0,
        histogram=tuple(int(c) for c in hist),
        seed=seed,
        exhaustive=exhaustive,
    )


def distance_distortion(
    before: Dataset,
    after: Dataset,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> DistanceDistortionReport:
    """Compare pairwise distances; ratios are after over before.

    Pairs whose before-distance is at or below the zero cutoff are
    skipped and counted.
    """
    _check_matched(before, after, 2, "distance distortion")
    if max_pairs < 1:
        raise ValueError("max_pairs must be positive")
    n = before.n
    exhaustive = math.comb(n, 2) <= max_pairs
    if exhaustive:
        pairs = np.array(list(combinations(range(n), 2)))
    else:
        rng = np.random.default_rng([seed, 2])
        chunks = []
        need = max_pairs
        while need > 0:
            cand = rng.integers(0, n, size=(2 * need + 8, 2))
            cand = cand[cand[:, 0] != cand[:, 1]][:need]
            chunks.append(cand)
            need -= len(cand)
        pairs = np.concatenate(chunks)
    ratios = []
    skipped = 0
    B, A = before.points, after.points
    for i, j in pairs:
        db = float(np.linalg.norm(B[i] - B[j]))
        if db <= tol.eps_zero:
            skipped += 1
            continue
        da = float(np.linalg.norm(A[i] - A[j]))
        ratios.append(da / db)
    if ratios and min(ratios) > 0.0:
        logs = [math.log(r) for r in ratios]
        mean = math.fsum(logs) / len(logs)
        var = math.fsum((l - mean) ** 2 for l in logs) / len(logs)
        log_stddev = math.sqrt(var)
    else:
        # a collapsed after-pair has ratio 0; the log spread is unbounded
        log_stddev = math.inf if ratios else 0.0
    return DistanceDistortionReport(
        samples=len(ratios),
        skipped=skipped,
        min_ratio=min(ratios) if ratios else 0.0,
        max_ratio=max(ratios) if ratios else 0.0,
        log_ratio_stddev=log_stddev,
        seed=seed,
        exhaustive=exhaustive,
    )


def sample_sphere_circle(
    normal,
    offset: float,
    m: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    drop_pole_band: bool = True,
) -> Dataset:
    """Equally spaced points on the circle {p on S^2 : p . n_hat = offset}.

    The in-plane frame is deterministic: the axis least parallel to the
    normal, orthogonalized, and its cross product with the normal.
    Sampling starts at angle zero.  Samples falling inside the pole
    exclusion band are dropped by default (a circle through the pole
    cannot include the pole itself); pass ``drop_pole_band=False`` to
    get a PoleBandError instead.
    """
    nrm = as_vector(normal)
    if nrm.size != 3:
        raise ValueError("circles are sampled on the two-sphere; normal must have 3 coordinates")
    length = float(np.linalg.norm(nrm))
    if length <= tol.eps_zero:
        raise ZeroVectorError("circle normal has zero length")
    if abs(offset) >= 1.0:
        raise EmptyCircleError(f"no circle at plane offset {offset!r}")
    if m < 1:
        raise ValueError("need at least one sample")
    n_hat = nrm / length
    k = int(np.argmin(np.abs(n_hat)))
    u = -n_hat[k] * n_hat
    u[k] += 1.0
    u /= float(np.linalg.norm(u))
    w = np.cross(n_hat, u)
    radius = math.sqrt(1.0 - offset * offset)
    thetas = 2.0 * math.pi * np.arange(m) / m
    pts = (
        offset * n_hat
        + radius * np.cos(thetas)[:, None] * u
        + radius * np.sin(thetas)[:, None] * w
    )
    inside_band = pts[:, -1] > 1.0 - tol.eps_pole
    if inside_band.any():
        if not drop_pole_band:
            raise PoleBandError(
                f"{int(inside_band.sum())} circle sample(s) fall inside the pole band"
            )
        pts = pts[~inside_band]
        if len(pts) == 0:
            raise EmptyCircleError("every sample fell inside the pole band")
    return Dataset(pts, tuple(range(len(pts))))


def _fit_line(P: np.ndarray) -> tuple[float, dict]:
    """Total least squares line; residual is the largest perpendicular distance."""
    center = P.mean(axis=0)
    Q = P - center
    _, _, vt = np.linalg.svd(Q, full_matrices=False)
    residual = float(np.max(np.abs(Q @ vt[1])))
    return residual, {
        "point": tuple(float(c) for c in center),
        "direction": tuple(float(c) for c in vt[0]),
    }


def _fit_circle(P: np.ndarray) -> tuple[float, dict]:
    """Algebraic (Kasa) circle fit; residual is the largest radial misfit."""
    A = np.column_stack([2.0 * P[:, 0], 2.0 * P[:, 1], np.ones(len(P))])
    b = (P**2).sum(axis=1)
    (cx, cy, t), *_ = np.linalg.lstsq(A, b, rcond=None)
    radius = math.sqrt(max(t + cx * cx + cy * cy, 0.0))
    dists = np.linalg.norm(P - np.array([cx, cy]), axis=1)
    residual = float(np.max(np.abs(dists - radius)))
    return residual, {"center": (float(cx), float(cy)), "radius": float(radius)}


def circle_image_check(
    samples: Dataset,
    through_pole: bool,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> CircleImageReport:
    """Project circle samples and fit the expected image shape.

    ``through_pole=True`` fits a line (circles through the pole flatten
    out), otherwise a circle.  Needs at least 8 samples on the
    two-sphere, all outside the pole band.
    """
    if samples.dim != 3:
        raise ValueError("circle samples must have 3 coordinates per row")
    if samples.n < 8:
        raise TooFewPointsError(f"circle fitting needs at least 8 samples, got {samples.n}")
    projected = np.array(
        [stereo_project(SpherePoint(row, tol)) for row in samples.points]
    )
    if through_pole:
        residual, params = _fit_line(projected)
        kind = "line"
    else:
        residual, params = _fit_circle(projected)
        kind = "circle"
    return CircleImageReport(kind=kind, residual=residual, fit_params=params)
