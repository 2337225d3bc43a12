"""Unit-sphere geometry built around one projection family.

The projection used everywhere in this package maps a unit vector
``chi = (chi_1, ..., chi_m)`` with the pole at the positive last axis to

    (chi_1, ..., chi_{m-1}) / (1 - chi_m),

and the matching lift takes ``x`` in flat space to

    (2 x_1, ..., 2 x_k, |x|^2 - 1) / (|x|^2 + 1).

Both maps are conformal.  The local scale factor of the projection at
``chi`` is ``1 / (1 - chi_m)``; the scale factor of the lift at ``x`` is
``2 / (|x|^2 + 1)``.  The finite-difference checks at the bottom of this
module verify those factors numerically without reusing the formulas for
the observed value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NormOverflowError,
    PoleBandError,
    PoleProximityError,
    PoleRayError,
    ZeroVectorError,
)


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical guard rails shared across the package.

    Attributes
    ----------
    eps_unit:
        Allowed deviation from unit norm when a sphere point is built.
    eps_pole:
        Width of the exclusion band below the pole.  Points with last
        coordinate above ``1 - eps_pole`` are rejected because the
        projection denominator loses all precision there.
    eps_zero:
        Norms at or below this value are treated as zero.
    fd_step:
        Central-difference step used by the conformality checks.
    """

    eps_unit: float = 1e-12
    eps_pole: float = 1e-12
    eps_zero: float = 1e-300
    fd_step: float = 1e-6

    def __post_init__(self) -> None:
        if not (0.0 < self.eps_unit < 1.0):
            raise ValueError("eps_unit must lie in (0, 1)")
        if not (0.0 < self.eps_pole < 1.0):
            raise ValueError("eps_pole must lie in (0, 1)")
        if not (0.0 < self.eps_zero < 1e-100):
            raise ValueError("eps_zero must be a tiny positive number")
        if not (0.0 < self.fd_step < 1e-2):
            raise ValueError("fd_step must lie in (0, 1e-2)")


DEFAULT_TOLERANCES = ToleranceConfig()


def as_vector(x) -> np.ndarray:
    """Return ``x`` as a 1-D float64 array with finite entries.

    Raises ValueError for anything that is not a finite, at least
    one-dimensional coordinate sequence.  This is the common entrance
    check for every operation that accepts raw coordinates.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"expected a 1-D coordinate sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coordinates must be finite")
    return arr


class SpherePoint:
    """A validated point on the unit sphere, away from the projection pole.

    Construction copies the coordinates, checks the norm against
    ``tol.eps_unit``, requires at least two coordinates, and rejects
    points whose last coordinate exceeds ``1 - tol.eps_pole``.  The
    stored array is marked read-only so instances can be shared freely.
    """

    __slots__ = ("coords",)

    def __init__(self, coords, tol: ToleranceConfig = DEFAULT_TOLERANCES):
        arr = as_vector(coords).copy()
        if arr.size < 2:
            raise ValueError("a sphere point needs at least two coordinates")
        nrm = float(np.linalg.norm(arr))
        if abs(nrm - 1.0) > tol.eps_unit:
            raise ValueError(f"not a unit vector: |norm - 1| = {abs(nrm - 1.0):.3e}")
        if arr[-1] > 1.0 - tol.eps_pole:
            raise PoleBandError(
                f"last coordinate {arr[-1]!r} lies inside the pole exclusion band"
            )
        arr.setflags(write=False)
        self.coords = arr

    @property
    def ambient_dim(self) -> int:
        return int(self.coords.size)

    def __repr__(self) -> str:
        return f"SpherePoint({self.coords.tolist()!r})"


def normalize(v, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> SpherePoint:
    """Scale ``v`` to unit length and return it as a sphere point.

    Raises
    ------
    ZeroVectorError
        When ``|v| <= tol.eps_zero``.  Squared norms that underflow to
        zero in float64 land here as well; that is the working-precision
        notion of "zero" this package uses.
    PoleRayError
        When the normalized direction falls inside the pole band, which
        means the input is (numerically) a positive multiple of the last
        basis vector.
    NormOverflowError
        When the norm is not finite in float64 (coordinates near 1e200).
    """
    x = as_vector(v)
    if x.size < 2:
        raise ValueError("normalize needs at least two coordinates")
    nrm = float(np.linalg.norm(x))
    if not math.isfinite(nrm):
        raise NormOverflowError("norm overflows float64")
    if nrm <= tol.eps_zero:
        raise ZeroVectorError(f"norm {nrm!r} is at or below the zero cutoff")
    u = x / nrm
    if u[-1] > 1.0 - tol.eps_pole:
        raise PoleRayError("direction points at the projection pole")
    return SpherePoint(u, tol)


def stereo_project(p: SpherePoint) -> np.ndarray:
    """Project a sphere point to flat coordinates, one dimension lower.

    The pole sits at the positive last axis; membership of ``p`` on the
    sphere and away from the pole was already enforced when the point
    was constructed, so this map never fails on a valid ``SpherePoint``.
    """
    chi = p.coords
    return chi[:-1] / (1.0 - chi[-1])


def stereo_lift(v, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> SpherePoint:
    """Send a flat point onto the unit sphere, one dimension higher.

    The image never reaches the pole for finite input, and its norm is 1
    up to a few float64 rounding steps.  Raises NormOverflowError when
    ``|v|^2`` is not finite.  For astronomically large inputs (norm
    beyond roughly 1.4e6) the image is numerically indistinguishable
    from the pole and the sphere-point constructor rejects it.
    """
    x = as_vector(v)
    with np.errstate(over="ignore"):
        s = float(x @ x)
    if not math.isfinite(s):
        raise NormOverflowError("squared norm overflows float64")
    denom = s + 1.0
    out = np.empty(x.size + 1)
    out[:-1] = (2.0 * x) / denom
    out[-1] = (s - 1.0) / denom
    return SpherePoint(out, tol)


def angle_between(u, v, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Angle between two vectors in radians, in [0, pi].

    The cosine is clamped to [-1, 1] before the arccos so that rounding
    on (anti)parallel inputs cannot produce NaN.  Raises ZeroVectorError
    when either argument has norm at or below ``tol.eps_zero``.
    """
    a = as_vector(u)
    b = as_vector(v)
    if a.size != b.size:
        raise ValueError("angle_between needs vectors of equal dimension")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na <= tol.eps_zero or nb <= tol.eps_zero:
        raise ZeroVectorError("cannot measure an angle at a zero vector")
    c = float(a @ b) / (na * nb)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def tangent_basis(p: SpherePoint) -> np.ndarray:
    """Orthonormal basis of the tangent space at ``p``, shape (m-1, m).

    Built by Gram-Schmidt on the standard basis vectors minus their
    component along ``p``, dropping the axis most parallel to ``p``.
    Deterministic for a fixed input.
    """
    n = p.coords
    dim = n.size
    drop = int(np.argmax(np.abs(n)))
    rows: list[np.ndarray] = []
    for j in range(dim):
        if j == drop:
            continue
        v = -n[j] * n
        v[j] += 1.0
        for b in rows:
            v -= (v @ b) * b
        v /= float(np.linalg.norm(v))
        rows.append(v)
    return np.array(rows)


@dataclass(frozen=True)
class ConformalityReport:
    """Outcome of a finite-difference conformality check.

    ``scale_factor_observed`` is the root mean square of the diagonal of
    J^T J where J is the numerical Jacobian restricted to an orthonormal
    tangent frame.  ``off_diagonal_residual`` is the largest off-diagonal
    entry of J^T J relative to the observed squared scale, and
    ``diagonal_spread`` is the largest relative deviation of a diagonal
    entry from their mean.  For a conformal map both residuals vanish up
    to finite-difference error.
    """

    scale_factor_observed: float
    scale_factor_predicted: float
    off_diagonal_residual: float
    diagonal_spread: float


def _gram_report(columns: list[np.ndarray], predicted: float) -> ConformalityReport:
    J = np.column_stack(columns)
    G = J.T @ J
    k = G.shape[0]
    lam2 = float(np.trace(G)) / k
    if k == 1:
        off = 0.0
    else:
        off = float(np.max(np.abs(G - np.diag(np.diag(G)))))
    spread = float(np.max(np.abs(np.diag(G) - lam2)))
    return ConformalityReport(
        scale_factor_observed=math.sqrt(lam2),
        scale_factor_predicted=predicted,
        off_diagonal_residual=off / lam2,
        diagonal_spread=spread / lam2,
    )


def conformality_check(
    p: SpherePoint, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> ConformalityReport:
    """Measure the local behaviour of the projection at ``p`` numerically.

    Walks central differences of size ``tol.fd_step`` along an
    orthonormal tangent frame, renormalizing each probe back onto the
    sphere, and compares J^T J against a scaled identity.  The predicted
    scale factor is ``1 / (1 - chi_last)``.

    Raises PoleProximityError when ``p`` sits so close to the pole band
    that a probe could cross it.
    """
    chi = p.coords
    h = tol.fd_step
    if chi[-1] > 1.0 - tol.eps_pole - 4.0 * h:
        raise PoleProximityError("point is within one probe step of the pole band")
    cols = []
    for t in tangent_basis(p):
        plus = normalize(chi + h * t, tol)
        minus = normalize(chi - h * t, tol)
        cols.append((stereo_project(plus) - stereo_project(minus)) / (2.0 * h))
    return _gram_report(cols, predicted=1.0 / (1.0 - float(chi[-1])))


def inverse_conformality_check(
    v, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> ConformalityReport:
    """Measure the local behaviour of the lift at flat point ``v``.

    Central differences along the standard axes, no renormalization
    needed because the domain is flat.  The predicted scale factor is
    ``2 / (|v|^2 + 1)``.
    """
    x = as_vector(v)
    h = tol.fd_step
    cols = []
    for i in range(x.size):
        step = np.zeros(x.size)
        step[i] = h
        cols.append((stereo_lift(x + step, tol).coords - stereo_lift(x - step, tol).coords) / (2.0 * h))
    s = float(x @ x)
    return _gram_report(cols, predicted=2.0 / (s + 1.0))
