"""Extended-precision reference implementations used to freeze expected values.

Everything here is computed with mpmath at 40 significant digits and rounded
to float64 only at the very end.  The main package must never import this
module; it exists so the numeric literals frozen into the tests were produced
by an independent route rather than by the code under test.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 40


def _vec(values):
    return [mp.mpf(v) for v in values]


def o_norm(x):
    return mp.sqrt(mp.fsum(c * c for c in x))


def o_normalize(x):
    """Unit vector along x, exact in extended precision."""
    n = o_norm(_vec(x))
    return [mp.mpf(c) / n for c in _vec(x)]


def o_project(p):
    """Stereographic projection from the unit sphere, pole at +last axis."""
    p = _vec(p)
    denom = 1 - p[-1]
    return [c / denom for c in p[:-1]]


def o_lift(x):
    """Inverse stereographic map of a point in flat space onto the sphere."""
    x = _vec(x)
    s = mp.fsum(c * c for c in x)
    denom = s + 1
    return [2 * c / denom for c in x] + [(s - 1) / denom]


def o_reduce_chain(x, target_dim):
    """Repeated normalize-then-project down to target_dim coordinates."""
    cur = _vec(x)
    while len(cur) > target_dim:
        cur = o_project(o_normalize(cur))
    return cur


def o_increase_chain(x, target_dim):
    """Repeated lift up to target_dim coordinates."""
    cur = _vec(x)
    while len(cur) < target_dim:
        cur = o_lift(cur)
    return cur


def o_angle(u, v):
    u, v = _vec(u), _vec(v)
    dot = mp.fsum(a * b for a, b in zip(u, v))
    c = dot / (o_norm(u) * o_norm(v))
    c = max(mp.mpf(-1), min(mp.mpf(1), c))
    return mp.acos(c)


def o_scale_factor_at_sphere_point(p):
    """Conformal scale of the projection at sphere point p."""
    p = _vec(p)
    return 1 / (1 - p[-1])


def o_scale_factor_at_flat_point(x):
    """Conformal scale of the lift at flat point x."""
    x = _vec(x)
    s = mp.fsum(c * c for c in x)
    return 2 / (s + 1)


def o_latitude_circle_radius(height):
    """Radius of the projected image of the circle at the given last coordinate."""
    h = mp.mpf(height)
    return mp.sqrt(1 - h * h) / (1 - h)


def as_floats(values):
    return [float(v) for v in values]
