"""Shared numerical integration.

Three tools used everywhere else in the package:

* uniform (midpoint) rules on truncated horizontal product contours in C^n,
* quadrature over the unit sphere S^{n-1} for n in {1, 2, 3},
* Richardson extrapolation of t -> 0+ ladders.

The integrands this package meets are analytic and rapidly decreasing along
their contours, where uniform rules converge super-algebraically.  Step
halving therefore gives a cheap and usually very pessimistic error estimate.

The n = 1 "sphere" is the two-point set {+1, -1} carrying counting measure,
so a sphere average there is a two-term *sum*, not a mean.  All reconstruction
formulas in the package rely on that convention consistently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, EvaluationError, InvalidArgument

SPHERE_SURFACE = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}

#: Sphere-node counts used when a caller does not override them.
DEFAULT_SPHERE_NODES = {1: 2, 2: 256, 3: (10, 59)}


@dataclass(frozen=True)
class QuadResult:
    """Value of a contour integral with a step-halving error estimate."""

    value: complex
    error: float
    tail: float

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class ContourSpec:
    """Truncated horizontal product contour prod_j { x + i eta_j : |x| <= X }.

    Orientation is fixed left-to-right in every coordinate.  ``truncation``
    must be an integer multiple of ``step``.
    """

    heights: tuple
    truncation: float = 12.0
    step: float = 0.01

    def __post_init__(self):
        if not self.heights:
            raise InvalidArgument("contour needs at least one height")
        if self.step <= 0:
            raise InvalidArgument("contour step must be positive")
        if self.truncation <= 0:
            raise InvalidArgument("contour truncation must be positive")
        ratio = self.truncation / self.step
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise InvalidArgument("truncation/step must be an integer")

    @property
    def n(self):
        return len(self.heights)

    def nodes(self, step=None):
        h = self.step if step is None else step
        m = int(round(2.0 * self.truncation / h))
        return -self.truncation + (np.arange(m) + 0.5) * h


def make_contour(heights, truncation, step=0.01):
    """Build a ContourSpec, rounding the truncation up to a step multiple."""
    if np.isscalar(heights):
        heights = (float(heights),)
    m = max(1, math.ceil(truncation / step - 1e-12))
    return ContourSpec(tuple(float(e) for e in heights), m * step, step)


def _geometric_tail(outer, inner, h):
    # Bound sum_{k>=1} |f| h past the window assuming geometric decay
    # estimated from the two outermost samples.
    if outer <= 0.0:
        return 0.0
    if outer < inner:
        q = outer / inner
        return h * outer * q / (1.0 - q)
    # no decay detected: charge a full extra window of the edge magnitude
    return h * outer * 100.0


def _tail_estimate(fv, h, n, m):
    a = np.abs(fv).reshape((m,) * n)
    if n == 1:
        return _geometric_tail(a[-1], a[-2], h) + _geometric_tail(a[0], a[1], h)
    total = 0.0
    span = m * h
    for axis in range(n):
        lo = np.moveaxis(a, axis, 0)
        total += span ** (n - 1) * (
            _geometric_tail(lo[-1].max(), lo[-2].max(), h)
            + _geometric_tail(lo[0].max(), lo[1].max(), h)
        )
    return total


def _contour_sum(f, contour, h):
    x = contour.nodes(h)
    m = x.size
    with np.errstate(all="ignore"):
        if contour.n == 1:
            z = x + 1j * contour.heights[0]
            fv = np.asarray(f(z), dtype=complex)
            if fv.shape != z.shape:
                raise EvaluationError("integrand must return one value per node")
            value = fv.sum() * h
        else:
            grids = np.meshgrid(*([x] * contour.n), indexing="ij")
            pts = np.stack([g.reshape(-1) for g in grids], axis=-1).astype(complex)
            pts = pts + 1j * np.asarray(contour.heights)
            fv = np.asarray(f(pts), dtype=complex)
            if fv.shape != (pts.shape[0],):
                raise EvaluationError("integrand must return one value per node")
            value = fv.sum() * h ** contour.n
    if not np.isfinite(fv).all():
        raise EvaluationError("integrand produced non-finite samples")
    return value, fv, m


def line_integral(f, contour, tolerance=None):
    """Integrate ``f`` over a horizontal product contour.

    ``f`` receives a complex vector of nodes (n = 1) or an (m, n) array of
    contour points (n >= 2) and must return one value per point.  Returns a
    QuadResult whose error field combines a step-halving estimate with a
    geometric-decay tail bound taken from the outermost samples.
    """
    coarse, _, _ = _contour_sum(f, contour, contour.step)
    fine, fv, m = _contour_sum(f, contour, contour.step / 2.0)
    err = abs(fine - coarse)
    tail = _tail_estimate(fv, contour.step / 2.0, contour.n, m)
    result = QuadResult(fine, err + tail, tail)
    if tolerance is not None and result.error > tolerance:
        raise AccuracyError(
            f"contour quadrature error estimate {result.error:.3e} exceeds "
            f"tolerance {tolerance:.3e}",
            estimate=result.error,
            tolerance=tolerance,
        )
    return result


def sphere_nodes(n, count=None):
    """Nodes and weights integrating over S^{n-1} (surface measure).

    n = 1 returns {+1, -1} with unit weights; n = 2 an equi-angular circle
    rule; n = 3 a Gauss-Legendre (polar) x trapezoid (azimuthal) product grid.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        m = int(count or DEFAULT_SPHERE_NODES[2])
        if m < 4:
            raise InvalidArgument("need at least 4 circle nodes")
        th = 2.0 * math.pi * np.arange(m) / m
        return np.stack([np.cos(th), np.sin(th)], axis=-1), np.full(m, 2.0 * math.pi / m)
    if n == 3:
        if count is None:
            n_u, n_phi = DEFAULT_SPHERE_NODES[3]
        else:
            n_u, n_phi = count
        if n_u < 2 or n_phi < 4:
            raise InvalidArgument("sphere product grid too coarse")
        u, wu = np.polynomial.legendre.leggauss(int(n_u))
        phi = 2.0 * math.pi * np.arange(int(n_phi)) / int(n_phi)
        su = np.sqrt(1.0 - u**2)
        omegas = np.stack(
            [
                np.repeat(u, n_phi),
                np.repeat(su, n_phi) * np.tile(np.cos(phi), n_u),
                np.repeat(su, n_phi) * np.tile(np.sin(phi), n_u),
            ],
            axis=-1,
        )
        weights = np.repeat(wu, n_phi) * (2.0 * math.pi / n_phi)
        return omegas, weights
    raise InvalidArgument(f"sphere quadrature supports n in {{1, 2, 3}}, got n={n}")


def max_angular_gap(n, count=None):
    """Largest angular spacing of the sphere rule; drives shrink margins."""
    if n == 1:
        return 0.0
    if n == 2:
        m = int(count or DEFAULT_SPHERE_NODES[2])
        return 2.0 * math.pi / m
    if n == 3:
        if count is None:
            n_u, n_phi = DEFAULT_SPHERE_NODES[3]
        else:
            n_u, n_phi = count
        u, _ = np.polynomial.legendre.leggauss(int(n_u))
        th = np.sort(np.arccos(u))
        gaps = np.diff(np.concatenate([[0.0], th, [math.pi]]))
        return max(gaps.max(), 2.0 * math.pi / int(n_phi))
    raise InvalidArgument(f"sphere quadrature supports n in {{1, 2, 3}}, got n={n}")


def sphere_average(g, n, count=None):
    """Integral of ``g`` over S^{n-1} with surface measure.

    ``g`` receives an (m, n) array of unit vectors and returns one value per
    row.  For n = 1 this is the two-term sum g(+1) + g(-1).
    """
    omegas, weights = sphere_nodes(n, count)
    vals = np.asarray(g(omegas), dtype=complex)
    if vals.shape != (omegas.shape[0],):
        raise EvaluationError("sphere integrand must return one value per node")
    out = complex((vals * weights).sum())
    return out.real if abs(out.imag) < 1e-300 else out


@dataclass(frozen=True)
class LadderSpec:
    """Decreasing geometric t-ladder with a Richardson extrapolation order."""

    start: float = 0.5
    ratio: float = 0.5
    rungs: int = 8
    order: int = 2

    def __post_init__(self):
        if self.start <= 0 or not (0.0 < self.ratio < 1.0):
            raise InvalidArgument("ladder needs start > 0 and 0 < ratio < 1")
        if self.rungs < 1:
            raise InvalidArgument("ladder needs at least one rung")
        if self.order < 0:
            raise InvalidArgument("extrapolation order must be >= 0")

    def values(self):
        return self.start * self.ratio ** np.arange(self.rungs)


@dataclass(frozen=True)
class LadderResult:
    limit: complex
    confidence: float
    diverging: bool
    corrections: tuple


def ladder_limit(values, ladder):
    """Richardson-extrapolated t -> 0 limit of a sampled ladder.

    Assumes the leading error is O(t) with higher integer powers after it,
    which is what the heat-probe pairings in this package obey.  Divergence
    (growing corrections down the ladder) is reported, not raised.
    """
    v = np.asarray(values, dtype=complex)
    if v.size < 3:
        raise InvalidArgument("ladder extrapolation needs at least 3 rungs")
    if not np.isfinite(v).all():
        raise EvaluationError("ladder contains non-finite rungs")
    diffs = np.abs(np.diff(v))
    diverging = bool(v.size >= 4 and diffs[-1] > diffs[-2] > diffs[-3] > 0)

    rho = ladder.ratio
    depth = min(ladder.order, v.size - 1)
    table = [v.copy()]
    for j in range(1, depth + 1):
        prev = table[-1]
        table.append((prev[j:] - rho**j * prev[j - 1 : -1]) / (1.0 - rho**j))
    limit = table[-1][-1]
    if depth == 0:
        confidence = float(diffs[-1]) if diffs.size else 0.0
    else:
        confidence = float(abs(table[-1][-1] - table[-2][-1]))
    corrections = tuple(float(abs(t[-1] - table[0][-1])) for t in table[1:])
    if diverging:
        confidence = float("inf")
    return LadderResult(complex(limit), confidence, diverging, corrections)


def cauchy_riemann_residual(f, z, h=1e-4):
    """Finite-difference Cauchy-Riemann defect |d f/dy - i d f/dx| at z."""
    fx = (f(z + h) - f(z - h)) / (2.0 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2.0 * h)
    return abs(fy - 1j * fx)
