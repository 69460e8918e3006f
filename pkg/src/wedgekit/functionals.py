"""Test functions, boundary functions on tubes, and the functionals they induce.

A test function here is an entire function that decays rapidly on every
horizontal strip; the built-in families (Gaussians, polynomial x Gaussian,
heat probes) all do.  A boundary function lives on an upper or lower tube
{side * Im z > ell} and carries an empirically validated polynomial-growth
certificate (order j, constant M).  A functional is either

* a contour pairing  u(phi) = integral of F(z) phi(z) dz along Im z = eta, or
* a finite point-mass combination  u(phi) = sum c_k phi(w_k).

The Cauchy transform turns a point-mass functional into a boundary-function
pair off its carrier, and ``carrier_probe`` drives heat probes into a
functional to decide on which side of the carrier a point of the real line
effectively lies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, PoleError
from .quadrature import LadderSpec, line_integral, make_contour

_TWO_PI_I = 2.0j * math.pi


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class TestFunction:
    """Entire test function with sampled strip-sup data.

    ``decay_scale`` and ``center_real`` are hints used to place truncation
    windows for contour quadrature.
    """

    family: str
    params: tuple
    n: int = 1
    decay_scale: float = 1.0
    center_real: float = 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.family == "gaussian":
            c, s = self.params
            if self.n == 1:
                return np.exp(-(((z - c) / s) ** 2))
            return np.exp(-((((z - np.asarray(c)) / s) ** 2).sum(axis=-1)))
        if self.family == "poly_gaussian":
            coeffs = np.asarray(self.params, dtype=complex)
            return np.polynomial.polynomial.polyval(z, coeffs) * np.exp(-(z**2))
        if self.family == "heat_probe":
            xi, t = self.params
            norm = (4.0 * math.pi * t) ** (-self.n / 2.0)
            if self.n == 1:
                return norm * np.exp(-((xi - z) ** 2) / (4.0 * t))
            diff = np.asarray(xi) - z
            return norm * np.exp(-(diff**2).sum(axis=-1) / (4.0 * t))
        raise InvalidArgument(f"unknown test-function family {self.family!r}")

    def strip_sup(self, k, max_power=2, re_window=30.0, grid=241):
        """Sampled sup of |z^p phi(z)| over the tube |Im z| <= k, |p| <= max_power."""
        if self.n != 1:
            raise InvalidArgument("strip norms are sampled for n=1 only")
        x = np.linspace(-re_window, re_window, grid) + self.center_real
        y = np.linspace(-k, k, 9)
        z = (x[:, None] + 1j * y[None, :]).reshape(-1)
        vals = np.abs(self(z))
        radii = np.abs(z)
        return float(max((radii**p * vals).max() for p in range(max_power + 1)))


def gaussian(center=0.0, width=1.0, n=1):
    """exp(-((z - c)/s)^2), coordinatewise-summed for n > 1."""
    if width <= 0:
        raise InvalidArgument("gaussian width must be positive")
    c = complex(center) if n == 1 else tuple(complex(v) for v in center)
    center_real = c.real if n == 1 else 0.0
    return TestFunction("gaussian", (c, float(width)), n, float(width), center_real)


def poly_gaussian(coeffs):
    """(sum_k c_k z^k) exp(-z^2) in one variable; coefficients ascending."""
    cs = tuple(complex(c) for c in coeffs)
    if not cs:
        raise InvalidArgument("need at least one coefficient")
    return TestFunction("poly_gaussian", cs, 1, 1.0, 0.0)


def heat_probe(xi, t, n=1):
    """(4 pi t)^{-n/2} exp(-(xi - z)^2 / 4t) with the holomorphic square."""
    if t <= 0:
        raise InvalidArgument("heat probe needs t > 0")
    if n == 1:
        xi = float(np.asarray(xi).reshape(-1)[0])
        center = xi
        params = (xi, float(t))
    else:
        xi = tuple(float(v) for v in np.asarray(xi).reshape(-1))
        if len(xi) != n:
            raise InvalidArgument("heat probe center has the wrong dimension")
        center = 0.0
        params = (xi, float(t))
    return TestFunction("heat_probe", params, n, max(2.0 * math.sqrt(t), 1e-3), center)


# ---------------------------------------------------------------------------
# boundary functions


@dataclass
class BoundaryFunction:
    """Holomorphic function on a tube {side * Im z > ell} with a growth tag.

    The (growth_order, growth_const) pair certifies
    sup |F(z)| (1 + |z|)^{-growth_order} <= growth_const on the sampled
    compact sub-tubes; it is checked empirically at construction.
    """

    family: str
    params: tuple
    side: int
    ell: float
    growth_order: int = 0
    growth_const: float | None = None
    poles: tuple = ()
    evaluator: object = None
    n: int = 1

    def __post_init__(self):
        if self.side not in (1, -1):
            raise InvalidArgument("side must be +1 (upper tube) or -1 (lower)")
        if self.ell < 0:
            raise InvalidArgument("tube shift ell must be nonnegative")
        for p in self.poles:
            if self.side * complex(p).imag > self.ell:
                raise InvalidArgument(f"pole {p} lies inside the tube")
        observed = self._observed_growth()
        if self.growth_const is None:
            self.growth_const = 1.5 * observed
        elif observed > self.growth_const * (1.0 + 1e-9):
            raise InvalidArgument(
                f"growth certificate violated: observed {observed:.3e} exceeds "
                f"M={self.growth_const:.3e} at order j={self.growth_order}"
            )

    def _observed_growth(self, k=2.0, re_window=40.0):
        x = np.concatenate([-np.logspace(-1, np.log10(re_window), 25),
                            np.logspace(-1, np.log10(re_window), 25)])
        y = self.side * (self.ell + np.linspace(0.05, k, 7))
        z = (x[:, None] + 1j * y[None, :]).reshape(-1)
        vals = np.abs(self(z)) * (1.0 + np.abs(z)) ** (-self.growth_order)
        return float(vals.max())

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.family == "polynomial":
            return np.polynomial.polynomial.polyval(z, np.asarray(self.params, dtype=complex))
        if self.family == "rational":
            out = np.ones_like(z)
            for p in self.params:
                diff = z - p
                if np.any(np.abs(diff) < 1e-12):
                    raise PoleError(f"rational boundary function evaluated at pole {p}")
                out = out / diff
            return out
        if self.family == "cauchy_transform":
            masses = self.params
            out = np.zeros_like(z)
            for c, w in masses:
                diff = w - z
                if np.any(np.abs(diff) < 1e-12):
                    raise PoleError(f"Cauchy transform evaluated at its mass point {w}")
                out = out + c / diff
            return out / _TWO_PI_I
        if self.family == "custom":
            return np.asarray(self.evaluator(z), dtype=complex)
        raise InvalidArgument(f"unknown boundary family {self.family!r}")


def polynomial_boundary(coeffs, side, ell):
    cs = tuple(complex(c) for c in coeffs)
    degree = len(cs) - 1
    return BoundaryFunction("polynomial", cs, side, ell, growth_order=degree)


def rational_boundary(poles, side, ell):
    ps = tuple(complex(p) for p in poles)
    return BoundaryFunction("rational", ps, side, ell, growth_order=0, poles=ps)


def custom_boundary(evaluator, side, ell, growth_order=0, growth_const=None):
    return BoundaryFunction(
        "custom", (), side, ell, growth_order=growth_order,
        growth_const=growth_const, evaluator=evaluator,
    )


def cauchy_transform(masses, ell):
    """Boundary-function pair F(z) = (2 pi i)^{-1} sum c_k / (w_k - z).

    ``masses`` is a sequence of (coefficient, location) pairs whose locations
    must satisfy |Im w| < ell so that both tube restrictions are holomorphic.
    Returns the (upper, lower) restrictions with order-0 growth certificates.
    """
    ms = tuple((complex(c), complex(w)) for c, w in masses)
    if not ms:
        raise InvalidArgument("need at least one point mass")
    for _, w in ms:
        if abs(w.imag) >= ell:
            raise InvalidArgument(
                f"mass at {w} is outside the strip |Im w| < ell = {ell}"
            )
    poles = tuple(w for _, w in ms)
    upper = BoundaryFunction("cauchy_transform", ms, +1, ell, growth_order=0, poles=poles)
    lower = BoundaryFunction("cauchy_transform", ms, -1, ell, growth_order=0, poles=poles)
    return upper, lower


# ---------------------------------------------------------------------------
# functionals


@dataclass(frozen=True)
class Ultrahyperfunction:
    """A functional on test functions: contour pairing or point masses."""

    boundary: BoundaryFunction | None = None
    height: float | None = None
    masses: tuple | None = None
    n: int = 1

    @classmethod
    def from_boundary(cls, boundary, height=None):
        if height is None:
            height = boundary.side * (boundary.ell + 0.5)
        if boundary.side * height <= boundary.ell:
            raise InvalidArgument(
                f"contour height {height} is outside the tube "
                f"side={boundary.side}, ell={boundary.ell}"
            )
        return cls(boundary=boundary, height=float(height))

    @classmethod
    def from_masses(cls, masses, n=1):
        ms = tuple((complex(c), complex(w)) for c, w in masses)
        if not ms:
            raise InvalidArgument("point-mass functional needs at least one mass")
        return cls(masses=ms, n=n)

    @property
    def is_point_masses(self):
        return self.masses is not None

    def default_contour(self, phi, height=None, step=0.01, extra=4.0):
        eta = self.height if height is None else height
        span = 12.0 * max(1.0, phi.decay_scale) + abs(phi.center_real) + extra
        return make_contour((eta,), span, step)

    def apply(self, phi, contour=None):
        """Pair the functional with a test function.

        Point masses evaluate exactly; boundary variants integrate F * phi
        along the stored contour height (or an override contour).
        """
        if self.is_point_masses:
            return complex(sum(c * complex(phi(np.asarray(w))) for c, w in self.masses))
        if contour is None:
            contour = self.default_contour(phi)
        else:
            eta = contour.heights[0]
            if self.boundary.side * eta <= self.boundary.ell:
                raise InvalidArgument(
                    f"override contour height {eta} is outside the tube"
                )
        F = self.boundary
        return complex(line_integral(lambda z: F(z) * phi(z), contour).value)


def encircling_pairing(F, phi, rect, panel=0.1, order=16):
    """-closed-contour integral of F phi around a rectangle, positively oriented.

    ``rect`` is (re_min, re_max, im_min, im_max).  This realizes the pairing
    of a functional with carrier inside the rectangle from its Cauchy
    transform; the sign convention is pinned by the round-trip identity
    -contour integral = f(phi) for point masses.  Each side is integrated by
    composite Gauss-Legendre panels (spectrally accurate on analytic sides).
    """
    re0, re1, im0, im1 = rect
    if not (re0 < re1 and im0 < im1):
        raise InvalidArgument("degenerate rectangle")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    corners = [complex(re0, im0), complex(re1, im0), complex(re1, im1), complex(re0, im1)]
    total = 0.0 + 0.0j
    for a, b in zip(corners, corners[1:] + corners[:1]):
        seg = b - a
        m = max(2, int(math.ceil(abs(seg) / panel)))
        edges = a + (np.arange(m + 1) / m) * seg
        mids = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        zs = (mids[:, None] + half * nodes[None, :]).reshape(-1)
        ws = np.tile(weights, m) * half
        total += (np.asarray(F(zs)) * np.asarray(phi(zs)) * ws).sum()
    return -total


# ---------------------------------------------------------------------------
# heat-probe carrier detection


@dataclass(frozen=True)
class CarrierProbeReport:
    verdict: str
    t_values: tuple
    magnitudes: tuple
    bounds: tuple
    ratios: tuple


#: Default ladder for carrier probing; deep enough for exponent gaps ~ 0.01.
CARRIER_PROBE_LADDER = LadderSpec(start=0.5, ratio=0.5, rungs=12, order=1)

_DECAY_FACTOR = 10.0
_FLOOR = 1e-280


def _theoretical_bound(carrier_points, growth_order, xi, t, n=1):
    """sup over sampled carrier points of the heat-probe envelope."""
    w = np.asarray(carrier_points, dtype=complex)
    if w.ndim == 1:
        w = w.reshape(-1, 1)
    d2 = np.linalg.norm(np.asarray(xi, dtype=float).reshape(1, -1) - w.real, axis=1) ** 2
    im2 = np.linalg.norm(w.imag, axis=1) ** 2
    logs = (
        growth_order * np.log1p(np.linalg.norm(w, axis=1))
        - (n / 2.0) * math.log(4.0 * math.pi * t)
        + (im2 - d2) / (4.0 * t)
    )
    top = float(logs.max())
    return math.inf if top > 700.0 else math.exp(top)


def carrier_probe(u_diff, carrier, xi, ladder=None, growth_order=0, rng=None):
    """Drive heat probes into a functional and classify the t -> 0 behavior.

    Verdict ``decays`` requires the magnitude to drop by at least a factor of
    10 per rung over the last three rungs; ``grows`` a non-decreasing tail;
    anything else is ``inconclusive``.  The report also carries the carrier
    envelope bound computed from sampled carrier points.
    """
    ladder = ladder or CARRIER_PROBE_LADDER
    if ladder.rungs < 4:
        raise InvalidArgument("carrier probing needs at least 4 rungs")
    ts = ladder.values()
    n = u_diff.n
    mags = []
    for t in ts:
        probe = heat_probe(xi, float(t), n=n)
        try:
            val = u_diff.apply(probe)
        except OverflowError:
            val = complex(math.inf, 0.0)
        mags.append(abs(val))
    mags = np.asarray(mags)

    if hasattr(carrier, "array"):
        pts = carrier.array()
    elif hasattr(carrier, "sample"):
        rng = rng or np.random.default_rng(0)
        pts = carrier.sample(rng, 2048)
    else:
        pts = np.asarray(carrier, dtype=complex)
    bounds = tuple(_theoretical_bound(pts, growth_order, xi, float(t), n) for t in ts)

    ratios = []
    for a, b in zip(mags[:-1], mags[1:]):
        if b == 0.0:
            ratios.append(math.inf if a > 0 else 1.0)
        elif not np.isfinite(b) or not np.isfinite(a):
            ratios.append(0.0)
        else:
            ratios.append(float(a / b))
    tail = ratios[-2:]

    if (mags < _FLOOR).all():
        verdict = "decays"
    elif not np.isfinite(mags[-1]):
        verdict = "grows"
    elif mags[-1] < _FLOOR and mags.max() >= _FLOOR:
        verdict = "decays"
    elif all(rho >= _DECAY_FACTOR for rho in tail):
        verdict = "decays"
    elif all(rho <= 1.0 for rho in tail):
        verdict = "grows"
    else:
        verdict = "inconclusive"

    return CarrierProbeReport(
        verdict=verdict,
        t_values=tuple(float(t) for t in ts),
        magnitudes=tuple(float(m) for m in mags),
        bounds=bounds,
        ratios=tuple(float(r) for r in ratios),
    )
