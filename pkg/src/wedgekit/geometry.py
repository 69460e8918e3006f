"""Cone, carrier and tube geometry.

Everything here is a membership predicate or a distance/margin function;
regions are never meshed.  The central object is the carrier gap

    gap_r(x) = inf over carrier points w of sqrt(r^2 + |x - Re w|^2) - |Im w|,

whose super-level set {gap_r > r} is where the continuation drivers in
``continuation`` succeed.  For box and point-cloud carriers the infimum has
a closed form; for the light-cone neighborhood it is bracketed by stratified
sampling plus a deterministic refinement candidate (project the real part
onto the cone, concentrate the imaginary budget on one coordinate), which is
provably optimal for this carrier, so the reported uncertainty is tiny.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .quadrature import max_angular_gap, sphere_nodes

SQRT2 = math.sqrt(2.0)

#: Interior standoff keeping sampled carrier points strictly inside open sets.
_INTERIOR = 1e-9


def _vec(x, n):
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size != n:
        raise InvalidArgument(f"expected a real {n}-vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class Cone:
    """Shifted round cone  shift * axis + {y : <y, axis> > |y_perp|}.

    With ``shift = 0`` this is the open forward light cone; ``negated``
    selects the opposite cone.  The axis defaults to (1, 0, ..., 0).
    """

    n: int
    shift: float = 0.0
    axis: tuple | None = None
    negated: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument("cone dimension must be >= 1")
        if self.shift < 0:
            raise InvalidArgument("cone shift must be nonnegative")
        if self.axis is not None:
            a = np.asarray(self.axis, dtype=float)
            if a.size != self.n:
                raise InvalidArgument("axis length must match the dimension")
            if abs(np.linalg.norm(a) - 1.0) > 1e-9:
                raise InvalidArgument("axis must be a unit vector")

    def axis_vector(self):
        if self.axis is not None:
            return np.asarray(self.axis, dtype=float)
        e = np.zeros(self.n)
        e[0] = 1.0
        return e

    def flip(self):
        return Cone(self.n, self.shift, self.axis, not self.negated)


def _axis_split(pts, cone):
    """Axis and transverse components relative to the cone apex."""
    p = np.atleast_2d(np.asarray(pts, dtype=float))
    if p.shape[1] != cone.n:
        raise InvalidArgument(
            f"dimension mismatch: points in R^{p.shape[1]}, cone in R^{cone.n}"
        )
    if cone.negated:
        p = -p
    e = cone.axis_vector()
    u = p @ e - cone.shift
    perp = p - np.outer(p @ e, e)
    s = np.linalg.norm(perp, axis=1)
    return u, s, perp


def cone_margin(y, cone):
    """Signed margin of the open-cone inequality; > 0 iff inside."""
    u, s, _ = _axis_split(np.atleast_2d(_vec(y, cone.n)), cone)
    return float(u[0] - s[0])


def cone_contains(y, cone):
    return cone_margin(y, cone) > 0.0


def cone_distance(x, cone):
    """Euclidean distance to the *closed* cone (vectorized over rows)."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    scalar = np.asarray(x).ndim == 1
    u, s, _ = _axis_split(pts, cone)
    d = np.empty(u.shape)
    inside = u >= s
    apex = (~inside) & (-u >= s)
    wedge = ~(inside | apex)
    d[inside] = 0.0
    d[apex] = np.sqrt(u[apex] ** 2 + s[apex] ** 2)
    d[wedge] = (s[wedge] - u[wedge]) / SQRT2
    return float(d[0]) if scalar else d


def cone_projection(x, cone):
    """Closest point of the closed cone (closed form for the 45-degree cone)."""
    v = _vec(x, cone.n)
    sign = -1.0 if cone.negated else 1.0
    p = sign * v - cone.shift * cone.axis_vector()
    e = cone.axis_vector()
    u = float(p @ e)
    perp = p - u * e
    s = float(np.linalg.norm(perp))
    if u >= s:
        proj = p
    elif -u >= s:
        proj = np.zeros(cone.n)
    else:
        t = 0.5 * (u + s)
        proj = t * e + (t / s) * perp
    return sign * (proj + cone.shift * cone.axis_vector())


# ---------------------------------------------------------------------------
# carriers


@dataclass(frozen=True)
class BoxCarrier:
    """One-variable carrier [a, b] + i [-ell, ell]."""

    a: float
    b: float
    ell: float
    n: int = field(default=1, init=False)

    def __post_init__(self):
        if self.b < self.a:
            raise InvalidArgument("box carrier needs a <= b")
        if self.ell < 0:
            raise InvalidArgument("box carrier needs ell >= 0")

    def contains(self, w):
        w = complex(w)
        return self.a <= w.real <= self.b and abs(w.imag) <= self.ell

    def corners(self):
        return tuple(
            complex(re, im) for re in (self.a, self.b) for im in (-self.ell, self.ell)
        )

    def sample(self, rng, count=512):
        re = rng.uniform(self.a, self.b, count)
        im = rng.uniform(-self.ell, self.ell, count)
        return re + 1j * im


@dataclass(frozen=True)
class PointCloudCarrier:
    """Finite set of complex n-points."""

    points: tuple
    n: int = 1

    def __post_init__(self):
        if not self.points:
            raise InvalidArgument("point-cloud carrier must be nonempty")

    def array(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.shape[1] != self.n:
            raise InvalidArgument("point-cloud dimension mismatch")
        return pts

    def sample(self, rng=None, count=None):
        pts = self.array()
        return pts[:, 0] if self.n == 1 else pts


@dataclass(frozen=True)
class LightConeCarrier:
    """ell-neighborhood of the forward light cone in R^4 (mixed 1-norm).

    Contains w iff some cone point x has |Re w - x| + |Im w|_1 < ell.
    """

    ell: float
    n: int = 4
    samples: int = 100_000

    def __post_init__(self):
        if self.ell <= 0:
            raise InvalidArgument("light-cone carrier needs ell > 0")
        if self.n < 2:
            raise InvalidArgument("light-cone carrier needs n >= 2")

    def cone(self):
        return Cone(self.n, 0.0)

    def defect(self, w):
        """dist(Re w, cone) + |Im w|_1 - ell; < 0 iff w is in the carrier."""
        w = np.asarray(w, dtype=complex).reshape(-1)
        if w.size != self.n:
            raise InvalidArgument("carrier point dimension mismatch")
        return float(
            cone_distance(w.real.reshape(1, -1), self.cone())[0]
            + np.abs(w.imag).sum()
            - self.ell
        )

    def contains(self, w):
        return self.defect(w) < 0.0

    def sample(self, rng, count=None, window=None):
        m = int(count or self.samples)
        window = window or max(8.0 * self.ell, 4.0)
        u = rng.uniform(0.0, window, m)
        srad = rng.uniform(0.0, 1.0, m) * u
        dirs = rng.normal(size=(m, self.n - 1))
        dirs /= np.maximum(np.linalg.norm(dirs, axis=1, keepdims=True), 1e-300)
        base = np.zeros((m, self.n))
        base[:, 0] = u
        base[:, 1:] = srad[:, None] * dirs

        budget = self.ell * (1.0 - _INTERIOR) * rng.uniform(0.0, 1.0, m)
        re_frac = rng.uniform(0.0, 1.0, m)
        re_dirs = rng.normal(size=(m, self.n))
        re_dirs /= np.maximum(np.linalg.norm(re_dirs, axis=1, keepdims=True), 1e-300)
        re_off = (budget * re_frac)[:, None] * re_dirs

        expo = rng.exponential(1.0, (m, self.n))
        expo /= expo.sum(axis=1, keepdims=True)
        signs = rng.choice((-1.0, 1.0), (m, self.n))
        im = (budget * (1.0 - re_frac))[:, None] * expo * signs
        return base + re_off + 1j * im


@dataclass(frozen=True)
class GapValue:
    value: float
    uncertainty: float


def carrier_gap(x, carrier, r, rng=None):
    """inf over carrier points w of sqrt(r^2 + |x - Re w|^2) - |Im w|.

    Exact for box and point-cloud carriers; sampled plus analytically refined
    for the light-cone carrier (certified upper bound of the infimum).
    """
    if r <= 0:
        raise InvalidArgument("carrier gap needs r > 0")
    if isinstance(carrier, BoxCarrier):
        xv = float(np.asarray(x).reshape(-1)[0])
        d = max(0.0, max(carrier.a - xv, xv - carrier.b))
        return GapValue(math.sqrt(r**2 + d**2) - carrier.ell, 0.0)
    if isinstance(carrier, PointCloudCarrier):
        xv = _vec(x, carrier.n)
        pts = carrier.array()
        dist = np.linalg.norm(pts.real - xv, axis=1)
        vals = np.sqrt(r**2 + dist**2) - np.linalg.norm(pts.imag, axis=1)
        return GapValue(float(vals.min()), 0.0)
    if isinstance(carrier, LightConeCarrier):
        xv = _vec(x, carrier.n)
        y = float(cone_distance(xv.reshape(1, -1), carrier.cone())[0])
        refined = math.sqrt(r**2 + y**2) - carrier.ell * (1.0 - _INTERIOR)
        best = refined
        if rng is not None and carrier.samples > 0:
            w = carrier.sample(rng)
            dist = np.linalg.norm(w.real - xv, axis=1)
            vals = np.sqrt(r**2 + dist**2) - np.linalg.norm(w.imag, axis=1)
            best = min(best, float(vals.min()))
        return GapValue(best, carrier.ell * 1e-8)
    raise InvalidArgument(f"unsupported carrier type {type(carrier).__name__}")


def lightcone_gap_bound(x, carrier, r):
    """Closed-form upper bound sqrt(r^2 + dist(x, cone)^2) - ell."""
    if not isinstance(carrier, LightConeCarrier):
        raise InvalidArgument("gap bound is specific to the light-cone carrier")
    y = float(cone_distance(_vec(x, carrier.n).reshape(1, -1), carrier.cone())[0])
    return math.sqrt(r**2 + y**2) - carrier.ell


def continuation_region_membership(x, carrier, r, rng=None):
    """Membership (with margin) in the region {gap_r(x) > r}."""
    gap = carrier_gap(x, carrier, r, rng)
    margin = gap.value - r
    return margin > 0.0, margin


def region_threshold(ell, r):
    """Distance threshold sqrt(ell (2 r + ell)) implied by the gap bound."""
    return math.sqrt(ell * (2.0 * r + ell))


def auto_scale(ell):
    """The scale r = ell / (sqrt(2) - 1), nudged strictly above threshold."""
    return ell / (SQRT2 - 1.0) * (1.0 + 1e-6)


def shrunken_region_membership(x, carrier, r, margin, rng=None, directions=32, shells=6):
    """Membership in {x : dist(x, complement of the region) > margin}.

    Checked by sampling the closed ball of radius ``margin`` around x and
    requiring every sample to stay in the region.  Returns (member, smallest
    sampled gap margin).  An empty result is a valid outcome, not an error.
    """
    if margin <= 0:
        raise InvalidArgument("shrink margin must be positive")
    n = getattr(carrier, "n", 1)
    xv = _vec(x, n)
    offsets = [np.zeros(n)]
    if n == 1:
        for t in np.linspace(-1.0, 1.0, 2 * shells + 1):
            offsets.append(np.array([t * margin * (1.0 - 1e-9)]))
    else:
        rng = rng or np.random.default_rng(0)
        dirs = rng.normal(size=(directions, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        for rho in np.linspace(1.0 / shells, 1.0 - 1e-9, shells):
            for d in dirs:
                offsets.append(rho * margin * d)
    worst = math.inf
    for off in offsets:
        _, m = continuation_region_membership(xv + off, carrier, r, rng)
        worst = min(worst, m)
        if worst <= 0.0:
            return False, worst
    return True, worst


def lightcone_shrunken_threshold(ell):
    """Explicit distance threshold (sqrt(2) + 3) ell for the shrunken region."""
    return (SQRT2 + 3.0) * ell


def explicit_lightcone_shrunken_membership(x, carrier):
    """Explicit shrunken region {dist(x, cone) > (sqrt(2) + 3) ell}."""
    if not isinstance(carrier, LightConeCarrier):
        raise InvalidArgument("explicit shrunken region needs the light-cone carrier")
    y = float(cone_distance(_vec(x, carrier.n).reshape(1, -1), carrier.cone())[0])
    margin = y - lightcone_shrunken_threshold(carrier.ell)
    return margin > 0.0, margin


# ---------------------------------------------------------------------------
# tubes


def _complex_point(z, n):
    v = np.asarray(z, dtype=complex).reshape(-1)
    if v.size != n:
        raise InvalidArgument(f"expected a complex {n}-point, got {v.size} entries")
    return v


def tube_margin(z, which, *, cone=None, r=None, carrier=None, half_width=None, rng=None):
    """Signed membership margin for the tube domains used downstream.

    ``which`` selects: ``upper`` (dist(Im z, cone) < r), ``lower`` (the
    negated cone), ``kernel_safe`` (the kernel-holomorphy condition against
    every carrier point), or ``strip`` (|Im z| < half_width).
    """
    if which in ("upper", "lower"):
        if cone is None or r is None:
            raise InvalidArgument("tube membership needs a cone and a radius")
        c = cone if which == "upper" else cone.flip()
        y = _complex_point(z, cone.n).imag
        return float(r - cone_distance(y.reshape(1, -1), c)[0])
    if which == "strip":
        if half_width is None:
            raise InvalidArgument("strip membership needs a half width")
        n = getattr(carrier, "n", None) or (cone.n if cone else np.asarray(z).reshape(-1).size)
        y = _complex_point(z, n).imag
        return float(half_width - np.linalg.norm(y))
    if which == "kernel_safe":
        if carrier is None or r is None:
            raise InvalidArgument("kernel-safe membership needs a carrier and r")
        zv = _complex_point(z, carrier.n)
        if isinstance(carrier, BoxCarrier):
            x = float(zv.real[0])
            d = max(0.0, max(carrier.a - x, x - carrier.b))
            return float(math.sqrt(r**2 + d**2) - (abs(zv.imag[0]) + carrier.ell))
        if isinstance(carrier, PointCloudCarrier):
            w = carrier.array()
        else:
            rng = rng or np.random.default_rng(0)
            w = carrier.sample(rng, count=min(carrier.samples, 20_000))
        if w.ndim == 1:
            w = w.reshape(-1, 1)
        dre = np.linalg.norm(zv.real - w.real, axis=1)
        dim = np.linalg.norm(zv.imag - w.imag, axis=1)
        return float((np.sqrt(r**2 + dre**2) - dim).min())
    raise InvalidArgument(f"unknown tube kind {which!r}")


def in_tube(z, which, **kwargs):
    return tube_margin(z, which, **kwargs) > 0.0


def gap_implies_kernel_safe(z, carrier, r, rng=None):
    """The inclusion check: |Im z| < gap_r(Re z) must imply kernel safety."""
    n = getattr(carrier, "n", 1)
    zv = _complex_point(z, n)
    gap = carrier_gap(zv.real, carrier, r, rng)
    if np.linalg.norm(zv.imag) < gap.value:
        return tube_margin(z, "kernel_safe", carrier=carrier, r=r, rng=rng) > -1e-9
    return True


def hull_membership_witness(y, cone, r, max_axis_shift=64.0):
    """Convex-hull membership of the two smoothed wedge bases (n <= 2).

    The bases are {dist(., cone) < r} and {dist(., -cone) < r} in the space
    of imaginary parts.  Membership of y in their convex hull is certified
    directly: a two-point convex combination y = lam y1 + (1 - lam) y2 with
    y1 in the first base and y2 in the second.  Witnesses are searched along
    the cone axis, which suffices because both bases absorb deep axis rays;
    the hull is the whole space once both bases are nonempty.
    """
    if cone.n > 2:
        raise InvalidArgument("hull membership is implemented for n <= 2")
    yv = _vec(y, cone.n)
    e = cone.axis_vector()
    flipped = cone.flip()
    t = max(1.0, 2.0 * (r + cone.shift))
    while t <= max_axis_shift * max(1.0, float(np.linalg.norm(yv)) + r + cone.shift):
        y1 = yv + t * e
        y2 = yv - t * e
        m1 = r - cone_distance(y1, cone)
        m2 = r - cone_distance(y2, flipped)
        if m1 > 0.0 and m2 > 0.0:
            return True, {
                "lam": 0.5,
                "y1": tuple(float(c) for c in y1),
                "y2": tuple(float(c) for c in y2),
                "margin1": float(m1),
                "margin2": float(m2),
            }
        t *= 2.0
    return False, None


# ---------------------------------------------------------------------------
# wedge-neighborhood unions and their shifted intersections


MIN_SPHERE_NODES = {1: 2, 2: 16, 3: (4, 8)}


def wedge_union_margin(y, cone, r, delta):
    """Margin of membership in {dist(y, cone) < r} union {|y| < r + delta}."""
    pts = np.atleast_2d(np.asarray(y, dtype=float))
    m1 = r - cone_distance(pts, cone)
    m2 = (r + delta) - np.linalg.norm(pts, axis=1)
    out = np.maximum(m1, m2)
    return float(out[0]) if np.asarray(y).ndim == 1 else out


def shifted_intersection_margin(y, cone, r, delta, omegas=None, nodes=None):
    """Margin of membership in the intersection over sampled unit shifts.

    A point y lies in (union + r omega) iff y - r omega lies in the union;
    the margin is the minimum over the sphere sample.
    """
    if omegas is None:
        omegas, _ = sphere_nodes(cone.n, nodes)
    _check_sphere_sample(cone.n, omegas)
    yv = _vec(y, cone.n)
    pts = yv[None, :] - r * np.asarray(omegas)
    return float(wedge_union_margin(pts, cone, r, delta).min())


def _check_sphere_sample(n, omegas):
    needed = MIN_SPHERE_NODES[1 if n == 1 else min(n, 3)]
    if n == 3:
        needed = needed[0] * needed[1]
    if len(omegas) < (needed if isinstance(needed, int) else 2):
        raise InvalidArgument(
            f"sphere sample too coarse: {len(omegas)} nodes, need >= {needed}"
        )


@dataclass(frozen=True)
class ShiftedIntersectionReport:
    condition_lhs: float
    condition_rhs: float
    condition_ok: bool
    shrink: float
    cone_margin_min: float
    contains_cone: bool
    ball_margin_min: float
    contains_ball: bool


def shifted_intersection_report(cone, r, delta, nodes=None, rng=None,
                                cone_samples=200, window=None):
    """Check that the shifted intersection swallows the cone and a small ball.

    When r + delta exceeds sqrt((r/sqrt2)^2 + (r/sqrt2 - shift)^2) the
    intersection must contain the cone with a margin above the conservative
    shrink r * (max angular gap of the sphere sample); independently of that
    condition it must contain the open ball of radius delta when delta > 0.
    """
    if delta < 0:
        raise InvalidArgument("delta must be nonnegative")
    omegas, _ = sphere_nodes(cone.n, nodes)
    _check_sphere_sample(cone.n, omegas)
    shrink = r * max_angular_gap(cone.n, nodes)
    rhs = math.sqrt((r / SQRT2) ** 2 + (r / SQRT2 - cone.shift) ** 2)
    condition_ok = (r + delta) > rhs

    rng = rng or np.random.default_rng(0)
    window = window or max(3.0 * (r + delta + cone.shift), 6.0 * max(cone.shift, 1.0))
    e = cone.axis_vector()
    # The true margin of deep near-boundary cone points decays like their
    # distance to the cone boundary, so samples keep a standoff that beats
    # the conservative sphere-sample shrink.
    standoff = max(0.05, 4.0 * shrink)
    pts = [cone.shift * e + 0.05 * e, 10.0 * e]
    u = rng.uniform(SQRT2 * standoff + 0.05, window, cone_samples)
    frac = rng.uniform(0.0, 1.0, cone_samples) * np.maximum(
        0.0, 1.0 - SQRT2 * standoff / u
    )
    dirs = rng.normal(size=(cone_samples, cone.n))
    dirs -= np.outer(dirs @ e, e)
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    dirs = np.divide(dirs, norms, out=np.zeros_like(dirs), where=norms > 1e-12)
    for i in range(cone_samples):
        pts.append(cone.shift * e + u[i] * e + frac[i] * u[i] * dirs[i])
    sign = -1.0 if cone.negated else 1.0
    cone_min = min(
        shifted_intersection_margin(sign * np.asarray(p), cone, r, delta, omegas)
        for p in pts
    )

    ball_min = math.inf
    contains_ball = False
    if delta > 0:
        ball_dirs = rng.normal(size=(32, cone.n))
        ball_dirs /= np.linalg.norm(ball_dirs, axis=1, keepdims=True)
        for rho in (0.25, 0.5):
            for d in ball_dirs:
                ball_min = min(
                    ball_min,
                    shifted_intersection_margin(rho * delta * d, cone, r, delta, omegas),
                )
        contains_ball = ball_min > 0.0
    else:
        ball_min = -math.inf

    return ShiftedIntersectionReport(
        condition_lhs=float(r + delta),
        condition_rhs=float(rhs),
        condition_ok=bool(condition_ok),
        shrink=float(shrink),
        cone_margin_min=float(cone_min),
        contains_cone=bool(cone_min > shrink),
        ball_margin_min=float(ball_min),
        contains_ball=bool(contains_ball),
    )


# ---------------------------------------------------------------------------
# region reports


@dataclass(frozen=True)
class RegionRow:
    x: tuple
    margin: float
    member: bool


@dataclass(frozen=True)
class RegionReport:
    rows: tuple

    def to_csv(self):
        if not self.rows:
            return "margin,member\n"
        n = len(self.rows[0].x)
        header = ",".join(f"x{j + 1}" for j in range(n)) + ",margin,member"
        lines = [header]
        for row in self.rows:
            coords = ",".join(repr(float(c)) for c in row.x)
            lines.append(f"{coords},{row.margin!r},{int(row.member)}")
        return "\n".join(lines) + "\n"


def region_scan(carrier, r, xs, rng=None):
    """Membership scan of the continuation region over explicit points."""
    rows = []
    for x in xs:
        member, margin = continuation_region_membership(x, carrier, r, rng)
        xv = np.atleast_1d(np.asarray(x, dtype=float))
        rows.append(RegionRow(tuple(float(c) for c in xv), float(margin), bool(member)))
    return RegionReport(tuple(rows))


def lightcone_scan_points(distances, carrier, kind="antipodal"):
    """Points of R^4 at prescribed distances from the forward cone.

    ``antipodal`` walks down the negative axis (dist = |x|); ``spacelike``
    walks out transversally (dist = |x_perp| / sqrt(2)).
    """
    e = np.zeros(carrier.n)
    e[0] = 1.0
    f = np.zeros(carrier.n)
    f[1] = 1.0
    pts = []
    for d in distances:
        if d < 0:
            raise InvalidArgument("scan distances must be nonnegative")
        if kind == "antipodal":
            pts.append(-d * e)
        elif kind == "spacelike":
            pts.append(d * SQRT2 * f)
        else:
            raise InvalidArgument(f"unknown scan kind {kind!r}")
    return pts
