"""The sphere-Laplace smoothing kernel and its scaled family.

The kernel is the inverse Fourier transform of 1/I(xi), where

    I(xi) = integral over the unit sphere of exp(-<omega, xi>) d omega.

For one variable I(xi) = 2 cosh(xi) and the transform closes to

    K(z) = (1/4) sech(pi z / 2),

holomorphic off the simple poles z = i (2m + 1), rapidly decreasing in the
parabolic region |Im z|^2 < 1 + |Re z|^2.  The scaled family is
K_r(z) = r^{-n} K(z / r), with poles at i (2m + 1) r and holomorphy region
|Im z|^2 < r^2 + |Re z|^2.

For n >= 2 there is no closed form and K is evaluated by a truncated uniform
tensor-grid rule in xi.  That route needs the *absolutely convergent* strip
|Im z| < r; inside it the truncation radius is chosen so the integrand bound
exp(|Im z| |xi|) / I(xi) integrated over |xi| > Xi stays below tolerance/10,
and a step-doubling comparison supplies the reported error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import AccuracyError, DomainError, InvalidArgument, PoleError
from .quadrature import SPHERE_SURFACE

_QUAD_STRIP_LIMIT = 0.97  # |Im z| / r cap for the Fourier-quadrature strategy


@dataclass(frozen=True)
class KernelSpec:
    """Evaluation strategy and numerical knobs for one kernel family.

    ``strategy`` is one of ``closed_form_1d`` (n = 1 only),
    ``fourier_quadrature``, or ``auto`` (closed form when n = 1).
    ``truncation`` and ``step`` are in units of the rescaled variable z/r;
    ``None`` means they are derived per evaluation batch from ``tolerance``.
    """

    n: int = 1
    r: float = 1.0
    strategy: str = "auto"
    truncation: float | None = None
    step: float | None = None
    tolerance: float = 1e-8
    domain_margin: float = 0.05

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument("kernel dimension must be >= 1")
        if self.r <= 0:
            raise InvalidArgument("kernel scale r must be positive")
        if self.strategy not in ("auto", "closed_form_1d", "fourier_quadrature"):
            raise InvalidArgument(f"unknown kernel strategy {self.strategy!r}")
        if self.strategy == "closed_form_1d" and self.n != 1:
            raise InvalidArgument("closed_form_1d is only available for n=1")
        if not (0.0 <= self.domain_margin < 1.0):
            raise InvalidArgument("domain margin must lie in [0, 1)")

    @property
    def effective_strategy(self):
        if self.strategy == "auto":
            return "closed_form_1d" if self.n == 1 else "fourier_quadrature"
        return self.strategy


def _as_points(z, n):
    pts = np.atleast_1d(np.asarray(z, dtype=complex))
    if n == 1:
        return pts.reshape(-1, 1)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.shape[-1] != n:
        raise InvalidArgument(f"expected points in C^{n}, got shape {pts.shape}")
    return pts.reshape(-1, n)


def domain_margin_values(z, spec):
    """Signed margin of (1 - eps) + |Re z/r|^2 - |Im z/r|^2; > 0 means inside."""
    pts = _as_points(z, spec.n) / spec.r
    re2 = (pts.real**2).sum(axis=1)
    im2 = (pts.imag**2).sum(axis=1)
    return (1.0 - spec.domain_margin) + re2 - im2


def _require_domain(z, spec):
    margins = domain_margin_values(z, spec)
    if (margins < 0.0).any():
        worst = int(np.argmin(margins))
        pts = _as_points(z, spec.n)
        raise DomainError(
            f"kernel evaluation outside the holomorphy margin at point "
            f"{pts[worst]} (margin {margins[worst]:.3e})"
        )


def log_sphere_laplace_radial(rho, n, nodes=64):
    """log I as a function of the radius |xi|, overflow-safe."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if (rho < 0).any():
        raise InvalidArgument("radius must be nonnegative")
    if n == 1:
        return rho + np.log1p(np.exp(-2.0 * rho)) + math.log(1.0)
    if n == 2:
        m = max(64, int(nodes))
        th = 2.0 * math.pi * np.arange(m) / m
        # I = e^rho * sum w e^{-rho (1 + cos th)}
        inner = np.exp(-np.outer(rho, 1.0 + np.cos(th))).sum(axis=1) * (2.0 * math.pi / m)
        return rho + np.log(inner)
    if n == 3:
        m = max(48, int(nodes))
        u, wu = np.polynomial.legendre.leggauss(m)
        inner = (np.exp(-np.outer(rho, 1.0 + u)) * wu).sum(axis=1) * (2.0 * math.pi)
        return rho + np.log(inner)
    raise InvalidArgument("sphere Laplace transform implemented for n <= 3")


def sphere_laplace(xi, nodes=64):
    """I(xi): the Laplace transform of surface measure on S^{n-1} at xi.

    Closed form 2 cosh|xi| for n = 1, sphere quadrature for n in {2, 3}.
    """
    x = np.atleast_1d(np.asarray(xi, dtype=float))
    n = x.size
    rho = float(np.linalg.norm(x))
    if n == 1:
        return 2.0 * math.cosh(rho)
    return float(np.exp(log_sphere_laplace_radial(rho, n, nodes))[0])


def sech_kernel(z, r, margin, pole_guard=1e-12):
    """Vectorized closed-form kernel (1/(4r)) sech(pi z / (2r)) for n = 1.

    ``margin`` is the holomorphy-domain safety fraction (0 disables the
    check; exact poles are still refused).  This is the fast path the
    continuation drivers convolve against.
    """
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    w = zs / r
    if margin > 0.0:
        bad = w.imag**2 > (1.0 - margin) + w.real**2
        if bad.any():
            raise DomainError(
                f"kernel evaluation outside the holomorphy margin at "
                f"{zs[bad][0]} (r={r})"
            )
    c = np.cosh(0.5 * math.pi * w)
    small = np.abs(c) < pole_guard
    if small.any():
        raise PoleError(f"kernel evaluated at a pole: z={zs[small][0]}, r={r}")
    return 0.25 / (r * c)


def _auto_truncation(mu, n, tol):
    if n == 1:
        gap = max(1e-3, 1.0 - mu)
        return max(8.0, math.log(10.0 / (math.pi * tol * gap)) / gap)
    # scan the radial tail bound numerically
    xi = 8.0
    while xi < 400.0:
        rho = xi + 0.25 + 0.5 * np.arange(160)
        integrand = np.exp(
            mu * rho
            + (n - 1) * np.log(rho)
            - log_sphere_laplace_radial(rho, n)
        )
        tail = integrand.sum() * 0.5 * SPHERE_SURFACE[n] / (2.0 * math.pi) ** n
        if tail <= tol / 10.0:
            return xi
        xi += 4.0
    raise AccuracyError("could not find a truncation radius meeting tolerance")


def _auto_step(max_abs_re, n, tol):
    if n == 1:
        return (2.0 * math.pi) / (max_abs_re + (2.0 / math.pi) * math.log(10.0 / tol) + 4.0)
    return 0.2


def _fourier_kernel(zs, spec):
    """Tensor-grid quadrature for K_r at points zs (m, n); returns (values, errors)."""
    pts = _as_points(zs, spec.n) / spec.r
    mu = float(np.sqrt((pts.imag**2).sum(axis=1)).max()) if pts.size else 0.0
    if mu >= _QUAD_STRIP_LIMIT:
        raise DomainError(
            "fourier_quadrature is limited to the absolutely convergent strip "
            f"|Im z| < {_QUAD_STRIP_LIMIT} r (requested |Im z/r| = {mu:.3f})"
        )
    max_re = float(np.abs(pts.real).max()) if pts.size else 0.0
    xi_max = spec.truncation or _auto_truncation(mu, spec.n, spec.tolerance)
    h = spec.step or _auto_step(max_re, spec.n, spec.tolerance)

    def one_pass(step):
        m = int(math.ceil(2.0 * xi_max / step))
        nodes = -xi_max + (np.arange(m) + 0.5) * step
        if spec.n == 1:
            logI = log_sphere_laplace_radial(np.abs(nodes), 1)
            phases = np.exp(1j * np.outer(pts[:, 0], nodes) - logI)
            return phases.sum(axis=1) * step / (2.0 * math.pi)
        grids = np.meshgrid(*([nodes] * spec.n), indexing="ij")
        xi = np.stack([g.reshape(-1) for g in grids], axis=-1)
        logI = log_sphere_laplace_radial(np.linalg.norm(xi, axis=1), spec.n)
        out = np.empty(pts.shape[0], dtype=complex)
        for i, p in enumerate(pts):
            out[i] = np.exp(1j * (xi @ p) - logI).sum()
        return out * (step / (2.0 * math.pi)) ** spec.n

    coarse = one_pass(h)
    fine = one_pass(h / 2.0)
    # residual tail of the truncated integral, from the same bound as xi_max
    rho = xi_max + 0.25 + 0.5 * np.arange(160)
    tail = float(
        np.exp(mu * rho + (spec.n - 1) * np.log(rho) - log_sphere_laplace_radial(rho, spec.n)).sum()
        * 0.5
        * (SPHERE_SURFACE[spec.n] if spec.n > 1 else 2.0)
        / (2.0 * math.pi) ** spec.n
    )
    errors = np.abs(fine - coarse) + tail
    scale = spec.r ** (-spec.n)
    return fine * scale, errors * scale


def kernel_table(z, spec):
    """Evaluate K_r at many points; returns (values, error_estimates).

    Closed-form evaluations report zero error.  Quadrature evaluations raise
    AccuracyError when the estimate exceeds ``spec.tolerance``.
    """
    pts = _as_points(z, spec.n)
    _require_domain(pts, spec)
    if spec.effective_strategy == "closed_form_1d":
        vals = sech_kernel(pts[:, 0], spec.r, spec.domain_margin)
        return vals, np.zeros(pts.shape[0])
    vals, errs = _fourier_kernel(pts, spec)
    worst = float(errs.max()) if errs.size else 0.0
    if worst > spec.tolerance:
        raise AccuracyError(
            f"kernel quadrature error estimate {worst:.3e} exceeds tolerance "
            f"{spec.tolerance:.3e}",
            estimate=worst,
            tolerance=spec.tolerance,
        )
    return vals, errs


def kernel_eval(z, spec):
    """K_r at a single point (complex scalar for n = 1, n-vector otherwise)."""
    vals, _ = kernel_table(z, spec)
    return complex(vals[0])


def kernel_scaled(z, r, spec=None):
    """K_r(z) = r^{-n} K(z/r); the scaling holds exactly by construction."""
    base = spec or KernelSpec()
    return kernel_eval(z, replace(base, r=float(r)))


def pole_locations(spec, half_count=3):
    """Poles i (2m + 1) r of the one-variable kernel, nearest first."""
    if spec.n != 1:
        raise InvalidArgument("pole enumeration is only available for n=1")
    ms = range(-half_count, half_count)
    poles = sorted((1j * (2 * m + 1) * spec.r for m in ms), key=lambda p: (abs(p), -p.imag))
    return poles


@dataclass(frozen=True)
class RapidDecreaseReport:
    """Shell-decay certificate for sup |z^p K_r(z)| on a strip |Im z| <= c."""

    ok: bool
    strip: float
    max_power: int
    sup_weighted: float
    shell_radii: tuple
    shell_sups: tuple
    sups_by_power: tuple
    violations: tuple


def rapid_decrease_certificate(spec, strip, max_power=4, shells=None, im_samples=5):
    """Certify rapid decrease of K_r on a horizontal strip.

    Samples |z^p K_r(z)| on shells of |Re z| and checks that the weighted sup
    decays monotonically once past its peak shell.  Shells whose values sink
    below the quadrature noise floor are treated as fully decayed.  Non-decay
    is reported in the ``violations`` field rather than raised.
    """
    if strip >= spec.r * (1.0 - spec.domain_margin):
        raise InvalidArgument("strip must satisfy c < r (1 - domain margin)")
    if shells is None:
        if spec.effective_strategy == "closed_form_1d":
            shells = np.concatenate([[0.0], spec.r * np.logspace(-1.0, 2.2, 13)])
        else:
            shells = np.concatenate([[0.0], spec.r * np.logspace(0.0, 0.75, 6)])
    shells = np.asarray(shells, dtype=float)
    ys = np.linspace(-strip, strip, im_samples)

    shell_sups = []
    shell_floors = []
    sups_by_power = np.zeros(max_power + 1)
    for s in shells:
        if spec.n == 1:
            zs = np.array([sgn * s + 1j * y for sgn in (1.0, -1.0) for y in ys])
        else:
            zs = []
            for sgn in (1.0, -1.0):
                for y in ys:
                    p = np.zeros(spec.n, dtype=complex)
                    p[0] = sgn * s + 1j * y
                    zs.append(p)
            zs = np.asarray(zs)
        vals, errs = kernel_table(zs, spec)
        radii = np.abs(zs) if spec.n == 1 else np.linalg.norm(zs, axis=1)
        for p in range(max_power + 1):
            sups_by_power[p] = max(sups_by_power[p], float((radii**p * np.abs(vals)).max()))
        shell_sups.append(float((radii**max_power * np.abs(vals)).max()))
        shell_floors.append(float(4.0 * (radii**max_power * errs).max()))
    shell_sups = np.asarray(shell_sups)
    shell_floors = np.asarray(shell_floors)
    resolved = shell_sups > shell_floors

    peak = int(np.argmax(shell_sups))
    violations = []
    for i in range(peak, len(shells) - 1):
        if not resolved[i + 1]:
            break  # sunk below the quadrature noise floor: decayed
        if not shell_sups[i + 1] < shell_sups[i]:
            violations.append(
                f"no decay from shell |Re z|={shells[i]:.3g} to {shells[i+1]:.3g}"
            )
    if peak == len(shells) - 1 and resolved[peak]:
        violations.append("weighted sup still growing at the outermost shell")
    return RapidDecreaseReport(
        ok=not violations,
        strip=float(strip),
        max_power=int(max_power),
        sup_weighted=float(shell_sups.max()),
        shell_radii=tuple(float(s) for s in shells),
        shell_sups=tuple(float(s) for s in shell_sups),
        sups_by_power=tuple(float(s) for s in sups_by_power),
        violations=tuple(violations),
    )
