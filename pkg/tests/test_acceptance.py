"""Acceptance suite.

One test per acceptance criterion, each printing a PASS/FAIL line with its
measured figure and asserting the stated tolerance and runtime budget.
Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines live.
"""

import math
import time

import numpy as np

from wedgekit.errors import DomainError
from wedgekit.functionals import (
    Ultrahyperfunction,
    carrier_probe,
    cauchy_transform,
    encircling_pairing,
    gaussian,
    polynomial_boundary,
    rational_boundary,
)
from wedgekit.geometry import PointCloudCarrier
from wedgekit.kernels import KernelSpec, kernel_table, sech_kernel
from wedgekit.quadrature import cauchy_riemann_residual
from wedgekit.continuation import (
    boundary_match,
    delta_representation_check,
    glue_global,
    local_continue,
    overlap_report,
    probe_equality,
    reconstruct,
    regularize,
    reproducing_residual,
)
from wedgekit.service import GeometryRequest, CarrierModel, run_geometry

SQRT2 = math.sqrt(2.0)


def report(index, passed, detail):
    print(f"ACCEPTANCE {index}: {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, detail


def boundary_pair(coeffs, ell, r):
    eta = ell + 0.1 * r
    u1 = Ultrahyperfunction.from_boundary(polynomial_boundary(coeffs, +1, ell), eta)
    u2 = Ultrahyperfunction.from_boundary(polynomial_boundary(coeffs, -1, ell), -eta)
    return u1, u2


def test_criterion_1_kernel_closed_form():
    start = time.perf_counter()
    res = np.arange(-10.0, 10.0 + 1e-9, 0.25)
    ims = np.concatenate([np.arange(-0.75, 0.76, 0.25), [-0.9, 0.9]])
    grid = (res[:, None] + 1j * ims[None, :]).reshape(-1)
    quad, _ = kernel_table(grid, KernelSpec(strategy="fourier_quadrature", tolerance=1e-9))
    closed, _ = kernel_table(grid, KernelSpec())
    dev = float(np.abs(quad - closed).max())
    elapsed = time.perf_counter() - start
    report(
        1,
        dev < 1e-8 and elapsed < 30.0,
        f"quadrature vs sech closed form: max deviation {dev:.2e} on "
        f"{grid.size} points in {elapsed:.1f}s (limits 1e-8, 30s)",
    )


def test_criterion_2_reproducing_matrix():
    start = time.perf_counter()
    worst = 0.0
    cases = 0
    for width in (0.5, 1.0, 2.0):
        for r in (1.0, 2.0):
            for ratio in (0.25, 0.5, 1.0):
                for t in (0.0, 0.7, -0.7):
                    res = reproducing_residual(gaussian(0, width), r, ratio * r, t)
                    worst = max(worst, res)
                    cases += 1
    elapsed = time.perf_counter() - start
    report(
        2,
        worst < 1e-5 and elapsed < 120.0,
        f"reproducing identity over {cases} fixtures: worst residual "
        f"{worst:.2e} in {elapsed:.1f}s (limits 1e-5, 120s)",
    )


def test_criterion_3_global_eow():
    start = time.perf_counter()
    ell, r = 0.3, 1.0
    xs = np.linspace(-2.0, 2.0, 5)
    ys = np.array([0.0, 0.15, -0.15, 0.45, -0.45, 0.8, -0.8, 1.0, -1.0, 1.2])
    grid = (xs[:, None] + 1j * ys[None, :]).reshape(-1)
    assert grid.size == 50
    phis = [gaussian(c, s) for c in (-1.0, -0.5, 0.0, 0.5, 1.0) for s in (1.0, 0.7)]
    worst_recon = 0.0
    worst_match = 0.0
    for coeffs in ([1.0], [0.0, 2.0, 0.0, 1.0], [3.0, 0.0, -1.0, 0.0, 0.0, 1.0]):
        u1, u2 = boundary_pair(coeffs, ell, r)
        H = reconstruct(glue_global(regularize(u1, r), regularize(u2, r)), r)
        target = np.polynomial.polynomial.polyval(grid, np.asarray(coeffs, dtype=complex))
        worst_recon = max(worst_recon, float(np.abs(H.eval(grid) - target).max()))
        match = boundary_match(H, u1, phis, tolerance=1e-6)
        worst_match = max(worst_match, match.max_deviation)
    elapsed = time.perf_counter() - start
    report(
        3,
        worst_recon < 1e-5 and worst_match < 1e-6 and elapsed < 120.0,
        f"global continuation, degrees 0/3/5: reconstruction {worst_recon:.2e} "
        f"on 50 points, pairing {worst_match:.2e} on 10 test functions, "
        f"{elapsed:.1f}s (limits 1e-5, 1e-6, 120s)",
    )


def test_criterion_4_negative_control():
    ell, r = 0.6, 1.0
    eta = ell + 0.1 * r
    u1 = Ultrahyperfunction.from_boundary(rational_boundary([0.5j], +1, ell), eta)
    u2 = Ultrahyperfunction.from_boundary(rational_boundary([0.5j], -1, ell), -eta)
    rep = overlap_report(regularize(u1, r), regularize(u2, r))
    report(
        4,
        (not rep.passed) and rep.max_deviation > 1e-2,
        f"pole fixture detected: overlap deviation {rep.max_deviation:.3e} "
        "(must exceed 1e-2 and fail)",
    )


def test_criterion_5_local_eow():
    start = time.perf_counter()
    masses = [(1.0 + 0j, 0.3j)]
    box = (-0.1, 0.1, 0.5)
    upper, lower = cauchy_transform(masses, box[2])
    u1 = Ultrahyperfunction.from_boundary(upper, box[2] + 0.1)
    u2 = Ultrahyperfunction.from_boundary(lower, -(box[2] + 0.1))
    local = local_continue(u1, u2, masses, box, 1.0)
    xis = [1.2, -1.2, 1.5, -1.5, 2.0, -2.0, 3.0, -3.0, 5.0, -5.0]
    results = probe_equality(local, xis, tolerance=1e-5)
    worst_pair = max(res.difference for res in results)
    worst_oracle = max(
        abs(res.h1 - (1.0 / (2j * math.pi)) / (0.3j - res.xi)) for res in results
    )
    all_pass = all(res.passed for res in results)
    elapsed = time.perf_counter() - start
    report(
        5,
        all_pass and worst_pair < 1e-5 and worst_oracle < 1e-5 and elapsed < 180.0,
        f"local continuation at 10 probe centers: |h1-h2| <= {worst_pair:.2e}, "
        f"oracle deviation <= {worst_oracle:.2e}, {elapsed:.1f}s "
        "(limits 1e-5, 1e-5, 180s)",
    )


def test_criterion_6_carrier_awareness_boundary():
    u_diff = Ultrahyperfunction.from_masses([(1.0, 0.5j)])
    carrier = PointCloudCarrier((0.5j,), 1)
    decay_points = [0.6, -0.6, 0.8, -0.8, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0]
    growth_points = [0.0, 0.1, -0.1, 0.2, -0.2, 0.3, -0.3, 0.4, -0.4]
    mismatches = []
    for xi in decay_points + growth_points:
        rep = carrier_probe(u_diff, carrier, xi)
        expected = "grows" if (0.25 - xi**2) > 0 else "decays"
        if rep.verdict != expected:
            mismatches.append((xi, rep.verdict, expected))
    report(
        6,
        not mismatches,
        "carrier awareness boundary at |xi| = 0.5: verdicts match the "
        f"analytic exponent sign on {len(decay_points + growth_points)} probes"
        + (f"; mismatches {mismatches}" if mismatches else ""),
    )


def test_criterion_7_lightcone_geometry():
    start = time.perf_counter()
    req = GeometryRequest(
        carrier=CarrierModel(kind="lightcone4d", ell=1.0, samples=100_000),
        r="auto",
        scan_dist="0:6:0.1",
        seed=0,
    )
    payload = run_geometry(req)
    rows = payload["results"]["rows"]
    member_threshold = (SQRT2 + 1.0)
    shrunken_threshold = (SQRT2 + 3.0)
    ok = payload["status"] == "PASS"  # includes the gap-bound check per row
    for row in rows:
        d = row["dist"]
        if d > member_threshold * 1.01:
            ok = ok and row["member"]
        if d < member_threshold * 0.99:
            ok = ok and not row["member"]
        if d > shrunken_threshold * 1.01:
            ok = ok and row["shrunken_member"]
        if d < shrunken_threshold * 0.99:
            ok = ok and not row["shrunken_member"]
    elapsed = time.perf_counter() - start
    report(
        7,
        ok and elapsed < 60.0,
        f"light-cone scan over {len(rows)} distances: membership thresholds "
        f"(sqrt2+1), (sqrt2+3) resolved to 1%, gap bound held to 1e-3, "
        f"{elapsed:.1f}s (limit 60s)",
    )


def test_criterion_8_delta_representations():
    worst_residual = 0.0
    worst_gap = 0.0
    for phi in (gaussian(0, 1), gaussian(3, 1), gaussian(-1, 0.7)):
        rep = delta_representation_check(phi)
        worst_residual = max(worst_residual, rep.residual)
        worst_gap = max(worst_gap, rep.forms_max_gap)
    report(
        8,
        worst_residual < 1e-5 and worst_gap < 1e-8,
        f"delta family: worst residual {worst_residual:.2e} after ladder "
        f"extrapolation, shifted/odd forms agree to {worst_gap:.2e} "
        "(limits 1e-5, 1e-8)",
    )


def test_criterion_9_property_suites():
    start = time.perf_counter()
    rng = np.random.default_rng(20240814)
    cases = 0
    failures = []

    # kernel symmetry: evenness, conjugation, reality (closed form + quadrature)
    for _ in range(50):
        z = complex(rng.uniform(-8, 8), rng.uniform(-0.85, 0.85))
        vz = sech_kernel(np.array([z]), 1.0, 0.05)[0]
        if abs(vz - sech_kernel(np.array([-z]), 1.0, 0.05)[0]) > 1e-14:
            failures.append(f"evenness at {z}")
        if abs(np.conj(vz) - sech_kernel(np.array([np.conj(z)]), 1.0, 0.05)[0]) > 1e-14:
            failures.append(f"conjugation at {z}")
        cases += 2
    qspec = KernelSpec(strategy="fourier_quadrature", tolerance=1e-8)
    for _ in range(5):
        z = complex(rng.uniform(-4, 4), rng.uniform(-0.7, 0.7))
        a, _ = kernel_table(np.array([z]), qspec)
        b, _ = kernel_table(np.array([-z]), qspec)
        if abs(a[0] - b[0]) > 1e-8:
            failures.append(f"quadrature evenness at {z}")
        cases += 1

    # contour independence of the pairing
    for _ in range(30):
        coeffs = rng.normal(size=rng.integers(1, 4))
        F = polynomial_boundary(coeffs, +1, 0.3)
        phi = gaussian(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.4))
        ua = Ultrahyperfunction.from_boundary(F, rng.uniform(0.5, 1.5))
        ub = Ultrahyperfunction.from_boundary(F, rng.uniform(1.5, 3.0))
        if abs(ua.apply(phi) - ub.apply(phi)) > 1e-7:
            failures.append(f"contour dependence for {coeffs}")
        cases += 1

    # Cauchy-transform round trip
    for _ in range(30):
        w = complex(rng.uniform(-0.05, 0.05), rng.uniform(-0.4, 0.4))
        c = complex(rng.normal(), rng.normal())
        upper, _ = cauchy_transform([(c, w)], 0.5)
        phi = gaussian(rng.uniform(-0.5, 0.5), 1.0)
        got = encircling_pairing(upper, phi, (-0.1, 0.1, -0.5, 0.5))
        want = c * phi(np.array([w]))[0]
        if abs(got - want) > 1e-7:
            failures.append(f"round trip at {w}")
        cases += 1

    # linearity of the pairing in the functional and the test function
    base = polynomial_boundary([0.0, 1.0], +1, 0.2)
    u = Ultrahyperfunction.from_boundary(base, 0.8)
    for _ in range(40):
        a, b = rng.normal(size=2)
        p1 = gaussian(rng.uniform(-0.5, 0.5), 1.0)
        p2 = gaussian(rng.uniform(-0.5, 0.5), 0.8)

        class Mixed:
            decay_scale = 1.0
            center_real = 0.0

            def __call__(self, zz, _a=a, _b=b, _p1=p1, _p2=p2):
                return _a * _p1(zz) + _b * _p2(zz)

        direct = u.apply(Mixed())
        combo = a * u.apply(p1) + b * u.apply(p2)
        if abs(direct - combo) > 1e-9 * max(1.0, abs(direct)):
            failures.append("linearity")
        cases += 1

    # domain soundness: out-of-domain evaluation must raise, never return
    u1, u2 = boundary_pair([0.0, 1.0], 0.3, 1.0)
    U1 = regularize(u1, 1.0)
    H = reconstruct(glue_global(U1, regularize(u2, 1.0)), 1.0)
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), -rng.uniform(2.0, 5.0))
        try:
            U1.eval(np.array([z]))
            failures.append(f"no domain error at {z}")
        except DomainError:
            pass
        cases += 1
    for _ in range(5):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.1, 0.1))
        try:
            sech_kernel(np.array([z + 1.05j * (1 + abs(z))]), 0.3, 0.05)
            failures.append("kernel domain")
        except DomainError:
            pass
        cases += 1

    # Cauchy-Riemann residuals of smoothed and reconstructed functions
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(-0.4, 1.2))
        if cauchy_riemann_residual(U1, z) > 1e-4:
            failures.append(f"CR residual of U at {z}")
        cases += 1
    for _ in range(10):
        z = complex(rng.uniform(-2, 2), rng.uniform(-0.4, 0.4))
        if cauchy_riemann_residual(H, z) > 1e-4:
            failures.append(f"CR residual of H at {z}")
        cases += 1

    elapsed = time.perf_counter() - start
    report(
        9,
        cases >= 200 and not failures and elapsed < 300.0,
        f"property suites: {cases} randomized cases (seed fixed), "
        f"{len(failures)} failures, {elapsed:.1f}s (limits >=200 cases, 300s)"
        + (f"; first failures {failures[:3]}" if failures else ""),
    )
