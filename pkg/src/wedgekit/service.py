"""HTTP service wrapping the numerical core.

Each endpoint mirrors one CLI subcommand and returns the same deterministic
report payload the CLI writes to disk: no timestamps, stable key order,
seeded sampling.  Argument problems surface as HTTP 400 with a diagnostic;
payload-shape problems are FastAPI's usual 422.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .errors import AccuracyError, DomainError, EvaluationError, InvalidArgument, PoleError
from .fixtures import parse_boundary_function, parse_complex, parse_masses, parse_test_function
from .functionals import Ultrahyperfunction, carrier_probe, cauchy_transform, gaussian
from .geometry import (
    BoxCarrier,
    LightConeCarrier,
    PointCloudCarrier,
    auto_scale,
    carrier_gap,
    continuation_region_membership,
    explicit_lightcone_shrunken_membership,
    lightcone_gap_bound,
    lightcone_scan_points,
    lightcone_shrunken_threshold,
    region_threshold,
    shrunken_region_membership,
)
from .kernels import KernelSpec, kernel_table, pole_locations
from .quadrature import LadderSpec
from .continuation import (
    PROBE_LADDER,
    boundary_match,
    glue_global,
    local_continue,
    overlap_report,
    probe_equality,
    reconstruct,
    regularize,
    reproducing_residual,
)
from .reports import SCHEMA_VERSION, build_report

_CORE_ERRORS = (InvalidArgument, DomainError, AccuracyError, EvaluationError, PoleError)


def jsonable(obj):
    """Recursively convert report values to JSON-safe types.

    Complex numbers become [re, im] pairs.
    """
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def parse_range(text):
    """'start:stop:step' -> inclusive-ish numpy range."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise InvalidArgument(f"range must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise InvalidArgument("range step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(max(count, 0))


class LadderOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")
    start: float = 0.5
    ratio: float = 0.5
    rungs: int = 8
    order: int = 2

    def to_spec(self):
        return LadderSpec(self.start, self.ratio, self.rungs, self.order)


class KernelRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n: int = 1
    r: float = 1.0
    strategy: str = "auto"
    points: list[str] | None = None
    grid: str | None = None
    tolerance: float = 1e-8
    list_poles: bool = False


class CarrierModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: str = "lightcone4d"
    ell: float = 1.0
    a: float = -1.0
    b: float = 1.0
    points: list[str] | None = None
    samples: int = 100_000

    def build(self):
        if self.kind == "lightcone4d":
            return LightConeCarrier(self.ell, 4, self.samples)
        if self.kind == "box1d":
            return BoxCarrier(self.a, self.b, self.ell)
        if self.kind == "pointcloud":
            if not self.points:
                raise InvalidArgument("pointcloud carrier needs points")
            return PointCloudCarrier(tuple(parse_complex(p) for p in self.points), 1)
        raise InvalidArgument(f"unknown carrier kind {self.kind!r}")


class GeometryRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    carrier: CarrierModel = Field(default_factory=CarrierModel)
    r: float | str = "auto"
    scan_dist: str | None = None
    scan_x: str | None = None
    direction: str = "antipodal"
    include_shrunken: bool = True
    seed: int = 0


class ReproduceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    phi: str | dict = "gaussian:0,1"
    r: float = 1.0
    R: float = 0.5
    t: float = 0.0
    tolerance: float = 1e-5
    step: float = 0.02


class GlobalEowRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    f1: str | dict = "poly:0,2,0,1"
    f2: str | dict | None = None
    ell: float = 0.3
    r: float = 1.0
    overlap_tolerance: float = 1e-6
    reconstruction_tolerance: float = 1e-5
    boundary_tolerance: float = 1e-6
    test_functions: int = 10


class LocalEowRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    masses: str | list = "1@0.3i"
    box: tuple[float, float, float] = (-0.1, 0.1, 0.5)
    r: float = 1.0
    xis: list[float] = Field(default_factory=lambda: [1.2, -1.2, 2.0, -2.0])
    tolerance: float = 1e-5
    ladder: LadderOptions | None = None
    path_step: float = 0.008


class CarrierProbeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    masses: str | list = "1@0.5i"
    xis: list[float] = Field(default_factory=lambda: [1.0, 0.6, 0.4, 0.0])
    ladder: LadderOptions | None = None
    growth_order: int = 0


class ReportResponse(BaseModel):
    schema_version: str
    command: str
    config: dict
    results: dict
    failures: list[str]
    status: str


# ---------------------------------------------------------------------------
# runners


def run_kernel(req: KernelRequest):
    spec = KernelSpec(n=req.n, r=req.r, strategy=req.strategy, tolerance=req.tolerance)
    if req.n == 1:
        columns = ["re_z", "im_z", "re_k", "im_k", "err_estimate"]
    else:
        columns = [f"{part}_z{j + 1}" for j in range(req.n) for part in ("re", "im")]
        columns += ["re_k", "im_k", "err_estimate"]
    rows = []

    def extend(pts):
        vals, errs = kernel_table(pts, spec)
        for z, v, e in zip(np.atleast_2d(pts.reshape(-1, spec.n)), vals, errs):
            coords = [c for zj in z for c in (float(zj.real), float(zj.imag))]
            rows.append(coords + [float(v.real), float(v.imag), float(e)])

    if req.grid:
        if req.n != 1:
            raise InvalidArgument("grid tabulation is implemented for n=1")
        re_part, _, im_part = req.grid.partition(",")
        if not im_part:
            raise InvalidArgument("grid must be 're0:re1:step,im0:im1:step'")
        res = parse_range(re_part)
        ims = parse_range(im_part)
        extend((res[:, None] + 1j * ims[None, :]).reshape(-1))
    if req.points:
        if req.n == 1:
            extend(np.array([parse_complex(p) for p in req.points]))
        else:
            extend(
                np.array(
                    [[parse_complex(c) for c in str(p).split(";")] for p in req.points]
                )
            )
    results = {
        "strategy": spec.effective_strategy,
        "columns": columns,
        "rows": rows,
    }
    if req.list_poles:
        if req.n != 1:
            raise InvalidArgument("pole enumeration is only available for n=1")
        results["poles"] = [jsonable(p) for p in pole_locations(spec, 4)]
    return build_report("kernel", req.model_dump(), jsonable(results))


def run_geometry(req: GeometryRequest):
    carrier = req.carrier.build()
    if req.r == "auto":
        r = auto_scale(req.carrier.ell)
    else:
        r = float(req.r)
        if r <= 0:
            raise InvalidArgument("r must be positive")
    rng = np.random.default_rng(req.seed)
    failures = []
    rows = []
    csv_rows = []

    if isinstance(carrier, LightConeCarrier):
        distances = parse_range(req.scan_dist or "0:6:0.5")
        pts = lightcone_scan_points(distances, carrier, req.direction)
        shared = carrier.sample(rng)
        bound_tol = 1e-3
        for d, x in zip(distances, pts):
            xv = np.asarray(x, dtype=float)
            gap_samples = np.sqrt(r**2 + np.linalg.norm(shared.real - xv, axis=1) ** 2) - np.linalg.norm(
                shared.imag, axis=1
            )
            gap = carrier_gap(xv, carrier, r)
            value = min(float(gap_samples.min()), gap.value)
            bound = lightcone_gap_bound(xv, carrier, r)
            margin = value - r
            member = margin > 0.0
            if value > bound + bound_tol:
                failures.append(
                    f"carrier gap {value:.6f} exceeds its closed-form bound {bound:.6f} at dist={d}"
                )
            row = {
                "x": [float(c) for c in xv],
                "dist": float(d),
                "gap": value,
                "gap_uncertainty": gap.uncertainty,
                "gap_bound": bound,
                "margin": float(margin),
                "member": bool(member),
            }
            if req.include_shrunken:
                q_member, q_margin = explicit_lightcone_shrunken_membership(xv, carrier)
                row["shrunken_member"] = bool(q_member)
                row["shrunken_margin"] = float(q_margin)
            rows.append(row)
            csv_rows.append([*row["x"], float(margin), bool(member)])
        results = {
            "carrier": "lightcone4d",
            "r": float(r),
            "thresholds": {
                "gap_distance": region_threshold(req.carrier.ell, r),
                "cone_distance": (math.sqrt(2.0) + 1.0) * req.carrier.ell,
                "shrunken_cone_distance": lightcone_shrunken_threshold(req.carrier.ell),
            },
            "rows": rows,
        }
    else:
        xs = parse_range(req.scan_x or "-3:3:0.25")
        margin2l = 2.0 * req.carrier.ell
        for x in xs:
            member, margin = continuation_region_membership(float(x), carrier, r, rng)
            row = {"x": [float(x)], "margin": float(margin), "member": bool(member)}
            if req.include_shrunken:
                q_member, q_margin = shrunken_region_membership(
                    float(x), carrier, r, margin2l, rng
                )
                row["shrunken_member"] = bool(q_member)
                row["shrunken_margin"] = float(q_margin)
            rows.append(row)
            csv_rows.append([float(x), float(margin), bool(member)])
        results = {
            "carrier": req.carrier.kind,
            "r": float(r),
            "thresholds": {"gap_distance": region_threshold(req.carrier.ell, r)},
            "rows": rows,
        }
    results["csv_columns"] = [f"x{j+1}" for j in range(getattr(carrier, "n", 1))] + ["margin", "member"]
    results["csv_rows"] = csv_rows
    return build_report("geometry", req.model_dump(), jsonable(results), failures)


def run_reproduce(req: ReproduceRequest):
    phi = parse_test_function(req.phi)
    residual = reproducing_residual(phi, req.r, req.R, req.t, step=req.step)
    failures = []
    if residual >= req.tolerance:
        failures.append(
            f"reproducing residual {residual:.3e} >= tolerance {req.tolerance:.3e}"
        )
    results = {"residual": float(residual), "tolerance": req.tolerance}
    return build_report("reproduce", req.model_dump(), results, failures)


def _poly_values(descriptor, zs):
    tag = descriptor["family"] if isinstance(descriptor, dict) else str(descriptor).split(":")[0]
    if tag not in ("poly", "polynomial"):
        return None
    if isinstance(descriptor, dict):
        coeffs = [parse_complex(c) for c in descriptor.get("params", [])]
    else:
        coeffs = [parse_complex(c) for c in str(descriptor).split(":")[1].split(",")]
    return np.polynomial.polynomial.polyval(zs, np.asarray(coeffs, dtype=complex))


def run_global_eow(req: GlobalEowRequest):
    f2 = req.f2 if req.f2 is not None else req.f1
    F1 = parse_boundary_function(req.f1, +1, req.ell)
    F2 = parse_boundary_function(f2, -1, req.ell)
    eta = req.ell + 0.1 * req.r
    u1 = Ultrahyperfunction.from_boundary(F1, eta)
    u2 = Ultrahyperfunction.from_boundary(F2, -eta)
    U1 = regularize(u1, req.r)
    U2 = regularize(u2, req.r)
    rep = overlap_report(U1, U2, tolerance=req.overlap_tolerance)
    failures = []
    results = {
        "overlap": {
            "max_deviation": rep.max_deviation,
            "worst_point": rep.worst_point,
            "tolerance": rep.tolerance,
            "passed": rep.passed,
            "points": rep.points,
        }
    }
    if not rep.passed:
        failures.append(
            f"overlap deviation {rep.max_deviation:.3e} >= {rep.tolerance:.3e}: "
            "the two boundary functions do not induce the same functional"
        )
        results["note"] = "reconstruction skipped: smoothed branches disagree"
        return build_report("global-eow", req.model_dump(), jsonable(results), failures)

    H = reconstruct(glue_global(U1, U2), req.r, "global")
    xs = np.linspace(-2.0, 2.0, 5)
    ys = np.array([0.0, 0.15, -0.15, 0.45, -0.45, 0.8, -0.8, 1.0, -1.0, 1.2]) * max(1.0, req.r)
    grid = (xs[:, None] + 1j * ys[None, :]).reshape(-1)
    H_vals = H.eval(grid)
    results["csv_columns"] = ["re_z", "im_z", "re_h", "im_h"]
    results["csv_rows"] = [
        [float(z.real), float(z.imag), float(v.real), float(v.imag)]
        for z, v in zip(grid, H_vals)
    ]
    target = _poly_values(req.f1, grid)
    if target is not None and req.f2 in (None, req.f1):
        dev = float(np.abs(H_vals - target).max())
        results["reconstruction"] = {
            "grid_points": int(grid.size),
            "max_deviation": dev,
            "tolerance": req.reconstruction_tolerance,
            "passed": bool(dev < req.reconstruction_tolerance),
        }
        if dev >= req.reconstruction_tolerance:
            failures.append(
                f"reconstruction deviates from the polynomial by {dev:.3e}"
            )
    centers = np.linspace(-1.0, 1.0, max(1, req.test_functions // 2))
    phis = [gaussian(c, s) for c in centers for s in (1.0, 0.7)][: req.test_functions]
    bm = boundary_match(H, u1, phis, tolerance=req.boundary_tolerance)
    results["boundary_match"] = {
        "deviations": list(bm.deviations),
        "max_deviation": bm.max_deviation,
        "tolerance": bm.tolerance,
        "passed": bm.passed,
        "scale_flag": bm.scale_flag,
    }
    if not bm.passed:
        failures.append(
            f"boundary pairing deviates by {bm.max_deviation:.3e} >= {bm.tolerance:.3e}"
        )
    return build_report("global-eow", req.model_dump(), jsonable(results), failures)


def run_local_eow(req: LocalEowRequest):
    masses = parse_masses(req.masses)
    a, b, ell = req.box
    upper, lower = cauchy_transform(masses, ell)
    u1 = Ultrahyperfunction.from_boundary(upper, ell + 0.1 * req.r)
    u2 = Ultrahyperfunction.from_boundary(lower, -(ell + 0.1 * req.r))
    local = local_continue(u1, u2, masses, (a, b, ell), req.r)
    ladder = req.ladder.to_spec() if req.ladder else PROBE_LADDER
    probes = probe_equality(local, req.xis, ladder, req.tolerance, req.path_step)
    failures = []
    rows = []
    for res in probes:
        oracle = sum(c / (w - res.xi) for c, w in masses) / (2j * math.pi)
        oracle_dev = abs(res.h1 - oracle)
        ok = res.passed and oracle_dev < req.tolerance
        rows.append(
            {
                "xi": res.xi,
                "h1": res.h1,
                "h2": res.h2,
                "direct_h1": res.direct1,
                "direct_h2": res.direct2,
                "difference": res.difference,
                "oracle": oracle,
                "oracle_deviation": float(oracle_dev),
                "passed": bool(ok),
            }
        )
        if not ok:
            failures.append(
                f"probe equality failed at xi={res.xi}: |h1-h2|={res.difference:.3e}, "
                f"oracle deviation {oracle_dev:.3e}"
            )
    results = {"thresholds": local.thresholds, "probes": rows, "tolerance": req.tolerance}
    results["csv_columns"] = [
        "xi", "re_h1", "im_h1", "re_h2", "im_h2", "difference", "oracle_deviation",
    ]
    results["csv_rows"] = [
        [
            row["xi"],
            row["h1"].real, row["h1"].imag,
            row["h2"].real, row["h2"].imag,
            row["difference"], row["oracle_deviation"],
        ]
        for row in rows
    ]
    return build_report("local-eow", req.model_dump(), jsonable(results), failures)


def run_carrier_probe(req: CarrierProbeRequest):
    masses = parse_masses(req.masses)
    u_diff = Ultrahyperfunction.from_masses(masses)
    carrier = PointCloudCarrier(tuple(w for _, w in masses), 1)
    ladder = req.ladder.to_spec() if req.ladder else None
    rows = []
    for xi in req.xis:
        rep = carrier_probe(u_diff, carrier, xi, ladder, req.growth_order)
        exponent = max((w.imag**2 - (xi - w.real) ** 2) for _, w in masses)
        rows.append(
            {
                "xi": float(xi),
                "verdict": rep.verdict,
                "exponent": float(exponent),
                "expected": "grows" if exponent > 0 else "decays",
                "magnitudes": list(rep.magnitudes),
                "bounds": [b if math.isfinite(b) else None for b in rep.bounds],
                "t_values": list(rep.t_values),
            }
        )
    results = {"probes": rows}
    return build_report("carrier-probe", req.model_dump(), jsonable(results))


# ---------------------------------------------------------------------------
# app


app = FastAPI(title="wedgekit service", version=__version__)


def _guard(fn, *args):
    try:
        return fn(*args)
    except _CORE_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.get("/health")
def health():
    return {"service": "wedgekit", "version": __version__, "schema_version": SCHEMA_VERSION}


@app.post("/kernel", response_model=ReportResponse)
def kernel_endpoint(req: KernelRequest):
    return _guard(run_kernel, req)


@app.post("/geometry", response_model=ReportResponse)
def geometry_endpoint(req: GeometryRequest):
    return _guard(run_geometry, req)


@app.post("/reproduce", response_model=ReportResponse)
def reproduce_endpoint(req: ReproduceRequest):
    return _guard(run_reproduce, req)


@app.post("/global-eow", response_model=ReportResponse)
def global_eow_endpoint(req: GlobalEowRequest):
    return _guard(run_global_eow, req)


@app.post("/local-eow", response_model=ReportResponse)
def local_eow_endpoint(req: LocalEowRequest):
    return _guard(run_local_eow, req)


@app.post("/carrier-probe", response_model=ReportResponse)
def carrier_probe_endpoint(req: CarrierProbeRequest):
    return _guard(run_carrier_probe, req)
