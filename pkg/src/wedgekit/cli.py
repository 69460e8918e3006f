"""Thin command-line client for the wedgekit service.

Every subcommand builds a request payload, posts it to the service (an
in-process instance by default, or a remote one via ``--server``), writes
the JSON report and optional CSV grid, prints a PASS/FAIL summary, and exits
0 on all-PASS, 1 on any FAIL, 2 on usage errors.
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click
import httpx

from .reports import csv_text, dump_json, summary_lines


class ServiceClient:
    """POSTs to a running service, or drives the app in-process."""

    def __init__(self, server=None):
        self.server = server.rstrip("/") if server else None

    def post(self, path, payload):
        if self.server:
            resp = httpx.post(self.server + path, json=payload, timeout=600.0)
            return resp.status_code, resp.json()
        return asyncio.run(self._post_local(path, payload))

    async def _post_local(self, path, payload):
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://wedgekit") as client:
            resp = await client.post(path, json=payload, timeout=600.0)
            return resp.status_code, resp.json()


def _deliver(ctx, path, payload, out_json=None, out_csv=None):
    client: ServiceClient = ctx.obj
    try:
        status_code, report = client.post(path, payload)
    except httpx.HTTPError as exc:
        click.echo(f"service unreachable: {exc}", err=True)
        sys.exit(2)
    if status_code != 200:
        detail = report.get("detail", report) if isinstance(report, dict) else report
        click.echo(f"request rejected ({status_code}): {detail}", err=True)
        sys.exit(2)
    if out_json:
        Path(out_json).write_text(dump_json(report))
    if out_csv:
        results = report.get("results", {})
        if "csv_rows" in results:
            Path(out_csv).write_text(csv_text(results["csv_columns"], results["csv_rows"]))
        elif "rows" in results and "columns" in results:
            Path(out_csv).write_text(csv_text(results["columns"], results["rows"]))
        else:
            click.echo("no CSV grid in this report", err=True)
            sys.exit(2)
    for line in summary_lines(report):
        click.echo(line)
    sys.exit(0 if report["status"] == "PASS" else 1)


def _merge_payload_file(payload, payload_file):
    """A JSON descriptor file overrides the flag-built payload field-wise."""
    if not payload_file:
        return payload
    try:
        loaded = json.loads(Path(payload_file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read payload file: {exc}")
    if not isinstance(loaded, dict):
        raise click.UsageError("payload file must hold a JSON object")
    payload = dict(payload)
    payload.update(loaded)
    return payload


def payload_file_option(fn):
    return click.option(
        "--payload", "payload_file", default=None, type=click.Path(),
        help="JSON file overriding the request payload (batch descriptors).",
    )(fn)


def _ladder_payload(text):
    if not text:
        return None
    parts = text.split(",")
    if len(parts) != 4:
        raise click.UsageError("ladder must be start,ratio,rungs,order")
    return {
        "start": float(parts[0]),
        "ratio": float(parts[1]),
        "rungs": int(parts[2]),
        "order": int(parts[3]),
    }


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; default runs in process.")
@click.pass_context
def main(ctx, server):
    """Numerical edge-of-the-wedge experiments."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--n", default=1, show_default=True)
@click.option("--r", default=1.0, show_default=True)
@click.option("--strategy", default="auto", show_default=True,
              type=click.Choice(["auto", "closed_form_1d", "fourier_quadrature"]))
@click.option("--eval", "points", multiple=True, help="Complex point, e.g. 1.5+0.3i (repeatable).")
@click.option("--grid", default=None, help="re0:re1:step,im0:im1:step tabulation grid.")
@click.option("--tol", default=1e-8, show_default=True)
@click.option("--poles", is_flag=True, help="Include the n=1 pole locations.")
@click.option("--out-json", default=None, type=click.Path())
@click.option("--out-csv", default=None, type=click.Path())
@payload_file_option
@click.pass_context
def kernel(ctx, n, r, strategy, points, grid, tol, poles, out_json, out_csv, payload_file):
    """Evaluate the smoothing kernel at points or on a grid."""
    payload = {
        "n": n,
        "r": r,
        "strategy": strategy,
        "points": list(points) or None,
        "grid": grid,
        "tolerance": tol,
        "list_poles": poles,
    }
    _deliver(ctx, "/kernel", _merge_payload_file(payload, payload_file), out_json, out_csv)


@main.command()
@click.option("--carrier", default="lightcone4d", show_default=True,
              type=click.Choice(["lightcone4d", "box1d", "pointcloud"]))
@click.option("--ell", default=1.0, show_default=True)
@click.option("--a", default=-1.0, show_default=True, help="Box carrier left edge.")
@click.option("--b", default=1.0, show_default=True, help="Box carrier right edge.")
@click.option("--point", "points", multiple=True, help="Point-cloud carrier point (repeatable).")
@click.option("--r", default="auto", show_default=True, help="Smoothing scale or 'auto'.")
@click.option("--scan-dist", default=None, help="Cone-distance scan start:stop:step.")
@click.option("--scan-x", default=None, help="1D scan start:stop:step.")
@click.option("--direction", default="antipodal", show_default=True,
              type=click.Choice(["antipodal", "spacelike"]))
@click.option("--samples", default=100_000, show_default=True, help="Carrier sampling density.")
@click.option("--seed", default=0, show_default=True)
@click.option("--no-shrunken", is_flag=True, help="Skip the shrunken-region columns.")
@click.option("--out-json", default=None, type=click.Path())
@click.option("--out-csv", default=None, type=click.Path())
@payload_file_option
@click.pass_context
def geometry(ctx, carrier, ell, a, b, points, r, scan_dist, scan_x, direction,
             samples, seed, no_shrunken, out_json, out_csv, payload_file):
    """Scan carrier-gap regions and emit a membership report."""
    payload = {
        "carrier": {
            "kind": carrier,
            "ell": ell,
            "a": a,
            "b": b,
            "points": list(points) or None,
            "samples": samples,
        },
        "r": r if r == "auto" else float(r),
        "scan_dist": scan_dist,
        "scan_x": scan_x,
        "direction": direction,
        "include_shrunken": not no_shrunken,
        "seed": seed,
    }
    _deliver(ctx, "/geometry", _merge_payload_file(payload, payload_file), out_json, out_csv)


@main.command()
@click.option("--phi", default="gaussian:0,1", show_default=True)
@click.option("--r", default=1.0, show_default=True)
@click.option("--big-r", "--R", "big_r", default=0.5, show_default=True)
@click.option("--t", default=0.0, show_default=True)
@click.option("--tol", default=1e-5, show_default=True)
@click.option("--step", default=0.02, show_default=True)
@click.option("--out-json", default=None, type=click.Path())
@payload_file_option
@click.pass_context
def reproduce(ctx, phi, r, big_r, t, tol, step, out_json, payload_file):
    """Check the two-shift reproducing identity on a test function."""
    payload = {"phi": phi, "r": r, "R": big_r, "t": t, "tolerance": tol, "step": step}
    _deliver(ctx, "/reproduce", _merge_payload_file(payload, payload_file), out_json)


@main.command("global-eow")
@click.option("--f1", default="poly:0,2,0,1", show_default=True)
@click.option("--f2", default=None, help="Defaults to --f1.")
@click.option("--ell", default=0.3, show_default=True)
@click.option("--r", default=1.0, show_default=True)
@click.option("--overlap-tol", default=1e-6, show_default=True)
@click.option("--recon-tol", default=1e-5, show_default=True)
@click.option("--boundary-tol", default=1e-6, show_default=True)
@click.option("--test-functions", default=10, show_default=True)
@click.option("--out-json", default=None, type=click.Path())
@click.option("--out-csv", default=None, type=click.Path())
@payload_file_option
@click.pass_context
def global_eow(ctx, f1, f2, ell, r, overlap_tol, recon_tol, boundary_tol,
               test_functions, out_json, out_csv, payload_file):
    """Run the global two-wedge continuation flow."""
    payload = {
        "f1": f1,
        "f2": f2,
        "ell": ell,
        "r": r,
        "overlap_tolerance": overlap_tol,
        "reconstruction_tolerance": recon_tol,
        "boundary_tolerance": boundary_tol,
        "test_functions": test_functions,
    }
    _deliver(ctx, "/global-eow", _merge_payload_file(payload, payload_file), out_json, out_csv)


@main.command("local-eow")
@click.option("--masses", default="1@0.3i", show_default=True,
              help="Difference masses, e.g. '1@0.3i;-0.5@-0.3i'.")
@click.option("--box", default="-0.1,0.1,0.5", show_default=True, help="a,b,ell carrier box.")
@click.option("--r", default=1.0, show_default=True)
@click.option("--xi", "xis", multiple=True, type=float, help="Probe center (repeatable).")
@click.option("--tol", default=1e-5, show_default=True)
@click.option("--ladder", default=None, help="start,ratio,rungs,order override.")
@click.option("--path-step", default=0.008, show_default=True)
@click.option("--out-json", default=None, type=click.Path())
@click.option("--out-csv", default=None, type=click.Path())
@payload_file_option
@click.pass_context
def local_eow(ctx, masses, box, r, xis, tol, ladder, path_step, out_json, out_csv, payload_file):
    """Run the carried-difference local continuation flow."""
    try:
        a, b, ell = (float(p) for p in box.split(","))
    except ValueError as exc:
        raise click.UsageError(f"box must be a,b,ell: {exc}")
    payload = {
        "masses": masses,
        "box": [a, b, ell],
        "r": r,
        "xis": list(xis) or [1.2, -1.2, 2.0, -2.0],
        "tolerance": tol,
        "ladder": _ladder_payload(ladder),
        "path_step": path_step,
    }
    _deliver(ctx, "/local-eow", _merge_payload_file(payload, payload_file), out_json, out_csv)


@main.command("carrier-probe")
@click.option("--masses", default="1@0.5i", show_default=True)
@click.option("--xi", "xis", multiple=True, type=float)
@click.option("--ladder", default=None, help="start,ratio,rungs,order override.")
@click.option("--growth-order", default=0, show_default=True)
@click.option("--out-json", default=None, type=click.Path())
@payload_file_option
@click.pass_context
def carrier_probe_cmd(ctx, masses, xis, ladder, growth_order, out_json, payload_file):
    """Heat-probe a point-mass functional and classify decay."""
    payload = {
        "masses": masses,
        "xis": list(xis) or [1.0, 0.6, 0.4, 0.0],
        "ladder": _ladder_payload(ladder),
        "growth_order": growth_order,
    }
    _deliver(ctx, "/carrier-probe", _merge_payload_file(payload, payload_file), out_json)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
