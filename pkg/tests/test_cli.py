import json

from click.testing import CliRunner

from wedgekit.cli import main

runner = CliRunner()


def test_reproduce_pass_and_report(tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        ["reproduce", "--phi", "gaussian:0,1", "--r", "1", "--big-r", "0.5",
         "--t", "0", "--out-json", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "[PASS] reproduce" in result.output
    report = json.loads(out.read_text())
    assert report["schema_version"] == "1"
    assert report["results"]["residual"] < 1e-6


def test_kernel_grid_csv(tmp_path):
    csv_path = tmp_path / "grid.csv"
    result = runner.invoke(
        main,
        ["kernel", "--grid", "-2:2:0.5,-0.3:0.3:0.3", "--out-csv", str(csv_path)],
    )
    assert result.exit_code == 0, result.output
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "re_z,im_z,re_k,im_k,err_estimate"
    assert len(lines) == 1 + 9 * 3


def test_geometry_scan_csv(tmp_path):
    csv_path = tmp_path / "region.csv"
    result = runner.invoke(
        main,
        ["geometry", "--carrier", "lightcone4d", "--ell", "1", "--r", "auto",
         "--scan-dist", "0:6:0.5", "--samples", "5000", "--out-csv", str(csv_path)],
    )
    assert result.exit_code == 0, result.output
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "x1,x2,x3,x4,margin,member"
    members = [line.rsplit(",", 1)[-1] for line in lines[1:]]
    assert "0" in members and "1" in members


def test_negative_control_exits_one():
    result = runner.invoke(main, ["global-eow", "--f1", "rational:0.5i", "--ell", "0.6"])
    assert result.exit_code == 1
    assert "[FAIL]" in result.output


def test_unknown_fixture_exits_two():
    result = runner.invoke(main, ["reproduce", "--phi", "mystery:1"])
    assert result.exit_code == 2


def test_bad_flag_exits_two():
    result = runner.invoke(main, ["kernel", "--frequency", "60"])
    assert result.exit_code == 2


def test_determinism_byte_identical_reports(tmp_path):
    args = ["geometry", "--carrier", "box1d", "--a", "-0.1", "--b", "0.1",
            "--ell", "0.5", "--r", "1.0", "--scan-x", "-2:2:0.5", "--seed", "3"]
    paths = []
    for name in ("one.json", "two.json"):
        out = tmp_path / name
        result = runner.invoke(main, args + ["--out-json", str(out)])
        assert result.exit_code == 0, result.output
        paths.append(out.read_bytes())
    assert paths[0] == paths[1]


def test_carrier_probe_cli():
    result = runner.invoke(
        main, ["carrier-probe", "--masses", "1@0.5i", "--xi", "1.0", "--xi", "0.3"]
    )
    assert result.exit_code == 0, result.output


def test_payload_file_batch_descriptor(tmp_path):
    payload = tmp_path / "run.json"
    payload.write_text(json.dumps({"phi": {"family": "gaussian", "params": [0, 1]},
                                   "r": 1.0, "R": 0.5}))
    result = runner.invoke(main, ["reproduce", "--payload", str(payload)])
    assert result.exit_code == 0, result.output


def test_local_eow_csv(tmp_path):
    csv_path = tmp_path / "probes.csv"
    result = runner.invoke(
        main,
        ["local-eow", "--masses", "1@0.3i", "--box", "-0.1,0.1,0.5", "--xi", "2.0",
         "--ladder", "0.25,0.5,12,2", "--path-step", "0.02", "--tol", "1e-4",
         "--out-csv", str(csv_path)],
    )
    assert result.exit_code == 0, result.output
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0].startswith("xi,re_h1")
    assert len(lines) == 2
