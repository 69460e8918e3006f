"""Report assembly: canonical JSON payloads and CSV grids.

Reports are deterministic: no timestamps, keys sorted, floats emitted via
repr.  The same configuration and seed must produce byte-identical output.
"""

from __future__ import annotations

import json

SCHEMA_VERSION = "1"


def build_report(command, config, results, failures=()):
    failures = [str(f) for f in failures]
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "results": results,
        "failures": failures,
        "status": "FAIL" if failures else "PASS",
    }


def dump_json(payload):
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"


def csv_text(header, rows):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append(str(int(cell)))
            elif isinstance(cell, float):
                cells.append(repr(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def summary_lines(report):
    """Human-readable PASS/FAIL lines for the terminal."""
    lines = [f"[{report['status']}] {report['command']}"]
    for failure in report["failures"]:
        lines.append(f"  FAIL: {failure}")
    return lines
