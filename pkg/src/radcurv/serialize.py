"""JSON, CSV and Markdown emission for run outputs."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass
from importlib import resources

import numpy as np

SCHEMA_VERSION = "1.0"


def plain(obj):
    """Recursively convert to JSON-safe values; non-finite floats become strings."""
    if is_dataclass(obj) and not isinstance(obj, type):
        obj = obj.as_dict() if hasattr(obj, "as_dict") else asdict(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def summarize(reports) -> dict:
    out = {"satisfied": 0, "violated": 0, "indeterminate": 0}
    for r in reports:
        status = r["status"] if isinstance(r, dict) else r.status
        out[status] = out.get(status, 0) + 1
    return out


def document(command: str, reports, manifest=None, results=None, timestamp: str | None = None) -> dict:
    reps = [plain(r) for r in reports]
    doc = {"schema_version": SCHEMA_VERSION, "command": command}
    if timestamp is not None:
        doc["generated"] = timestamp
    doc["manifest"] = plain(manifest) if manifest is not None else None
    doc["summary"] = summarize(reps)
    doc["reports"] = reps
    if results is not None:
        doc["results"] = plain(results)
    return doc


def dumps(doc: dict) -> str:
    # float repr is the shortest round-trip decimal
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    text = resources.files("radcurv").joinpath("schema/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _cell(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return repr(x) if math.isfinite(x) else plain(x)
    return x


def reports_csv(reports) -> str:
    rows = []
    for r in reports:
        d = plain(r)
        rows.append([d.get("case_id") or "", d["theorem_id"], d["status"], d["lhs"], d["rhs"], d["slack"]])
    return rows_to_csv(["case_id", "theorem_id", "status", "lhs", "rhs", "slack"], rows)


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.6g}"
    return "" if x is None else str(x)


def markdown(doc: dict) -> str:
    """Summary table of a run document."""
    lines = [f"# radcurv {doc.get('command', '')} report", ""]
    s = doc.get("summary") or summarize(doc.get("reports", []))
    lines.append(f"satisfied: {s.get('satisfied', 0)}, violated: {s.get('violated', 0)}, "
                 f"indeterminate: {s.get('indeterminate', 0)}")
    lines.append("")
    reps = doc.get("reports", [])
    if reps:
        lines.append("| case | theorem | status | lhs | rhs | slack |")
        lines.append("|---|---|---|---|---|---|")
        for r in reps:
            lines.append("| " + " | ".join(_fmt(r.get(k)) for k in
                                           ("case_id", "theorem_id", "status", "lhs", "rhs", "slack")) + " |")
        failed = [r for r in reps if r.get("status") == "indeterminate"]
        if failed:
            lines += ["", "## Unmet hypotheses", ""]
            for r in failed:
                names = [h["name"] for h in r.get("hypothesis_checks", []) if not h.get("passed")]
                lines.append(f"- {r.get('case_id') or r['theorem_id']}: {', '.join(names)}")
    results = doc.get("results")
    if results:
        lines += ["", "## Results", "", "```json", json.dumps(results, indent=2), "```"]
    return "\n".join(lines) + "\n"
