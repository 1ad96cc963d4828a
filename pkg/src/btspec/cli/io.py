"""CSV and JSON writers. CSV bodies are deterministic; wall-clock data goes to JSON only."""
from __future__ import annotations

import json
import math
import time
from pathlib import Path

from .. import __version__

SPECTRUM_COLUMNS = ["q", "p0", "g", "s", "re_lambda", "im_lambda", "abs_mu", "residual", "method"]
PSEUDOSPECTRA_COLUMNS = ["re_z", "im_z", "resolvent_norm", "converged"]
ASYMPTOTICS_COLUMNS = ["g", "re_lambda_min", "im_lambda_min", "re_scaled", "im_scaled",
                       "target_re", "target_im"]


def fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return str(v)


def _header_lines(config: dict, caveat: str | None):
    yield f"# btspec {__version__}"
    if caveat:
        yield f"# note: {caveat}"
    for k in sorted(config):
        v = config[k]
        if v is None:
            continue
        if isinstance(v, list):
            v = ",".join(fmt(x) for x in v)
        yield f"# config {k} = {fmt(v)}"


def write_csv(path, columns, rows, config: dict, caveat: str | None = None) -> Path:
    """Write ``rows`` (dicts) with a commented header echoing the resolved config."""
    path = Path(path)
    lines = list(_header_lines(config, caveat))
    lines.append(",".join(columns))
    for r in rows:
        lines.append(",".join(fmt(r[c]) for c in columns))
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if hasattr(o, "item"):
        return _jsonable(o.item())
    return o


def write_json(path, payload: dict, config: dict, caveat: str | None = None,
               wall_time: float | None = None) -> Path:
    path = Path(path)
    doc = {"tool": "btspec", "version": __version__, "config": config}
    if caveat:
        doc["caveat"] = caveat
    doc.update(payload)
    doc["metadata"] = {"written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
                       "wall_time_s": wall_time}
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n")
    return path


def read_csv_body(path):
    """Header row and data rows of a CSV written by :func:`write_csv`."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]
