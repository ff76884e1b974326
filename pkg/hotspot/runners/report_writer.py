"""
CSV and JSON emission of report rows and solved fields.
"""

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from hotspot.models.experiment_models import ExperimentConfig, ReportRow
from hotspot.models.field_models import ScalarField

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["domain", "problem", "N", "r_in", "d_measured", "bound", "bound_value", "slack", "status", "runtime_s"]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def emit(rows: Sequence[ReportRow], format: str = "csv", path: Union[str, Path, None] = None,
         config: Optional[ExperimentConfig] = None, fields: Optional[Dict[str, ScalarField]] = None) -> str:
    """
    Write report rows.

    Args:
        rows: Report rows, already in canonical order
        format: "csv" or "json"
        path: Output file; the text is only returned when None
        config: Echoed into the JSON report
        fields: Plot-ready (x, y, value) dumps keyed by "domain/problem", JSON only

    Returns:
        str: The emitted text
    """
    if format == "csv":
        text = _csv_text(rows)
    elif format == "json":
        document: Dict[str, Any] = {"rows": [{k: _json_value(v) for k, v in row.model_dump().items()} for row in rows]}
        if config is not None:
            document["config"] = config.model_dump(mode="json", by_alias=True)
        if fields:
            document["fields"] = {key: [list(t) for t in field.triples()] for key, field in sorted(fields.items())}
        text = json.dumps(document, indent=2, sort_keys=True)
    else:
        raise ValueError(f"Unknown report format '{format}'")
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info(f"Wrote {len(rows)} rows to {path}")
    return text


def _csv_text(rows: Sequence[ReportRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        data = row.model_dump()
        writer.writerow([_cell(data[column]) for column in CSV_COLUMNS])
    return buffer.getvalue()


def write_field_csv(field: ScalarField, path: Union[str, Path]) -> Path:
    """One x,y,value line per inside node."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["x", "y", "value"])
        for x, y, value in field.triples():
            writer.writerow([repr(x), repr(y), repr(value)])
    return path


def rows_from_json(text: str) -> List[ReportRow]:
    """Rows back from an emitted JSON report."""
    document = json.loads(text)
    return [ReportRow.model_validate(row) for row in document["rows"]]
