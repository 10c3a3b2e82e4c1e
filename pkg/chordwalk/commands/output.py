"""
Table Output
────────────
Column-oriented tables written as CSV (header row, comma separated) or as a
JSON object {"meta": ..., "data": {column: [values]}}. Floats always carry
OUTPUT_PRECISION significant digits so identical requests give identical bytes.

Usage:
    from chordwalk.commands.output import emit
    emit(req, {"index": idx, "eigenvalue": energies}, meta)
"""

import json
import logging
import sys
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from chordwalk.core.config import settings
from chordwalk.schemas.run import OutputMeta, RunRequest

logger = logging.getLogger(__name__)


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), f".{settings.OUTPUT_PRECISION}g")


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(_cell(value))


def render_csv(columns: Mapping[str, Sequence]) -> str:
    names = list(columns)
    rows = zip(*(columns[name] for name in names))
    lines = [",".join(names)] + [",".join(_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def render_json(columns: Mapping[str, Sequence], meta: OutputMeta) -> str:
    payload = {
        "meta": meta.model_dump(mode="json"),
        "data": {name: [_json_value(v) for v in values] for name, values in columns.items()},
    }
    return json.dumps(payload, indent=2) + "\n"


def emit(req: RunRequest, columns: Mapping[str, Sequence], meta: OutputMeta, out: Optional[Path] = None) -> str:
    lengths = {name: len(values) for name, values in columns.items()}
    if len(set(lengths.values())) > 1:
        raise ValueError(f"ragged table: {lengths}")

    text = render_json(columns, meta) if req.format == "json" else render_csv(columns)
    target = out or req.out
    if target is None:
        sys.stdout.write(text)
    else:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", newline="\n") as fh:
            fh.write(text)
        rows = next(iter(lengths.values()), 0)
        logger.info(f"[CLI] wrote {rows} rows to {target}")
    return text


def request_echo(req: RunRequest) -> dict:
    return req.model_dump(mode="json")
