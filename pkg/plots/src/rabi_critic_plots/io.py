"""Input readers with schema validation for the rabi-critic file formats."""

from __future__ import annotations

import csv
import json
from pathlib import Path


class SchemaError(ValueError):
    """Input file does not match the expected schema."""


def read_sidecar(path: Path) -> dict:
    meta_path = Path(str(path) + ".meta.json")
    if not meta_path.exists():
        raise SchemaError(f"missing metadata sidecar {meta_path.name} "
                          f"(inputs must come from the rabi-critic CLI)")
    meta = json.loads(meta_path.read_text())
    if "conventions" not in meta:
        raise SchemaError(f"sidecar {meta_path.name} carries no conventions block")
    return meta


def read_table(path: Path, required: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise SchemaError(f"{path.name}: missing required column {col!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path.name}: no data rows")
    return rows


def read_fss_report(path: Path) -> dict:
    report = json.loads(Path(path).read_text())
    if "observables" not in report:
        raise SchemaError(f"{Path(path).name}: missing required key 'observables'")
    for obs, entry in report["observables"].items():
        if "scaled_curves" not in entry:
            raise SchemaError(f"{Path(path).name}: observable {obs!r} has no scaled_curves")
    return report


def conventions_line(meta: dict) -> str:
    conv = meta.get("conventions", {})
    frame = conv.get("quadrature_frame", "?")
    deriv = conv.get("derivative", "?")
    return f"frame: {frame}   |   derivative: {deriv}"
