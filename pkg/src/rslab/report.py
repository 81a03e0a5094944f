"""Serializable experiment records with reproducible byte-level output."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__


def to_plain(obj: Any) -> Any:
    """JSON-safe copy: complex -> [re, im], non-finite floats -> strings, numpy -> python."""
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
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_plain(obj.real), to_plain(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj: Any) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, indent=2) + "\n"


@dataclass
class Series:
    name: str
    header: Sequence[str]
    rows: list[Sequence[Any]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()


def _cell(v: Any) -> Any:
    v = to_plain(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return json.dumps(v)
    return v


@dataclass
class Report:
    op: str
    instance: str
    params: dict
    value: Any
    bound: Any
    ratio: Any
    passed: bool | None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "instance": self.instance,
            "params": self.params,
            "value": self.value,
            "bound": self.bound,
            "ratio": self.ratio,
            "pass": self.passed,
            "details": self.details,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunManifest:
    command: str
    instance: str
    params: dict
    seed: int
    version: str = __version__
    digests: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return dumps(dataclasses.asdict(self))


def write_run(
    outdir: Path, report: Report, series: Sequence[Series], manifest: RunManifest
) -> RunManifest:
    """Write report.json, one CSV per series and manifest.json (with the output digests)."""
    outdir.mkdir(parents=True, exist_ok=True)
    files = {"report.json": report.to_json()}
    for s in series:
        files[f"{s.name}.csv"] = s.to_csv()
    for name, text in files.items():
        (outdir / name).write_text(text)
        manifest.digests[name] = digest(text)
    (outdir / "manifest.json").write_text(manifest.to_json())
    return manifest
