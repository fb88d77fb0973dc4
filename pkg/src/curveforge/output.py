"""CSV curve files and JSON run reports."""
from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .curves import SampledCurve
from .errors import NonFiniteOutputError

__all__ = ["RunReport", "curve_to_csv", "write_curve_csv", "read_curve_csv", "POINT_COLUMNS", "FRAME_COLUMNS"]

POINT_COLUMNS = ("s", "x", "y", "z")
FRAME_COLUMNS = ("tx", "ty", "tz", "nx", "ny", "nz", "bx", "by", "bz")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def curve_to_csv(curve: SampledCurve, frames: bool = False) -> str:
    """CSV text with one row per sample; 17 significant digits per float."""
    columns = [curve.s[:, None], curve.points]
    header = list(POINT_COLUMNS)
    if frames:
        if curve.frames is None:
            raise ValueError("curve carries no frames")
        columns.append(curve.frames.reshape(len(curve), 9))
        header += FRAME_COLUMNS
    table = np.hstack(columns)
    if not np.all(np.isfinite(table)):
        row = int(np.argmax(~np.all(np.isfinite(table), axis=1)))
        raise NonFiniteOutputError(f"non-finite value in output row {row} (s={curve.s[row]!r})")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in table:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def write_curve_csv(path, curve: SampledCurve, frames: bool = False) -> None:
    """Write :func:`curve_to_csv` output to ``path`` (``"-"`` for stdout)."""
    text = curve_to_csv(curve, frames)
    if str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def read_curve_csv(path) -> SampledCurve:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))
    frames = None
    if len(header) == len(POINT_COLUMNS) + len(FRAME_COLUMNS):
        frames = body[:, 4:].reshape(-1, 3, 3)
    return SampledCurve(body[:, 0], body[:, 1:4], frames)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        x = float(x)
    if isinstance(x, float) and not np.isfinite(x):
        return repr(x)
    return x


@dataclass
class RunReport:
    """Self-contained record of one command-line run.

    ``inputs`` echoes everything needed to repeat the run, ``metrics`` holds
    the accuracy figures the command defines, ``events`` lists chart exits,
    restarts and sign-branch choices, and ``timing_ms`` wall-clock times.
    """

    inputs: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    events: list = field(default_factory=list)
    timing_ms: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _jsonable(
            {"inputs": self.inputs, "metrics": self.metrics, "events": self.events, "timing_ms": self.timing_ms}
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, path) -> None:
        if str(path) == "-":
            sys.stdout.write(self.to_json())
            return
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        d = json.loads(text)
        return cls(d["inputs"], d["metrics"], d["events"], d["timing_ms"])
