"""JSON distribution files, CSV sample files, and deterministic JSON output.

Distribution document::

    {"alphabets": {"x": [...], "y": [...], "z": [...]},
     "probs": [[[...]]]}                       # dense, indexed [x][y][z]

or, instead of ``probs``, a sparse ``entries`` list of
``{"x": ..., "y": ..., "z": ..., "p": ...}`` records (unlisted cells are 0).
A document that wraps a distribution under a ``"distribution"`` key, such as
the output of ``dopid compute``, is accepted as well.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError, ShapeMismatch
from .prob import Alphabet, JointDist3, SampleTable, validate


def _label_json(label):
    if isinstance(label, tuple):
        return [_label_json(v) for v in label]
    return label


def dist_to_json(d: JointDist3) -> dict:
    return {
        "alphabets": {
            "x": [_label_json(v) for v in d.ax],
            "y": [_label_json(v) for v in d.ay],
            "z": [_label_json(v) for v in d.az],
        },
        "probs": d.p.tolist(),
    }


def dist_from_json(doc) -> JointDist3:
    """Parse and validate a distribution document (already decoded)."""
    if not isinstance(doc, dict):
        raise ParseError("distribution document must be a JSON object")
    if "alphabets" not in doc and isinstance(doc.get("distribution"), dict):
        doc = doc["distribution"]
    try:
        alph = doc["alphabets"]
        ax, ay, az = (Alphabet(tuple(alph[k])) for k in ("x", "y", "z"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed alphabets: {exc}") from None
    if "probs" in doc:
        try:
            p = np.array(doc["probs"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"probs is not a numeric nested array: {exc}") from None
    elif "entries" in doc:
        p = np.zeros((len(ax), len(ay), len(az)))
        for e in doc["entries"]:
            try:
                idx = (ax.index(e["x"]), ay.index(e["y"]), az.index(e["z"]))
                p[idx] += float(e["p"])
            except (KeyError, TypeError) as exc:
                raise ParseError(f"malformed entry {e!r}: {exc}") from None
    else:
        raise ParseError("distribution needs either 'probs' or 'entries'")
    if p.ndim != 3:
        raise ShapeMismatch(f"probs must be a 3-d array, got {p.ndim}-d")
    return validate(p, ax, ay, az)


def load_distribution(source) -> JointDist3:
    """Read a distribution from a path, ``"-"`` for stdin, or a file object."""
    if source is None or str(source) == "-":
        import sys

        text = sys.stdin.read()
    elif hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return dist_from_json(doc)


def read_samples_csv(source) -> SampleTable:
    """Read observations from CSV text with header ``x,y,z``."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        return SampleTable(())
    header = [c.strip() for c in rows[0]]
    if header != ["x", "y", "z"]:
        raise ParseError(f"CSV header must be x,y,z, got {','.join(header)}")
    body = []
    for r in rows[1:]:
        if len(r) != 3:
            raise ParseError(f"CSV row {r!r} does not have three fields")
        body.append(tuple(c.strip() for c in r))
    return SampleTable(tuple(body))


def _fmt_float(v: float) -> str:
    if math.isnan(v) or math.isinf(v):
        raise ValueError(f"cannot serialize non-finite float {v!r}")
    return format(v, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # rows of scalars stay on one line
        if all(isinstance(v, (int, float, str, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            pad + json.dumps(str(k), ensure_ascii=False) + ": " + _encode(v, indent, level + 1)
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"
