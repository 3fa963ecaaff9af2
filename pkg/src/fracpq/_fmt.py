"""Deterministic text formatting for result files.

Every floating value leaving the package (CSV cells, JSON numbers, stdout)
goes through g17 so that reruns produce byte-identical artifacts and no
precision is lost on re-reading.  The stdlib json encoder hardwires repr()
for floats, hence the small emitter here.
"""

from __future__ import annotations

import math
from pathlib import Path


def g17(x: float) -> str:
    """A float with 17 significant digits, the shortest exact-roundtrip cap."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in formatted output")
    return format(float(x), ".17g")


def _emit(obj, indent: int, out: list[str]) -> None:
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for k, (key, val) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            out.append(f'{pad}  "{key}": ')
            _emit(val, indent + 2, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for k, val in enumerate(obj):
            out.append(pad + "  ")
            _emit(val, indent + 2, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        out.append({True: "true", False: "false", None: "null"}[obj])
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(g17(obj))
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dumps_json(obj) -> str:
    out: list[str] = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)


def dump_json(obj, path: str | Path) -> None:
    Path(path).write_text(dumps_json(obj))
