"""File formats shared by the CLI and external consumers.

Chain files are plain text: first line n, then n whitespace-separated rows.
CSV artifacts are comma-separated with a header row, LF line endings, and
floats printed with 17 significant digits so reruns are byte-identical.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .chains import MarkedSet, StochasticMatrix
from .errors import ValidationError


def read_chain(path) -> StochasticMatrix:
    path = Path(path)
    try:
        tokens = path.read_text().split()
    except OSError as exc:
        raise ValidationError(f"cannot read chain file {path}: {exc}") from exc
    if not tokens:
        raise ValidationError(f"chain file {path} is empty")
    try:
        n = int(tokens[0])
    except ValueError:
        raise ValidationError(f"chain file {path}: first token must be the size, "
                              f"got {tokens[0]!r}") from None
    if len(tokens) != 1 + n * n:
        raise ValidationError(f"chain file {path}: expected {n * n} entries after "
                              f"the size line, found {len(tokens) - 1}")
    try:
        rows = np.array([float(t) for t in tokens[1:]]).reshape(n, n)
    except ValueError as exc:
        raise ValidationError(f"chain file {path}: non-numeric entry ({exc})") from None
    return StochasticMatrix(rows)


def write_chain(path, P: StochasticMatrix) -> None:
    lines = [str(P.n)]
    for row in P.rows:
        lines.append(" ".join(fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def parse_marked(text: str) -> MarkedSet:
    try:
        indices = tuple(sorted(int(tok) for tok in text.split(",") if tok.strip()))
    except ValueError:
        raise ValidationError(f"marked set {text!r} must be comma-separated integers") from None
    if not indices:
        raise ValidationError("marked set is empty")
    return MarkedSet(indices)


def parse_sizes(spec: str) -> list[int]:
    """Size lists: "start:stop:step" (stop inclusive) or a comma list."""
    spec = spec.strip()
    if re.fullmatch(r"\d+:\d+:\d+", spec):
        start, stop, step = (int(x) for x in spec.split(":"))
        if step < 1 or stop < start:
            raise ValidationError(f"bad size range {spec!r}")
        return list(range(start, stop + 1, step))
    try:
        return [int(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"sizes {spec!r}: use start:stop:step or a comma list") from None


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(fmt(v) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    text = Path(path).read_text()
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise ValidationError(f"CSV {path} is empty")
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def parse_config(path) -> dict[str, str]:
    """Flat key=value file; '#' starts a comment, blank lines skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def write_manifest(path, command: str, params: Mapping, wall_time: float) -> None:
    from . import __version__
    payload = {
        "command": command,
        "params": {k: params[k] for k in sorted(params)},
        "version": __version__,
        "wall_time_seconds": wall_time,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


def write_json(path, payload: Mapping) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
