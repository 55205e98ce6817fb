"""CPLEX LP text export of an :class:`IlpModel`, plus a small reader for it."""
from __future__ import annotations

import re
from pathlib import Path

from .model import IlpModel

_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")
_TERMS_PER_LINE = 8


def _check_names(model: IlpModel) -> None:
    for n in model.tecg.topology.nodes:
        if not _NAME.match(n):
            raise ValueError(f"node name {n!r} cannot appear in LP identifiers")


def _expr(terms: list) -> list:
    """Render ``[(coef, name), ...]`` as wrapped LP expression lines."""
    parts = []
    for i, (c, name) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else f"{abs(c)} "
        if i == 0:
            parts.append(f"{'-' if c < 0 else ''}{mag}{name}")
        else:
            parts.append(f"{sign} {mag}{name}")
    lines = []
    for i in range(0, len(parts), _TERMS_PER_LINE):
        lines.append(" ".join(parts[i:i + _TERMS_PER_LINE]))
    return lines or ["0"]


def lp_text(model: IlpModel) -> str:
    _check_names(model)
    names = [v.name for v in model.variables]
    out = [f"\\ {model.mode.upper()} admission model", "Maximize"]
    obj = _expr([(1, names[j]) for j in model.objective])
    out.append(" obj: " + obj[0])
    out += ["   " + line for line in obj[1:]]
    out.append("Subject To")
    for row in model.rows:
        if not row.coeffs:
            # nothing to constrain; keep the row so counts stay comparable
            out.append(f" {row.name}: 0 {_sense(row)} {row.rhs}")
            continue
        body = _expr([(c, names[j]) for j, c in row.coeffs])
        out.append(f" {row.name}: " + body[0])
        out += ["   " + line for line in body[1:]]
        out[-1] += f" {_sense(row)} {row.rhs}"
    out.append("Binaries")
    for name in names:
        out.append(" " + name)
    out.append("End")
    return "\n".join(out) + "\n"


def _sense(row) -> str:
    return "=" if row.sense == "=" else "<="


def export_lp(model: IlpModel, path) -> Path:
    path = Path(path)
    path.write_text(lp_text(model))
    return path


_TERM = re.compile(r"([+-])?\s*(\d+)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def _parse_expr(text: str) -> list:
    return [(int(c or 1) * (-1 if s == "-" else 1), name) for s, c, name in _TERM.findall(text)]


def parse_lp(text: str) -> dict:
    """Read back what :func:`lp_text` writes.

    Returns ``{"objective": [(coef, var)], "rows": {name: (terms, sense, rhs)},
    "binaries": [var]}``.
    """
    section = None
    objective: list = []
    rows: dict = {}
    binaries: list = []
    pending = ""
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("maximize", "minimize", "subject to", "binaries", "end"):
            section = low
            continue
        if section == "maximize" or section == "minimize":
            body = line.split(":", 1)[1] if ":" in line else line
            objective += [t for t in _parse_expr(body)]
        elif section == "subject to":
            pending = f"{pending} {line}".strip()
            m = re.search(r"(<=|>=|=)\s*(-?\d+)\s*$", pending)
            if m:
                name, body = pending.split(":", 1)
                body = body[:m.start() - len(name) - 1]
                rows[name.strip()] = (_parse_expr(body), m.group(1), int(m.group(2)))
                pending = ""
        elif section == "binaries":
            binaries += line.split()
    return {"objective": objective, "rows": rows, "binaries": binaries}
