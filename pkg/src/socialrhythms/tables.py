"""CSV table schemas shared by the CLI commands.

Every inter-command data flow goes through one of these line-delimited
formats, so each pipeline stage is independently testable. All writes are
atomic (temp file + rename) and all floats are emitted with 17 significant
digits so re-parsing round-trips exactly.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .events import ParseResult, VisitEvent, format_event, parse_events
from .network import WeightedGraph
from .rhythm import PROFILE_HOURS, RhythmVector


def _fmt(value) -> str:
    if isinstance(value, float):
        if value != value:
            return "nan"
        if value in (float("inf"), float("-inf")):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    return str(value)


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return [], []
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


# -- events -----------------------------------------------------------------

def write_events_csv(path: Path, events: Sequence[VisitEvent]) -> None:
    lines = ["visitor,owner,start_epoch_s,dwell_s"]
    lines.extend(format_event(e) for e in events)
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_events_csv(path: Path) -> ParseResult:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_events(fh)


# -- rhythms ----------------------------------------------------------------

RHYTHM_HEADER = ["user", "week"] + [f"v{i}" for i in range(PROFILE_HOURS)]


def write_rhythms_csv(path: Path, rhythms_by_week: dict[int, dict[str, RhythmVector]]) -> None:
    rows = []
    for week in sorted(rhythms_by_week):
        for user in sorted(rhythms_by_week[week]):
            vec = rhythms_by_week[week][user]
            rows.append([user, week] + [float(v) for v in vec.values])
    write_table(path, RHYTHM_HEADER, rows)


def read_rhythms_csv(path: Path) -> dict[int, dict[str, RhythmVector]]:
    header, rows = read_table(path)
    if header and header != RHYTHM_HEADER:
        raise ValueError(f"unexpected rhythm table header in {path}")
    out: dict[int, dict[str, RhythmVector]] = {}
    for row in rows:
        user, week = row[0], int(row[1])
        values = np.array([float(v) for v in row[2:]])
        out.setdefault(week, {})[user] = RhythmVector(values, user=user, week=week)
    return out


# -- graphs -----------------------------------------------------------------

GRAPH_HEADER = ["week", "user_a", "user_b", "weight_seconds"]


def write_graphs_csv(path: Path, graphs: dict[int, WeightedGraph]) -> None:
    rows = []
    for week in sorted(graphs):
        for a, b, w in sorted(graphs[week].edges()):
            rows.append([week, a, b, float(w)])
    write_table(path, GRAPH_HEADER, rows)


def read_graphs_csv(path: Path) -> dict[int, WeightedGraph]:
    header, rows = read_table(path)
    if header and header != GRAPH_HEADER:
        raise ValueError(f"unexpected graph table header in {path}")
    out: dict[int, WeightedGraph] = {}
    for row in rows:
        week = int(row[0])
        g = out.setdefault(week, WeightedGraph(week=week))
        g.add_edge(row[1], row[2], float(row[3]))
    return out


# -- ground-truth phases ------------------------------------------------------

PHASE_HEADER = ["week", "user", "phase_hours"]


def write_phases_csv(path: Path, phases: dict[int, dict[str, float]]) -> None:
    rows = []
    for week in sorted(phases):
        for user in sorted(phases[week]):
            rows.append([week, user, float(phases[week][user])])
    write_table(path, PHASE_HEADER, rows)


def read_phases_csv(path: Path) -> dict[int, dict[str, float]]:
    header, rows = read_table(path)
    if header and header != PHASE_HEADER:
        raise ValueError(f"unexpected phase table header in {path}")
    out: dict[int, dict[str, float]] = {}
    for row in rows:
        out.setdefault(int(row[0]), {})[row[1]] = float(row[2])
    return out
