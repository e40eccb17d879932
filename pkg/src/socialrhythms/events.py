"""Visit-event data model, log parsing, and weekly hourly usage binning.

The raw observable is a room visit: one user (the visitor) spends ``dwell``
seconds in another user's (the owner's) room starting at an epoch timestamp.
Everything downstream (rhythm vectors, weekly networks) is derived from
these events.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Union

import numpy as np

UserId = str
WeekIndex = int

SECONDS_PER_HOUR = 3600
HOURS_PER_WEEK = 168
SECONDS_PER_WEEK = HOURS_PER_WEEK * SECONDS_PER_HOUR
DEFAULT_UTC_OFFSET_HOURS = 9


class EventError(ValueError):
    """Base class for event-layer errors."""


class MalformedRecord(EventError):
    pass


class NonPositiveDwell(EventError):
    pass


class SelfVisit(EventError):
    pass


class BeforeOrigin(EventError):
    pass


@dataclass(frozen=True)
class VisitEvent:
    """One room visit. ``start`` is epoch seconds (UTC), ``dwell`` is seconds."""

    visitor: UserId
    owner: UserId
    start: float
    dwell: float

    def __post_init__(self):
        if not self.visitor or not self.owner:
            raise MalformedRecord("visitor and owner ids must be non-empty")
        if self.visitor == self.owner:
            raise SelfVisit(f"self-visit by {self.visitor!r} is not a social event")
        if not self.dwell > 0:
            raise NonPositiveDwell(f"dwell must be > 0, got {self.dwell}")

    @property
    def end(self) -> float:
        return self.start + self.dwell


@dataclass(frozen=True)
class ParseDiagnostic:
    line_no: int
    kind: str
    message: str


@dataclass
class ParseResult:
    events: list[VisitEvent] = field(default_factory=list)
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def n_bad(self) -> int:
        return len(self.diagnostics)


@dataclass
class WeeklyUsageSeries:
    """Per-user usage minutes for each of the 168 hour bins of one week."""

    user: UserId
    week: WeekIndex
    minutes: np.ndarray

    def __post_init__(self):
        self.minutes = np.asarray(self.minutes, dtype=float)
        if self.minutes.shape != (HOURS_PER_WEEK,):
            raise ValueError(f"series must have {HOURS_PER_WEEK} bins, got {self.minutes.shape}")


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def parse_events(stream: Union[IO, Iterable[Union[str, bytes]]]) -> ParseResult:
    """Parse a line-delimited ``visitor,owner,start_epoch_s,dwell_s`` log.

    Malformed lines never abort the parse: each bad line becomes one
    diagnostic (with its 1-based line number) and parsing continues. An
    optional header is recognised by a non-numeric third field on the
    first line. Self-visits are dropped with a diagnostic.
    """
    result = ParseResult()
    for line_no, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if line_no == 1 and len(fields) >= 3 and not _is_number(fields[2]):
            continue  # header
        if len(fields) != 4:
            result.diagnostics.append(ParseDiagnostic(
                line_no, "malformed_record", f"expected 4 fields, got {len(fields)}"))
            continue
        visitor, owner, start_s, dwell_s = fields
        try:
            start = float(start_s)
            dwell = float(dwell_s)
        except ValueError as exc:
            result.diagnostics.append(ParseDiagnostic(
                line_no, "malformed_record", f"non-numeric field: {exc}"))
            continue
        try:
            event = VisitEvent(visitor, owner, start, dwell)
        except NonPositiveDwell as exc:
            result.diagnostics.append(ParseDiagnostic(line_no, "non_positive_dwell", str(exc)))
            continue
        except SelfVisit as exc:
            result.diagnostics.append(ParseDiagnostic(line_no, "self_visit", str(exc)))
            continue
        except MalformedRecord as exc:
            result.diagnostics.append(ParseDiagnostic(line_no, "malformed_record", str(exc)))
            continue
        result.events.append(event)
    return result


def format_event(event: VisitEvent) -> str:
    start = event.start
    start_txt = f"{int(start)}" if float(start).is_integer() else f"{start:.17g}"
    dwell = event.dwell
    dwell_txt = f"{int(dwell)}" if float(dwell).is_integer() else f"{dwell:.17g}"
    return f"{event.visitor},{event.owner},{start_txt},{dwell_txt}"


def assign_week(t: float, origin: float) -> WeekIndex:
    """Index of the 168-hour window containing ``t``, counted from ``origin``."""
    if t < origin:
        raise BeforeOrigin(f"timestamp {t} precedes origin {origin}")
    return int((t - origin) // SECONDS_PER_WEEK)


def week_bounds(week: WeekIndex, origin: float) -> tuple[float, float]:
    start = origin + week * SECONDS_PER_WEEK
    return start, start + SECONDS_PER_WEEK


def resolve_origin(origin: float, utc_offset_hours: int = DEFAULT_UTC_OFFSET_HOURS) -> float:
    """Shift a UTC-midnight-aligned origin so hour bin 0 is local midnight."""
    return origin - utc_offset_hours * SECONDS_PER_HOUR


def build_usage_series(
    events: Iterable[VisitEvent],
    week: WeekIndex,
    origin: float,
) -> dict[UserId, WeeklyUsageSeries]:
    """Bin visit minutes into per-user 168-hour series for one week.

    Both participants of a visit accrue its duration. A visit contributes
    to each hour bin the minutes of its [start, end) overlap with that bin;
    only the portion overlapping the target week counts. Concurrent visits
    add up, but each bin is finally capped at 60 minutes.
    """
    week_start, week_end = week_bounds(week, origin)
    seconds: dict[UserId, np.ndarray] = {}

    for event in events:
        lo = max(event.start, week_start)
        hi = min(event.end, week_end)
        if hi <= lo:
            continue
        first_bin = int((lo - week_start) // SECONDS_PER_HOUR)
        last_bin = int(-(-(hi - week_start) // SECONDS_PER_HOUR)) - 1
        for user in (event.visitor, event.owner):
            acc = seconds.get(user)
            if acc is None:
                acc = seconds[user] = np.zeros(HOURS_PER_WEEK)
            for h in range(first_bin, last_bin + 1):
                bin_lo = week_start + h * SECONDS_PER_HOUR
                overlap = min(hi, bin_lo + SECONDS_PER_HOUR) - max(lo, bin_lo)
                acc[h] += overlap

    return {
        user: WeeklyUsageSeries(user, week, np.minimum(acc / 60.0, 60.0))
        for user, acc in seconds.items()
    }


def active_weeks(events: Iterable[VisitEvent], origin: float) -> list[WeekIndex]:
    """Sorted week indices touched by at least one event."""
    weeks: set[int] = set()
    for event in events:
        if event.end <= origin:
            continue
        first = assign_week(max(event.start, origin), origin)
        last = int((event.end - origin - 1e-9) // SECONDS_PER_WEEK)
        weeks.update(range(first, last + 1))
    return sorted(weeks)


def events_by_week(
    events: Iterable[VisitEvent], origin: float, weeks: int
) -> list[list[VisitEvent]]:
    """Bucket events by every week they overlap (single pass over the log)."""
    buckets: list[list[VisitEvent]] = [[] for _ in range(weeks)]
    for event in events:
        if event.end <= origin:
            continue
        first = max(int((event.start - origin) // SECONDS_PER_WEEK), 0)
        last = int((event.end - origin - 1e-9) // SECONDS_PER_WEEK)
        for week in range(first, min(last, weeks - 1) + 1):
            buckets[week].append(event)
    return buckets
