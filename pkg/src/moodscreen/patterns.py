"""Sliding-window analysis of classified watch histories.

Three detectors run over a user's labeled watch events: a gradual drift
toward depressive content (rising depressive fraction across windows),
rumination (a long consecutive run of depressive events), and a high
overall depressive frequency inside any sufficiently supported window.
Defaults follow the two-week persistence motivation: 24-day windows
overlapping by 10 days step forward 14 days at a time.

Empty windows are kept with fraction 0 rather than dropped; dropping
them would fabricate trends across viewing gaps.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, time, timedelta, timezone
from typing import Sequence

from moodscreen import util
from moodscreen.labels import DEPRESSIVE, LABELS

DEFAULT_WINDOW_DAYS = 24
DEFAULT_OVERLAP_DAYS = 10
DEFAULT_DECLINE_MIN_WINDOWS = 3
DEFAULT_DECLINE_SLOPE = 0.05
DEFAULT_RUMINATION_MIN_RUN = 5
DEFAULT_HIGH_FREQUENCY_THRESHOLD = 0.5
DEFAULT_HIGH_FREQUENCY_MIN_EVENTS = 5

DECLINE = "decline"
RUMINATION = "rumination"
HIGH_FREQUENCY = "high_frequency"


@dataclass(frozen=True)
class WatchEvent:
    video_id: str
    timestamp: datetime
    label: str
    score: float | None = None  # posterior for the depressive class

    def __post_init__(self) -> None:
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        if self.timestamp.tzinfo is None:
            object.__setattr__(
                self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc)
            )


@dataclass(frozen=True)
class WatchWindow:
    start: datetime
    end: datetime
    events: tuple[WatchEvent, ...]

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def depressive_fraction(self) -> float:
        if not self.events:
            return 0.0
        return sum(1 for e in self.events if e.label == DEPRESSIVE) / len(self.events)

    def to_dict(self) -> dict:
        return {
            "start": util.format_timestamp(self.start),
            "end": util.format_timestamp(self.end),
            "n_events": self.n_events,
            "depressive_fraction": self.depressive_fraction,
        }


@dataclass(frozen=True)
class PatternDetection:
    kind: str
    fired: bool
    evidence: dict
    parameters: dict

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "fired": self.fired,
            "evidence": self.evidence,
            "parameters": self.parameters,
        }


def _sorted_events(history: Sequence[WatchEvent]) -> list[WatchEvent]:
    return sorted(history, key=lambda e: (e.timestamp, e.video_id))


def windows(
    history: Sequence[WatchEvent],
    window_days: int = DEFAULT_WINDOW_DAYS,
    overlap_days: int = DEFAULT_OVERLAP_DAYS,
) -> list[WatchWindow]:
    """Slice a history into fixed-length windows.

    The first window starts at midnight UTC of the earliest event's day;
    starts then advance by ``window_days - overlap_days`` until the
    emitted windows cover the last event. 24/10 defaults give a 14-day
    step: events on days 0..59 produce starts at days 0, 14, 28, 42.
    """
    if overlap_days < 0 or window_days <= overlap_days:
        raise ValueError(
            f"window ({window_days}d) must exceed overlap ({overlap_days}d)"
        )
    if not history:
        raise ValueError("history is empty")
    events = _sorted_events(history)
    first_day = events[0].timestamp.astimezone(timezone.utc).date()
    start = datetime.combine(first_day, time.min, tzinfo=timezone.utc)
    last_ts = events[-1].timestamp
    length = timedelta(days=window_days)
    step = timedelta(days=window_days - overlap_days)

    out: list[WatchWindow] = []
    while True:
        end = start + length
        members = tuple(e for e in events if start <= e.timestamp < end)
        out.append(WatchWindow(start=start, end=end, events=members))
        if end > last_ts:
            break
        start = start + step
    return out


def _least_squares_slope(ys: Sequence[float]) -> float:
    n = len(ys)
    x_mean = (n - 1) / 2
    y_mean = sum(ys) / n
    sxx = sum((i - x_mean) ** 2 for i in range(n))
    sxy = sum((i - x_mean) * (y - y_mean) for i, y in enumerate(ys))
    return sxy / sxx


def detect_decline(
    series: Sequence[WatchWindow],
    min_windows: int = DEFAULT_DECLINE_MIN_WINDOWS,
    slope_threshold: float = DEFAULT_DECLINE_SLOPE,
) -> PatternDetection:
    """Mood drift: depressive fraction rising across the window series.

    Fires when the least-squares slope of the fraction over the window
    index reaches the threshold and the final window sits above the
    first.
    """
    parameters = {"min_windows": min_windows, "slope_threshold": slope_threshold}
    fractions = [w.depressive_fraction for w in series]
    if len(series) < min_windows or len(series) < 2:
        return PatternDetection(DECLINE, False, {"fractions": fractions}, parameters)
    slope = _least_squares_slope(fractions)
    fired = slope >= slope_threshold and fractions[-1] > fractions[0]
    evidence = {
        "slope": slope,
        "fractions": fractions,
        "first_fraction": fractions[0],
        "last_fraction": fractions[-1],
    }
    return PatternDetection(DECLINE, fired, evidence, parameters)


def detect_rumination(
    history: Sequence[WatchEvent], min_run: int = DEFAULT_RUMINATION_MIN_RUN
) -> PatternDetection:
    """Longest consecutive run of depressive events reaching ``min_run``."""
    if min_run < 2:
        raise ValueError("min_run must be >= 2")
    parameters = {"min_run": min_run}
    events = _sorted_events(history)
    best_len, best_span = 0, None
    run_start = None
    for i, event in enumerate(events + [None]):
        if event is not None and event.label == DEPRESSIVE:
            if run_start is None:
                run_start = i
            continue
        if run_start is not None:
            run_len = i - run_start
            if run_len > best_len:
                best_len = run_len
                best_span = (events[run_start].timestamp, events[i - 1].timestamp)
            run_start = None
    evidence: dict = {"run_length": best_len}
    if best_span is not None:
        evidence["run_start"] = util.format_timestamp(best_span[0])
        evidence["run_end"] = util.format_timestamp(best_span[1])
    return PatternDetection(RUMINATION, best_len >= min_run, evidence, parameters)


def detect_high_frequency(
    series: Sequence[WatchWindow],
    fraction_threshold: float = DEFAULT_HIGH_FREQUENCY_THRESHOLD,
    min_events: int = DEFAULT_HIGH_FREQUENCY_MIN_EVENTS,
) -> PatternDetection:
    """Any adequately supported window with a high depressive fraction."""
    if not 0.0 <= fraction_threshold <= 1.0:
        raise ValueError("fraction_threshold must be in [0, 1]")
    parameters = {"fraction_threshold": fraction_threshold, "min_events": min_events}
    qualifying = [
        w.to_dict()
        for w in series
        if w.n_events >= min_events and w.depressive_fraction >= fraction_threshold
    ]
    return PatternDetection(
        HIGH_FREQUENCY, bool(qualifying), {"windows": qualifying}, parameters
    )
