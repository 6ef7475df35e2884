"""Event log and occurrence record files.

CSV event logs have the columns ``timestamp_ms,step_id,context_ok,emotion``
plus an optional ``activity`` column. ``emotion`` is a label, ``-`` for
none, or ``@<row>`` to reference a feature-vector row. JSONL logs carry
the same fields as keys.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Iterable

from .engine import Event, OccurrenceRecord
from .labels import Emotion

CSV_HEADER = ["timestamp_ms", "step_id", "context_ok", "emotion", "activity"]
_TRUE = {"1", "true", "yes", "y", "t"}
_FALSE = {"0", "false", "no", "n", "f"}


class EventLogError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def _bool(value, line: int) -> bool:
    if isinstance(value, bool):
        return value
    key = str(value).strip().lower()
    if key in _TRUE:
        return True
    if key in _FALSE:
        return False
    raise EventLogError(f"context_ok must be a boolean, got {value!r}", line)


def _int(value, name: str, line: int) -> int:
    if isinstance(value, bool):
        raise EventLogError(f"{name} must be an integer", line)
    try:
        return int(str(value).strip())
    except ValueError:
        raise EventLogError(f"{name} must be an integer, got {value!r}", line) from None


def _evidence(value, line: int) -> tuple[Emotion | None, int | None]:
    if value is None:
        return None, None
    text = str(value).strip()
    if text in ("", "-"):
        return None, None
    if text.startswith("@"):
        row = _int(text[1:], "feature row reference", line)
        if row < 0:
            raise EventLogError("feature row reference must be >= 0", line)
        return None, row
    try:
        return Emotion.parse(text), None
    except ValueError:
        raise EventLogError(f"unknown emotion {text!r}", line) from None


def _make_event(ts, step, ctx, emo, activity, line: int) -> Event:
    emotion, row = _evidence(emo, line)
    step_id = _int(step, "step_id", line)
    if step_id < 1:
        raise EventLogError(f"step_id must be >= 1, got {step_id}", line)
    act = None if activity in (None, "", "-") else str(activity).strip()
    return Event(_int(ts, "timestamp_ms", line), step_id, _bool(ctx, line), emotion, row, act)


def _parse_csv(text: str) -> list[Event]:
    events = []
    first = True
    for n, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or (len(row) == 1 and not row[0].strip()) or row[0].lstrip().startswith("#"):
            continue
        # the header is optional but only allowed as the first data line
        if first and row[0].strip() == "timestamp_ms":
            first = False
            continue
        first = False
        if len(row) not in (4, 5):
            raise EventLogError(f"expected 4 or 5 columns, got {len(row)}", n)
        events.append(_make_event(row[0], row[1], row[2], row[3], row[4] if len(row) == 5 else None, n))
    return events


def _parse_jsonl(text: str) -> list[Event]:
    events = []
    for n, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise EventLogError(f"invalid JSON: {exc.msg}", n) from None
        if not isinstance(obj, dict):
            raise EventLogError("expected a JSON object", n)
        for key in ("timestamp_ms", "step_id", "context_ok"):
            if key not in obj:
                raise EventLogError(f"missing field {key!r}", n)
        events.append(_make_event(obj["timestamp_ms"], obj["step_id"], obj["context_ok"],
                                  obj.get("emotion"), obj.get("activity"), n))
    return events


def parse_events(source: bytes | str, format: str | None = None) -> list[Event]:
    """Parse an event log; ``format`` is ``csv``, ``jsonl`` or ``None`` to sniff."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if format is None:
        format = "jsonl" if source.lstrip().startswith("{") else "csv"
    if format == "csv":
        return _parse_csv(source)
    if format == "jsonl":
        return _parse_jsonl(source)
    raise EventLogError(f"unknown event log format {format!r}")


def _emotion_field(ev: Event) -> str:
    if ev.feature_row is not None:
        return f"@{ev.feature_row}"
    return ev.emotion.value if ev.emotion is not None else "-"


def write_events(events: Iterable[Event], format: str = "csv") -> str:
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for ev in events:
            w.writerow([ev.timestamp, ev.step_id, 1 if ev.context_ok else 0, _emotion_field(ev), ev.activity or ""])
        return buf.getvalue()
    if format == "jsonl":
        lines = [json.dumps({"timestamp_ms": ev.timestamp, "step_id": ev.step_id, "context_ok": ev.context_ok,
                             "emotion": _emotion_field(ev), "activity": ev.activity}) for ev in events]
        return "".join(line + "\n" for line in lines)
    raise EventLogError(f"unknown event log format {format!r}")


def write_records(records: Iterable[OccurrenceRecord]) -> str:
    return "".join(json.dumps(r.to_dict()) + "\n" for r in records)


def parse_records(source: bytes | str) -> list[OccurrenceRecord]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return [OccurrenceRecord.from_dict(json.loads(line)) for line in source.splitlines() if line.strip()]
