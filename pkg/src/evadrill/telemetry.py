"""Append-only session logs, the .evlog format, and per-subject summaries.

An .evlog file is UTF-8 text: one header object on the first line
({version, session_id, subject_meta, plan_digest}), then one JSON object
per event line ({t, kind, payload}). The format is line-oriented so a
log truncated by a crash stays analyzable up to the damage.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .scenario import EVENT_KINDS, DrillEvent, ScenarioState, replay

LOG_VERSION = 1
SUBJECT_FLAGS = ("is_gamer", "fire_training", "drill_experience",
                 "real_fire_experience", "followed_signage")

CSV_COLUMNS = (
    "subject_id", "alarm_response", "rescued", "exit_used",
    "pre_evac_time_s", "rescue_time_s", "total_evac_time_s",
    "followed_signage", "is_gamer", "fire_training", "drill_experience",
    "real_fire_experience",
)


class TelemetryError(Exception):
    pass


class TimeRegressionError(TelemetryError):
    pass


class LogFormatError(TelemetryError):
    """Malformed log text; carries the 1-based offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class MissingEventsError(TelemetryError):
    def __init__(self, missing: list[str]):
        super().__init__("missing " + ", ".join(missing))
        self.missing = tuple(missing)


@dataclass(frozen=True)
class SessionLog:
    """One subject's session: header metadata plus ordered events."""

    session_id: str
    subject_meta: dict = field(default_factory=dict)
    events: tuple[DrillEvent, ...] = ()
    plan_digest: str | None = None

    def last_t(self) -> float | None:
        return self.events[-1].t if self.events else None


def append(log: SessionLog, entry: DrillEvent) -> SessionLog:
    """Value-semantics append; rejects time regressions."""
    last = log.last_t()
    if last is not None and entry.t < last:
        raise TimeRegressionError(
            f"event t={entry.t} is before last t={last}")
    return dataclasses.replace(log, events=log.events + (entry,))


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def encode(log: SessionLog) -> bytes:
    header = {"version": LOG_VERSION, "session_id": log.session_id,
              "subject_meta": log.subject_meta}
    if log.plan_digest is not None:
        header["plan_digest"] = log.plan_digest
    lines = [_dumps(header)]
    for e in log.events:
        lines.append(_dumps({"t": e.t, "kind": e.kind, "payload": e.payload}))
    return ("\n".join(lines) + "\n").encode("utf-8")


def decode(data: bytes) -> SessionLog:
    """Parse .evlog bytes. Unknown event kinds are preserved opaque."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise LogFormatError(1, f"not UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise LogFormatError(1, "empty log")

    def parse(line_no: int, line: str) -> dict:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogFormatError(line_no, f"bad JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise LogFormatError(line_no, "expected a JSON object")
        return obj

    header = parse(1, lines[0])
    if header.get("version") != LOG_VERSION:
        raise LogFormatError(
            1, f"unsupported log version {header.get('version')!r}")
    for key in ("session_id", "subject_meta"):
        if key not in header:
            raise LogFormatError(1, f"header missing {key!r}")

    events = []
    last_t = None
    for i, line in enumerate(lines[1:], start=2):
        obj = parse(i, line)
        for key in ("t", "kind"):
            if key not in obj:
                raise LogFormatError(i, f"event missing {key!r}")
        t = obj["t"]
        if not isinstance(t, (int, float)):
            raise LogFormatError(i, "event t must be a number")
        if last_t is not None and t < last_t:
            raise LogFormatError(i, f"t={t} regresses below {last_t}")
        last_t = t
        events.append(DrillEvent(t=float(t), kind=obj["kind"],
                                 payload=obj.get("payload", {})))
    return SessionLog(session_id=header["session_id"],
                      subject_meta=header["subject_meta"],
                      events=tuple(events),
                      plan_digest=header.get("plan_digest"))


def write_log(log: SessionLog, path: str | Path) -> None:
    Path(path).write_bytes(encode(log))


def read_log(path: str | Path) -> SessionLog:
    return decode(Path(path).read_bytes())


@dataclass(frozen=True)
class DecisionRecord:
    """Per-subject summary row: the quantities the drill measures."""

    subject_id: str
    alarm_response: str
    rescued: bool
    exit_used: str
    pre_evac_time_s: float
    rescue_time_s: float | None
    total_evac_time_s: float
    followed_signage: bool
    is_gamer: bool
    fire_training: bool
    drill_experience: bool
    real_fire_experience: bool

    def __post_init__(self):
        if self.pre_evac_time_s < 0:
            raise ValueError("pre_evac_time_s must be >= 0")
        if self.total_evac_time_s < self.pre_evac_time_s:
            raise ValueError("total_evac_time_s must be >= pre_evac_time_s")
        if (self.rescue_time_s is not None
                and self.rescue_time_s > self.total_evac_time_s):
            raise ValueError("rescue_time_s must be <= total_evac_time_s")


def final_state(log: SessionLog) -> ScenarioState:
    """Replay the log's scenario events into the final state.

    Entries with kinds outside the scenario alphabet (server input and
    position traces, future extensions) are skipped.
    """
    return replay([e for e in log.events if e.kind in EVENT_KINDS])


def summarize(log: SessionLog) -> DecisionRecord:
    """Reduce a complete log to its DecisionRecord."""
    kinds = {e.kind for e in log.events}
    missing = [k for k in ("AlarmRaised", "AnswerGiven", "ExitReached")
               if k not in kinds]
    if missing:
        raise MissingEventsError(missing)
    st = final_state(log)
    if st.alarm_t is None or st.answer_t is None or st.end_t is None:
        raise TelemetryError(
            "events present but do not complete the drill in order")
    meta = log.subject_meta
    rescue_time = (st.rescue_t - st.alarm_t
                   if st.rescued and st.rescue_t is not None else None)
    return DecisionRecord(
        subject_id=str(meta.get("subject_id", log.session_id)),
        alarm_response=st.answer,
        rescued=st.rescued,
        exit_used=st.exit_label,
        pre_evac_time_s=st.answer_t - st.alarm_t,
        rescue_time_s=rescue_time,
        total_evac_time_s=st.end_t - st.alarm_t,
        followed_signage=bool(meta.get("followed_signage", False)),
        is_gamer=bool(meta.get("is_gamer", False)),
        fire_training=bool(meta.get("fire_training", False)),
        drill_experience=bool(meta.get("drill_experience", False)),
        real_fire_experience=bool(meta.get("real_fire_experience", False)),
    )


def records_to_csv(records: list[DecisionRecord]) -> str:
    """CSV text with the documented column order (see CSV_COLUMNS)."""
    import csv
    import io
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([
            r.subject_id, r.alarm_response, int(r.rescued), r.exit_used,
            f"{r.pre_evac_time_s:.3f}",
            "" if r.rescue_time_s is None else f"{r.rescue_time_s:.3f}",
            f"{r.total_evac_time_s:.3f}",
            int(r.followed_signage), int(r.is_gamer), int(r.fire_training),
            int(r.drill_experience), int(r.real_fire_experience),
        ])
    return buf.getvalue()


def records_from_csv(text: str) -> list[DecisionRecord]:
    """Parse records_to_csv output back into DecisionRecord rows."""
    import csv
    import io
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise TelemetryError("unrecognized CSV header")
    out: list[DecisionRecord] = []
    for row in rows[1:]:
        if len(row) != len(CSV_COLUMNS):
            raise TelemetryError(f"row has {len(row)} fields, "
                                 f"expected {len(CSV_COLUMNS)}")
        d = dict(zip(CSV_COLUMNS, row))
        out.append(DecisionRecord(
            subject_id=d["subject_id"],
            alarm_response=d["alarm_response"],
            rescued=bool(int(d["rescued"])),
            exit_used=d["exit_used"],
            pre_evac_time_s=float(d["pre_evac_time_s"]),
            rescue_time_s=(None if d["rescue_time_s"] == ""
                           else float(d["rescue_time_s"])),
            total_evac_time_s=float(d["total_evac_time_s"]),
            followed_signage=bool(int(d["followed_signage"])),
            is_gamer=bool(int(d["is_gamer"])),
            fire_training=bool(int(d["fire_training"])),
            drill_experience=bool(int(d["drill_experience"])),
            real_fire_experience=bool(int(d["real_fire_experience"])),
        ))
    return out
