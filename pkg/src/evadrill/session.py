"""Authoritative drill session: deterministic tick core, replay, one-run rule.

The session core is headless and wall-clock free: inputs are applied at
tick boundaries and every input change is logged with its tick, so
re-running a recorded log reproduces the original event stream byte for
byte (the replay guarantee). A connection layer (see wsapp) only queues
messages and paces the loop.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from . import telemetry
from .dynamics import AgentState, DynamicsParams, InputCommand, step_avatar
from .floorplan import FloorPlan, plan_to_document
from .geometry import dist, point_seg_distance
from .navgrid import NavGrid, build_nav_grid
from .scenario import (ALARM_RADIUS_M, GRAB_RADIUS_M, DrillEvent,
                       DrillPhase, ScenarioState, advance,
                       alarm_question, alarm_question_prompt, ev,
                       exit_hit, safe_zone_label)
from .telemetry import SessionLog, append

log = logging.getLogger(__name__)

TICK_DT = 0.05
SNAPSHOT_EVERY = 2
POS_EVERY = 10
WHEELCHAIR_OFFSET = 0.6
DOOR_REACH_M = 1.0
GREETING_TEXT = "Well done: you brought the wheelchair to a safe zone."

INPUT_FIELDS = ("forward", "back", "left", "right", "look_yaw", "interact")


def _input_payload(cmd: InputCommand) -> dict:
    return {"forward": cmd.forward, "back": cmd.back, "left": cmd.left,
            "right": cmd.right, "look_yaw": cmd.look_yaw,
            "interact": cmd.interact}


def input_from_payload(obj: dict) -> InputCommand:
    return InputCommand(
        forward=bool(obj.get("forward", False)),
        back=bool(obj.get("back", False)),
        left=bool(obj.get("left", False)),
        right=bool(obj.get("right", False)),
        look_yaw=float(obj.get("look_yaw", 0.0)),
        interact=bool(obj.get("interact", False)),
    )


class DrillSession:
    """One subject's authoritative drill simulation.

    Drive it by queueing wire inputs/answers and calling tick(); each
    tick advances simulated time by exactly TICK_DT and returns the
    outbound messages produced.
    """

    def __init__(self, subject_id: str, plan: FloorPlan,
                 params: DynamicsParams | None = None,
                 session_id: str | None = None, cell_size: float = 0.5,
                 grid: NavGrid | None = None):
        self.subject_id = subject_id
        self.session_id = session_id or f"{subject_id}-{uuid.uuid4().hex[:8]}"
        self.plan = plan
        self.params = params or DynamicsParams()
        self.params.validate()
        self.grid = grid if grid is not None else build_nav_grid(plan, cell_size)
        spawn = plan.waypoints["E"]
        self.avatar = AgentState(id=0, position=spawn, v0=1.5,
                                 pushing_wheelchair=True)
        self.wheelchair_pos = spawn
        self.wheelchair_attached = True
        self.scenario = ScenarioState()
        self.tick_count = 0
        self.snapshot_seq = 0
        self._input = InputCommand()
        self._last_logged_input: dict | None = None
        self._pending_inputs: list[dict] = []
        self._pending_answers: list[str] = []
        self._in_zone = safe_zone_label(plan, spawn) is not None
        self.log = SessionLog(session_id=self.session_id, subject_meta={},
                              plan_digest=plan.digest())
        self.log = append(self.log, ev("Spawned", 0.0,
                                       pos=[round(spawn[0], 4),
                                            round(spawn[1], 4)]))
        self.scenario, _ = advance(self.scenario, self.log.events[-1])
        self.sealed_path: Path | None = None

    # -- wire-side entry points ------------------------------------------

    def queue_input(self, payload: dict) -> None:
        if not self.finished:
            self._pending_inputs.append(payload)

    def queue_answer(self, choice: str) -> None:
        if not self.finished:
            self._pending_answers.append(choice)

    @property
    def finished(self) -> bool:
        return self.scenario.phase is DrillPhase.Finished

    @property
    def t(self) -> float:
        return round(self.tick_count * TICK_DT, 4)

    # -- internals ---------------------------------------------------------

    def _log_event(self, event) -> list:
        """Append an event and fold it through the state machine."""
        self.log = append(self.log, event)
        msgs = []
        before = self.scenario
        self.scenario, emitted = advance(self.scenario, event)
        for e in emitted:
            self.log = append(self.log, e)
            self.scenario, more = advance(self.scenario, e)
            if more:
                raise AssertionError("emitted events must not cascade")
        msgs.extend(self._phase_messages(before, self.scenario))
        return msgs

    def _phase_messages(self, before: ScenarioState,
                        after: ScenarioState) -> list:
        msgs = []
        if (before.phase is not DrillPhase.AlarmQuestion
                and after.phase is DrillPhase.AlarmQuestion):
            msgs.append({"type": "question",
                         "prompt": alarm_question_prompt(),
                         "options": [list(o) for o in alarm_question()]})
        if not before.greeting_shown and after.greeting_shown:
            msgs.append({"type": "greeting", "text": GREETING_TEXT})
        if (before.phase is not DrillPhase.Finished
                and after.phase is DrillPhase.Finished):
            msgs.append({
                "type": "finished",
                "exit": after.exit_label,
                "total_time_s": round(after.end_t - after.alarm_t, 4),
                "rescued": after.rescued,
            })
        return msgs

    def _apply_interact_edge(self) -> list:
        """Rising interact edge: toggle wheelchair grab, else a door."""
        msgs = []
        if self.wheelchair_attached:
            self.wheelchair_attached = False
            msgs.extend(self._log_event(ev("WheelchairReleased", self.t)))
            self.avatar = dataclasses.replace(
                self.avatar, pushing_wheelchair=False)
            return msgs
        if dist(self.avatar.position, self.wheelchair_pos) <= GRAB_RADIUS_M:
            self.wheelchair_attached = True
            msgs.extend(self._log_event(ev("WheelchairGrabbed", self.t)))
            self.avatar = dataclasses.replace(
                self.avatar, pushing_wheelchair=True)
            return msgs
        for door in self.plan.doors:
            if point_seg_distance(self.avatar.position,
                                  door.segment) <= DOOR_REACH_M:
                now_open = not self.grid.door_states[door.id]
                self.grid = self.grid.with_door(door.id, now_open)
                self.log = append(self.log, DrillEvent(
                    t=self.t, kind="DoorToggled",
                    payload={"id": door.id, "open": now_open}))
                break
        return msgs

    def tick(self) -> list[dict]:
        """Advance one tick; returns outbound messages (possibly empty)."""
        if self.finished:
            self._pending_inputs.clear()
            self._pending_answers.clear()
            return []
        self.tick_count += 1
        msgs: list[dict] = []

        prev_interact = self._input.interact
        for payload in self._pending_inputs:
            self._input = input_from_payload(payload)
            logged = _input_payload(self._input)
            if logged != self._last_logged_input:
                self.log = append(self.log, DrillEvent(
                    t=self.t, kind="Input",
                    payload={"tick": self.tick_count, **logged}))
                self._last_logged_input = logged
        self._pending_inputs.clear()

        for choice in self._pending_answers:
            msgs.extend(self._log_event(
                ev("AnswerGiven", self.t, choice=choice)))
        self._pending_answers.clear()

        if self._input.interact and not prev_interact:
            if self.scenario.phase in (DrillPhase.EscortToWard,
                                       DrillPhase.Evacuation):
                msgs.extend(self._apply_interact_edge())

        prev_pos = self.avatar.position
        if self.scenario.phase in (DrillPhase.EscortToWard,
                                   DrillPhase.Evacuation):
            self.avatar = step_avatar(self.avatar, self._input, self.grid,
                                      TICK_DT, self.params)
        else:
            self.avatar = dataclasses.replace(
                self.avatar, velocity=(0.0, 0.0),
                heading=self._input.look_yaw)
        if self.wheelchair_attached:
            self.wheelchair_pos = self.avatar.position

        if self.scenario.phase is DrillPhase.EscortToWard:
            if dist(self.avatar.position,
                    self.plan.waypoints["F"]) <= ALARM_RADIUS_M:
                msgs.extend(self._log_event(ev("ReachedWard", self.t)))

        if self.scenario.phase is DrillPhase.Evacuation:
            zone = safe_zone_label(self.plan, self.avatar.position)
            if zone is not None and not self._in_zone:
                msgs.extend(self._log_event(
                    ev("SafeZoneReached", self.t, zone=zone)))
            self._in_zone = zone is not None

            label = exit_hit(self.plan, prev_pos, self.avatar.position)
            if label is None:
                label = self.grid.exit_cells.get(
                    self.grid.cell_of(self.avatar.position))
            if label is not None:
                msgs.extend(self._log_event(
                    ev("ExitReached", self.t, label=label)))

        if not self.finished and self.tick_count % POS_EVERY == 0:
            self.log = append(self.log, DrillEvent(
                t=self.t, kind="Pos",
                payload={"tick": self.tick_count,
                         "x": round(self.avatar.position[0], 4),
                         "y": round(self.avatar.position[1], 4),
                         "wx": round(self.wheelchair_pos[0], 4),
                         "wy": round(self.wheelchair_pos[1], 4)}))

        if self.tick_count % SNAPSHOT_EVERY == 0 or self.finished:
            self.snapshot_seq += 1
            msgs.append(self.snapshot())
        return msgs

    def snapshot(self) -> dict:
        return {
            "type": "snapshot",
            "seq": self.snapshot_seq,
            "t": self.t,
            "phase": self.scenario.phase.value,
            "avatar": {
                "x": round(self.avatar.position[0], 4),
                "y": round(self.avatar.position[1], 4),
                "yaw": round(self.avatar.heading, 4),
                "pushing": self.wheelchair_attached,
            },
            "wheelchair": {
                "x": round(self.wheelchair_pos[0], 4),
                "y": round(self.wheelchair_pos[1], 4),
                "attached": self.wheelchair_attached,
            },
            "doors": dict(self.grid.door_states),
        }

    def welcome(self) -> dict:
        return {
            "type": "welcome",
            "session_id": self.session_id,
            "plan_digest": self.plan.digest(),
            "plan": plan_to_document(self.plan),
            "tick_dt": TICK_DT,
        }

    def seal(self, questionnaire: dict | None = None,
             log_dir: str | Path | None = None) -> Path | None:
        """Fix the subject questionnaire into the header; write the file."""
        meta = {"subject_id": self.subject_id}
        for key in telemetry.SUBJECT_FLAGS:
            meta[key] = bool((questionnaire or {}).get(key, False))
        self.log = dataclasses.replace(self.log, subject_meta=meta)
        if log_dir is None:
            return None
        path = Path(log_dir) / f"{self.session_id}.evlog"
        path.parent.mkdir(parents=True, exist_ok=True)
        telemetry.write_log(self.log, path)
        self.sealed_path = path
        return path


@dataclass(frozen=True)
class ReplayReport:
    match: bool
    line_no: int | None = None
    expected: str | None = None
    actual: str | None = None

    def verdict(self) -> str:
        if self.match:
            return "match"
        return (f"mismatch at line {self.line_no}: "
                f"recorded {self.expected!r} vs replayed {self.actual!r}")


class PlanMismatchError(Exception):
    pass


def replay_session(log_: SessionLog, plan: FloorPlan,
                   params: DynamicsParams | None = None,
                   cell_size: float = 0.5) -> tuple[ReplayReport, SessionLog]:
    """Re-simulate a recorded session from its input events.

    Feeds the logged inputs and answers at their recorded ticks into a
    fresh session and compares the encoded logs byte for byte.
    """
    digest = plan.digest()
    if log_.plan_digest is not None and log_.plan_digest != digest:
        raise PlanMismatchError(
            f"log plan digest {log_.plan_digest} != plan {digest}")

    subject_id = str(log_.subject_meta.get("subject_id", log_.session_id))
    ses = DrillSession(subject_id, plan, params=params,
                       session_id=log_.session_id, cell_size=cell_size)

    by_tick: dict[int, list] = {}
    last_tick = 0
    for e in log_.events:
        if e.kind in ("Input", "AnswerGiven"):
            tick = (int(e.payload["tick"]) if "tick" in e.payload
                    else max(1, round(e.t / TICK_DT)))
            by_tick.setdefault(tick, []).append(e)
        last_tick = max(last_tick, int(round(e.t / TICK_DT)))

    limit = last_tick + 2
    while not ses.finished and ses.tick_count < limit:
        for e in by_tick.get(ses.tick_count + 1, []):
            if e.kind == "Input":
                payload = {k: e.payload[k] for k in INPUT_FIELDS
                           if k in e.payload}
                ses.queue_input(payload)
            else:
                ses.queue_answer(e.payload.get("choice"))
        ses.tick()
    ses.seal(log_.subject_meta)

    recorded = telemetry.encode(log_)
    replayed = telemetry.encode(ses.log)
    if recorded == replayed:
        return ReplayReport(match=True), ses.log
    rec_lines = recorded.decode("utf-8").splitlines()
    rep_lines = replayed.decode("utf-8").splitlines()
    for i in range(max(len(rec_lines), len(rep_lines))):
        a = rec_lines[i] if i < len(rec_lines) else "<missing>"
        b = rep_lines[i] if i < len(rep_lines) else "<missing>"
        if a != b:
            return ReplayReport(match=False, line_no=i + 1,
                                expected=a, actual=b), ses.log
    return ReplayReport(match=False, line_no=None), ses.log


class SessionRegistry:
    """Persistent one-run-per-subject bookkeeping.

    Completed subjects are stored in a JSON file so the rule survives
    server restarts; live subjects are tracked in memory only.
    """

    def __init__(self, path: str | Path | None):
        self.path = Path(path) if path is not None else None
        self.completed: dict[str, str] = {}
        self.live: set[str] = set()
        if self.path is not None and self.path.exists():
            self.completed = json.loads(self.path.read_text("utf-8"))

    def can_start(self, subject_id: str) -> bool:
        return subject_id not in self.completed and subject_id not in self.live

    def start(self, subject_id: str) -> None:
        if not self.can_start(subject_id):
            raise ValueError(f"subject {subject_id!r} already played")
        self.live.add(subject_id)

    def abort(self, subject_id: str) -> None:
        self.live.discard(subject_id)

    def complete(self, subject_id: str, session_id: str) -> None:
        self.live.discard(subject_id)
        self.completed[subject_id] = session_id
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(
                json.dumps(self.completed, indent=0, sort_keys=True) + "\n",
                "utf-8")


def create_session(registry: SessionRegistry, subject_id: str,
                   plan: FloorPlan, params: DynamicsParams | None = None,
                   **kw) -> DrillSession | None:
    """One-run rule gatekeeper: None means rejected ("already played")."""
    if not registry.can_start(subject_id):
        return None
    registry.start(subject_id)
    return DrillSession(subject_id, plan, params=params, **kw)
