"""Drill state machine: phases, events, and the timing metrics.

The drill runs Briefing -> EscortToWard -> AlarmQuestion -> Evacuation ->
Finished. `advance` is a pure transition function over timestamped
events; replaying a session's event list reproduces the final state.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .floorplan import FloorPlan
from .geometry import Point, dist, point_in_convex_polygon, seg_seg_intersection

log = logging.getLogger(__name__)

ALARM_RADIUS_M = 2.0
GRAB_RADIUS_M = 1.0

ANSWER_CHOICES = ("a", "b", "c", "d")

# An answer whose selection was not captured. It still closes the
# questionnaire; analysis counts it toward n but under no option row.
BLANK_ANSWER = ""

EVENT_KINDS = (
    "Spawned", "ReachedWard", "AlarmRaised", "AnswerGiven",
    "WheelchairGrabbed", "WheelchairReleased", "SafeZoneReached",
    "ExitReached", "Tick",
)


class DrillPhase(Enum):
    Briefing = "Briefing"
    EscortToWard = "EscortToWard"
    AlarmQuestion = "AlarmQuestion"
    Evacuation = "Evacuation"
    Finished = "Finished"


PHASE_ORDER = (
    DrillPhase.Briefing, DrillPhase.EscortToWard, DrillPhase.AlarmQuestion,
    DrillPhase.Evacuation, DrillPhase.Finished,
)


@dataclass(frozen=True)
class DrillEvent:
    """Timestamped scenario event; payload keys depend on kind."""

    t: float
    kind: str
    payload: dict = field(default_factory=dict)

    @property
    def choice(self) -> str | None:
        return self.payload.get("choice")

    @property
    def label(self) -> str | None:
        return self.payload.get("label")


def ev(kind: str, t: float, **payload) -> DrillEvent:
    if kind not in EVENT_KINDS:
        raise ValueError(f"unknown event kind {kind!r}")
    return DrillEvent(t=t, kind=kind, payload=dict(payload))


@dataclass(frozen=True)
class ScenarioState:
    phase: DrillPhase = DrillPhase.Briefing
    alarm_t: float | None = None
    answer: str | None = None
    answer_t: float | None = None
    rescued: bool = False
    rescue_t: float | None = None
    exit_label: str | None = None
    end_t: float | None = None
    greeting_shown: bool = False
    pushing: bool = False


def advance(state: ScenarioState,
            event: DrillEvent) -> tuple[ScenarioState, list[DrillEvent]]:
    """Apply one event. Returns the new state and any emitted events.

    Illegal (phase, event) pairs are ignored with a logged warning;
    Tick is a silent no-op in every phase. The full transition table is
    documented in docs/transitions.md and mirrored by the test suite.
    """
    ph = state.phase
    k = event.kind

    if k == "Tick":
        return state, []

    if ph is DrillPhase.Briefing:
        if k == "Spawned":
            # the drill starts with the avatar pushing the wheelchair
            return dataclasses.replace(
                state, phase=DrillPhase.EscortToWard, pushing=True), []

    elif ph is DrillPhase.EscortToWard:
        if k == "ReachedWard":
            new = dataclasses.replace(
                state, phase=DrillPhase.AlarmQuestion, alarm_t=event.t)
            return new, [ev("AlarmRaised", event.t)]
        if k == "AlarmRaised":
            return dataclasses.replace(
                state, phase=DrillPhase.AlarmQuestion, alarm_t=event.t), []
        if k == "WheelchairGrabbed":
            return dataclasses.replace(state, pushing=True), []
        if k == "WheelchairReleased":
            return dataclasses.replace(state, pushing=False), []

    elif ph is DrillPhase.AlarmQuestion:
        if k == "AnswerGiven":
            choice = event.choice
            if choice not in ANSWER_CHOICES and choice != BLANK_ANSWER:
                log.warning("AnswerGiven with bad choice %r ignored", choice)
                return state, []
            return dataclasses.replace(
                state, phase=DrillPhase.Evacuation, answer=choice,
                answer_t=event.t), []
        if k == "AlarmRaised":
            # echo of the alarm emitted at ReachedWard
            return state, []

    elif ph is DrillPhase.Evacuation:
        if k == "SafeZoneReached":
            if state.pushing and not state.rescued:
                return dataclasses.replace(
                    state, rescued=True, rescue_t=event.t,
                    greeting_shown=True), []
            return state, []
        if k == "ExitReached":
            label = event.label
            if label not in ("A", "B", "C", "D"):
                log.warning("ExitReached with bad label %r ignored", label)
                return state, []
            new = dataclasses.replace(
                state, phase=DrillPhase.Finished, exit_label=label,
                end_t=event.t)
            if state.pushing and not state.rescued:
                new = dataclasses.replace(
                    new, rescued=True, rescue_t=event.t, greeting_shown=True)
            return new, []
        if k == "WheelchairGrabbed":
            return dataclasses.replace(state, pushing=True), []
        if k == "WheelchairReleased":
            return dataclasses.replace(state, pushing=False), []

    log.warning("event %s ignored in phase %s", k, ph.value)
    return state, []


def replay(events: list[DrillEvent],
           state: ScenarioState | None = None) -> ScenarioState:
    """Fold a full event list into the final ScenarioState."""
    st = state if state is not None else ScenarioState()
    queue = list(events)
    while queue:
        e = queue.pop(0)
        st, emitted = advance(st, e)
        queue = emitted + queue
    return st


def _question_data() -> dict:
    text = (resources.files("evadrill") / "data" /
            "question_options.json").read_text("utf-8")
    return json.loads(text)


def alarm_question() -> list[tuple[str, str]]:
    """The four alarm-question options in stable order a, b, c, d."""
    data = _question_data()["alarm_question"]["options"]
    return [(key, data[key]) for key in ANSWER_CHOICES]


def alarm_question_prompt() -> str:
    return _question_data()["alarm_question"]["prompt"]


def post_game_questions() -> list[tuple[str, str]]:
    """The five post-game yes/no questions as (key, text) pairs."""
    return [(q["key"], q["text"]) for q in _question_data()["post_game"]]


def in_safe_zone(plan: FloorPlan, pos: Point) -> bool:
    """True iff pos lies inside (or on) any safe-zone polygon."""
    return any(point_in_convex_polygon(pos, z.polygon)
               for z in plan.safe_zones)


def safe_zone_label(plan: FloorPlan, pos: Point) -> str | None:
    for z in plan.safe_zones:
        if point_in_convex_polygon(pos, z.polygon):
            return z.label
    return None


def exit_hit(plan: FloorPlan, prev: Point, nxt: Point) -> str | None:
    """Label of the first exit segment crossed moving prev -> nxt.

    Crossings are ranked by the parametric position along the motion
    segment; a zero-length motion never crosses anything.
    """
    if prev == nxt:
        return None
    best_t = None
    best_label = None
    for e in plan.exits:
        t = seg_seg_intersection((prev, nxt), e.segment)
        if t is not None and (best_t is None or t < best_t):
            best_t = t
            best_label = e.label
    return best_label
