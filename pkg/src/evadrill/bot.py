"""Scripted drill player for headless sessions.

Keyboard-level driver used by the sample dataset generator and the end
to end tests: it walks the escort leg to the ward, answers the alarm
question after a configurable delay, then follows a route to a target
exit. All motion goes through the same wire inputs a human client
sends, so its sessions replay like any other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .floorplan import FloorPlan
from .geometry import dist
from .navgrid import NavGrid, plan_route, route_to_exit
from .scenario import DrillPhase
from .session import DrillSession

WAYPOINT_TOL_M = 0.15
YAW_DECIMALS = 3


@dataclass
class ScriptedPlayer:
    """Deterministic policy over one DrillSession.

    answer_delay_ticks holds the questionnaire open before answering,
    which is what varies pre-evacuation time between subjects. With
    rescue False the player releases the wheelchair right after the
    question instead of pushing it out.
    """

    session: DrillSession
    answer: str
    exit_label: str
    rescue: bool = True
    answer_delay_ticks: int = 40

    _targets: list = field(default_factory=list, repr=False)
    _target_idx: int = 0
    _answer_wait: int | None = None
    _release_pending: bool = False
    _last_yaw: float | None = None

    def _routed_targets(self, to_pt=None, exit_label=None) -> list:
        grid = self.session.grid
        pos = self.session.avatar.position
        if exit_label is not None:
            route = route_to_exit(grid, pos, exit_label)
        else:
            route = plan_route(grid, pos, to_pt)
        if route is None:
            raise RuntimeError("scripted player has no route to target")
        return route.points(grid)

    def _steer(self) -> None:
        """Queue movement toward the current route target."""
        pos = self.session.avatar.position
        while (self._target_idx < len(self._targets)
               and dist(pos, self._targets[self._target_idx])
               <= WAYPOINT_TOL_M):
            self._target_idx += 1
        if self._target_idx >= len(self._targets):
            # Keep walking on the last heading; exits sit on the plan
            # boundary so the session finishes the run for us.
            if self._last_yaw is None:
                return
            self.session.queue_input({"forward": True,
                                      "look_yaw": self._last_yaw})
            return
        tx, ty = self._targets[self._target_idx]
        yaw = round(math.atan2(ty - pos[1], tx - pos[0]), YAW_DECIMALS)
        if yaw != self._last_yaw:
            self._last_yaw = yaw
        self.session.queue_input({"forward": True, "look_yaw": yaw})

    def step(self) -> list[dict]:
        """Decide this tick's inputs, then advance the session."""
        phase = self.session.scenario.phase
        if phase is DrillPhase.EscortToWard:
            if not self._targets:
                ward = self.session.plan.waypoints["F"]
                self._targets = self._routed_targets(to_pt=ward)
                self._target_idx = 0
            self._steer()
        elif phase is DrillPhase.AlarmQuestion:
            if self._answer_wait is None:
                self._answer_wait = self.answer_delay_ticks
            if self._answer_wait == 0:
                self.session.queue_answer(self.answer)
                self._answer_wait = -1
                self._targets = []
                self._release_pending = not self.rescue
            elif self._answer_wait > 0:
                self._answer_wait -= 1
        elif phase is DrillPhase.Evacuation:
            if self._release_pending:
                self.session.queue_input({"interact": True,
                                          "look_yaw": self._last_yaw or 0.0})
                self._release_pending = False
            else:
                if not self._targets:
                    self._targets = self._routed_targets(
                        exit_label=self.exit_label)
                    self._target_idx = 0
                    self._last_yaw = None
                self._steer()
        return self.session.tick()

    def run(self, max_ticks: int = 20000) -> None:
        """Step until the drill finishes; raises if it never does."""
        for _ in range(max_ticks):
            if self.session.finished:
                return
            self.step()
        raise RuntimeError(f"drill did not finish in {max_ticks} ticks")
