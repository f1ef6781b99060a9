"""Behavior profiles fitted from drill records and artificial-population runs.

A BehaviorProfile holds the categorical decision distributions (alarm
answer, exit choice, signage following, rescue) plus a pre-evacuation
delay distribution. `run_batch` drives n artificial agents through the
drill under the social-force model, producing a SessionLog and a
DecisionRecord per agent.
"""

from __future__ import annotations

import dataclasses
import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import dynamics
from .dynamics import AgentState, DynamicsParams, WallIndex
from .floorplan import FloorPlan
from .navgrid import (NavGrid, Route, SignageError, build_nav_grid,
                      route_to_exit, signage_route)
from .scenario import BLANK_ANSWER, ev, safe_zone_label
from .telemetry import DecisionRecord, SessionLog, append

ALARM_KEYS = ("a", "b", "c", "d")
EXIT_KEYS = ("A", "B", "C", "D")

DEFAULT_DELAY = {"family": "lognormal",
                 "params": {"mu": math.log(15.0), "sigma": 0.5}}


def _check_dist(name: str, dist: Mapping[str, float], keys: tuple,
                allow_deficit: bool = False) -> None:
    """allow_deficit permits a total below 1; the shortfall is the
    probability of a blank (unrecorded) outcome."""
    for k, v in dist.items():
        if k not in keys:
            raise ValueError(f"{name} has unknown key {k!r}")
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"{name}[{k!r}] out of [0, 1]")
    total = sum(dist.get(k, 0.0) for k in keys)
    if total > 1.0 + 1e-9:
        raise ValueError(f"{name} sums to {total}, over 1")
    if not allow_deficit and abs(total - 1.0) > 1e-9:
        raise ValueError(f"{name} sums to {total}, not 1")
    if allow_deficit and total <= 0.0:
        raise ValueError(f"{name} has no mass")


@dataclass(frozen=True)
class BehaviorProfile:
    """Decision distributions driving artificial agents.

    p_rescue is unconstrained by the human dataset (the drill records
    the rescue decision but its counts are unpublished); the 0.5
    default is a declared placeholder, not a measurement.
    """

    alarm_dist: dict = field(default_factory=lambda: {k: 0.25 for k in ALARM_KEYS})
    exit_dist: dict = field(default_factory=lambda: {k: 0.25 for k in EXIT_KEYS})
    p_signage: float = 0.5
    p_rescue: float = 0.5
    pre_evac_delay: dict = field(default_factory=lambda: dict(DEFAULT_DELAY))

    def validate(self) -> None:
        _check_dist("alarm_dist", self.alarm_dist, ALARM_KEYS,
                    allow_deficit=True)
        _check_dist("exit_dist", self.exit_dist, EXIT_KEYS)
        for name in ("p_signage", "p_rescue"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} out of [0, 1]")
        fam = self.pre_evac_delay.get("family")
        if fam not in ("lognormal", "fixed"):
            raise ValueError(f"unknown delay family {fam!r}")
        params = self.pre_evac_delay.get("params")
        needed = ("value",) if fam == "fixed" else ("mu", "sigma")
        if not isinstance(params, Mapping) or any(
                not isinstance(params.get(k), (int, float)) for k in needed):
            raise ValueError(
                f"delay family {fam!r} needs numeric params {needed}")

    def to_json_dict(self) -> dict:
        return {
            "alarm_dist": {k: self.alarm_dist.get(k, 0.0) for k in ALARM_KEYS},
            "exit_dist": {k: self.exit_dist.get(k, 0.0) for k in EXIT_KEYS},
            "p_signage": self.p_signage,
            "p_rescue": self.p_rescue,
            "pre_evac_delay": self.pre_evac_delay,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "BehaviorProfile":
        prof = cls(alarm_dist=dict(obj["alarm_dist"]),
                   exit_dist=dict(obj["exit_dist"]),
                   p_signage=float(obj["p_signage"]),
                   p_rescue=float(obj["p_rescue"]),
                   pre_evac_delay=dict(obj["pre_evac_delay"]))
        prof.validate()
        return prof


def profile_tv(p: BehaviorProfile, q: BehaviorProfile) -> float:
    """Worst total-variation distance over the categorical components."""

    def tv(a: Mapping, b: Mapping, keys) -> float:
        return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)

    return max(
        tv(p.alarm_dist, q.alarm_dist, ALARM_KEYS),
        tv(p.exit_dist, q.exit_dist, EXIT_KEYS),
        abs(p.p_signage - q.p_signage),
        abs(p.p_rescue - q.p_rescue),
    )


@dataclass(frozen=True)
class AgentPlan:
    alarm_response: str
    follows_signage: bool
    target_exit: str
    rescues: bool
    pre_evac_delay_s: float


def fit_profile(records: Sequence[DecisionRecord],
                smoothing: float = 0.0) -> BehaviorProfile:
    """Empirical profile from records: exact relative frequencies.

    smoothing > 0 adds a Laplace pseudocount to every categorical cell;
    the default 0.0 reproduces the observed frequencies exactly.
    """
    if not records:
        raise ValueError("fit_profile needs at least one record")
    n = len(records)

    def freqs(keys, values) -> dict:
        # Values outside the alphabet (blank answers) count toward n
        # only, so the fitted masses can sum to less than 1.
        counts = {k: smoothing for k in keys}
        for v in values:
            if v in counts:
                counts[v] += 1.0
        total = n + smoothing * len(keys)
        return {k: counts[k] / total for k in keys}

    alarm = freqs(ALARM_KEYS, [r.alarm_response for r in records])
    exits = freqs(EXIT_KEYS, [r.exit_used for r in records])
    p_signage = sum(1 for r in records if r.followed_signage) / n
    p_rescue = sum(1 for r in records if r.rescued) / n

    times = [r.pre_evac_time_s for r in records if r.pre_evac_time_s > 0]
    if times:
        logs = [math.log(t) for t in times]
        mu = sum(logs) / len(logs)
        var = sum((x - mu) ** 2 for x in logs) / len(logs)
        delay = {"family": "lognormal",
                 "params": {"mu": mu, "sigma": math.sqrt(var)}}
    else:
        delay = dict(DEFAULT_DELAY)

    prof = BehaviorProfile(alarm_dist=alarm, exit_dist=exits,
                           p_signage=p_signage, p_rescue=p_rescue,
                           pre_evac_delay=delay)
    prof.validate()
    return prof


def _pick(rng: random.Random, dist: Mapping[str, float], keys,
          blank: str | None = None) -> str:
    """One draw from dist. With blank set, any mass the dist leaves
    below 1 lands on the blank value instead of the last key."""
    u = rng.random()
    acc = 0.0
    for k in keys:
        acc += dist.get(k, 0.0)
        if u < acc:
            return k
    if blank is not None and 1.0 - acc > 1e-12:
        return blank
    return keys[-1]


def _sample_delay(rng: random.Random, spec: dict) -> float:
    fam = spec["family"]
    if fam == "fixed":
        return float(spec["params"]["value"])
    p = spec["params"]
    return rng.lognormvariate(p["mu"], p["sigma"])


def sample_plan(profile: BehaviorProfile,
                seed_or_rng: int | random.Random) -> AgentPlan:
    """One agent's sampled decisions; deterministic given the seed.

    The draw order (alarm, signage, exit, rescue, delay) is part of the
    determinism contract and must not change.
    """
    profile.validate()
    rng = (seed_or_rng if isinstance(seed_or_rng, random.Random)
           else random.Random(seed_or_rng))
    alarm = _pick(rng, profile.alarm_dist, ALARM_KEYS,
                  blank=BLANK_ANSWER)
    signage = rng.random() < profile.p_signage
    target = _pick(rng, profile.exit_dist, EXIT_KEYS)
    rescues = rng.random() < profile.p_rescue
    delay = _sample_delay(rng, profile.pre_evac_delay)
    return AgentPlan(alarm_response=alarm, follows_signage=signage,
                     target_exit=target, rescues=rescues,
                     pre_evac_delay_s=delay)


@dataclass(frozen=True)
class FailedEgress:
    """An agent whose route never reached an exit."""

    subject_id: str
    reason: str
    plan: AgentPlan


@dataclass(frozen=True)
class BatchResult:
    records: tuple[DecisionRecord, ...]
    logs: tuple[SessionLog, ...]
    failed: tuple[FailedEgress, ...]


def spawn_positions(grid: NavGrid, center, n: int):
    """Deterministic spawn points: walkable cell centers nearest center."""
    import heapq
    start = grid.cell_of(center)
    seen = {start}
    heap = [(0.0, start)]
    out = []
    while heap and len(out) < n:
        _, cell = heapq.heappop(heap)
        if not grid.is_blocked(cell):
            out.append(grid.cell_center(cell))
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                nb = (cell[0] + di, cell[1] + dj)
                if nb in seen or not grid.in_bounds_cell(nb):
                    continue
                seen.add(nb)
                c = grid.cell_center(nb)
                d = math.dist(c, center)
                heapq.heappush(heap, (d, nb))
    if len(out) < n:
        # tiny plans: stack agents on the available cells round-robin
        out = [out[i % len(out)] for i in range(n)] if out else []
    return out[:n]


def _agent_route(plan: FloorPlan, grid: NavGrid, pos,
                 agent_plan: AgentPlan) -> tuple[Route | None, str]:
    if agent_plan.follows_signage:
        try:
            return signage_route(plan, grid, pos), ""
        except SignageError as exc:
            return None, f"signage route failed: {exc}"
    route = route_to_exit(grid, pos, agent_plan.target_exit)
    if route is None:
        return None, f"exit {agent_plan.target_exit} unreachable"
    return route, ""


def _base_log(session_id: str, agent_plan: AgentPlan, digest: str,
              spawn) -> SessionLog:
    meta = {
        "subject_id": session_id,
        "synthetic": True,
        "followed_signage": agent_plan.follows_signage,
        "is_gamer": False,
        "fire_training": False,
        "drill_experience": False,
        "real_fire_experience": False,
    }
    log = SessionLog(session_id=session_id, subject_meta=meta,
                     plan_digest=digest)
    log = append(log, ev("Spawned", 0.0,
                         pos=[round(spawn[0], 4), round(spawn[1], 4)]))
    if not agent_plan.rescues:
        log = append(log, ev("WheelchairReleased", 0.0))
    log = append(log, ev("AlarmRaised", 0.0))
    return log


@dataclass
class _SimAgent:
    idx: int
    plan: AgentPlan
    spawn: tuple
    route: Route | None
    start_t: float
    log: SessionLog
    state: AgentState | None = None
    in_zone: bool = False
    zone_hit: tuple | None = None     # (t, label)
    exit_hit: tuple | None = None     # (t, label)


def _trajectory(grid: NavGrid, wall_index: WallIndex, plan: FloorPlan,
                route: Route, spawn, pushing: bool,
                params: DynamicsParams,
                max_ticks: int) -> tuple[list, int | None, int | None, str | None]:
    """Single-agent run along a route from rest.

    Returns (positions per tick, first safe-zone tick, exit tick, exit
    label); exit tick is None when the agent never enters an exit cell.
    """
    st = AgentState(id=0, position=spawn, pushing_wheelchair=pushing,
                    route=route)
    positions = []
    zone_tick = None
    exit_tick = None
    exit_label = None
    in_zone = safe_zone_label(plan, st.position) is not None
    for k in range(1, max_ticks + 1):
        st = dynamics.integrate([st], grid, params, wall_index)[0]
        positions.append(st.position)
        if zone_tick is None:
            label = safe_zone_label(plan, st.position)
            if label is not None and not in_zone:
                zone_tick = k
            in_zone = label is not None
        lab = grid.exit_cells.get(grid.cell_of(st.position))
        if lab is not None:
            exit_tick = k
            exit_label = lab
            break
        if st.route_idx >= len(route.cells) and st.speed < 1e-6:
            break
    return positions, zone_tick, exit_tick, exit_label


def run_batch(plan: FloorPlan, profile: BehaviorProfile, n_agents: int,
              seed: int, params: DynamicsParams | None = None,
              mode: str = "shared", cell_size: float = 0.5,
              extra_ab_delay_s: float = 10.0,
              max_sim_time_s: float = 900.0) -> BatchResult:
    """Run n artificial agents through the drill on one plan.

    Agents spawn near waypoint E, answer the alarm question after their
    sampled pre-evacuation delay (answers a and b idle an extra
    extra_ab_delay_s before moving), then follow their sampled route.
    `mode` is "shared" (one social-force world, agents interact) or
    "isolated" (independent single-agent worlds; identical routes reuse
    one simulated trajectory, time-shifted per agent).

    Each DecisionRecord's exit_used is the agent's sampled target-exit
    preference; the log's ExitReached event carries the exit actually
    crossed (for signage followers the two can differ by design).
    """
    if n_agents < 1:
        raise ValueError("n_agents must be >= 1")
    if mode not in ("shared", "isolated"):
        raise ValueError(f"unknown mode {mode!r}")
    profile.validate()
    params = params or DynamicsParams()
    params.validate()

    grid = build_nav_grid(plan, cell_size)
    wall_index = WallIndex.from_grid(grid)
    digest = plan.digest()
    rng = random.Random(seed)
    max_ticks = int(max_sim_time_s / params.dt)

    E = plan.waypoints["E"]
    spawns = (spawn_positions(grid, E, n_agents) if mode == "shared"
              else [grid.cell_center(grid.cell_of(E))] * n_agents)

    agents: list[_SimAgent] = []
    for i in range(n_agents):
        ap = sample_plan(profile, rng)
        start = ap.pre_evac_delay_s
        if ap.alarm_response in ("a", "b"):
            start += extra_ab_delay_s
        sid = f"agent-{seed}-{i:05d}"
        route, err = _agent_route(plan, grid, spawns[i], ap)
        log = _base_log(sid, ap, digest, spawns[i])
        log = append(log, ev("AnswerGiven", round(ap.pre_evac_delay_s, 4),
                             choice=ap.alarm_response))
        agents.append(_SimAgent(idx=i, plan=ap, spawn=spawns[i], route=route,
                                start_t=start, log=log))

    if mode == "isolated":
        _run_isolated(agents, plan, grid, wall_index, params, max_ticks)
    else:
        _run_shared(agents, plan, grid, wall_index, params, max_ticks)

    records = []
    logs = []
    failed = []
    for ag in agents:
        if ag.zone_hit is not None:
            ag.log = append(ag.log, ev("SafeZoneReached",
                                       round(ag.zone_hit[0], 4),
                                       zone=ag.zone_hit[1]))
        if ag.exit_hit is None:
            reason = ("no route to exit" if ag.route is None
                      else "did not reach an exit in time")
            failed.append(FailedEgress(subject_id=ag.log.session_id,
                                       reason=reason, plan=ag.plan))
            logs.append(ag.log)
            continue
        exit_t, exit_label = ag.exit_hit
        ag.log = append(ag.log, ev("ExitReached", round(exit_t, 4),
                                   label=exit_label))
        logs.append(ag.log)
        rescue_t = None
        if ag.plan.rescues:
            rescue_t = ag.zone_hit[0] if ag.zone_hit is not None else exit_t
        records.append(DecisionRecord(
            subject_id=ag.log.session_id,
            alarm_response=ag.plan.alarm_response,
            rescued=ag.plan.rescues,
            exit_used=ag.plan.target_exit,
            pre_evac_time_s=round(ag.plan.pre_evac_delay_s, 4),
            rescue_time_s=None if rescue_t is None else round(rescue_t, 4),
            total_evac_time_s=round(exit_t, 4),
            followed_signage=ag.plan.follows_signage,
            is_gamer=False, fire_training=False, drill_experience=False,
            real_fire_experience=False,
        ))
    return BatchResult(records=tuple(records), logs=tuple(logs),
                       failed=tuple(failed))


def _run_isolated(agents: list[_SimAgent], plan: FloorPlan, grid: NavGrid,
                  wall_index: WallIndex, params: DynamicsParams,
                  max_ticks: int) -> None:
    memo: dict = {}
    for ag in agents:
        if ag.route is None:
            continue
        key = (ag.route.cells, ag.spawn, ag.plan.rescues)
        if key not in memo:
            memo[key] = _trajectory(grid, wall_index, plan, ag.route,
                                    ag.spawn, ag.plan.rescues, params,
                                    max_ticks)
        _, zone_tick, exit_tick, exit_label = memo[key]
        if zone_tick is not None:
            ag.zone_hit = (ag.start_t + zone_tick * params.dt,
                           safe_zone_label(plan, memo[key][0][zone_tick - 1]))
        if exit_tick is not None:
            ag.exit_hit = (ag.start_t + exit_tick * params.dt, exit_label)


def _run_shared(agents: list[_SimAgent], plan: FloorPlan, grid: NavGrid,
                wall_index: WallIndex, params: DynamicsParams,
                max_ticks: int) -> None:
    for ag in agents:
        ag.state = AgentState(id=ag.idx, position=ag.spawn,
                              pushing_wheelchair=ag.plan.rescues,
                              route=None)
        ag.in_zone = safe_zone_label(plan, ag.spawn) is not None

    live = {ag.idx: ag for ag in agents}
    for k in range(1, max_ticks + 1):
        if not live:
            break
        t = k * params.dt
        states = []
        for ag in live.values():
            if ag.state.route is None and t >= ag.start_t and ag.route is not None:
                ag.state = dataclasses.replace(ag.state, route=ag.route)
            states.append(ag.state)
        new_states = dynamics.integrate(states, grid, params, wall_index)
        done = []
        for st in new_states:
            ag = live[st.id]
            ag.state = st
            if ag.zone_hit is None:
                label = safe_zone_label(plan, st.position)
                if label is not None and not ag.in_zone and t >= ag.start_t:
                    ag.zone_hit = (t, label)
                ag.in_zone = label is not None
            lab = grid.exit_cells.get(grid.cell_of(st.position))
            if lab is not None and t >= ag.start_t:
                ag.exit_hit = (t, lab)
                done.append(st.id)
        for idx in done:
            del live[idx]


def bundled_sample_logs() -> list[SessionLog]:
    """The packaged reference sessions (data/sample_sessions/*.evlog)."""
    from importlib import resources

    from .telemetry import decode
    root = resources.files("evadrill.data").joinpath("sample_sessions")
    logs = []
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".evlog"):
            logs.append(decode(entry.read_bytes()))
    return logs


def bundled_profile() -> BehaviorProfile:
    """Profile fitted to the packaged reference sessions."""
    from .telemetry import summarize
    return fit_profile([summarize(log) for log in bundled_sample_logs()])
