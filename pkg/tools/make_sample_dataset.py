"""Regenerate the bundled 20-subject reference dataset.

Each subject is a scripted player run through a real session, so every
log replays like a live one. Category allocations (answers, exits,
questionnaire flags, rescues) are fixed counts shuffled independently
per column with a seeded RNG; timings come from seeded draws, so the
dataset is deterministic but the times themselves carry no human
meaning.

Run from the repo root:  python3 tools/make_sample_dataset.py
"""

from __future__ import annotations

import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from evadrill.analysis import tabulate  # noqa: E402
from evadrill.bot import ScriptedPlayer  # noqa: E402
from evadrill.floorplan import bundled_plan  # noqa: E402
from evadrill.navgrid import build_nav_grid  # noqa: E402
from evadrill.population import fit_profile  # noqa: E402
from evadrill.session import DrillSession, replay_session  # noqa: E402
from evadrill.telemetry import read_log, summarize  # noqa: E402

SEED = 7
OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "evadrill" / "data" / "sample_sessions"

# One subject's answer choice was not captured; the blank entry keeps
# the answer column at 19 recorded choices over 20 subjects.
ANSWERS = list("a" * 1 + "b" * 1 + "c" * 8 + "d" * 9) + [""]
EXITS = list("A" * 4 + "B" * 10 + "C" * 1 + "D" * 5)
RESCUES = [True] * 10 + [False] * 10
FLAG_COUNTS = {
    "is_gamer": 13,
    "fire_training": 9,
    "drill_experience": 12,
    "real_fire_experience": 1,
    "followed_signage": 16,
}


def allocations(rng: random.Random) -> list[dict]:
    """Twenty rows; every column shuffled independently."""
    n = 20
    answers = ANSWERS[:]
    exits = EXITS[:]
    rescues = RESCUES[:]
    rng.shuffle(answers)
    rng.shuffle(exits)
    rng.shuffle(rescues)
    flags = {}
    for key, yes in FLAG_COUNTS.items():
        col = [True] * yes + [False] * (n - yes)
        rng.shuffle(col)
        flags[key] = col
    rows = []
    for i in range(n):
        rows.append({
            "subject": f"s{i + 1:02d}",
            "answer": answers[i],
            "exit": exits[i],
            "rescue": rescues[i],
            "delay_ticks": max(20, int(rng.lognormvariate(math.log(12.0), 0.45) / 0.05)),
            "flags": {k: flags[k][i] for k in FLAG_COUNTS},
        })
    return rows


def main() -> int:
    rng = random.Random(SEED)
    plan = bundled_plan()
    grid = build_nav_grid(plan, 0.5)
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for old in OUT_DIR.glob("*.evlog"):
        old.unlink()

    rows = allocations(rng)
    for row in rows:
        session = DrillSession(row["subject"], plan,
                               session_id=f"ref-{row['subject']}",
                               grid=grid)
        player = ScriptedPlayer(session, answer=row["answer"],
                                exit_label=row["exit"],
                                rescue=row["rescue"],
                                answer_delay_ticks=row["delay_ticks"])
        player.run()
        path = session.seal(row["flags"], OUT_DIR)
        rec = summarize(read_log(path))
        assert rec.alarm_response == row["answer"], row
        assert rec.exit_used == row["exit"], (rec.exit_used, row)
        assert rec.rescued == row["rescue"], row
        report, _ = replay_session(read_log(path), plan)
        assert report.match, f"{path.name}: {report.verdict()}"
        print(f"{path.name}: answer={rec.alarm_response} "
              f"exit={rec.exit_used} rescued={rec.rescued} "
              f"pre_evac={rec.pre_evac_time_s:.2f}s "
              f"total={rec.total_evac_time_s:.2f}s")

    records = [summarize(read_log(p)) for p in sorted(OUT_DIR.glob("*.evlog"))]
    tables = tabulate(records)
    assert tables.table2 == {"a": 1, "b": 1, "c": 8, "d": 9}, tables.table2
    assert tables.table3 == {"A": 4, "B": 10, "C": 1, "D": 5}, tables.table3
    expected_pairs = {k: (v, 20 - v) for k, v in FLAG_COUNTS.items()}
    got_pairs = {k: tables.table1[k] for k in FLAG_COUNTS}
    assert got_pairs == expected_pairs, got_pairs

    profile = fit_profile(records)
    assert profile.alarm_dist == {"a": 0.05, "b": 0.05, "c": 0.40, "d": 0.45}
    assert profile.exit_dist == {"A": 0.20, "B": 0.50, "C": 0.05, "D": 0.25}
    assert profile.p_signage == 0.80
    print(f"dataset ok: {len(records)} sessions in {OUT_DIR}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
