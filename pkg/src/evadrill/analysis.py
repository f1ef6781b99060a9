"""Reduce decision records to the drill's frequency tables and time stats."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .scenario import alarm_question
from .telemetry import DecisionRecord

TABLE1_ROWS = (
    ("is_gamer", "Regular video game player"),
    ("fire_training", "Previous training in fire safety"),
    ("drill_experience", "Previous fire drill's experience"),
    ("real_fire_experience", "Been into a real fire"),
    ("followed_signage", "Followed emergency signage to find exit route"),
)

EXIT_NAMES = {
    "A": "A-main entrance",
    "B": "B-back entrance",
    "C": "C-south wing exit",
    "D": "D-northwest exit",
}

TIME_FIELDS = ("pre_evac_time_s", "total_evac_time_s")

TIMES_CAVEAT = (
    "Evacuation times are not significant as absolute values: the avatar "
    "moves at a fixed 1.5 m/s and gait effects (variable speed, walking "
    "versus running, steering) are not modeled."
)


@dataclass(frozen=True)
class FrequencyTables:
    """Exact tallies: five yes/no pairs, answer counts, exit counts."""

    table1: dict    # flag key -> (yes, no)
    table2: dict    # answer choice -> count
    table3: dict    # exit label -> count
    n: int


def tabulate(records: Sequence[DecisionRecord]) -> FrequencyTables:
    if not records:
        raise ValueError("tabulate needs at least one record")
    n = len(records)
    table1 = {}
    for key, _ in TABLE1_ROWS:
        yes = sum(1 for r in records if getattr(r, key))
        table1[key] = (yes, n - yes)
    # Blank alarm responses count toward n but under no option row, so
    # table2 may sum to less than n when a record's choice is missing.
    table2 = {c: 0 for c in "abcd"}
    for r in records:
        if r.alarm_response in table2:
            table2[r.alarm_response] += 1
    table3 = {lab: 0 for lab in "ABCD"}
    for r in records:
        table3[r.exit_used] += 1
    return FrequencyTables(table1=table1, table2=table2, table3=table3, n=n)


def _median_lower(sorted_vals: list[float]) -> float:
    """Median with the lower-middle tie rule for even-sized inputs."""
    return sorted_vals[(len(sorted_vals) - 1) // 2]


def time_summary(records: Sequence[DecisionRecord]) -> dict:
    """Order statistics for the timing fields, plus the mandatory caveat."""
    if not records:
        raise ValueError("time_summary needs at least one record")
    out = {"caveat": TIMES_CAVEAT}
    for field_name in TIME_FIELDS:
        vals = sorted(getattr(r, field_name) for r in records)
        out[field_name] = {
            "mean": sum(vals) / len(vals),
            "min": vals[0],
            "max": vals[-1],
            "median": _median_lower(vals),
        }
    return out


def text_report(records: Sequence[DecisionRecord]) -> str:
    """Human-readable report mirroring the published table layout."""
    tables = tabulate(records)
    times = time_summary(records)
    options = dict(alarm_question())
    lines = []
    lines.append(f"Subjects: {tables.n}")
    lines.append("")
    lines.append("Table 1 - Population sample")
    lines.append("")
    lines.append("\tYES\tNO")
    for key, label in TABLE1_ROWS:
        yes, no = tables.table1[key]
        lines.append(f"{label}\t{yes}\t{no}")
    lines.append("")
    lines.append("Table 2 - Answers to initial question")
    lines.append("")
    lines.append("\tAnswers")
    for c in "abcd":
        lines.append(f"{c}) {options[c]}\t{tables.table2[c]}")
    lines.append("")
    lines.append("Table 3 - Exits used by the players")
    lines.append("")
    lines.append("\tNumber of players")
    for lab in "ABCD":
        lines.append(f"{EXIT_NAMES[lab]}\t{tables.table3[lab]}")
    lines.append("")
    lines.append("Times (seconds)")
    lines.append("")
    lines.append("\tmean\tmin\tmax\tmedian")
    for field_name in TIME_FIELDS:
        s = times[field_name]
        lines.append(f"{field_name}\t{s['mean']:.2f}\t{s['min']:.2f}"
                     f"\t{s['max']:.2f}\t{s['median']:.2f}")
    lines.append("")
    lines.append(f"Note: {TIMES_CAVEAT}")
    return "\n".join(lines) + "\n"


def csv_report(records: Sequence[DecisionRecord]) -> str:
    """Flat CSV of every tabulated quantity, for machine diffing."""
    import csv
    import io
    tables = tabulate(records)
    times = time_summary(records)
    options = dict(alarm_question())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("section", "key", "label", "value"))
    w.writerow(("meta", "n", "subjects", tables.n))
    for key, label in TABLE1_ROWS:
        yes, no = tables.table1[key]
        w.writerow(("table1_yes", key, label, yes))
        w.writerow(("table1_no", key, label, no))
    for c in "abcd":
        w.writerow(("table2", c, options[c], tables.table2[c]))
    for lab in "ABCD":
        w.writerow(("table3", lab, EXIT_NAMES[lab], tables.table3[lab]))
    for field_name in TIME_FIELDS:
        s = times[field_name]
        for stat in ("mean", "min", "max", "median"):
            w.writerow(("times", f"{field_name}_{stat}", "",
                        f"{s[stat]:.3f}"))
    return buf.getvalue()
