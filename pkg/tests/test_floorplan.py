import json

import pytest

from conftest import make_empty_plan_text
from evadrill.floorplan import (FloorplanSemanticError, FloorplanSyntaxError,
                                bundled_plan, parse_floorplan,
                                plan_to_document, signage_terminus)


def test_bundled_plan_labels(plan):
    assert sorted(e.label for e in plan.exits) == ["A", "B", "C", "D"]
    for wp in ("E", "F", "L", "ES"):
        assert wp in plan.waypoints


def test_bundled_plan_digest_stable(plan):
    assert plan.digest() == bundled_plan().digest()
    assert len(plan.digest()) == 16


def test_zero_wall_plan_is_valid():
    doc = {
        "name": "open", "walls": [],
        "exits": [{"label": "A", "segment": [[0, 0], [1, 0]]}],
        "waypoints": {"E": [2, 2], "F": [3, 3], "L": [4, 4], "ES": [5, 5]},
    }
    p = parse_floorplan(json.dumps(doc))
    assert p.walls == ()
    assert p.exits[0].label == "A"


def test_syntax_error_carries_line_number():
    bad = '{\n  "name": "x",\n  broken\n}'
    with pytest.raises(FloorplanSyntaxError) as ei:
        parse_floorplan(bad)
    assert ei.value.line == 3


def test_missing_waypoint_is_semantic_error():
    doc = json.loads(make_empty_plan_text())
    del doc["waypoints"]["F"]
    with pytest.raises(FloorplanSemanticError):
        parse_floorplan(json.dumps(doc))


def test_dangling_signage_rejected():
    doc = json.loads(make_empty_plan_text())
    doc["signage"] = [{"node": [5, 5], "to": [6, 6]}]
    with pytest.raises(FloorplanSemanticError) as ei:
        parse_floorplan(json.dumps(doc))
    assert "signage" in str(ei.value)


def test_signage_cycle_rejected():
    doc = json.loads(make_empty_plan_text())
    doc["signage"] = [{"node": [5, 5], "to": [6, 6]},
                      {"node": [6, 6], "to": [5, 5]}]
    with pytest.raises(FloorplanSemanticError):
        parse_floorplan(json.dumps(doc))


def test_duplicate_exit_label_rejected():
    doc = json.loads(make_empty_plan_text())
    doc["exits"].append({"label": "A", "segment": [[0, 3], [0, 5]]})
    with pytest.raises(FloorplanSemanticError):
        parse_floorplan(json.dumps(doc))


def test_document_round_trip(plan):
    doc = plan_to_document(plan)
    again = parse_floorplan(json.dumps(doc))
    assert again.digest() == plan.digest()


def test_signage_terminates_at_exit_d(plan):
    for edge in plan.signage:
        chain, label = signage_terminus(plan, edge.node)
        assert label == "D"
        assert chain[0] == edge.node


def test_bounds_cover_all_geometry(plan):
    xmin, ymin, xmax, ymax = plan.bounds()
    assert (xmin, ymin) == (0.0, 0.0)
    assert (xmax, ymax) == (40.0, 30.0)
    for p in plan.waypoints.values():
        assert xmin <= p[0] <= xmax and ymin <= p[1] <= ymax


def test_exit_by_label(plan):
    assert plan.exit_by_label("B").label == "B"
    with pytest.raises(KeyError):
        plan.exit_by_label("Z")
