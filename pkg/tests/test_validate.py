import json

from conftest import make_empty_plan_text
from evadrill.floorplan import bundled_plan, parse_floorplan
from evadrill.validate import validate_plan


def test_bundled_plan_is_clean():
    assert validate_plan(bundled_plan()) == []


def test_empty_box_is_clean():
    assert validate_plan(parse_floorplan(make_empty_plan_text())) == []


def test_unreachable_exit_reported():
    doc = json.loads(make_empty_plan_text(width=20.0, height=10.0))
    # carve a gap for exit B in the right wall, then wall the pocket off
    doc["walls"][2] = [[20.0, 0.0], [20.0, 4.0]]
    doc["walls"].insert(3, [[20.0, 6.0], [20.0, 10.0]])
    doc["exits"].append({"label": "B", "segment": [[20.0, 4.0], [20.0, 6.0]]})
    doc["walls"].append([[16.0, 0.0], [16.0, 10.0]])
    plan = parse_floorplan(json.dumps(doc))
    violations = validate_plan(plan)
    assert any("exit B unreachable" in v for v in violations)
    assert not any("exit A" in v for v in violations)


def test_waypoint_in_wall_reported():
    doc = json.loads(make_empty_plan_text(width=20.0, height=10.0))
    doc["waypoints"]["L"] = [0.0, 0.0]  # on the boundary wall
    plan = parse_floorplan(json.dumps(doc))
    violations = validate_plan(plan)
    assert any("waypoint L" in v for v in violations)


def test_ward_unreachable_reported():
    doc = json.loads(make_empty_plan_text(width=20.0, height=10.0))
    f = doc["waypoints"]["F"]
    # box the ward in completely
    x, y = f
    doc["walls"] += [
        [[x - 1.5, y - 1.5], [x + 1.5, y - 1.5]],
        [[x + 1.5, y - 1.5], [x + 1.5, y + 1.5]],
        [[x + 1.5, y + 1.5], [x - 1.5, y + 1.5]],
        [[x - 1.5, y + 1.5], [x - 1.5, y - 1.5]],
    ]
    plan = parse_floorplan(json.dumps(doc))
    violations = validate_plan(plan)
    assert any("ward waypoint F unreachable" in v for v in violations)


def test_blocked_signage_leg_reported():
    doc = json.loads(make_empty_plan_text(width=20.0, height=10.0))
    # full-width wall separates the node from its target near exit A
    doc["walls"].append([[0.0, 2.0], [20.0, 2.0]])
    doc["signage"] = [{"node": [6.0, 6.0], "to": [10.0, 0.5]}]
    plan = parse_floorplan(json.dumps(doc))
    violations = validate_plan(plan)
    assert any("signage leg" in v for v in violations)


def test_signage_node_in_wall_reported():
    doc = json.loads(make_empty_plan_text(width=20.0, height=10.0))
    doc["signage"] = [{"node": [0.0, 5.0], "to": [10.0, 0.5]}]
    plan = parse_floorplan(json.dumps(doc))
    violations = validate_plan(plan)
    assert any("signage node" in v for v in violations)


def test_unparsable_file_is_single_violation(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{]")
    violations = validate_plan(bad)
    assert len(violations) == 1


def test_missing_file_reported(tmp_path):
    violations = validate_plan(tmp_path / "ghost.json")
    assert len(violations) == 1


def test_oversized_cell_reported():
    plan = parse_floorplan(make_empty_plan_text(width=10.0, height=10.0))
    violations = validate_plan(plan, cell_size=10.0)
    assert len(violations) == 1
