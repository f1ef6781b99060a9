import random

import pytest

from evadrill.floorplan import bundled_plan
from evadrill.navgrid import build_nav_grid


@pytest.fixture(scope="session")
def plan():
    return bundled_plan()


@pytest.fixture(scope="session")
def grid(plan):
    return build_nav_grid(plan, 0.5)


@pytest.fixture
def rng():
    return random.Random(0)


def make_empty_plan_text(width=20.0, height=10.0):
    """Minimal rectangular plan: four boundary walls with a 2 m exit
    gap in the bottom edge (the wall stops either side of exit A)."""
    import json
    gap_lo = width / 2 - 1
    gap_hi = width / 2 + 1
    doc = {
        "name": "box",
        "walls": [
            [[0, 0], [gap_lo, 0]],
            [[gap_hi, 0], [width, 0]],
            [[width, 0], [width, height]],
            [[width, height], [0, height]],
            [[0, height], [0, 0]],
        ],
        "doors": [],
        "exits": [{"label": "A", "segment": [[gap_lo, 0], [gap_hi, 0]]}],
        "waypoints": {"E": [width / 2, height / 2],
                      "F": [1.5, height - 1.5],
                      "L": [width - 1.5, height - 1.5],
                      "ES": [1.5, 1.5]},
        "safe_zones": [],
        "signage": [],
    }
    return json.dumps(doc)
