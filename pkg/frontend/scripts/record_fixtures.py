"""Re-record the frontend contract fixtures from the live API.

Run from the repository root (requires the Python package installed):

    python3 frontend/scripts/record_fixtures.py

The contract tests replay these payloads; regenerate them whenever the
report schema or validation rules change.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "tests"))

from fastapi.testclient import TestClient  # noqa: E402

from raildecarb.api import create_app  # noqa: E402
from raildecarb.network import ODFlow  # noqa: E402
from raildecarb.params import GridIntensityTable  # noqa: E402

from conftest import line_network  # noqa: E402

OUT = ROOT / "frontend" / "tests" / "fixtures"

VALIDATION_BODIES = [
    {"technology": "battery", "range_miles": 400.0, "target_deployment": 1.0},
    {"technology": "biodiesel", "blend_fraction": 0.5},
    {"technology": "hydrogen", "range_miles": 900.0},
    {"technology": "efuel", "blend_fraction": 1.0, "seed": 3},
    {"technology": "diesel"},
    {"technology": "battery", "range_miles": 400.0, "policy": "reroute",
     "reroute_max_increase": 0.2},
    {"technology": "biodiesel", "blend_fraction": 1.2},
    {"technology": "battery"},
    {"technology": "battery", "range_miles": -5},
    {"technology": "antimatter"},
    {"technology": "battery", "range_miles": 400.0, "target_deployment": 1.5},
    {"technology": "battery", "range_miles": 400.0, "policy": "teleport"},
    {"technology": "battery", "range_miles": 400.0, "tolerance": -0.1},
    {"technology": "battery", "range_miles": 400.0, "od_coverage_ratio": 2.0},
    {"technology": "battery", "range_miles": 400.0, "railroad": "northern"},
    {"technology": "battery", "range_miles": 400.0, "reroute_max_increase": -1},
    {"technology": "battery", "range_miles": 400.0, "siting_solver": "oracle"},
]


def main() -> None:
    net = line_network({"A": 0.0, "B": 100.0, "C": 250.0, "D": 350.0})
    flows = [ODFlow("A", "D", "Coal", 1_000_000.0),
             ODFlow("B", "C", "Intermodal", 5_000.0)]
    grid = GridIntensityTable({("IL", None): (400.0, 0.10)})
    client = TestClient(create_app(net, flows, grid=grid, synchronous=True))

    def run(body):
        rid = client.post("/scenarios", json=body).json()["id"]
        got = client.get(f"/scenarios/{rid}").json()
        assert got["status"] == "done", got
        return rid, got["report"]

    rid, battery = run({"technology": "battery", "range_miles": 400.0,
                        "target_deployment": 1.0})
    _, battery_800 = run({"technology": "battery", "range_miles": 800.0,
                          "target_deployment": 1.0})
    _, dropin = run({"technology": "biodiesel", "blend_fraction": 0.5})

    OUT.mkdir(parents=True, exist_ok=True)
    dump = lambda name, obj: (OUT / name).write_text(
        json.dumps(obj, indent=2, sort_keys=True))
    dump("report_battery.json", battery)
    dump("report_battery_800.json", battery_800)
    dump("report_dropin.json", dropin)
    dump("facilities_battery.json", client.get(f"/scenarios/{rid}/facilities").json())
    dump("network.json", client.get("/network").json())

    cases = []
    for body in VALIDATION_BODIES:
        resp = client.post("/scenarios", json=body)
        case = {"body": body, "status": resp.status_code}
        if resp.status_code == 422:
            case["errors"] = [
                {"field": next((str(p) for p in item.get("loc", []) if p != "body"), ""),
                 "message": item.get("msg", "")}
                for item in resp.json()["detail"]
            ]
        cases.append(case)
    dump("validation_cases.json", cases)
    print(f"wrote {len(list(OUT.iterdir()))} fixtures to {OUT}")


if __name__ == "__main__":
    main()
