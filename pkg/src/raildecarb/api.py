"""HTTP JSON API over a loaded network, demand, and parameter pack.

Endpoints:

* ``GET  /network``              nodes and edges with coordinates
* ``GET  /parameters``           the active parameter pack
* ``POST /scenarios``            submit a scenario config, returns ``{"id": ...}``
* ``GET  /scenarios/{id}``       run status or the finished report
* ``GET  /scenarios/{id}/facilities``  per-facility detail for map hovers

Scenario runs execute on worker threads over shared immutable inputs; each
run owns its own mutable state, so concurrent submissions are independent
and deterministic for a given config and seed.
"""

from __future__ import annotations

import itertools
import json
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from .network import ODFlow, RailNetwork
from .params import FacilityCostCurve, GridIntensityTable, ParameterPack
from .scenario import (
    DROPIN_TECHNOLOGIES,
    STORAGE_TECHNOLOGIES,
    ScenarioConfig,
    run_scenario,
)
from .validation import ValidationError


class ScenarioRequest(BaseModel):
    railroad: str = Field(default="western", pattern="^(western|eastern)$")
    technology: str = Field(default="battery")
    blend_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    range_miles: float | None = Field(default=None, gt=0.0)
    target_deployment: float = Field(default=0.5, ge=0.0, le=1.0)
    od_coverage_ratio: float | None = Field(default=None, ge=0.0, le=1.0)
    policy: str = Field(default="no_reroute", pattern="^(no_reroute|reroute|endpoints)$")
    reroute_max_increase: float = Field(default=0.0, ge=0.0)
    tolerance: float = Field(default=0.02, ge=0.0, le=1.0)
    siting_solver: str = Field(default="auto", pattern="^(auto|exact|greedy)$")
    year: int | None = None
    seed: int = 0

    @model_validator(mode="after")
    def _check_technology(self) -> "ScenarioRequest":
        if self.technology not in DROPIN_TECHNOLOGIES + STORAGE_TECHNOLOGIES:
            raise ValueError(
                f"technology must be one of {DROPIN_TECHNOLOGIES + STORAGE_TECHNOLOGIES}"
            )
        if self.technology in STORAGE_TECHNOLOGIES and self.range_miles is None:
            raise ValueError("range_miles is required for storage technologies")
        return self

    def to_config(self) -> ScenarioConfig:
        return ScenarioConfig(**self.model_dump())


class RunRegistry:
    """Run store: in-memory with optional flat-file persistence.

    One lock; runs keyed by a monotonically increasing id so report
    payloads stay independent of wall clock. With ``persist_dir``,
    finished runs are written as JSON files and reloaded on startup.
    """

    def __init__(self, persist_dir: str | Path | None = None):
        self._lock = threading.Lock()
        self._runs: dict[str, dict] = {}
        self._persist_dir = Path(persist_dir) if persist_dir else None
        start = 1
        if self._persist_dir is not None:
            self._persist_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._persist_dir.glob("run-*.json")):
                self._runs[path.stem] = json.loads(path.read_text())
                start = max(start, int(path.stem.split("-")[1]) + 1)
        self._counter = itertools.count(start)

    def create(self) -> str:
        with self._lock:
            run_id = f"run-{next(self._counter)}"
            self._runs[run_id] = {"status": "running"}
            return run_id

    def _store(self, run_id: str, payload: dict) -> None:
        with self._lock:
            self._runs[run_id] = payload
            if self._persist_dir is not None:
                path = self._persist_dir / f"{run_id}.json"
                path.write_text(json.dumps(payload, sort_keys=True))

    def finish(self, run_id: str, report: dict) -> None:
        self._store(run_id, {"status": "done", "report": report})

    def fail(self, run_id: str, message: str) -> None:
        self._store(run_id, {"status": "error", "message": message})

    def get(self, run_id: str) -> dict | None:
        with self._lock:
            return self._runs.get(run_id)


def create_app(
    net: RailNetwork,
    flows: list[ODFlow],
    pack: ParameterPack | None = None,
    grid: GridIntensityTable | None = None,
    costcurve: FacilityCostCurve | None = None,
    synchronous: bool = False,
    persist_dir: str | Path | None = None,
) -> FastAPI:
    """Build the API app over immutable inputs.

    ``synchronous`` runs scenarios inline on POST (useful for testing);
    otherwise each run executes on its own daemon thread. ``persist_dir``
    keeps finished reports as flat files across restarts.
    """
    pack = pack or ParameterPack()
    app = FastAPI(title="raildecarb", version="0.1.0")
    registry = RunRegistry(persist_dir)
    app.state.registry = registry

    @app.get("/network")
    def get_network() -> dict:
        return {"nodes": net.node_rows(), "edges": net.edge_rows()}

    @app.get("/parameters")
    def get_parameters() -> dict:
        return pack.to_dict()

    def _execute(run_id: str, cfg: ScenarioConfig) -> None:
        try:
            report = run_scenario(cfg, net, flows, pack, grid, costcurve)
            registry.finish(run_id, report.to_dict())
        except ValidationError as exc:
            registry.fail(run_id, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            registry.fail(run_id, f"internal error: {exc}")

    @app.post("/scenarios", status_code=202)
    def post_scenario(request: ScenarioRequest) -> dict:
        cfg = request.to_config()
        run_id = registry.create()
        if synchronous:
            _execute(run_id, cfg)
        else:
            thread = threading.Thread(target=_execute, args=(run_id, cfg), daemon=True)
            thread.start()
        return {"id": run_id}

    @app.get("/scenarios/{run_id}")
    def get_scenario(run_id: str) -> dict:
        run = registry.get(run_id)
        if run is None:
            raise HTTPException(status_code=404, detail=f"unknown run id {run_id!r}")
        return run

    @app.get("/scenarios/{run_id}/facilities")
    def get_facilities(run_id: str) -> dict:
        run = registry.get(run_id)
        if run is None:
            raise HTTPException(status_code=404, detail=f"unknown run id {run_id!r}")
        if run["status"] != "done":
            return {"status": run["status"], "facilities": []}
        report = run["report"]
        max_util = pack.engine.max_station_utilization
        detail = [
            {**fac, "over_utilized": fac["utilization"] is not None
             and fac["utilization"] >= max_util}
            for fac in report["facilities"]
        ]
        return {"status": "done", "facilities": detail,
                "max_station_utilization": max_util}

    return app


def serve_api(
    net: RailNetwork,
    flows: list[ODFlow],
    pack: ParameterPack | None = None,
    grid: GridIntensityTable | None = None,
    costcurve: FacilityCostCurve | None = None,
    host: str = "127.0.0.1",
    port: int = 8000,
    persist_dir: str | Path | None = None,
) -> None:
    """Run the API under uvicorn (long-running)."""
    import uvicorn

    app = create_app(net, flows, pack, grid, costcurve, persist_dir=persist_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
