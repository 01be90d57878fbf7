"""Stateless JSON-over-HTTP facade over the algebra and both labs.

Every route is a pure pass-through to the library: contracts travel in each
request, nothing is stored server-side, and results are value-equal to the
direct library calls.  Incompatibility diagnostics come back as HTTP 422
with the structured diagnostic; malformed bodies as 400.  Responses always
carry ``elapsed_ms``.
"""

from __future__ import annotations

import asyncio
import time
from typing import Any, Callable

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .contract_io import contract_from_dict, contract_to_dict
from .contracts import compose, get_variable_bounds, merge, optimize, quotient, refines
from .errors import ContractForgeError, IncompatibilityError, InfeasibleRegion, ParseError
from .lp import Direction

REQUEST_TIMEOUT_S = 10.0


def _ok(result: Any, started: float) -> JSONResponse:
    return JSONResponse({
        "ok": True,
        "result": result,
        "diagnostic": None,
        "elapsed_ms": (time.perf_counter() - started) * 1000.0,
    })


def _fail(status: int, started: float, *, error: str | None = None, diagnostic=None) -> JSONResponse:
    return JSONResponse(
        {
            "ok": False,
            "result": None,
            "diagnostic": diagnostic.to_json() if diagnostic is not None else None,
            "error": error if error is not None else (diagnostic.describe() if diagnostic else "error"),
            "elapsed_ms": (time.perf_counter() - started) * 1000.0,
        },
        status_code=status,
    )


def _contracts(body: dict, count: int) -> list:
    raw = body.get("contracts")
    if not isinstance(raw, list) or len(raw) != count:
        raise ValueError(f"request needs exactly {count} contract(s)")
    return [contract_from_dict(item) for item in raw]


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="contract-forge", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    async def handle(request: Request, fn: Callable[[dict], Any]) -> JSONResponse:
        started = time.perf_counter()
        try:
            body = await request.json()
            if not isinstance(body, dict):
                raise ValueError("request body must be a JSON object")
        except Exception as exc:
            return _fail(400, started, error=f"malformed body: {exc}")
        try:
            result = await asyncio.wait_for(
                run_in_threadpool(fn, body), timeout=REQUEST_TIMEOUT_S)
        except IncompatibilityError as exc:
            return _fail(422, started, diagnostic=exc.diagnostic)
        except (ParseError, InfeasibleRegion, ContractForgeError, ValueError, KeyError, TypeError) as exc:
            return _fail(400, started, error=str(exc))
        except asyncio.TimeoutError:
            return _fail(400, started, error="request timed out")
        return _ok(result, started)

    @app.get("/api/health")
    async def health():
        return {"ok": True}

    @app.post("/api/compose")
    async def api_compose(request: Request):
        def run(body: dict):
            c1, c2 = _contracts(body, 2)
            keep = body.get("options", {}).get("keep") or None
            return contract_to_dict(compose(c1, c2, keep))

        return await handle(request, run)

    @app.post("/api/quotient")
    async def api_quotient(request: Request):
        def run(body: dict):
            top, part = _contracts(body, 2)
            return contract_to_dict(quotient(top, part))

        return await handle(request, run)

    @app.post("/api/merge")
    async def api_merge(request: Request):
        def run(body: dict):
            c1, c2 = _contracts(body, 2)
            merged = merge(c1, c2)
            out = contract_to_dict(merged)
            out["compatible"] = merged.compatible
            out["consistent"] = merged.consistent
            return out

        return await handle(request, run)

    @app.post("/api/refines")
    async def api_refines(request: Request):
        def run(body: dict):
            c1, c2 = _contracts(body, 2)
            outcome = refines(c1, c2)
            return {
                "refines": outcome.ok,
                "violated_assumptions": [str(t) for t in outcome.violated_assumptions],
                "violated_guarantees": [str(t) for t in outcome.violated_guarantees],
            }

        return await handle(request, run)

    @app.post("/api/bounds")
    async def api_bounds(request: Request):
        def run(body: dict):
            (c,) = _contracts(body, 1)
            var = body.get("options", {})["var"]
            lo, hi = get_variable_bounds(c, var)
            return {"var": var, "lower": lo, "upper": hi}

        return await handle(request, run)

    @app.post("/api/optimize")
    async def api_optimize(request: Request):
        def run(body: dict):
            (c,) = _contracts(body, 1)
            options = body.get("options", {})
            direction = Direction(options.get("direction", "max"))
            value = optimize(c, options["expr"], direction)
            return {"expr": options["expr"], "direction": direction.value, "value": value}

        return await handle(request, run)

    @app.post("/api/mission/schedulability")
    async def api_mission(request: Request):
        def run(body: dict):
            from .mission import (
                CANONICAL_SEQUENCE,
                OperationalRequirements,
                TaskHyperparameters,
                TaskKind,
                build_scenario,
                check_schedulable,
                requirements_contract,
            )

            options = body.get("options", {})
            sequence = tuple(TaskKind[s] for s in options.get("sequence", [])) or CANONICAL_SEQUENCE
            hyper_kwargs = {k: tuple(v) for k, v in options.get("hyper", {}).items()}
            hyper = TaskHyperparameters(**hyper_kwargs)
            req = OperationalRequirements(**options.get("requirements", {}))
            scenario = build_scenario(sequence, hyper)
            result = check_schedulable(scenario, requirements_contract(req, sequence),
                                       hyper=hyper, req=req, steps=len(sequence))
            return {
                "admissible": result.admissible,
                "scenario_score": result.scenario_score,
                "requirement_score": result.requirement_score,
                "soc_bounds": None if result.soc_bounds is None else [list(b) for b in result.soc_bounds],
                "avg_soc_min": result.avg_soc_min,
                "avg_soc_max": result.avg_soc_max,
                "assumptions": [str(t) for t in result.contract.assumptions],
            }

        return await handle(request, run)

    @app.post("/api/aircraft/evaluate")
    async def api_aircraft_evaluate(request: Request):
        def run(body: dict):
            from .aircraft import HxKind, OperatingPoint, ToleranceVector, evaluate_instance

            options = body.get("options", {})
            op = OperatingPoint(
                float(options.get("alt", 15.0)), float(options.get("thrust", 20000.0)),
                float(options.get("mdot_in", 9.316)), float(options.get("mdot_a", 0.429)))
            eps_raw = options.get("eps", 0.01)
            eps = (ToleranceVector.from_array(eps_raw) if isinstance(eps_raw, list)
                   else ToleranceVector.uniform(float(eps_raw)))
            hx = HxKind(options.get("hx", "controlled"))
            r = evaluate_instance(op, eps, hx, fast=True)
            return {
                "refines_spec": r.refines_spec,
                "te_bounds": None if r.te_bounds is None else list(r.te_bounds),
                "tout_bounds": None if r.tout_bounds is None else list(r.tout_bounds),
                "failure": r.failure,
                "spec": {"te": [300.0, 330.0], "tout_delta": 10.0, "t_in_nominal": 288.0},
            }

        return await handle(request, run)

    @app.post("/api/aircraft/explore")
    async def api_aircraft_explore(request: Request):
        def run(body: dict):
            from .aircraft import ExploreConfig, explore_grid

            config = ExploreConfig.from_dict(body.get("options", {}))
            rows = explore_grid(config)
            return [
                {
                    "hx": r.hx_kind.value, "alt": r.op.alt_km, "thrust": r.op.thrust_kg,
                    "mdot_in": r.op.mdot_in, "mdot_a": r.op.mdot_a, "valid": r.valid,
                    "te_bounds": None if r.te_bounds is None else list(r.te_bounds),
                    "tout_bounds": None if r.tout_bounds is None else list(r.tout_bounds),
                }
                for r in rows
            ]

        return await handle(request, run)

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
