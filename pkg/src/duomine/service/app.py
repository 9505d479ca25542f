"""FastAPI wrapper around the model core.

Domain errors map onto HTTP statuses: bad parameters give 422, solver and
search failures give 400, unknown figure ids give 404. Every handler is a
thin translation layer; no numerics happen here.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, chain, closedform, epochs, figures, simulate, thresholds
from ..errors import (
    DuomineError,
    HonestMinority,
    InvalidPartition,
    NeverProfitable,
    UndefinedBeta,
    ZeroTotal,
)
from . import schemas

VALIDATION_ERRORS = (InvalidPartition, HonestMinority, UndefinedBeta, ZeroTotal)

app = FastAPI(title="duomine", version=__version__)


@app.exception_handler(DuomineError)
def _domain_error(request: Request, exc: DuomineError) -> JSONResponse:
    status = 422 if isinstance(exc, VALIDATION_ERRORS) else 400
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/analyze", response_model=schemas.AnalyzeResponse)
def analyze(req: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
    sc = req.build()
    rep = chain.reward_rates(sc)
    cap = sc.protocol.n_cap
    residual = None
    closed_cap = None
    if cap in (2, 4):
        fn = closedform.reward_rates_n2 if cap == 2 else closedform.reward_rates_n4
        cf = fn(sc.alpha1, sc.alpha2, sc.alpha_h, sc.tiebreak)
        residual = max(abs(a - b) for a, b in zip(rep.rates, cf))
        closed_cap = cap
    edges = None
    if req.include_edges:
        ts = chain.transition_system_for(sc)
        edges = chain.edge_list(ts, sc)
    return schemas.AnalyzeResponse(
        states=rep.states,
        rates=rep.rates,
        orphan_rates=rep.orphan_rates,
        relative=rep.relative,
        yield_per_block=rep.yield_per_block,
        blocks_per_round=rep.blocks_per_round,
        closed_form_cap=closed_cap,
        closed_form_residual=residual,
        edges=edges,
    )


@app.post("/simulate", response_model=schemas.SimulateResponse)
def run_simulation(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    sc = req.build()
    if req.replications < 1:
        raise InvalidPartition(f"replications={req.replications} must be positive")
    if req.jobs < 1:
        raise InvalidPartition(f"jobs={req.jobs} must be positive")
    seeds = [req.seed + i for i in range(req.replications)]
    if req.jobs == 1 or req.replications == 1:
        results = [simulate.run(sc, req.blocks, seed=s) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=req.jobs) as pool:
            # map() yields in submission order, keeping the merge deterministic
            results = list(pool.map(lambda s: simulate.run(sc, req.blocks, seed=s), seeds))
    reps = [
        schemas.ReplicationOut(
            seed=r.seed,
            credits=r.credits,
            orphans=r.orphans,
            rounds=r.rounds,
            relative=r.relative,
            relative_stderr=r.relative_stderr(),
        )
        for r in results
    ]
    credits = tuple(sum(r.credits[i] for r in results) for i in range(3))
    orphans = tuple(sum(r.orphans[i] for r in results) for i in range(3))
    rounds = sum(r.rounds for r in results)
    total = req.blocks * req.replications
    settled = sum(credits)
    return schemas.SimulateResponse(
        blocks=total,
        replications=reps,
        credits=credits,
        orphans=orphans,
        rounds=rounds,
        relative=tuple(c / settled for c in credits) if settled else (0.0, 0.0, 0.0),
        yield_per_block=settled / total,
        conserved=settled + sum(orphans) == total,
    )


@app.post("/threshold", response_model=schemas.ThresholdResponse)
def threshold(req: schemas.ThresholdRequest) -> schemas.ThresholdResponse:
    res = thresholds.profitable_threshold(
        mode=req.mode,
        evaluator=req.evaluator,
        n_cap=req.n_cap,
        alpha1=req.alpha1,
        tiebreak=req.tiebreak(),
        tol=req.tol,
        blocks=req.blocks,
        seed=req.seed,
    )
    return schemas.ThresholdResponse(
        mode=res.mode,
        evaluator=res.evaluator,
        n_cap=res.n_cap,
        threshold=res.threshold,
        bracket=res.bracket,
        evaluations=res.evaluations,
        honest_majority_ok=res.honest_majority_ok,
        alpha1=res.alpha1,
    )


@app.post("/transient", response_model=schemas.TransientResponse)
def transient(req: schemas.TransientRequest) -> schemas.TransientResponse:
    sc = req.build()
    schedule = epochs.GrowthSchedule(
        kind=req.growth.kind,
        factor=req.growth.factor,
        multipliers=tuple(req.growth.multipliers),
    ).validate()
    rep = epochs.simulate_epochs(sc, req.epochs, schedule)
    try:
        after = epochs.profitable_delay(sc, schedule)
        days = epochs.epochs_to_days(after, sc.protocol.blocks_per_epoch)
    except NeverProfitable:
        after, days = None, None
    rows = [
        schemas.EpochRowOut(
            epoch=row.epoch,
            hashrate=row.hashrate,
            difficulty=row.difficulty,
            duration=row.duration,
            blocks_mined=row.blocks_mined,
            credits=row.credits,
            absolute_rates=row.absolute_rates,
            cumulative_rate1=row.cumulative_rate1,
            baseline_rate1=row.baseline_rate1,
            profitable=row.profitable,
        )
        for row in rep.rows
    ]
    return schemas.TransientResponse(
        shares=rep.shares,
        yield_per_block=rep.yield_per_block,
        rows=rows,
        profitable_after=after,
        days_to_profit=days,
    )


@app.post("/reproduce/{figure_id}", response_model=schemas.ReproduceResponse)
def reproduce(figure_id: str) -> schemas.ReproduceResponse:
    try:
        ds = figures.build(figure_id)
    except KeyError as exc:
        return JSONResponse(
            status_code=404,
            content={"error": "UnknownFigure", "detail": str(exc.args[0])},
        )
    return schemas.ReproduceResponse(
        figure=ds.name,
        columns=list(ds.columns),
        rows=[list(row) for row in ds.rows],
        parameters=ds.parameters,
    )
