"""Command-line front end.

Every subcommand is a thin client of the HTTP service: by default the
FastAPI app is driven in-process, `--server URL` points at a running
instance instead. Results go to stdout as a short report, or to `--out`
as CSV/JSON with a manifest JSON recording the full parameters so a
dataset can always be regenerated. Outputs carry no timestamps: the same
flags (including --seed) give byte-identical files.

Exit codes: 0 success, 2 invalid parameters, 3 solver or search failure,
4 usage error.
"""
from __future__ import annotations

import argparse
import asyncio
import csv
import json
import os
import sys
from pathlib import Path

import httpx

from . import __version__
from .epochs import load_multipliers
from .errors import DivergentSchedule

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 4

OUT_ENV = "DUOMINE_OUT"
FIGURE_IDS = ("fig6", "fig7", "fig8", "fig9", "fig11", "fig12")
THETA_DEFAULT = 1.0 / 3.0


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this tool reserves 2 for
    # validation errors and reports usage problems as 4
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the dataset here instead of printing a report")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="dataset format for --out (default csv)")
    p.add_argument("--server", help="URL of a running service (default: in-process)")


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha1", type=float, default=0.0, help="Alice's hashrate share")
    p.add_argument("--alpha2", type=float, default=0.0, help="Bob's hashrate share")
    _add_tiebreak_flags(p)
    p.add_argument("--n", type=int, default=4, help="private-chain length cap (default 4)")
    p.add_argument("--blocks-per-epoch", type=int, default=2016,
                   help="blocks per difficulty period (default 2016)")
    p.add_argument("--no-honest-majority", action="store_true",
                   help="accept scenarios where an attacker matches or beats the honest pool")


def _add_tiebreak_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float, default=None,
                   help="two-way tie preference for both attackers (sets gamma1=gamma2, default 0.5)")
    p.add_argument("--gamma1", type=float, default=None)
    p.add_argument("--gamma2", type=float, default=None)
    p.add_argument("--theta", type=float, default=None,
                   help="three-way tie preference for both attackers (sets theta1=theta2, default 1/3)")
    p.add_argument("--theta1", type=float, default=None)
    p.add_argument("--theta2", type=float, default=None)


def _tiebreak_payload(args) -> dict:
    if args.gamma is not None and (args.gamma1 is not None or args.gamma2 is not None):
        args.parser.error("--gamma conflicts with --gamma1/--gamma2")
    if args.theta is not None and (args.theta1 is not None or args.theta2 is not None):
        args.parser.error("--theta conflicts with --theta1/--theta2")

    def pick(single, value, default):
        if value is not None:
            return value
        if single is not None:
            return single
        return default

    return {
        "gamma1": pick(args.gamma, args.gamma1, 0.5),
        "gamma2": pick(args.gamma, args.gamma2, 0.5),
        "theta1": pick(args.theta, args.theta1, THETA_DEFAULT),
        "theta2": pick(args.theta, args.theta2, THETA_DEFAULT),
    }


def _scenario_payload(args) -> dict:
    return {
        "alpha1": args.alpha1,
        "alpha2": args.alpha2,
        **_tiebreak_payload(args),
        "n_cap": args.n,
        "blocks_per_epoch": args.blocks_per_epoch,
        "honest_majority_required": not args.no_honest_majority,
    }


def _call(args, method: str, path: str, payload: dict | None = None):
    server = getattr(args, "server", None)
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.request(method, path, json=payload)
            return resp.status_code, resp.json()

    from .service.app import app

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://duomine") as client:
            resp = await client.request(method, path, json=payload)
            return resp.status_code, resp.json()

    return asyncio.run(go())


def _fail(status: int, payload) -> int:
    if isinstance(payload, dict):
        kind = payload.get("error", "error")
        detail = payload.get("detail", payload)
    else:
        kind, detail = "error", payload
    print(f"error: {kind}: {detail}", file=sys.stderr)
    if status == 422:
        return EXIT_VALIDATION
    if status == 404:
        return EXIT_USAGE
    return EXIT_NUMERICAL


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _out_path(args, default_name: str) -> Path:
    if args.out:
        path = Path(args.out)
    else:
        path = Path(os.environ.get(OUT_ENV, ".")) / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_dataset(args, default_stem: str, columns, rows, parameters: dict,
                   command: str) -> Path:
    """Write CSV or JSON plus the accompanying manifest; returns the data path."""
    ext = "csv" if args.format == "csv" else "json"
    path = _out_path(args, f"{default_stem}.{ext}")
    if args.format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
    else:
        doc = {"columns": list(columns), "rows": [list(r) for r in rows]}
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    manifest = path.with_name(path.stem + ".manifest.json")
    doc = {
        "command": command,
        "parameters": parameters,
        "columns": list(columns),
        "row_count": len(rows),
        "tool": "duomine",
        "version": __version__,
    }
    manifest.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    print(f"wrote {path} and {manifest}")
    return path


def _miner_triple(values) -> str:
    return f"alice={_cell(values[0])}  bob={_cell(values[1])}  henry={_cell(values[2])}"


def cmd_analyze(args) -> int:
    payload = _scenario_payload(args)
    payload["include_edges"] = args.edges is not None
    status, data = _call(args, "POST", "/analyze", payload)
    if status != 200:
        return _fail(status, data)

    if args.edges is not None:
        edges_path = Path(args.edges)
        edges_path.parent.mkdir(parents=True, exist_ok=True)
        edges_path.write_text(data["edges"])
        print(f"wrote {edges_path}")

    if args.out:
        columns = (
            "rate1", "rate2", "rate_h",
            "orphan_rate1", "orphan_rate2", "orphan_rate_h",
            "relative1", "relative2", "relative_h",
            "yield_per_block", "blocks_per_round", "states",
            "closed_form_residual",
        )
        row = (*data["rates"], *data["orphan_rates"], *data["relative"],
               data["yield_per_block"], data["blocks_per_round"], data["states"],
               data["closed_form_residual"])
        _write_dataset(args, "analyze", columns, [row], payload, "analyze")
    else:
        print(f"states: {data['states']}")
        print(f"reward rates:     {_miner_triple(data['rates'])}")
        print(f"orphan rates:     {_miner_triple(data['orphan_rates'])}")
        print(f"relative revenue: {_miner_triple(data['relative'])}")
        print(f"main-chain yield: {_cell(data['yield_per_block'])} per mined block")
        print(f"blocks per round: {_cell(data['blocks_per_round'])}")
        if data["closed_form_residual"] is not None:
            print(f"closed-form residual (cap {data['closed_form_cap']}): "
                  f"{data['closed_form_residual']:.3e}")

    if args.check_closed_form:
        residual = data["closed_form_residual"]
        if residual is None:
            print(f"error: no closed form for cap {args.n}", file=sys.stderr)
            return EXIT_VALIDATION
        if residual >= 1e-9:
            print(f"error: closed-form residual {residual:.3e} exceeds 1e-9",
                  file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"closed-form check passed: residual {residual:.3e} < 1e-9")
    return EXIT_OK


def cmd_simulate(args) -> int:
    payload = _scenario_payload(args)
    payload.update(blocks=args.blocks, seed=args.seed,
                   replications=args.replications, jobs=args.jobs)
    status, data = _call(args, "POST", "/simulate", payload)
    if status != 200:
        return _fail(status, data)
    if not data["conserved"]:
        print("error: credited + orphaned != mined", file=sys.stderr)
        return EXIT_NUMERICAL

    if args.out:
        columns = (
            "replication", "seed",
            "credits1", "credits2", "credits_h",
            "orphans1", "orphans2", "orphans_h", "rounds",
            "relative1", "relative2", "relative_h",
            "stderr1", "stderr2", "stderr_h",
        )
        rows = [
            (i, rep["seed"], *rep["credits"], *rep["orphans"], rep["rounds"],
             *rep["relative"], *rep["relative_stderr"])
            for i, rep in enumerate(data["replications"])
        ]
        _write_dataset(args, "simulate", columns, rows, payload, "simulate")
    else:
        print(f"blocks: {data['blocks']}  rounds: {data['rounds']}  "
              f"replications: {len(data['replications'])}")
        print(f"credits:          {_miner_triple(data['credits'])}")
        print(f"orphans:          {_miner_triple(data['orphans'])}")
        print(f"relative revenue: {_miner_triple(data['relative'])}")
        print(f"main-chain yield: {_cell(data['yield_per_block'])} per mined block")
        print("conservation: ok")
    return EXIT_OK


def cmd_threshold(args) -> int:
    payload = {
        "mode": args.mode,
        "evaluator": args.evaluator,
        "n_cap": args.n,
        "alpha1": args.alpha1,
        **_tiebreak_payload(args),
        "tol": args.tol,
        "blocks": args.blocks,
        "seed": args.seed,
    }
    status, data = _call(args, "POST", "/threshold", payload)
    if status != 200:
        return _fail(status, data)

    if args.out:
        columns = ("mode", "evaluator", "n_cap", "alpha1", "threshold",
                   "bracket_lo", "bracket_hi", "evaluations")
        row = (data["mode"], data["evaluator"], data["n_cap"], data["alpha1"],
               data["threshold"], *data["bracket"], data["evaluations"])
        _write_dataset(args, "threshold", columns, [row], payload, "threshold")
    else:
        where = "" if data["alpha1"] is None else f" at alpha1={_cell(data['alpha1'])}"
        print(f"threshold: {_cell(data['threshold'])} "
              f"(mode {data['mode']}{where}, evaluator {data['evaluator']}, cap {data['n_cap']})")
        print(f"bracket: [{_cell(data['bracket'][0])}, {_cell(data['bracket'][1])}] "
              f"after {data['evaluations']} evaluations")
    return EXIT_OK


def _growth_payload(args) -> dict | None:
    spec = args.growth
    if spec == "constant":
        return {"kind": "constant"}
    if spec.startswith("geometric:"):
        try:
            g = float(spec.split(":", 1)[1])
        except ValueError:
            args.parser.error(f"bad growth rate in {spec!r}")
        return {"kind": "geometric", "factor": 1.0 + g}
    path = Path(spec)
    if not path.exists():
        args.parser.error(f"growth schedule file {spec!r} not found")
    try:
        schedule = load_multipliers(path)
    except DivergentSchedule as exc:
        print(f"error: DivergentSchedule: {exc}", file=sys.stderr)
        return None
    return {"kind": "multipliers", "multipliers": list(schedule.multipliers)}


def cmd_transient(args) -> int:
    growth = _growth_payload(args)
    if growth is None:
        return EXIT_VALIDATION
    payload = _scenario_payload(args)
    payload.update(epochs=args.epochs, growth=growth)
    status, data = _call(args, "POST", "/transient", payload)
    if status != 200:
        return _fail(status, data)

    if args.out:
        columns = ("epoch", "hashrate", "difficulty", "duration", "blocks_mined",
                   "absolute_rate1", "absolute_rate2", "absolute_rate_h",
                   "cumulative_rate1", "baseline_rate1", "profitable")
        rows = [
            (r["epoch"], r["hashrate"], r["difficulty"], r["duration"],
             r["blocks_mined"], *r["absolute_rates"], r["cumulative_rate1"],
             r["baseline_rate1"], r["profitable"])
            for r in data["rows"]
        ]
        params = dict(payload)
        params["profitable_after"] = data["profitable_after"]
        params["days_to_profit"] = data["days_to_profit"]
        _write_dataset(args, "transient", columns, rows, params, "transient")
    else:
        print(f"steady relative revenue: {_miner_triple(data['shares'])}")
        print(f"main-chain yield: {_cell(data['yield_per_block'])} per mined block")
        print(f"{'epoch':>5} {'duration':>12} {'difficulty':>10} "
              f"{'cumulative1':>11} {'baseline1':>9}")
        for r in data["rows"]:
            print(f"{r['epoch']:>5} {r['duration']:>12.2f} {r['difficulty']:>10.6f} "
                  f"{r['cumulative_rate1']:>11.6f} {r['baseline_rate1']:>9.6f}")
        if data["profitable_after"] is None:
            print("the attack never beats honest mining for Alice")
        else:
            print(f"profitable after {data['profitable_after']} epochs "
                  f"({_cell(data['days_to_profit'])} days)")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.figure not in FIGURE_IDS:
        args.parser.error(
            f"unknown figure {args.figure!r}; choose from {', '.join(FIGURE_IDS)}"
        )
    status, data = _call(args, "POST", f"/reproduce/{args.figure}")
    if status != 200:
        return _fail(status, data)
    _write_dataset(args, args.figure, data["columns"], data["rows"],
                   data["parameters"], f"reproduce {args.figure}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="duomine",
        description="Two block-withholding attackers on a proof-of-work chain: "
                    "steady-state revenue, Monte Carlo simulation, profitability "
                    "thresholds, and difficulty-adjustment transients.",
    )
    parser.add_argument("--version", action="version", version=f"duomine {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("analyze", help="solve a scenario's steady state")
    _add_scenario_flags(p)
    p.add_argument("--check-closed-form", action="store_true",
                   help="fail unless the chain matches the closed form within 1e-9")
    p.add_argument("--edges", metavar="PATH",
                   help="also write the transition system as a plain-text edge list")
    _add_output_flags(p)
    p.set_defaults(func=cmd_analyze, parser=p)

    p = sub.add_parser("simulate", help="Monte Carlo block-level simulation")
    _add_scenario_flags(p)
    p.add_argument("--blocks", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replications", type=int, default=1,
                   help="independent runs, seeded seed, seed+1, ...")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for replications")
    _add_output_flags(p)
    p.set_defaults(func=cmd_simulate, parser=p)

    p = sub.add_parser("threshold", help="profitability threshold search")
    p.add_argument("--mode", choices=("symmetric", "single", "bob"), default="symmetric")
    p.add_argument("--evaluator",
                   choices=("markov", "analytic-n2", "analytic-n4", "monte-carlo"),
                   default="markov")
    p.add_argument("--n", type=int, default=4, help="private-chain length cap")
    p.add_argument("--alpha1", type=float, default=None,
                   help="Alice's fixed hashrate (mode bob only)")
    _add_tiebreak_flags(p)
    p.add_argument("--tol", type=float, default=1e-5, help="bisection tolerance")
    p.add_argument("--blocks", type=int, default=2_000_000,
                   help="blocks per probe (evaluator monte-carlo)")
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_threshold, parser=p)

    p = sub.add_parser("transient", help="difficulty-adjustment transient")
    _add_scenario_flags(p)
    p.add_argument("--epochs", type=int, default=60)
    p.add_argument("--growth", default="constant",
                   help="hashrate schedule: constant, geometric:G (grows by fraction G "
                        "per epoch), or a file with one multiplier per line")
    _add_output_flags(p)
    p.set_defaults(func=cmd_transient, parser=p)

    p = sub.add_parser("reproduce", help="emit the dataset behind a named figure")
    p.add_argument("figure", metavar="figureId",
                   help=f"one of {', '.join(FIGURE_IDS)}")
    _add_output_flags(p)
    p.set_defaults(func=cmd_reproduce, parser=p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8057)
    p.set_defaults(func=cmd_serve, parser=p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.error("a command is required")
    try:
        return args.func(args)
    except httpx.HTTPError as exc:
        print(f"error: service unreachable: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
