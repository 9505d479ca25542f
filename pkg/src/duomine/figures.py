"""Plot-ready datasets behind the headline experiments.

Each builder returns a Dataset: named columns, numeric rows, and the full
parameter record needed to regenerate it. Rendering (CSV, JSON) is left to
the callers; nothing here touches the filesystem.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import chain, epochs
from .errors import InvalidPartition
from .params import (
    HashrateProfile,
    ProtocolParams,
    TieBreakParams,
    validate_scenario,
)
from .thresholds import convergence_study, threshold_curve


@dataclass(frozen=True)
class Dataset:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    parameters: dict


def _tiebreak_params(tiebreak: TieBreakParams) -> dict:
    return {
        "gamma1": tiebreak.gamma1,
        "gamma2": tiebreak.gamma2,
        "theta1": tiebreak.theta1,
        "theta2": tiebreak.theta2,
    }


def bob_threshold_curves(
    tiebreak: TieBreakParams | None = None, tol: float = 1e-5
) -> Dataset:
    """Bob's profitability threshold vs Alice's hashrate, for caps 2 to 4.

    The cap-4 curve dips to its minimum near alpha1 = 0.16.
    """
    tiebreak = (tiebreak or TieBreakParams()).validate()
    grid = [i / 100.0 for i in range(5, 41)]
    curves = {
        n_cap: threshold_curve(grid, n_cap=n_cap, tiebreak=tiebreak, tol=tol)
        for n_cap in (2, 3, 4)
    }
    rows = tuple(
        (a1, curves[2][i].threshold, curves[3][i].threshold, curves[4][i].threshold)
        for i, a1 in enumerate(grid)
    )
    return Dataset(
        name="fig6",
        columns=("alpha1", "bob_threshold_n2", "bob_threshold_n3", "bob_threshold_n4"),
        rows=rows,
        parameters={
            "evaluator": "markov",
            "tol": tol,
            "alpha1_grid": {"start": grid[0], "stop": grid[-1], "step": 0.01},
            **_tiebreak_params(tiebreak),
        },
    )


def revenue_surface(
    n_cap: int, tiebreak: TieBreakParams | None = None, step: float = 0.02
) -> Dataset:
    """Relative revenues over the (alpha1, alpha2) grid with an honest majority."""
    tiebreak = (tiebreak or TieBreakParams()).validate()
    if not 0.0 < step < 0.25:
        raise InvalidPartition(f"grid step {step!r} out of range")
    rows = []
    count = int(round(0.5 / step))
    for i in range(1, count):
        for j in range(1, count):
            a1, a2 = i * step, j * step
            ah = 1.0 - a1 - a2
            if ah <= max(a1, a2):
                continue
            sc = validate_scenario(
                HashrateProfile(a1, a2), tiebreak, ProtocolParams(n_cap=n_cap)
            )
            rep = chain.reward_rates(sc)
            rows.append((a1, a2) + rep.relative + (rep.yield_per_block,))
    return Dataset(
        name=f"revenue_surface_n{n_cap}",
        columns=("alpha1", "alpha2", "relative1", "relative2", "relative_h", "yield"),
        rows=tuple(rows),
        parameters={
            "n_cap": n_cap,
            "step": step,
            "constraint": "honest pool holds a strict majority",
            **_tiebreak_params(tiebreak),
        },
    )


def threshold_convergence(
    tiebreak: TieBreakParams | None = None, tol: float = 1e-5
) -> Dataset:
    """Single- and two-attacker thresholds as the release cap grows to 8."""
    tiebreak = (tiebreak or TieBreakParams()).validate()
    singles = convergence_study(mode="single", tiebreak=tiebreak, tol=tol)
    twos = convergence_study(mode="symmetric", tiebreak=tiebreak, tol=tol)
    rows = tuple(
        (s.n_cap, s.threshold, t.threshold) for s, t in zip(singles, twos)
    )
    return Dataset(
        name="fig9",
        columns=("n_cap", "single_attacker_threshold", "two_attacker_threshold"),
        rows=rows,
        parameters={
            "evaluator": "markov",
            "tol": tol,
            "n_caps": [s.n_cap for s in singles],
            **_tiebreak_params(tiebreak),
        },
    )


def _transient_scenario(alpha: float, n_cap: int):
    return validate_scenario(
        HashrateProfile(alpha, alpha),
        TieBreakParams(),
        ProtocolParams(n_cap=n_cap, honest_majority_required=False),
    )


def transient_revenue(alpha: float = 0.22, epochs_count: int = 60, n_cap: int = 4) -> Dataset:
    """Per-epoch relative and absolute revenue across difficulty periods."""
    sc = _transient_scenario(alpha, n_cap)
    rep = epochs.simulate_epochs(sc, epochs_count)
    rows = tuple(
        (
            row.epoch,
            row.duration,
            row.difficulty,
            rep.shares[0],
            rep.shares[1],
            row.absolute_rates[0],
            row.absolute_rates[1],
            row.cumulative_rate1,
            row.baseline_rate1,
        )
        for row in rep.rows
    )
    return Dataset(
        name="fig11",
        columns=(
            "epoch", "duration", "difficulty", "relative1", "relative2",
            "absolute_rate1", "absolute_rate2", "cumulative_rate1", "baseline_rate1",
        ),
        rows=rows,
        parameters={
            "alpha1": alpha,
            "alpha2": alpha,
            "n_cap": n_cap,
            "epochs": epochs_count,
            "growth": "constant",
            "profitable_after": rep.profitable_after,
            **_tiebreak_params(TieBreakParams()),
        },
    )


def cumulative_crossing(alpha: float = 0.22, epochs_count: int = 80, n_cap: int = 4) -> Dataset:
    """Cumulative absolute revenue vs the honest baseline it eventually crosses."""
    sc = _transient_scenario(alpha, n_cap)
    rep = epochs.simulate_epochs(sc, epochs_count)
    rows = tuple(
        (row.epoch, row.cumulative_rate1, row.baseline_rate1) for row in rep.rows
    )
    return Dataset(
        name="fig12",
        columns=("epoch", "cumulative_rate1", "baseline_rate1"),
        rows=rows,
        parameters={
            "alpha1": alpha,
            "alpha2": alpha,
            "n_cap": n_cap,
            "epochs": epochs_count,
            "growth": "constant",
            "profitable_after": rep.profitable_after,
            **_tiebreak_params(TieBreakParams()),
        },
    )


FIGURES = {
    "fig6": bob_threshold_curves,
    "fig7": lambda: revenue_surface(2),
    "fig8": lambda: revenue_surface(4),
    "fig9": threshold_convergence,
    "fig11": transient_revenue,
    "fig12": cumulative_crossing,
}


def build(figure_id: str) -> Dataset:
    """Dataset for one of the named figures; KeyError on unknown ids."""
    try:
        builder = FIGURES[figure_id]
    except KeyError:
        raise KeyError(
            f"unknown figure {figure_id!r}; choose from {sorted(FIGURES)}"
        ) from None
    ds = builder()
    if ds.name != figure_id:
        ds = Dataset(figure_id, ds.columns, ds.rows, ds.parameters)
    return ds
