"""Fairness optimizer for the active-RIS power budget.

Searches the budget (dBm, log domain) for the point where the two users'
outage probabilities meet, which is where the worst-case outage is
smallest when the curves move in opposite directions.  Where they do not
(the passively served user's outage is bath-tub shaped in the budget),
the gap search is confined to budgets whose worst-user outage is already
near the best achievable, so minimizing the difference never trades away
absolute performance.  When one user is unservable everywhere in the
interval the search falls back to minimizing the servable user's outage
alone.

Golden-section is the default line search (the gap is single-dipped in
practice, flat where the gain cap or floor binds); simulated annealing is
the robustness backstop when that assumption is in doubt.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .analytic import analytic_outage
from .config import SystemConfig
from .montecarlo import estimate_outage_pair
from .ris import alpha_from_power

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerSettings:
    interval_dbm: tuple = (-70.0, -10.0)  # search range for the RIS budget
    tol_db: float = 0.1                   # termination width of the bracket
    method: str = "golden"                # golden | annealing
    evaluator: str = "analytic"           # analytic | mc
    tau: float = 0.9                      # outage ceiling declaring a user unservable
    grid_step_db: float = 1.0             # coarse scan used for mode detection
    anneal_t0: float = 0.05
    anneal_cooling: float = 0.93
    anneal_iters: int = 80
    mc_workers: int = 1


@dataclass(frozen=True)
class OptimizationOutcome:
    pt_ris_dbm: float
    alpha: float
    op1: float
    op2: float
    gap: float       # |op1 - op2| at the optimum
    delta: float     # max(op1, op2) at the optimum, the fairness ceiling
    mode: str        # balanced | fallback_user1 | fallback_user2
    evaluations: int


def _outage_pair_at(pt_ris_dbm: float, config: SystemConfig,
                    settings: OptimizerSettings) -> tuple[float, float]:
    probe = replace(config, pt_ris_dbm=pt_ris_dbm, alpha_mode="from_power")
    if settings.evaluator == "analytic":
        return (analytic_outage(probe, 1).op, analytic_outage(probe, 2).op)
    if settings.evaluator == "mc":
        # identical seed at every candidate: common random numbers keep the
        # objective a deterministic function during the search
        r1, r2 = estimate_outage_pair(probe, workers=settings.mc_workers)
        return r1.op, r2.op
    raise ValueError(f"evaluator must be 'analytic' or 'mc', got {settings.evaluator!r}")


def objective_gap(pt_ris_dbm: float, config: SystemConfig,
                  settings: OptimizerSettings | None = None) -> float:
    """|OP_1 - OP_2| at a candidate budget, with the implied (capped) gain."""
    settings = settings or OptimizerSettings()
    op1, op2 = _outage_pair_at(pt_ris_dbm, config, settings)
    return abs(op1 - op2)


def _golden_min(fun, lo: float, hi: float, tol: float):
    """Golden-section argmin on [lo, hi]; returns best evaluated point."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = fun(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _anneal_min(fun, lo: float, hi: float, settings: OptimizerSettings,
                rng: np.random.Generator):
    """Simulated annealing with a final golden polish around the incumbent."""
    x = rng.uniform(lo, hi)
    fx = fun(x)
    best_x, best_f = x, fx
    temp = settings.anneal_t0
    step = (hi - lo) / 8.0
    for _ in range(settings.anneal_iters):
        cand = min(max(x + rng.normal(0.0, step), lo), hi)
        fc = fun(cand)
        if fc < fx or rng.random() < math.exp(-(fc - fx) / max(temp, 1e-12)):
            x, fx = cand, fc
        if fx < best_f:
            best_x, best_f = x, fx
        temp *= settings.anneal_cooling
        step = max(step * settings.anneal_cooling, settings.tol_db / 2.0)
    px, pf = _golden_min(fun, max(lo, best_x - 1.0), min(hi, best_x + 1.0),
                         settings.tol_db)
    return (px, pf) if pf <= best_f else (best_x, best_f)


def optimize(config: SystemConfig,
             settings: OptimizerSettings | None = None) -> OptimizationOutcome:
    """Choose the RIS power budget minimizing the users' outage gap.

    A coarse grid over the interval decides the mode first: if one user's
    outage stays at or above `tau` across the whole grid, the other user's
    outage becomes the objective and the outcome is tagged as a fallback.

    In balanced mode the gap search is restricted to budgets whose
    worst-user outage is within a small margin of the best achievable one.
    Without that guard the plain gap objective can settle on points where
    both users fail equally (the outage of the passively served user is
    not monotone in the budget), which maximizes fairness in the
    difference sense while being strictly worse for everyone.
    """
    settings = settings or OptimizerSettings()
    lo, hi = settings.interval_dbm
    if not (lo < hi):
        raise ValueError(f"empty search interval {settings.interval_dbm}")
    if not (0.0 < settings.tau < 1.0):
        raise ValueError(f"tau must be in (0, 1), got {settings.tau}")
    if settings.method not in ("golden", "annealing"):
        raise ValueError(f"method must be 'golden' or 'annealing', got {settings.method!r}")

    cache: dict[float, tuple[float, float]] = {}

    def pair_at(x: float) -> tuple[float, float]:
        if x not in cache:
            cache[x] = _outage_pair_at(x, config, settings)
        return cache[x]

    grid = [float(x) for x in
            np.arange(lo, hi + settings.grid_step_db / 2.0, settings.grid_step_db)]
    grid_pairs = [pair_at(x) for x in grid]

    if all(p2 >= settings.tau for _, p2 in grid_pairs):
        mode = "fallback_user1"
        objective = lambda x: pair_at(x)[0]
        candidates = grid
    elif all(p1 >= settings.tau for p1, _ in grid_pairs):
        mode = "fallback_user2"
        objective = lambda x: pair_at(x)[1]
        candidates = grid
    else:
        mode = "balanced"
        objective = lambda x: abs(pair_at(x)[0] - pair_at(x)[1])
        deltas = [max(p) for p in grid_pairs]
        delta_star = min(deltas)
        slack = max(1e-9, 0.05 * delta_star)
        if settings.evaluator == "mc":
            slack += 3.0 * math.sqrt(max(delta_star * (1.0 - delta_star), 1e-12)
                                     / config.mc_trials)
        candidates = [x for x, d in zip(grid, deltas) if d <= delta_star + slack]

    k = int(np.argmin([objective(x) for x in candidates]))
    best_x, best_f = candidates[k], objective(candidates[k])

    # refine inside a one-grid-step bracket around the coarse argmin
    blo = max(lo, best_x - settings.grid_step_db)
    bhi = min(hi, best_x + settings.grid_step_db)
    if settings.method == "golden":
        x, f = _golden_min(objective, blo, bhi, settings.tol_db)
    else:
        rng = np.random.default_rng(config.seed)
        x, f = _anneal_min(objective, blo, bhi, settings, rng)
    if best_f < f:
        x, f = best_x, best_f
    if mode == "balanced":
        # the refinement must not leave the near-optimal fairness region
        if max(pair_at(x)) > delta_star + slack:
            x = best_x

    op1, op2 = pair_at(x)
    probe = replace(config, pt_ris_dbm=x, alpha_mode="from_power")
    return OptimizationOutcome(
        pt_ris_dbm=x,
        alpha=alpha_from_power(probe),
        op1=op1,
        op2=op2,
        gap=abs(op1 - op2),
        delta=max(op1, op2),
        mode=mode,
        evaluations=len(cache),
    )
