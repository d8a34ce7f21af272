"""
Parameter sweeps and threshold detection, written out as CSV tables.

Simulated equilibria are tail averages (last ``tail_fraction`` of the
horizon) of ensemble means. Runs that die out early are averaged in as zero
infection, not conditioned away.
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import __version__
from .exceptions import ConvergenceError, ValidationError
from .graph import largest_real_eigenvalue
from .mmc import epidemic_threshold, initial_state, run_mmc, solve_equilibrium, state_fractions
from .montecarlo import ensemble_tail_infected, run_ensemble
from .params import ModelParams
from .series import STATES, Fractions, _fmt
from .validation import check_graph

logger = logging.getLogger(__name__)

DETECTION_EPS = 0.005
TAIL_FRACTION = 0.25


class SweepPoint(NamedTuple):
    params: ModelParams
    rho_inf: Fractions
    source: str


@dataclass(frozen=True)
class ThresholdEstimate:
    beta_c_theory: float
    beta_c_sim: float
    detection_eps: float
    observed: bool = True
    grid_step: float = math.nan
    source: str = "mc"

    @property
    def error(self):
        return abs(self.beta_c_sim - self.beta_c_theory)


def _grid(values):
    return np.unique(np.round(np.asarray(values, dtype=float), 10))


def threshold_grid(center, fine_step=0.005, fine_halfwidth=0.03, coarse_step=0.02, hi=1.0):
    """Beta grid: ``fine_step`` spacing within ``fine_halfwidth`` of ``center``,
    ``coarse_step`` elsewhere on ``(0, hi]``. Fine points sit on multiples of
    ``fine_step``."""
    coarse = np.arange(1, int(round(hi / coarse_step)) + 1) * coarse_step
    pts = list(coarse)
    if math.isfinite(center):
        lo_i = max(1, math.ceil((center - fine_halfwidth) / fine_step - 1e-9))
        hi_i = math.floor((center + fine_halfwidth) / fine_step + 1e-9)
        pts += [i * fine_step for i in range(lo_i, hi_i + 1)]
    g = _grid(pts)
    return g[(g > 0) & (g <= hi + 1e-12)]


def temporal_experiment(g, params, cfg, runs=50, base_seed=0, n_jobs=1):
    """MMC and Monte Carlo trajectories from matched starts, aligned on ``t``.

    The MMC start gives every node infection probability ``seed_count / n``
    and the same sleep law the simulation draws from.
    """
    g = check_graph(g)
    cfg = cfg if cfg.params == params else _with_params(cfg, params)
    active = None if cfg.init_active == "stationary" else 1.0
    init = initial_state(g.n, params, cfg.seed_count / g.n, active=active)
    mmc_series = run_mmc(g, params, init, max_steps=cfg.steps, settle_tol=0.0)
    mc_series = run_ensemble(g, cfg, runs=runs, base_seed=base_seed, n_jobs=n_jobs)
    return mmc_series, mc_series


def _with_params(cfg, params):
    from dataclasses import replace

    return replace(cfg, params=params)


def mmc_equilibrium(g, params, tol=1e-10, max_iter=200_000):
    """Equilibrium fractions from the MMC fixed point. Near the critical point
    the iteration slows down; if it hits the cap, the last iterate is used."""
    try:
        state = solve_equilibrium(g, params, tol=tol, max_iter=max_iter)
    except ConvergenceError as exc:
        logger.warning("beta=%g: %s; using last iterate", params.beta, exc)
        state = exc.last_iterate
    return state_fractions(state)


def sweep_beta(g, gamma, u, v, beta_grid, cfg, runs=50, base_seed=0,
               sources=("mmc", "mc"), tail_fraction=TAIL_FRACTION, n_jobs=1):
    """Equilibrium fractions over a beta grid, from each requested engine.

    Returns points sorted by (beta, source). Every beta point reuses
    ``base_seed`` for its ensemble.
    """
    g = check_graph(g)
    betas = _grid(beta_grid)
    if betas.size == 0:
        raise ValidationError("beta_grid is empty")
    points = []
    for b in betas:
        params = ModelParams(float(b), gamma, u, v)
        if "mmc" in sources:
            points.append(SweepPoint(params, mmc_equilibrium(g, params), "mmc"))
        if "mc" in sources:
            series = run_ensemble(g, _with_params(cfg, params), runs=runs, base_seed=base_seed, n_jobs=n_jobs)
            points.append(SweepPoint(params, series.tail_mean(tail_fraction), "mc"))
    return points


def detect_threshold(points, detection_eps=DETECTION_EPS, lambda_max=None, source=None):
    """Smallest swept beta whose equilibrium infected fraction exceeds
    ``detection_eps``.

    ``points`` must share one (gamma, u, v). With ``lambda_max`` given, the
    theoretical threshold is filled in; otherwise it is NaN. When no point
    exceeds ``detection_eps`` the estimate has ``observed=False`` and
    ``beta_c_sim = inf``.
    """
    if detection_eps <= 0:
        raise ValidationError("detection_eps must be positive")
    if source is not None:
        points = [p for p in points if p.source == source]
    if not points:
        raise ValidationError("no sweep points")
    points = sorted(points, key=lambda p: p.params.beta)
    p0 = points[0].params
    theory = math.nan if lambda_max is None else epidemic_threshold(lambda_max, p0.gamma, p0.u, p0.v)
    prev = None
    for p in points:
        if p.rho_inf.infected > detection_eps:
            step = p.params.beta - prev if prev is not None else math.nan
            return ThresholdEstimate(theory, p.params.beta, detection_eps, True, step, points[0].source)
        prev = p.params.beta
    return ThresholdEstimate(theory, math.inf, detection_eps, False, math.nan, points[0].source)


def find_threshold(g, gamma, u, v, cfg, beta_grid=None, lambda_max=None, runs=50, base_seed=0,
                   detection_eps=DETECTION_EPS, source="mc", tail_fraction=TAIL_FRACTION, n_jobs=1):
    """Same answer as ``detect_threshold(sweep_beta(...))`` but scans upward
    and stops at the first beta above ``detection_eps``."""
    g = check_graph(g)
    if lambda_max is None:
        lambda_max = largest_real_eigenvalue(g).lambda_max
    theory = epidemic_threshold(lambda_max, gamma, u, v)
    betas = threshold_grid(theory) if beta_grid is None else _grid(beta_grid)
    prev = None
    for b in betas:
        params = ModelParams(float(b), gamma, u, v)
        if source == "mmc":
            infected = mmc_equilibrium(g, params).infected
        else:
            infected = ensemble_tail_infected(g, _with_params(cfg, params), runs=runs, base_seed=base_seed,
                                              tail_fraction=tail_fraction, n_jobs=n_jobs)
        if infected > detection_eps:
            step = float(b - prev) if prev is not None else math.nan
            return ThresholdEstimate(theory, float(b), detection_eps, True, step, source)
        prev = b
    return ThresholdEstimate(theory, math.inf, detection_eps, False, math.nan, source)


def sweep_gamma(g, gamma_grid, schedules, cfg, runs=50, base_seed=0, detection_eps=DETECTION_EPS,
                simulate=True, n_jobs=1):
    """Theoretical and detected thresholds for each (gamma, u, v).

    Rows are dicts with keys ``gamma, u, v, beta_c_theory, beta_c_mmc,
    beta_c_sim, grid_step``, sorted by (u, v, gamma).
    """
    g = check_graph(g)
    lam = largest_real_eigenvalue(g).lambda_max
    rows = []
    for u, v in sorted(schedules):
        for gamma in _grid(gamma_grid):
            rows.append(_threshold_row(g, float(gamma), u, v, cfg, lam, runs, base_seed,
                                       detection_eps, simulate, n_jobs))
    return rows


def sweep_ratio(g, gamma, u_grid, v_grid, cfg, runs=50, base_seed=0, detection_eps=DETECTION_EPS,
                simulate=True, n_jobs=1):
    """Thresholds over the Cartesian (u, v) grid, sorted by (u/v, u)."""
    g = check_graph(g)
    lam = largest_real_eigenvalue(g).lambda_max
    pairs = [(float(u), float(v)) for u in _grid(u_grid) for v in _grid(v_grid)]
    if any(v <= 0 for _, v in pairs):
        raise ValidationError("all v must be positive")
    rows = []
    for u, v in sorted(pairs, key=lambda p: (p[0] / p[1], p[0])):
        row = _threshold_row(g, gamma, u, v, cfg, lam, runs, base_seed, detection_eps, simulate, n_jobs)
        row["ratio"] = u / v
        rows.append(row)
    return rows


def _threshold_row(g, gamma, u, v, cfg, lam, runs, base_seed, detection_eps, simulate, n_jobs):
    theory = epidemic_threshold(lam, gamma, u, v)
    row = {"gamma": gamma, "u": u, "v": v, "beta_c_theory": theory,
           "beta_c_mmc": math.nan, "beta_c_sim": math.nan, "grid_step": math.nan}
    if not simulate or gamma == 0.0:
        return row
    est_mmc = find_threshold(g, gamma, u, v, cfg, lambda_max=lam, detection_eps=detection_eps, source="mmc")
    est = find_threshold(g, gamma, u, v, cfg, lambda_max=lam, runs=runs, base_seed=base_seed,
                         detection_eps=detection_eps, n_jobs=n_jobs)
    row.update(beta_c_mmc=est_mmc.beta_c_sim, beta_c_sim=est.beta_c_sim, grid_step=est.grid_step)
    return row


# -- output -----------------------------------------------------------------

def _cell(x):
    if isinstance(x, (float, np.floating)):
        return _fmt(x)
    return str(x)


def write_table(rows, columns, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_cell(row[c]) for c in columns) + "\n")


def sweep_rows(points):
    rows = []
    for p in points:
        row = {"beta": p.params.beta, "gamma": p.params.gamma, "u": p.params.u, "v": p.params.v,
               "source": p.source}
        row.update({f"rho_{s}": x for s, x in zip(STATES, p.rho_inf)})
        rows.append(row)
    return rows


SWEEP_COLUMNS = ["beta", "gamma", "u", "v", "source"] + [f"rho_{s}" for s in STATES]
GAMMA_COLUMNS = ["gamma", "u", "v", "beta_c_theory", "beta_c_mmc", "beta_c_sim", "grid_step"]
RATIO_COLUMNS = ["ratio", "u", "v", "gamma", "beta_c_theory", "beta_c_mmc", "beta_c_sim", "grid_step"]


def temporal_rows(mmc_series, mc_series):
    rows = []
    for i, t in enumerate(mmc_series.t.tolist()):
        row = {"t": t}
        row.update({f"mmc_{s}": x for s, x in zip(STATES, mmc_series.values[i].tolist())})
        row.update({f"mc_{s}": x for s, x in zip(STATES, mc_series.values[i].tolist())})
        row.update({f"mc_sd_{s}": x for s, x in zip(STATES, mc_series.sd[i].tolist())})
        rows.append(row)
    return rows


TEMPORAL_COLUMNS = (["t"] + [f"mmc_{s}" for s in STATES] + [f"mc_{s}" for s in STATES]
                    + [f"mc_sd_{s}" for s in STATES])


def write_metadata(path, items):
    """Plain ``key = value`` sidecar; values are written in insertion order."""
    items = dict(items)
    items.setdefault("software_version", __version__)
    with open(path, "w", newline="\n") as fh:
        for key, value in items.items():
            fh.write(f"{key} = {_cell(value)}\n")
