"""
Agent-based simulation of SIS spreading with probabilistic sleep scheduling.

Node states are small integers ``2 * infected + active``::

    US = 0, AS = 1, UI = 2, AI = 3

One synchronous step has two phases, both decided from the time-t states:

1. infection/recovery: an AS node with ``k`` AI neighbours becomes infected
   with probability ``1 - (1 - beta)**k``; an AI node recovers with
   probability ``gamma``; sleeping nodes are untouched.
2. scheduling: an active node falls asleep with probability ``u``, a
   sleeping one wakes with probability ``v``; the infection label from phase
   1 is carried through.

Populations may carry a leading replica axis, ``states.shape == (R, n)``,
which :func:`mc_step` advances in one vectorised call.
"""
import enum
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .exceptions import ValidationError
from .series import FractionSeries
from .validation import check_count, check_graph, check_params

INIT_MODES = ("stationary", "all_active")


class NodeState(enum.IntEnum):
    US = 0
    AS = 1
    UI = 2
    AI = 3


@dataclass(frozen=True)
class AgentPopulation:
    states: np.ndarray
    step: int = 0

    def fractions(self):
        """Share of nodes in each state, shape ``(..., 4)``."""
        return state_counts(self.states) / self.states.shape[-1]


@dataclass(frozen=True)
class RunConfig:
    """One simulation run.

    ``seed_count`` nodes start infected; 0 gives a disease-free run.
    ``init_active`` is ``"stationary"`` (each node active with probability
    ``v / (u + v)``) or ``"all_active"``.
    """

    params: object
    steps: int = 1000
    seed_count: int = 10
    rng_seed: int = 0
    init_active: str = "stationary"

    def __post_init__(self):
        object.__setattr__(self, "params", check_params(self.params))
        check_count(self.steps, "steps", 0)
        check_count(self.seed_count, "seed_count", 0)
        check_count(self.rng_seed, "rng_seed", 0)
        if self.init_active not in INIT_MODES:
            raise ValidationError(f"init_active must be one of {INIT_MODES}, got {self.init_active!r}")

    def validate_for(self, g):
        if self.seed_count > g.n:
            raise ValidationError(f"seed_count={self.seed_count} exceeds node count {g.n}")
        return self


def derive_seed(base_seed, index):
    """64-bit seed for ensemble member ``index``; a pure function of its inputs."""
    ss = np.random.SeedSequence([int(base_seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def state_counts(states):
    return np.stack([(states == s).sum(axis=-1) for s in range(4)], axis=-1)


def init_population(g, cfg, rng):
    cfg.validate_for(g)
    a = cfg.params.active_fraction
    if cfg.init_active == "stationary":
        active = rng.random(g.n) < a
    else:
        active = np.ones(g.n, dtype=bool)
    infected = np.zeros(g.n, dtype=bool)
    if cfg.seed_count:
        infected[rng.choice(g.n, size=cfg.seed_count, replace=False)] = True
    return AgentPopulation((2 * infected + active).astype(np.int8), 0)


def _transition(adj, states, params, uniforms):
    """Apply one step given pre-drawn uniforms of shape ``(2,) + states.shape``."""
    infected = states >= 2
    active = (states & 1).astype(bool)
    ai = (states == NodeState.AI).astype(float)
    k = adj @ ai if ai.ndim == 1 else (adj @ ai.T).T
    p_inf = 1.0 - np.power(1.0 - params.beta, k)
    draw = uniforms[0]
    caught = (states == NodeState.AS) & (draw < p_inf)
    healed = (states == NodeState.AI) & (draw < params.gamma)
    infected = (infected | caught) & ~healed
    flip = uniforms[1]
    active = np.where(active, flip >= params.u, flip < params.v)
    return (2 * infected + active).astype(np.int8)


def mc_step(g, pop, params, rng):
    """One synchronous step of every node (and every replica, if batched)."""
    params = check_params(params)
    if pop.states.shape[-1] != g.n:
        raise ValidationError(f"population has {pop.states.shape[-1]} nodes, graph has {g.n}")
    uniforms = rng.random((2,) + pop.states.shape)
    return AgentPopulation(_transition(g.adjacency, pop.states, params, uniforms), pop.step + 1)


def _simulate(g, params, states, gens, steps, stop_when_extinct=False):
    """Advance a batch of runs, run ``r`` drawing only from ``gens[r]``.

    Returns state counts of shape ``(R, steps + 1, 4)``. With
    ``stop_when_extinct`` the loop ends once no run has an infected node and
    the remaining rows are left zero; only the infected columns are then
    meaningful.
    """
    adj = g.adjacency
    n = g.n
    counts = np.zeros((len(gens), steps + 1, 4), dtype=np.int64)
    counts[:, 0] = state_counts(states)
    for t in range(1, steps + 1):
        if stop_when_extinct and not (states >= 2).any():
            break
        uniforms = np.stack([gen.random((2, n)) for gen in gens], axis=1)
        states = _transition(adj, states, params, uniforms)
        counts[:, t] = state_counts(states)
    return counts


def _run_block(g, cfg, seeds, stop_when_extinct=False):
    gens = [np.random.default_rng(s) for s in seeds]
    states = np.stack([init_population(g, cfg, gen).states for gen in gens])
    return _simulate(g, cfg.params, states, gens, cfg.steps, stop_when_extinct)


def run_mc(g, cfg):
    """Single seeded run; fractions at every step ``0..cfg.steps``."""
    g = check_graph(g)
    cfg.validate_for(g)
    counts = _run_block(g, cfg, [cfg.rng_seed])[0]
    return FractionSeries(np.arange(cfg.steps + 1), counts / g.n)


def _ensemble_counts(g, cfg, runs, base_seed, n_jobs, stop_when_extinct=False):
    check_count(runs, "runs", 1)
    seeds = [derive_seed(base_seed, i) for i in range(runs)]
    if n_jobs in (None, 1) or runs == 1:
        return _run_block(g, cfg, seeds, stop_when_extinct)
    size = -(-runs // min(runs, abs(n_jobs) * 4))
    chunks = [seeds[i:i + size] for i in range(0, runs, size)]
    blocks = Parallel(n_jobs=n_jobs)(
        delayed(_run_block)(g, cfg, chunk, stop_when_extinct) for chunk in chunks
    )
    return np.concatenate(blocks)


def run_ensemble(g, cfg, runs=50, base_seed=0, n_jobs=1):
    """Mean and per-step sample standard deviation over ``runs`` independent runs.

    Run ``i`` is seeded with ``derive_seed(base_seed, i)``; ``cfg.rng_seed`` is
    ignored. The output does not depend on ``n_jobs``.
    """
    g = check_graph(g)
    cfg.validate_for(g)
    frac = _ensemble_counts(g, cfg, runs, base_seed, n_jobs) / g.n
    sd = frac.std(axis=0, ddof=1) if runs > 1 else np.zeros(frac.shape[1:])
    return FractionSeries(np.arange(cfg.steps + 1), frac.mean(axis=0), sd=sd)


def ensemble_tail_infected(g, cfg, runs=50, base_seed=0, tail_fraction=0.25, n_jobs=1):
    """Ensemble-mean infected fraction over the tail of the horizon.

    Equal to ``run_ensemble(...).tail_mean(tail_fraction).infected`` but stops
    as soon as every run has gone extinct.
    """
    g = check_graph(g)
    cfg.validate_for(g)
    counts = _ensemble_counts(g, cfg, runs, base_seed, n_jobs, stop_when_extinct=True)
    infected = (counts[..., 2] + counts[..., 3]).mean(axis=0) / g.n
    k = max(1, int(round(len(infected) * tail_fraction)))
    return float(infected[-k:].mean())
