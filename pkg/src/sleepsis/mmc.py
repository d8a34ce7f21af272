"""
Microscopic Markov chain (MMC) engine for sleep-scheduled SIS.

A state is an ``(n, 4)`` float array; row ``i`` holds node ``i``'s
probabilities of being in US, AS, UI, AI (columns in that order, see
:data:`US`, :data:`AS`, :data:`UI`, :data:`AI`).

Infection pressure uses the static adjacency. Sleeping neighbours are already
excluded because only the AI probability enters the escape product.
"""
import math

import numpy as np

from .exceptions import ConvergenceError, DegenerateSchedulingError, ValidationError
from .series import Fractions, FractionSeries
from .validation import check_graph, check_params, check_state

US, AS, UI, AI = 0, 1, 2, 3

#: Threshold reported when the graph has no edges: no beta can sustain spreading.
NO_EPIDEMIC = math.inf


def stationary_active_fraction(params):
    """Long-run share of active nodes under the two-state sleep chain, ``v / (u + v)``."""
    params = check_params(params)
    return params.v / (params.u + params.v)


def escape_probability(g, p_ai, beta):
    """Probability that each node is infected by none of its neighbours.

    ``q_i = prod_{j in N(i)} (1 - beta * p_ai[j])``; isolated nodes get 1.
    """
    p_ai = np.asarray(p_ai, dtype=float)
    if p_ai.shape != (g.n,):
        raise ValidationError(f"p_ai must have shape ({g.n},), got {p_ai.shape}")
    q = np.ones(g.n)
    if g.n_edges == 0:
        return q
    factors = 1.0 - beta * p_ai[g.indices]
    starts = g.indptr[:-1]
    has_nb = g.degrees > 0
    # reduceat misbehaves on empty segments, so only reduce nonempty rows
    q[has_nb] = np.multiply.reduceat(factors, starts[has_nb])
    return q


def mmc_step(g, state, params):
    """Advance every node's four-state distribution by one time step."""
    b, gm, u, v = params.beta, params.gamma, params.u, params.v
    p_us, p_as, p_ui, p_ai = state.T
    q = escape_probability(g, p_ai, b)
    escaped = p_as * q
    caught = p_as * (1.0 - q)
    recovered = p_ai * gm
    stays = p_ai * (1.0 - gm)
    out = np.empty_like(state)
    out[:, US] = p_us * (1.0 - v) + recovered * u + escaped * u
    out[:, AS] = p_us * v + recovered * (1.0 - u) + escaped * (1.0 - u)
    out[:, UI] = p_ui * (1.0 - v) + stays * u + caught * u
    out[:, AI] = p_ui * v + stays * (1.0 - u) + caught * (1.0 - u)
    return out


def state_fractions(state):
    """Population fractions: column means of the per-node state."""
    return Fractions(*map(float, np.asarray(state).mean(axis=0)))


def initial_state(n, params, infected=0.01, active=None):
    """Expected initial occupancy: each node infected with probability
    ``infected`` (scalar or per-node array) and, independently, active with
    probability ``active`` (default: the stationary share)."""
    a = stationary_active_fraction(params) if active is None else float(active)
    f = np.broadcast_to(np.asarray(infected, dtype=float), (n,))
    if np.any((f < 0) | (f > 1)):
        raise ValidationError("infected probabilities must lie in [0, 1]")
    state = np.empty((n, 4))
    state[:, US] = (1 - f) * (1 - a)
    state[:, AS] = (1 - f) * a
    state[:, UI] = f * (1 - a)
    state[:, AI] = f * a
    return state


def run_mmc(g, params, init, max_steps=10_000, settle_tol=1e-9, return_state=False):
    """Iterate :func:`mmc_step`, recording fractions from ``t = 0``.

    Stops once the largest per-node change between consecutive steps falls
    below ``settle_tol``; ``settle_tol = 0`` disables early stopping. The
    returned series has ``settled=False`` if the cap was hit first.
    """
    g = check_graph(g)
    params = check_params(params)
    state = check_state(init, g.n)
    if max_steps < 0:
        raise ValidationError("max_steps must be non-negative")
    if settle_tol < 0:
        raise ValidationError("settle_tol must be non-negative")
    rows = [state.mean(axis=0)]
    settled = False
    for _ in range(max_steps):
        nxt = mmc_step(g, state, params)
        rows.append(nxt.mean(axis=0))
        change = np.max(np.abs(nxt - state))
        state = nxt
        if change < settle_tol:
            settled = True
            break
    series = FractionSeries(np.arange(len(rows)), np.array(rows), settled=settled)
    if return_state:
        return series, state
    return series


def equilibrium_state(p_ai, q, params):
    """Fill the four-state equilibrium from node AI probabilities and escape
    probabilities (persistence branch)."""
    if params.v == 0.0:
        raise DegenerateSchedulingError("v = 0: equilibrium requires the ratio u/v")
    a = params.v / (params.u + params.v)
    ratio = params.u / params.v
    denom = 1.0 - q + params.gamma
    with np.errstate(invalid="ignore", divide="ignore"):
        p_as = np.where(denom > 0, a * params.gamma / denom, a)
    state = np.empty((len(p_ai), 4))
    state[:, AI] = p_ai
    state[:, UI] = ratio * p_ai
    state[:, AS] = p_as
    state[:, US] = ratio * p_as
    return state


def solve_equilibrium(g, params, tol=1e-10, max_iter=200_000):
    """Stationary MMC state by fixed-point iteration on the AI probabilities.

    Iterates ``p_ai <- a (1 - q) / (1 - q + gamma)`` with ``a = v / (u + v)``
    and ``q`` the escape probabilities, starting from ``p_ai = a``. The map is
    monotone, so this start converges to the largest fixed point: the endemic
    state above threshold and the disease-free state below it.

    Raises
    ------
    DegenerateSchedulingError
        If ``v = 0``.
    ConvergenceError
        If the sup-norm update stays above ``tol`` for ``max_iter`` iterations;
        ``last_iterate`` is the full state at that point.
    """
    g = check_graph(g)
    params = check_params(params)
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if params.v == 0.0:
        raise DegenerateSchedulingError("v = 0: equilibrium requires the ratio u/v")
    a = params.v / (params.u + params.v)
    gamma = params.gamma
    p_ai = np.full(g.n, a)
    change = np.inf
    for _ in range(max_iter):
        q = escape_probability(g, p_ai, params.beta)
        inf = 1.0 - q
        denom = inf + gamma
        with np.errstate(invalid="ignore", divide="ignore"):
            new = np.where(denom > 0, a * inf / denom, 0.0)
        change = np.max(np.abs(new - p_ai))
        p_ai = new
        if change < tol:
            q = escape_probability(g, p_ai, params.beta)
            return equilibrium_state(p_ai, q, params)
    q = escape_probability(g, p_ai, params.beta)
    raise ConvergenceError(
        f"equilibrium iteration did not settle below {tol:g} in {max_iter} iterations",
        last_iterate=equilibrium_state(p_ai, q, params),
        residual=float(change),
    )


def epidemic_threshold(lambda_max, gamma, u, v):
    """Critical infection probability ``(1 + u/v) * gamma / lambda_max``.

    Returns :data:`NO_EPIDEMIC` (``inf``) when ``lambda_max == 0``.
    """
    if v <= 0:
        raise DegenerateSchedulingError("v = 0: threshold requires the ratio u/v")
    if lambda_max < 0:
        raise ValidationError("lambda_max must be non-negative")
    if not 0.0 <= gamma <= 1.0:
        raise ValidationError(f"gamma must lie in [0, 1], got {gamma}")
    if lambda_max == 0:
        return NO_EPIDEMIC
    return (1.0 + u / v) * gamma / lambda_max
