"""
scikit-learn style wrappers.

Each estimator is fitted on a network (a :class:`~sleepsis.graph.Graph`, a
square adjacency matrix, or a networkx graph) and exposes its results as
trailing-underscore attributes. ``get_params``/``set_params``/``clone`` work
as for any sklearn estimator.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .experiments import DETECTION_EPS, TAIL_FRACTION, find_threshold
from .graph import largest_real_eigenvalue
from .mmc import epidemic_threshold, initial_state, run_mmc, solve_equilibrium, state_fractions
from .montecarlo import RunConfig, run_ensemble
from .params import ModelParams
from .validation import check_graph


class MeanFieldSIS(TransformerMixin, BaseEstimator):
    """Microscopic Markov chain model of SIS spreading with sleep scheduling.

    Parameters
    ----------
    beta, gamma, u, v : float
        Infection, recovery, sleep and wake probabilities per step.
    tol : float
        Sup-norm tolerance of the equilibrium fixed-point iteration.
    max_iter : int
        Iteration cap for the equilibrium solver.

    Attributes
    ----------
    graph_ : Graph
    lambda_max_ : float
        Perron eigenvalue of the adjacency matrix.
    threshold_ : float
        Critical infection probability for this network and schedule.
    equilibrium_ : ndarray of shape (n_nodes, 4)
        Per-node stationary probabilities of US, AS, UI, AI.
    fractions_ : Fractions
        Population-level equilibrium.
    """

    def __init__(self, beta=0.5, gamma=0.3, u=0.3, v=0.7, tol=1e-10, max_iter=200_000):
        self.beta = beta
        self.gamma = gamma
        self.u = u
        self.v = v
        self.tol = tol
        self.max_iter = max_iter

    def _model_params(self):
        return ModelParams(self.beta, self.gamma, self.u, self.v)

    def fit(self, X, y=None):
        params = self._model_params()
        self.graph_ = check_graph(X)
        self.lambda_max_ = largest_real_eigenvalue(self.graph_).lambda_max
        self.threshold_ = epidemic_threshold(self.lambda_max_, params.gamma, params.u, params.v)
        self.equilibrium_ = solve_equilibrium(self.graph_, params, self.tol, self.max_iter)
        self.fractions_ = state_fractions(self.equilibrium_)
        return self

    def transform(self, X):
        """Per-node equilibrium probabilities for the network ``X``."""
        check_is_fitted(self, "equilibrium_")
        g = check_graph(X)
        if g == self.graph_:
            return self.equilibrium_.copy()
        return solve_equilibrium(g, self._model_params(), self.tol, self.max_iter)

    def simulate(self, steps, infected=0.01, settle_tol=0.0):
        """Fraction trajectory on the fitted network from the expected
        occupancy with per-node infection probability ``infected``."""
        check_is_fitted(self, "graph_")
        params = self._model_params()
        init = initial_state(self.graph_.n, params, infected)
        return run_mmc(self.graph_, params, init, max_steps=steps, settle_tol=settle_tol)


class MonteCarloSIS(BaseEstimator):
    """Ensemble of agent-based runs.

    Attributes
    ----------
    series_ : FractionSeries
        Ensemble-mean fractions with per-step standard deviations.
    fractions_ : Fractions
        Tail average of ``series_`` (last ``tail_fraction`` of the horizon).
    """

    def __init__(self, beta=0.5, gamma=0.3, u=0.3, v=0.7, steps=1000, seed_count=10, runs=50,
                 init_active="stationary", tail_fraction=TAIL_FRACTION, random_state=0, n_jobs=1):
        self.beta = beta
        self.gamma = gamma
        self.u = u
        self.v = v
        self.steps = steps
        self.seed_count = seed_count
        self.runs = runs
        self.init_active = init_active
        self.tail_fraction = tail_fraction
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        g = check_graph(X)
        cfg = RunConfig(ModelParams(self.beta, self.gamma, self.u, self.v), self.steps, self.seed_count,
                        self.random_state, self.init_active)
        self.series_ = run_ensemble(g, cfg, self.runs, self.random_state, self.n_jobs)
        self.fractions_ = self.series_.tail_mean(self.tail_fraction)
        return self


class ThresholdEstimator(BaseEstimator):
    """Epidemic threshold of a network, from theory and from a beta scan.

    ``source`` selects the scanned engine: ``"mc"`` (simulation), ``"mmc"``
    (mean-field equilibrium) or ``None`` (theory only).

    Attributes
    ----------
    lambda_max_ : float
    beta_c_theory_ : float
    estimate_ : ThresholdEstimate or None
    """

    def __init__(self, gamma=0.5, u=0.3, v=0.7, source="mc", beta_grid=None, detection_eps=DETECTION_EPS,
                 steps=1000, seed_count=10, runs=50, random_state=0, n_jobs=1):
        self.gamma = gamma
        self.u = u
        self.v = v
        self.source = source
        self.beta_grid = beta_grid
        self.detection_eps = detection_eps
        self.steps = steps
        self.seed_count = seed_count
        self.runs = runs
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        g = check_graph(X)
        ModelParams(0.0, self.gamma, self.u, self.v)
        self.lambda_max_ = largest_real_eigenvalue(g).lambda_max
        self.beta_c_theory_ = epidemic_threshold(self.lambda_max_, self.gamma, self.u, self.v)
        self.estimate_ = None
        if self.source is not None:
            cfg = RunConfig(ModelParams(0.0, self.gamma, self.u, self.v), self.steps, self.seed_count,
                            self.random_state)
            self.estimate_ = find_threshold(
                g, self.gamma, self.u, self.v, cfg, beta_grid=self.beta_grid, lambda_max=self.lambda_max_,
                runs=self.runs, base_seed=self.random_state, detection_eps=self.detection_eps,
                source=self.source, n_jobs=self.n_jobs,
            )
        return self

    def predict(self, X):
        """1 where the infection probability in ``X`` exceeds the theoretical
        threshold (persistence), else 0."""
        check_is_fitted(self, "beta_c_theory_")
        betas = np.asarray(X, dtype=float).reshape(len(X), -1)[:, 0]
        return (betas > self.beta_c_theory_).astype(int)
