"""Linear mixed-effects regression by maximum likelihood.

Model: y = X beta + Z b + eps, with independent Gaussian random effects
grouped by factors (diagonal covariance: every random intercept/slope has
its own variance, no cross-correlations) and iid Gaussian residuals.

The deviance is profiled over beta and sigma^2 following the penalized
least-squares formulation: writing b = sigma * Lambda(theta) u with
u ~ N(0, I) and Lambda diagonal in the relative standard deviations theta,

    r2(theta) = min_{u, beta} ||y - X beta - Z Lambda u||^2 + ||u||^2
    deviance(theta) = log det(Lambda' Z'Z Lambda + I)
                      + n (1 + log(2 pi r2(theta) / n))

and the ML log-likelihood is -deviance/2 with sigma2 = r2/n. theta is
optimized by a bounded derivative-free coordinate search over log-spaced
values (with an explicit boundary candidate at 0), restarting from 0.1 and
1.0; accepted steps never increase the deviance. The inner solve exploits
grouping-factor sparsity through a sparse LU of the (q x q) system.

ML (not REML) throughout: log-likelihood differences between models with
nested fixed effects are only meaningful under ML.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import splu
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

__all__ = [
    "RandomTerm",
    "ModelSpec",
    "FittedModel",
    "MixedEffectsRegressor",
    "CollinearPredictorsError",
    "ModelMismatchError",
    "fit_model",
    "predict",
    "residual_stats",
    "delta_ll",
    "ResidualStats",
]

INTERCEPT = "(Intercept)"

_LOG_2PI = math.log(2.0 * math.pi)
_THETA_FLOOR = 1e-8  # lower edge of the log-spaced line search


class CollinearPredictorsError(ValueError):
    def __init__(self, columns: Sequence[str]):
        self.columns = tuple(columns)
        super().__init__(
            f"fixed-effect design is rank deficient; collinear column(s): {list(columns)}"
        )


class ModelMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class RandomTerm:
    """Random effects grouped by one factor: an optional intercept plus
    slopes over named predictor columns, all mutually uncorrelated."""

    factor: str
    columns: tuple[str, ...] = ()
    intercept: bool = True

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        if not self.intercept and not self.columns:
            raise ValueError(f"random term for {self.factor!r} has no effects")

    @property
    def effects(self) -> tuple[str, ...]:
        return ((INTERCEPT,) if self.intercept else ()) + self.columns

    @property
    def signature(self) -> tuple:
        return (self.factor, self.intercept, self.columns)


@dataclass(frozen=True)
class ModelSpec:
    """A regression specification: fixed-effect columns plus random terms.

    include_word_intercept=False drops every random term grouped by
    word_factor, which is how the refit-without-by-word-intercepts models
    are expressed.
    """

    fixed: tuple[str, ...]
    random: tuple[RandomTerm, ...] = ()
    include_word_intercept: bool = True
    word_factor: str = "word_type"

    def __post_init__(self):
        object.__setattr__(self, "fixed", tuple(self.fixed))
        object.__setattr__(self, "random", tuple(self.random))
        for term in self.random:
            missing = set(term.columns) - set(self.fixed)
            if missing:
                raise ValueError(
                    f"random slopes {sorted(missing)} for factor {term.factor!r} "
                    "are not among the fixed effects"
                )

    def effective_random(self) -> tuple[RandomTerm, ...]:
        if self.include_word_intercept:
            return self.random
        return tuple(t for t in self.random if t.factor != self.word_factor)

    def fingerprint(self) -> str:
        payload = repr(
            (self.fixed, tuple(t.signature for t in self.effective_random()))
        ).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


@dataclass
class _TermModes:
    term: RandomTerm
    levels: np.ndarray  # sorted level labels
    modes: np.ndarray  # (n_levels, n_effects), original response units


@dataclass
class FittedModel:
    """Immutable result of a mixed-model fit, sufficient for prediction on
    new data and for serialization."""

    fixed_names: tuple[str, ...]
    beta: np.ndarray
    theta: np.ndarray
    theta_labels: tuple[str, ...]
    sigma2: float
    loglik_nats: float
    converged: bool
    n_obs: int
    n_evals: int
    term_modes: tuple[_TermModes, ...]
    response_fingerprint: str
    spec_fingerprint: str = ""
    _level_lookup: list = field(default_factory=list, repr=False)

    @property
    def variance_components(self) -> dict[str, float]:
        """Random-effect variances (theta^2 * sigma2) keyed by factor:effect."""
        return {
            label: float(t * t * self.sigma2)
            for label, t in zip(self.theta_labels, self.theta)
        }

    def random_signature(self) -> tuple:
        return tuple(tm.term.signature for tm in self.term_modes)

    def _lookups(self) -> list[dict]:
        if not self._level_lookup:
            self._level_lookup = [
                {lvl: i for i, lvl in enumerate(tm.levels)} for tm in self.term_modes
            ]
        return self._level_lookup

    def to_dict(self) -> dict:
        return {
            "fixed_names": list(self.fixed_names),
            "beta": self.beta.tolist(),
            "theta": self.theta.tolist(),
            "theta_labels": list(self.theta_labels),
            "sigma2": self.sigma2,
            "loglik_nats": self.loglik_nats,
            "converged": self.converged,
            "n_obs": self.n_obs,
            "n_evals": self.n_evals,
            "response_fingerprint": self.response_fingerprint,
            "spec_fingerprint": self.spec_fingerprint,
            "terms": [
                {
                    "factor": tm.term.factor,
                    "intercept": tm.term.intercept,
                    "columns": list(tm.term.columns),
                    "levels": [_level_to_json(l) for l in tm.levels.tolist()],
                    "modes": tm.modes.tolist(),
                }
                for tm in self.term_modes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FittedModel":
        terms = tuple(
            _TermModes(
                term=RandomTerm(
                    factor=t["factor"],
                    columns=tuple(t["columns"]),
                    intercept=t["intercept"],
                ),
                levels=np.asarray(t["levels"], dtype=object),
                modes=np.asarray(t["modes"], dtype=float),
            )
            for t in data["terms"]
        )
        return cls(
            fixed_names=tuple(data["fixed_names"]),
            beta=np.asarray(data["beta"], dtype=float),
            theta=np.asarray(data["theta"], dtype=float),
            theta_labels=tuple(data["theta_labels"]),
            sigma2=data["sigma2"],
            loglik_nats=data["loglik_nats"],
            converged=data["converged"],
            n_obs=data["n_obs"],
            n_evals=data["n_evals"],
            term_modes=terms,
            response_fingerprint=data["response_fingerprint"],
            spec_fingerprint=data.get("spec_fingerprint", ""),
        )


def _level_to_json(level):
    return level.item() if hasattr(level, "item") else level


def response_fingerprint(y: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(y, dtype=float).tobytes()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Design assembly


class _Design:
    def __init__(
        self,
        X: np.ndarray,
        names: tuple[str, ...],
        y: np.ndarray,
        terms: Sequence[RandomTerm],
        groups: Mapping[str, np.ndarray],
    ):
        n = y.size
        self.X = X
        self.names = names
        self.y = y
        self.terms = tuple(terms)

        self.term_levels: list[np.ndarray] = []
        self.theta_labels: list[str] = []
        blocks = []  # (theta_idx, level_codes, values, n_levels)
        col_offset = 0
        self.block_layout: list[tuple[int, int, int]] = []  # (offset, n_levels, theta_idx)
        name_to_col = {nm: i for i, nm in enumerate(names)}
        for term in terms:
            if term.factor not in groups:
                raise ValueError(f"missing grouping factor {term.factor!r}")
            raw = np.asarray(groups[term.factor])
            if raw.shape != (n,):
                raise ValueError(
                    f"grouping factor {term.factor!r} has shape {raw.shape}, "
                    f"expected ({n},)"
                )
            levels, codes = np.unique(raw, return_inverse=True)
            self.term_levels.append(levels)
            for effect in term.effects:
                theta_idx = len(self.theta_labels)
                self.theta_labels.append(f"{term.factor}:{effect}")
                values = (
                    np.ones(n)
                    if effect == INTERCEPT
                    else X[:, name_to_col[effect]].copy()
                )
                blocks.append((theta_idx, codes, values, levels.size))
                self.block_layout.append((col_offset, levels.size, theta_idx))
                col_offset += levels.size

        self.q = col_offset
        self.n_theta = len(self.theta_labels)

        if self.q:
            rows = np.concatenate([np.arange(n)] * len(blocks))
            cols = np.concatenate(
                [off + blk[1] for (off, _, _), blk in zip(self.block_layout, blocks)]
            )
            data = np.concatenate([blk[2] for blk in blocks])
            Z = sp.csc_matrix((data, (rows, cols)), shape=(n, self.q))
            self.Z = Z
            self.col_theta = np.concatenate(
                [np.full(L, t) for (_, L, t) in self.block_layout]
            )
            ZtZ = (Z.T @ Z).tocoo()
            self._zz_rows = ZtZ.row
            self._zz_cols = ZtZ.col
            self._zz_data = ZtZ.data
            self.ZtX = np.asarray(Z.T @ X)
            self.Zty = np.asarray(Z.T @ y)
        else:
            self.Z = None

        self.XtX = X.T @ X
        self.Xty = X.T @ y
        self.yty = float(y @ y)
        self.n = n


@dataclass
class _Solution:
    deviance: float
    beta: np.ndarray
    u: np.ndarray | None
    pen_rss: float


def _solve_at(design: _Design, theta: np.ndarray) -> _Solution:
    n = design.n
    if design.q == 0:
        c, low = scipy.linalg.cho_factor(design.XtX)
        beta = scipy.linalg.cho_solve((c, low), design.Xty)
        rss = max(design.yty - beta @ design.Xty, 1e-300)
        dev = n * (1.0 + _LOG_2PI + math.log(rss / n))
        return _Solution(dev, beta, None, rss)

    lam = theta[design.col_theta]
    data = design._zz_data * lam[design._zz_rows] * lam[design._zz_cols]
    q = design.q
    diag = np.arange(q)
    A = sp.csc_matrix(
        (
            np.concatenate([data, np.ones(q)]),
            (
                np.concatenate([design._zz_rows, diag]),
                np.concatenate([design._zz_cols, diag]),
            ),
        ),
        shape=(q, q),
    )
    lu = splu(A, permc_spec="MMD_AT_PLUS_A")
    logdet = float(np.sum(np.log(np.abs(lu.U.diagonal()))))

    DZty = lam * design.Zty
    DZtX = lam[:, None] * design.ZtX
    sol_y = lu.solve(DZty)
    sol_X = lu.solve(DZtX)
    S = design.XtX - DZtX.T @ sol_X
    rhs = design.Xty - DZtX.T @ sol_y
    c, low = scipy.linalg.cho_factor(S)
    beta = scipy.linalg.cho_solve((c, low), rhs)
    u = sol_y - sol_X @ beta
    pen_rss = max(design.yty - beta @ design.Xty - u @ DZty, 1e-300)
    dev = logdet + n * (1.0 + _LOG_2PI + math.log(pen_rss / n))
    return _Solution(dev, beta, u, pen_rss)


# ---------------------------------------------------------------------------
# theta optimizer: monotone coordinate search, log-spaced with a zero snap.


class _EvalBudgetExceeded(Exception):
    pass


class _DevianceCache:
    def __init__(self, design: _Design, max_evals: int):
        self.design = design
        self.max_evals = max_evals
        self.n_evals = 0
        self._cache: dict[bytes, float] = {}

    def __call__(self, theta: np.ndarray) -> float:
        key = theta.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.n_evals >= self.max_evals:
            raise _EvalBudgetExceeded
        self.n_evals += 1
        dev = _solve_at(self.design, theta).deviance
        self._cache[key] = dev
        return dev


def _line_minimize(
    f: _DevianceCache,
    theta: np.ndarray,
    dev: float,
    j: int,
    maxiter: int,
    xatol: float,
) -> tuple[np.ndarray, float]:
    """Minimize the deviance over theta[j] >= 0: a bounded Brent search in
    log(theta[j]) plus an explicit candidate at the boundary 0."""
    zero = theta.copy()
    zero[j] = 0.0
    best_theta, best_dev = theta, dev
    d0 = f(zero)
    if d0 < best_dev:
        best_theta, best_dev = zero, d0

    hi = max(16.0, 64.0 * theta[j])
    lo_s, hi_s = math.log(_THETA_FLOOR), math.log(hi)

    def g(s: float) -> float:
        cand = theta.copy()
        cand[j] = math.exp(s)
        return f(cand)

    res = minimize_scalar(
        g,
        bounds=(lo_s, hi_s),
        method="bounded",
        options={"xatol": xatol, "maxiter": maxiter},
    )
    if res.fun < best_dev:
        best_theta = theta.copy()
        best_theta[j] = math.exp(res.x)
        best_dev = float(res.fun)
    return best_theta, best_dev


def _optimize_theta(
    design: _Design,
    restarts: Sequence[float],
    deviance_tol: float,
    max_cycles: int,
    ls_maxiter: int,
    ls_xatol: float,
    max_evals: int,
) -> tuple[np.ndarray, float, bool, int]:
    f = _DevianceCache(design, max_evals)
    best: tuple[np.ndarray, float, bool] | None = None
    for start in restarts:
        theta = np.full(design.n_theta, float(start))
        dev = math.inf
        try:
            dev = f(theta)
            converged = False
            for _ in range(max_cycles):
                dev_before = dev
                for j in range(design.n_theta):
                    theta, dev = _line_minimize(f, theta, dev, j, ls_maxiter, ls_xatol)
                if dev_before - dev < deviance_tol:
                    converged = True
                    break
        except _EvalBudgetExceeded:
            converged = False
        if best is None or dev < best[1]:
            best = (theta, dev, converged)
    assert best is not None
    return best[0], best[1], best[2], f.n_evals


# ---------------------------------------------------------------------------
# Estimator


class MixedEffectsRegressor(BaseEstimator, RegressorMixin):
    """Mixed-effects linear regression with diagonal random-effect
    covariance, fit by maximum likelihood.

    Parameters
    ----------
    random_terms : sequence of RandomTerm
        Grouping structure. Empty means ordinary least squares.
    fit_intercept : bool
        Prepend a global intercept column to the fixed design.
    restarts : sequence of float
        Initial values of every theta coordinate for each optimizer restart.
    """

    def __init__(
        self,
        random_terms: Sequence[RandomTerm] = (),
        fit_intercept: bool = True,
        deviance_tol: float = 1e-8,
        max_cycles: int = 100,
        restarts: Sequence[float] = (0.1, 1.0),
        line_search_maxiter: int = 60,
        line_search_xatol: float = 1e-9,
        max_evals: int = 100_000,
    ):
        self.random_terms = tuple(random_terms)
        self.fit_intercept = fit_intercept
        self.deviance_tol = deviance_tol
        self.max_cycles = max_cycles
        self.restarts = tuple(restarts)
        self.line_search_maxiter = line_search_maxiter
        self.line_search_xatol = line_search_xatol
        self.max_evals = max_evals

    # -- fitting ----------------------------------------------------------

    def fit(self, X, y, groups=None, feature_names=None):
        # zero-width X is legal: an intercept-only model
        X = check_array(X, ensure_2d=True, dtype=float, ensure_min_features=0)
        y = np.asarray(y, dtype=float).ravel()
        if y.size != X.shape[0]:
            raise ValueError("X and y disagree on the number of observations")
        if not np.all(np.isfinite(y)):
            raise ValueError("response contains non-finite values")

        if feature_names is None:
            feature_names = tuple(f"x{i}" for i in range(X.shape[1]))
        feature_names = tuple(feature_names)
        if len(feature_names) != X.shape[1]:
            raise ValueError("feature_names length != number of columns")

        if self.fit_intercept:
            X = np.column_stack([np.ones(X.shape[0]), X])
            feature_names = (INTERCEPT,) + feature_names

        n, p = X.shape
        if p == 0:
            raise ValueError("model has no fixed effects, not even an intercept")
        if n <= p:
            raise ValueError(f"need more observations ({n}) than fixed effects ({p})")
        _check_fixed_rank(X, feature_names)

        groups = {} if groups is None else dict(groups)
        design = _Design(X, feature_names, y, self.random_terms, groups)

        if design.n_theta == 0:
            sol = _solve_at(design, np.empty(0))
            theta, converged, n_evals = np.empty(0), True, 1
        else:
            theta, _, converged, n_evals = _optimize_theta(
                design,
                self.restarts,
                self.deviance_tol,
                self.max_cycles,
                self.line_search_maxiter,
                self.line_search_xatol,
                self.max_evals,
            )
            sol = _solve_at(design, theta)

        sigma2 = sol.pen_rss / n
        loglik = -0.5 * sol.deviance

        term_modes = []
        for t_idx, term in enumerate(design.terms):
            levels = design.term_levels[t_idx]
            modes = np.zeros((levels.size, len(term.effects)))
            term_modes.append(_TermModes(term=term, levels=levels, modes=modes))
        if sol.u is not None:
            # modes: b = lambda * u per column, reshaped per term/effect
            for t_idx, term in enumerate(design.terms):
                tm = term_modes[t_idx]
                for e_idx, effect in enumerate(term.effects):
                    block = _block_for(design, t_idx, e_idx)
                    offset, L, theta_idx = block
                    tm.modes[:, e_idx] = theta[theta_idx] * sol.u[offset : offset + L]

        self.n_features_in_ = len(feature_names) - (1 if self.fit_intercept else 0)
        self.feature_names_ = feature_names
        self.result_ = FittedModel(
            fixed_names=feature_names,
            beta=sol.beta,
            theta=theta,
            theta_labels=tuple(design.theta_labels),
            sigma2=float(sigma2),
            loglik_nats=float(loglik),
            converged=converged,
            n_obs=n,
            n_evals=n_evals,
            term_modes=tuple(term_modes),
            response_fingerprint=response_fingerprint(y),
        )
        if self.fit_intercept:
            self.intercept_ = float(sol.beta[0])
            self.coef_ = sol.beta[1:].copy()
        else:
            self.intercept_ = 0.0
            self.coef_ = sol.beta.copy()
        return self

    # -- prediction -------------------------------------------------------

    def predict(self, X, groups=None, mode="conditional"):
        check_is_fitted(self, "result_")
        X = check_array(X, ensure_2d=True, dtype=float, ensure_min_features=0)
        if self.fit_intercept:
            X = np.column_stack([np.ones(X.shape[0]), X])
        return predict(
            self.result_, X, self.feature_names_, groups=groups, mode=mode
        )


def _block_for(design: _Design, t_idx: int, e_idx: int) -> tuple[int, int, int]:
    flat = 0
    for i, term in enumerate(design.terms):
        for j, _ in enumerate(term.effects):
            if i == t_idx and j == e_idx:
                return design.block_layout[flat]
            flat += 1
    raise IndexError((t_idx, e_idx))


def _check_fixed_rank(X: np.ndarray, names: tuple[str, ...]) -> None:
    _, R, piv = scipy.linalg.qr(X, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0.0:
        raise CollinearPredictorsError(names)
    tol = d[0] * max(X.shape) * np.finfo(float).eps
    rank = int(np.sum(d > tol))
    if rank < X.shape[1]:
        raise CollinearPredictorsError([names[i] for i in sorted(piv[rank:])])


# ---------------------------------------------------------------------------
# Functional surface used by the pipeline


def fit_model(
    X: np.ndarray,
    feature_names: Sequence[str],
    y: np.ndarray,
    groups: Mapping[str, np.ndarray],
    spec: ModelSpec,
    **opts,
) -> FittedModel:
    """Fit a ModelSpec over a named design matrix. Columns are selected by
    spec.fixed; a global intercept is always included."""
    feature_names = tuple(feature_names)
    missing = set(spec.fixed) - set(feature_names)
    if missing:
        raise ValueError(f"spec references missing predictors: {sorted(missing)}")
    cols = [feature_names.index(nm) for nm in spec.fixed]
    est = MixedEffectsRegressor(random_terms=spec.effective_random(), **opts)
    est.fit(np.asarray(X)[:, cols], y, groups=groups, feature_names=spec.fixed)
    result = est.result_
    result.spec_fingerprint = spec.fingerprint()
    return result


def predict(
    model: FittedModel,
    X: np.ndarray,
    feature_names: Sequence[str],
    groups: Mapping[str, np.ndarray] | None = None,
    mode: str = "conditional",
) -> np.ndarray:
    """Predict from a fitted model. Marginal mode is X beta; conditional
    mode adds each observation's random-effect conditional modes, with
    unseen grouping levels contributing zero."""
    if mode not in ("marginal", "conditional"):
        raise ValueError(f"mode must be marginal or conditional, got {mode!r}")
    X = np.asarray(X, dtype=float)
    feature_names = tuple(feature_names)
    if INTERCEPT in model.fixed_names and INTERCEPT not in feature_names:
        X = np.column_stack([np.ones(X.shape[0]), X])
        feature_names = (INTERCEPT,) + feature_names
    missing = set(model.fixed_names) - set(feature_names)
    if missing:
        raise ValueError(f"missing predictor column(s): {sorted(missing)}")
    idx = [feature_names.index(nm) for nm in model.fixed_names]
    Xm = X[:, idx]
    yhat = Xm @ model.beta
    if mode == "marginal" or not model.term_modes:
        return yhat

    groups = {} if groups is None else groups
    name_to_col = {nm: i for i, nm in enumerate(feature_names)}
    for tm, lookup in zip(model.term_modes, model._lookups()):
        if tm.term.factor not in groups:
            raise ValueError(f"missing grouping factor {tm.term.factor!r}")
        raw = np.asarray(groups[tm.term.factor])
        if raw.shape != (X.shape[0],):
            raise ValueError(f"grouping factor {tm.term.factor!r} has wrong length")
        rows = np.array([lookup.get(v, -1) for v in raw.tolist()])
        known = rows >= 0
        for e_idx, effect in enumerate(tm.term.effects):
            vals = (
                np.ones(X.shape[0])
                if effect == INTERCEPT
                else X[:, name_to_col[effect]]
            )
            contrib = np.zeros(X.shape[0])
            contrib[known] = tm.modes[rows[known], e_idx] * vals[known]
            yhat = yhat + contrib
    return yhat


@dataclass(frozen=True)
class ResidualStats:
    residuals: np.ndarray
    mse: float
    sse_under: float
    sse_over: float


def residual_stats(
    model: FittedModel,
    X: np.ndarray,
    feature_names: Sequence[str],
    y: np.ndarray,
    groups: Mapping[str, np.ndarray] | None = None,
) -> ResidualStats:
    """Residuals against conditional predictions. Positive residuals are
    underpredictions (observed reading time above the model's prediction),
    negative are overpredictions."""
    y = np.asarray(y, dtype=float).ravel()
    yhat = predict(model, X, feature_names, groups=groups, mode="conditional")
    r = y - yhat
    return ResidualStats(
        residuals=r,
        mse=float(np.mean(r * r)) if r.size else 0.0,
        sse_under=float(np.sum(r[r > 0] ** 2)),
        sse_over=float(np.sum(r[r < 0] ** 2)),
    )


def delta_ll(full: FittedModel, baseline: FittedModel) -> float:
    """loglik(full) - loglik(baseline) for nested ML fits on the same data.

    Requires the same observations (checked by count and response
    fingerprint), baseline fixed effects nested in the full model's, and
    identical random structure; otherwise the difference is meaningless.
    """
    if full.n_obs != baseline.n_obs:
        raise ModelMismatchError(
            f"observation counts differ: {full.n_obs} vs {baseline.n_obs}"
        )
    if full.response_fingerprint != baseline.response_fingerprint:
        raise ModelMismatchError("models were fit to different response vectors")
    if not set(baseline.fixed_names) <= set(full.fixed_names):
        raise ModelMismatchError(
            "baseline fixed effects are not nested in the full model"
        )
    if full.random_signature() != baseline.random_signature():
        raise ModelMismatchError("random-effect structures differ")
    return float(full.loglik_nats - baseline.loglik_nats)
