"""Coefficient estimators for excess-return factor regressions.

Four fit types over the same design matrix:

* OLS, solved through an orthogonal decomposition of X;
* Gaussian MLE, solved through the normal equations (the two must agree
  to machine precision -- a cheap cross-check the tests lean on);
* conjugate Bayes: posterior mean (X'X + V)^-1 (X'X theta_mle + V theta0)
  under a normal-inverse-gamma prior with precision matrix V;
* robust Bayes under a Cauchy g-prior: the posterior mean collapses to
  a data-adaptive blend  w * theta_ols + (1 - w) * theta0  with
  w = 1 / (1 + sqrt(g) * ||y - X theta_ols||).

Plus the two standard g-selection rules (benchmark g = max(n, p^2) and
local empirical Bayes g = max(F - 1, 0)) and the empirical prior mean
(the OLS estimate from an earlier window of equal size).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dataset import AlignedPanel, FactorSeries, Identity
from .errors import DomainError, EstimationError

# Reciprocal-condition floor below which a design is reported as collinear.
RCOND_FLOOR = 1e-12


class ModelSpec(enum.Enum):
    """Which factor regression to fit."""

    CAPM = "capm"
    FAMA_FRENCH3 = "ff3"

    @property
    def n_coefficients(self) -> int:
        return 2 if self is ModelSpec.CAPM else 4

    @property
    def coefficient_names(self) -> tuple[str, ...]:
        if self is ModelSpec.CAPM:
            return ("alpha", "beta_mkt")
        return ("alpha", "beta_mkt", "beta_smb", "beta_hml")


class Method(enum.Enum):
    OLS = "ols"
    MLE = "mle"
    CONJUGATE_BAYES = "conjugate-bayes"
    ROBUST_BAYES = "robust-bayes"


class GRule(enum.Enum):
    """How the prior precision scalar g is chosen."""

    BENCHMARK = "benchmark"
    LOCAL_EMPIRICAL_BAYES = "leb"
    FIXED = "fixed"


@dataclass(frozen=True)
class DesignSystem:
    """Response vector and design matrix for one stock's regression."""

    y: np.ndarray
    X: np.ndarray

    def __post_init__(self) -> None:
        y = np.array(self.y, dtype=float)
        X = np.array(self.X, dtype=float)
        y.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        if y.ndim != 1 or X.ndim != 2 or X.shape[0] != y.size:
            raise EstimationError(f"design shapes do not align: y {y.shape}, X {X.shape}")
        if X.shape[0] <= X.shape[1]:
            raise EstimationError(
                f"insufficient observations: n={X.shape[0]} must exceed p={X.shape[1]}"
            )
        if not np.all(X[:, 0] == 1.0):
            raise EstimationError("design matrix must carry an all-ones intercept column first")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class FitResult:
    """Estimated coefficients plus the residual bookkeeping every
    downstream consumer needs (rss for F-tests, sigma2 for likelihoods,
    the shrinkage weight for robust-Bayes reporting)."""

    theta: np.ndarray
    residuals: np.ndarray
    rss: float
    sigma2_mle: float
    method: Method
    weight_w: float | None = None

    def __post_init__(self) -> None:
        theta = np.array(self.theta, dtype=float)
        residuals = np.array(self.residuals, dtype=float)
        theta.setflags(write=False)
        residuals.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "residuals", residuals)
        if (self.weight_w is not None) != (self.method is Method.ROBUST_BAYES):
            raise EstimationError("weight_w is recorded exactly for robust-Bayes fits")


@dataclass(frozen=True)
class PriorSpec:
    """Prior mean vector and the rule producing the precision scalar g."""

    theta0: np.ndarray
    g_rule: GRule = GRule.BENCHMARK
    fixed_g: float | None = None

    def __post_init__(self) -> None:
        theta0 = np.array(self.theta0, dtype=float)
        theta0.setflags(write=False)
        object.__setattr__(self, "theta0", theta0)
        if theta0.ndim != 1:
            raise EstimationError("prior mean must be a vector")
        if self.g_rule is GRule.FIXED and (self.fixed_g is None or self.fixed_g < 0):
            raise DomainError("fixed g rule needs a nonnegative g value")


def factor_matrix(factors: FactorSeries, model: ModelSpec) -> np.ndarray:
    """Design matrix [1, mktrf] or [1, mktrf, smb, hml] over the factor months."""
    ones = np.ones(len(factors.months))
    if model is ModelSpec.CAPM:
        return np.column_stack([ones, factors.mktrf])
    return np.column_stack([ones, factors.mktrf, factors.smb, factors.hml])


def build_design(panel: AlignedPanel, stock: Identity | str, model: ModelSpec) -> DesignSystem:
    """Regression system for one stock: y = its excess returns, X = factors."""
    y = panel.stock_excess(stock)
    X = factor_matrix(panel.factors, model)
    if X.shape[0] <= X.shape[1]:
        raise EstimationError(
            f"insufficient observations: n={X.shape[0]} months for p={X.shape[1]} coefficients"
        )
    return DesignSystem(y, X)


def intercept_only(design: DesignSystem) -> DesignSystem:
    """The nested intercept-only system over the same observations."""
    return DesignSystem(design.y, np.ones((design.n, 1)))


def _check_conditioning(singular_values: np.ndarray) -> None:
    if singular_values[0] <= 0.0 or singular_values[-1] / singular_values[0] < RCOND_FLOOR:
        raise EstimationError("collinear design: factor columns are linearly dependent")


def _finish(design: DesignSystem, theta: np.ndarray, method: Method, weight_w: float | None = None) -> FitResult:
    residuals = design.y - design.X @ theta
    rss = float(residuals @ residuals)
    return FitResult(theta, residuals, rss, rss / design.n, method, weight_w)


def ols_fit(design: DesignSystem) -> FitResult:
    """Least-squares coefficients via SVD; residuals come out orthogonal
    to every design column."""
    theta, _, _, singular = np.linalg.lstsq(design.X, design.y, rcond=None)
    _check_conditioning(singular)
    return _finish(design, theta, Method.OLS)


def mle_fit(design: DesignSystem) -> FitResult:
    """Gaussian maximum likelihood: the normal equations X'X theta = X'y,
    with sigma2 = rss / n (the likelihood's own maximizer, not the
    unbiased n - p variant)."""
    _check_conditioning(np.linalg.svd(design.X, compute_uv=False))
    xtx = design.X.T @ design.X
    theta = np.linalg.solve(xtx, design.X.T @ design.y)
    return _finish(design, theta, Method.MLE)


def conjugate_bayes_fit(design: DesignSystem, theta0: np.ndarray, precision: np.ndarray) -> FitResult:
    """Posterior mean under the conjugate normal-inverse-gamma prior with
    mean ``theta0`` and precision matrix ``precision``."""
    theta0 = np.asarray(theta0, dtype=float)
    precision = np.asarray(precision, dtype=float)
    p = design.p
    if theta0.shape != (p,):
        raise EstimationError(f"prior mean has shape {theta0.shape}, expected ({p},)")
    if precision.shape != (p, p):
        raise EstimationError(f"prior precision has shape {precision.shape}, expected ({p}, {p})")
    if not np.allclose(precision, precision.T, atol=1e-10 * (1.0 + np.abs(precision).max())):
        raise EstimationError("prior precision matrix must be symmetric")
    eigenvalues = np.linalg.eigvalsh(precision)
    if eigenvalues[0] < -1e-10 * max(1.0, eigenvalues[-1]):
        raise EstimationError("prior precision matrix must be nonnegative definite")
    xtx = design.X.T @ design.X
    theta_mle = mle_fit(design).theta
    posterior_info = xtx + precision
    singular = np.linalg.svd(posterior_info, compute_uv=False)
    if singular[0] <= 0.0 or singular[-1] / singular[0] < RCOND_FLOOR:
        raise EstimationError("posterior information matrix X'X + V is singular")
    theta = np.linalg.solve(posterior_info, xtx @ theta_mle + precision @ theta0)
    return _finish(design, theta, Method.CONJUGATE_BAYES)


def robust_bayes_fit(design: DesignSystem, prior: PriorSpec, g: float) -> FitResult:
    """Cauchy g-prior posterior mean: shrink the OLS estimate toward the
    prior mean, harder for larger g and larger OLS residual norm.

    theta = w * theta_ols + (1 - w) * theta0,
    w = 1 / (1 + sqrt(g) * ||y - X theta_ols||_2).
    """
    if g < 0:
        raise DomainError(f"prior precision g must be nonnegative, got {g}")
    if prior.theta0.shape != (design.p,):
        raise EstimationError(
            f"prior mean has shape {prior.theta0.shape}, expected ({design.p},)"
        )
    base = ols_fit(design)
    residual_norm = math.sqrt(base.rss)
    weight = 1.0 / (1.0 + math.sqrt(g) * residual_norm)
    theta = weight * base.theta + (1.0 - weight) * prior.theta0
    return _finish(design, theta, Method.ROBUST_BAYES, weight_w=weight)


def select_g(rule: GRule, n: int, p: int, f_stat: float | None = None, fixed_g: float | None = None) -> float:
    """Resolve the prior precision scalar.

    Benchmark: max(n, p^2). Local empirical Bayes: max(F - 1, 0) where F
    is the joint slope-significance statistic. Fixed: the caller's value.
    """
    if rule is GRule.BENCHMARK:
        return float(max(n, p * p))
    if rule is GRule.LOCAL_EMPIRICAL_BAYES:
        if f_stat is None:
            raise DomainError("local empirical Bayes needs the slope F-statistic")
        return max(f_stat - 1.0, 0.0)
    if fixed_g is None:
        raise DomainError("fixed g rule needs a g value")
    if fixed_g < 0:
        raise DomainError(f"prior precision g must be nonnegative, got {fixed_g}")
    return float(fixed_g)


def empirical_prior_mean(early: AlignedPanel, stock: Identity | str, model: ModelSpec) -> np.ndarray:
    """Prior mean from history: the OLS estimate on the earlier window."""
    return ols_fit(build_design(early, stock, model)).theta


def slope_f_statistic(design: DesignSystem) -> float:
    """F-statistic testing all slope coefficients jointly against the
    intercept-only model (q = p - 1 restrictions)."""
    from .diagnostics import f_statistic

    full = ols_fit(design)
    restricted = ols_fit(intercept_only(design))
    return f_statistic(full, restricted, design.n, design.p, design.p - 1)


def fit_design(
    design: DesignSystem,
    method: Method,
    prior: PriorSpec | None = None,
) -> FitResult:
    """Dispatch one fit on a prepared design.

    Bayesian methods need a prior; its g is resolved here. For the
    conjugate method the precision matrix is g * X'X, so the posterior
    mean is the (1 + g)^-1 (theta_mle + g * theta0) blend.
    """
    if method is Method.OLS:
        return ols_fit(design)
    if method is Method.MLE:
        return mle_fit(design)
    if prior is None:
        raise EstimationError(f"method {method.value!r} needs a prior specification")
    if prior.g_rule is GRule.LOCAL_EMPIRICAL_BAYES:
        if ols_fit(design).rss == 0.0:
            # Perfect fit: F is undefined but the data term dominates any
            # finite prior, so g = 0 gives the right degenerate answer.
            g = 0.0
        else:
            g = select_g(prior.g_rule, design.n, design.p, f_stat=slope_f_statistic(design))
    else:
        g = select_g(prior.g_rule, design.n, design.p, fixed_g=prior.fixed_g)
    if method is Method.ROBUST_BAYES:
        return robust_bayes_fit(design, prior, g)
    if method is Method.CONJUGATE_BAYES:
        precision = g * (design.X.T @ design.X)
        return conjugate_bayes_fit(design, prior.theta0, precision)
    raise EstimationError(f"unknown method {method!r}")


def fit_stock(
    panel: AlignedPanel,
    stock: Identity | str,
    model: ModelSpec,
    method: Method,
    prior_panel: AlignedPanel | None = None,
    g_rule: GRule = GRule.BENCHMARK,
    fixed_g: float | None = None,
) -> FitResult:
    """Fit one stock on a panel; Bayesian prior means come from the OLS
    estimate of the same stock on ``prior_panel``."""
    design = build_design(panel, stock, model)
    if method in (Method.OLS, Method.MLE):
        return fit_design(design, method)
    if prior_panel is None:
        raise EstimationError(f"method {method.value!r} needs a prior panel")
    theta0 = empirical_prior_mean(prior_panel, stock, model)
    return fit_design(design, method, PriorSpec(theta0, g_rule, fixed_g))
