"""Model-comparison harnesses: out-of-sample prediction (fit on the
early window, score on the late window) and per-stock leave-one-out
cross validation, both summarized as mean squared prediction errors.

A stock whose fit fails is excluded from the summary, never silently:
every report carries the exclusions alongside the per-stock errors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dataset import AlignedPanel, Identity
from .errors import DomainError, EstimationError, EvaluationError
from .estimators import (
    DesignSystem,
    GRule,
    Method,
    ModelSpec,
    PriorSpec,
    build_design,
    empirical_prior_mean,
    factor_matrix,
    fit_design,
)
from .returns import ReturnKind


class Protocol(enum.Enum):
    OUT_OF_SAMPLE = "oos"
    LOOCV = "loocv"


@dataclass(frozen=True)
class StockMSE:
    identity: Identity
    mse: float
    n_predictions: int


@dataclass(frozen=True)
class Exclusion:
    identity: Identity
    reason: str


@dataclass(frozen=True)
class MSESummary:
    min: float
    mean: float
    max: float
    range: float


@dataclass(frozen=True)
class ComparisonReport:
    model: ModelSpec
    method: Method
    kind: ReturnKind
    protocol: Protocol
    per_stock: tuple[StockMSE, ...]
    summary: MSESummary
    exclusions: tuple[Exclusion, ...]

    @property
    def n_excluded(self) -> int:
        return len(self.exclusions)


def _summarize(per_stock: list[StockMSE]) -> MSESummary:
    if not per_stock:
        raise EvaluationError("no stock could be evaluated")
    mses = np.array([s.mse for s in per_stock])
    return MSESummary(float(mses.min()), float(mses.mean()), float(mses.max()), float(mses.max() - mses.min()))


def _prior_for(
    stock: Identity,
    model: ModelSpec,
    method: Method,
    prior_panel: AlignedPanel | None,
    g_rule: GRule,
    fixed_g: float | None,
) -> PriorSpec | None:
    if method in (Method.OLS, Method.MLE):
        return None
    if prior_panel is None:
        raise EvaluationError(
            f"method {method.value!r} needs a prior panel from a window preceding the fit window"
        )
    return PriorSpec(empirical_prior_mean(prior_panel, stock, model), g_rule, fixed_g)


def out_of_sample(
    early: AlignedPanel,
    late: AlignedPanel,
    model: ModelSpec,
    method: Method = Method.OLS,
    prior_panel: AlignedPanel | None = None,
    g_rule: GRule = GRule.BENCHMARK,
    fixed_g: float | None = None,
) -> ComparisonReport:
    """Fit each stock on the early window, predict its late excess returns
    from the realized late factor values, and report per-stock MSEs.

    Bayesian methods need ``prior_panel`` (a window preceding `early`)
    for their prior means.
    """
    if early.stocks != late.stocks:
        raise EvaluationError("early and late panels cover different stock sets")
    if early.kind is not late.kind:
        raise EvaluationError("early and late panels have different return kinds")
    x_late = factor_matrix(late.factors, model)
    per_stock: list[StockMSE] = []
    exclusions: list[Exclusion] = []
    for i, stock in enumerate(early.stocks):
        try:
            prior = _prior_for(stock, model, method, prior_panel, g_rule, fixed_g)
            fit = fit_design(build_design(early, stock, model), method, prior)
        except (EstimationError, DomainError, KeyError) as err:
            exclusions.append(Exclusion(stock, str(err)))
            continue
        errors = late.excess[i] - x_late @ fit.theta
        per_stock.append(StockMSE(stock, float(np.mean(errors**2)), late.n_months))
    return ComparisonReport(
        model, method, early.kind, Protocol.OUT_OF_SAMPLE,
        tuple(per_stock), _summarize(per_stock), tuple(exclusions),
    )


def loocv(
    panel: AlignedPanel,
    stock: Identity | str,
    model: ModelSpec,
    method: Method = Method.OLS,
    prior_panel: AlignedPanel | None = None,
    g_rule: GRule = GRule.BENCHMARK,
    fixed_g: float | None = None,
) -> StockMSE:
    """Leave-one-out cross validation for one stock: refit on the other
    n - 1 months for every held-out month and average the squared
    prediction errors."""
    idx = panel.stock_index(stock)
    identity = panel.stocks[idx]
    design = build_design(panel, identity, model)
    n, p = design.n, design.p
    if n - 1 <= p:
        raise EvaluationError(
            f"insufficient fold size: leaving one of {n} months out must keep more than p={p}"
        )
    prior = _prior_for(identity, model, method, prior_panel, g_rule, fixed_g)
    squared_errors = np.empty(n)
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        keep[i] = False
        try:
            fit = fit_design(DesignSystem(design.y[keep], design.X[keep]), method, prior)
        except (EstimationError, DomainError) as err:
            from .months import format_month

            raise EvaluationError(
                f"fold {format_month(panel.months[i])} failed for {identity.label!r}: {err}"
            ) from err
        finally:
            keep[i] = True
        squared_errors[i] = (design.y[i] - design.X[i] @ fit.theta) ** 2
    return StockMSE(identity, float(squared_errors.mean()), n)


def loocv_panel(
    panel: AlignedPanel,
    model: ModelSpec,
    method: Method = Method.OLS,
    prior_panel: AlignedPanel | None = None,
    g_rule: GRule = GRule.BENCHMARK,
    fixed_g: float | None = None,
) -> ComparisonReport:
    """Leave-one-out cross validation for every stock in the panel."""
    per_stock: list[StockMSE] = []
    exclusions: list[Exclusion] = []
    for stock in panel.stocks:
        try:
            per_stock.append(loocv(panel, stock, model, method, prior_panel, g_rule, fixed_g))
        except (EvaluationError, EstimationError, DomainError, KeyError) as err:
            exclusions.append(Exclusion(stock, str(err)))
    return ComparisonReport(
        model, method, panel.kind, Protocol.LOOCV,
        tuple(per_stock), _summarize(per_stock), tuple(exclusions),
    )
