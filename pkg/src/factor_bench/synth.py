"""Seeded synthetic-panel generator.

Draws one shared factor path, per-stock coefficients, and idiosyncratic
noise, then routes everything through the normal panel constructors so
synthetic data behaves exactly like ingested data. Serves as the
verification oracle: estimators must recover the emitted truth.

Randomness comes from numpy's seeded PCG64 generator only, so a spec
(including its seed) maps to bit-identical output on every run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import AlignedPanel, FactorSeries, Identity, RawRecord, build_panel, split_panel
from .errors import ConfigError
from .estimators import ModelSpec
from .months import Month, month_range
from .returns import ReturnKind

_START_MONTH: Month = (2000, 1)


@dataclass(frozen=True)
class GaussianNoise:
    sigma: float

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ConfigError(f"noise sigma must be nonnegative, got {self.sigma}")


@dataclass(frozen=True)
class StudentTNoise:
    nu: float
    scale: float

    def __post_init__(self) -> None:
        if self.nu <= 2:
            raise ConfigError(f"Student-t degrees of freedom must exceed 2, got {self.nu}")
        if self.scale < 0:
            raise ConfigError(f"noise scale must be nonnegative, got {self.scale}")


@dataclass(frozen=True)
class CoefficientLaw:
    """Sampling law for per-stock coefficients: the intercept is uniform on
    ``alpha_range`` and every slope uniform on ``beta_range``."""

    alpha_range: tuple[float, float] = (-0.002, 0.002)
    beta_range: tuple[float, float] = (0.4, 1.6)

    def __post_init__(self) -> None:
        for name, (lo, hi) in (("alpha_range", self.alpha_range), ("beta_range", self.beta_range)):
            if lo > hi:
                raise ConfigError(f"{name} is empty: {lo} > {hi}")


@dataclass(frozen=True)
class FactorLaw:
    """Gaussian monthly factor dynamics (means and volatilities in decimals)."""

    mktrf_mean: float = 0.005
    mktrf_std: float = 0.045
    smb_mean: float = 0.0
    smb_std: float = 0.025
    hml_mean: float = 0.0
    hml_std: float = 0.025

    def __post_init__(self) -> None:
        if min(self.mktrf_std, self.smb_std, self.hml_std) <= 0:
            raise ConfigError("factor volatilities must be positive")


@dataclass(frozen=True)
class SynthSpec:
    """Full description of one synthetic panel draw."""

    n_stocks: int
    n_months: int
    model: ModelSpec = ModelSpec.CAPM
    coefficients: np.ndarray | CoefficientLaw = field(default_factory=CoefficientLaw)
    noise: GaussianNoise | StudentTNoise = field(default_factory=lambda: GaussianNoise(0.05))
    factor_law: FactorLaw = field(default_factory=FactorLaw)
    rf: float = 0.002
    kind: ReturnKind = ReturnKind.DISCRETE
    seed: int = 0

    def __post_init__(self) -> None:
        p = self.model.n_coefficients
        if self.n_stocks < 1:
            raise ConfigError(f"n_stocks must be positive, got {self.n_stocks}")
        if self.n_months <= p + 1:
            raise ConfigError(f"n_months must exceed p + 1 = {p + 1}, got {self.n_months}")
        if not self.rf > -1.0:
            raise ConfigError(f"risk-free rate must exceed -1, got {self.rf}")
        if isinstance(self.coefficients, np.ndarray):
            coeffs = np.array(self.coefficients, dtype=float)
            coeffs.setflags(write=False)
            object.__setattr__(self, "coefficients", coeffs)
            if coeffs.shape != (self.n_stocks, p):
                raise ConfigError(
                    f"explicit coefficients have shape {coeffs.shape}, expected ({self.n_stocks}, {p})"
                )


def _draw_coefficients(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    if isinstance(spec.coefficients, np.ndarray):
        return np.array(spec.coefficients)
    p = spec.model.n_coefficients
    law = spec.coefficients
    theta = np.empty((spec.n_stocks, p))
    theta[:, 0] = rng.uniform(*law.alpha_range, spec.n_stocks)
    theta[:, 1:] = rng.uniform(*law.beta_range, (spec.n_stocks, p - 1))
    return theta


def _draw_noise(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    shape = (spec.n_stocks, spec.n_months)
    if isinstance(spec.noise, GaussianNoise):
        if spec.noise.sigma == 0.0:
            return np.zeros(shape)
        return rng.normal(0.0, spec.noise.sigma, shape)
    return rng.standard_t(spec.noise.nu, shape) * spec.noise.scale


def generate(spec: SynthSpec) -> tuple[AlignedPanel, AlignedPanel, dict[Identity, np.ndarray]]:
    """Generate (early, late, truth): two halves of one seeded panel plus
    the per-stock coefficient vectors that generated it.

    The factor path is drawn once and shared by every stock; stock
    excess returns are X @ theta + noise in the panel's return kind; the
    panel splits at its midpoint month.
    """
    rng = np.random.default_rng(spec.seed)
    months = month_range(_START_MONTH, _advance(_START_MONTH, spec.n_months - 1))

    law = spec.factor_law
    mktrf = rng.normal(law.mktrf_mean, law.mktrf_std, spec.n_months)
    smb = rng.normal(law.smb_mean, law.smb_std, spec.n_months)
    hml = rng.normal(law.hml_mean, law.hml_std, spec.n_months)
    rf = np.full(spec.n_months, spec.rf)
    factors = FactorSeries(tuple(months), mktrf, smb, hml, rf)

    theta = _draw_coefficients(spec, rng)
    noise = _draw_noise(spec, rng)

    factor_cols = np.column_stack([mktrf] if spec.model is ModelSpec.CAPM else [mktrf, smb, hml])
    excess = theta[:, :1] + theta[:, 1:] @ factor_cols.T + noise
    if spec.kind is ReturnKind.DISCRETE:
        raw = excess + spec.rf
        if np.any(raw <= -1.0):
            raise ConfigError(
                "generated discrete return <= -100%; lower the noise scale or "
                "use the continuous kind for heavy-tailed noise"
            )
    else:
        raw = np.expm1(excess + np.log1p(spec.rf))

    width = max(4, len(str(spec.n_stocks - 1)))
    records = []
    for i in range(spec.n_stocks):
        ticker = f"S{i:0{width}d}"
        permno = str(70000 + i)
        cusip = f"{10000000 + i:08d}"
        for t, month in enumerate(months):
            records.append(RawRecord(month, ticker, permno, cusip, float(raw[i, t])))

    panel = build_panel(records, factors, (months[0], months[-1]), required_len=spec.n_months, kind=spec.kind)
    early, late = split_panel(panel, months[spec.n_months // 2 - 1])
    truth = {stock: theta[i].copy() for i, stock in enumerate(panel.stocks)}
    return early, late, truth


def _advance(month: Month, steps: int) -> Month:
    year, mon = month
    total = year * 12 + (mon - 1) + steps
    return (total // 12, total % 12 + 1)
