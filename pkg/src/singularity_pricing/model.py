"""Parameter space, singularity growth factors and closed-form P/D ratios.

The representative household prices both public assets with its own
consumption-growth SDF.  Conditional on a non-extinction singularity its
marginal utility jumps by ``[phi (1 + eta)]**-gamma`` while the AI and
non-AI dividends grow by the factors returned from :func:`growth_factors`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum


class ParameterError(ValueError):
    """A parameter lies outside its admissible domain."""

    def __init__(self, field: str, value: object, reason: str):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r}: {reason}")


class UndefinedRatioError(ArithmeticError):
    """Raised when a P/D ratio is requested from a divergent quote."""


class AssetKind(Enum):
    AI = "AI"
    NON_AI = "NonAI"


@dataclass(frozen=True)
class ModelParams:
    """Full parameter vector of the singularity economy.

    Attributes:
        beta: discount factor per period.
        g: baseline consumption growth per period.
        gamma: relative risk aversion (> 1).
        p: singularity probability per period.
        xi: extinction probability conditional on a singularity.
        eta: aggregate productivity jump on a singularity.
        phi: fraction of its consumption share the household keeps after
            a negative singularity.  ``phi = 1`` is the no-displacement limit.
        theta: current AI dividend share.
        delta_theta: fraction of the non-AI remainder that moves to AI on a
            singularity.
    """

    beta: float = 0.96
    g: float = 0.02
    gamma: float = 4.0
    p: float = 0.005
    xi: float = 0.0
    eta: float = 0.5
    phi: float = 0.5
    theta: float = 0.15
    delta_theta: float = 0.2

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(f.name, value, "must be a real number")
            if not math.isfinite(value):
                raise ParameterError(f.name, value, "must be finite")
        _check_open(self.beta, "beta", 0.0, 1.0)
        if self.g <= -1.0:
            raise ParameterError("g", self.g, "requires 1 + g > 0")
        if self.gamma <= 1.0:
            raise ParameterError("gamma", self.gamma, "must exceed 1")
        _check_closed(self.p, "p", 0.0, 1.0)
        _check_closed(self.xi, "xi", 0.0, 1.0)
        if self.eta < 0.0:
            raise ParameterError("eta", self.eta, "must be non-negative")
        if not 0.0 < self.phi <= 1.0:
            raise ParameterError("phi", self.phi, "must lie in (0, 1]")
        _check_open(self.theta, "theta", 0.0, 1.0)
        if not 0.0 <= self.delta_theta < 1.0:
            raise ParameterError("delta_theta", self.delta_theta, "must lie in [0, 1)")

    def with_(self, **changes) -> "ModelParams":
        """Copy with some fields replaced (re-validated)."""
        return replace(self, **changes)

    @property
    def discount_growth(self) -> float:
        """``beta (1 + g)**(1 - gamma)``, the deterministic-growth discount factor."""
        return self.beta * (1.0 + self.g) ** (1.0 - self.gamma)

    @property
    def singularity_weight(self) -> float:
        """SDF weight on a non-extinction singularity, before dividend growth."""
        return (
            self.discount_growth
            * self.p
            * (1.0 - self.xi)
            * (1.0 + self.eta) ** (-self.gamma)
            * self.phi ** (-self.gamma)
        )


def _check_open(value, name, lo, hi):
    if not lo < value < hi:
        raise ParameterError(name, value, f"must lie in ({lo:g}, {hi:g})")


def _check_closed(value, name, lo, hi):
    if not lo <= value <= hi:
        raise ParameterError(name, value, f"must lie in [{lo:g}, {hi:g}]")


BASELINE = ModelParams()


@dataclass(frozen=True)
class GammaPair:
    gamma_ai: float
    gamma_n: float


def ai_growth_factor(theta: float, delta_theta: float, eta: float) -> float:
    """AI dividend growth on a non-extinction singularity starting from ``theta``."""
    return (theta + delta_theta * (1.0 - theta)) / theta * (1.0 + eta)


def growth_factors(params: ModelParams) -> GammaPair:
    gamma_ai = ai_growth_factor(params.theta, params.delta_theta, params.eta)
    # theta-independent, which is why the non-AI closed form is exact
    gamma_n = (1.0 - params.delta_theta) * (1.0 + params.eta)
    return GammaPair(gamma_ai, gamma_n)


def existence_factor(params: ModelParams, asset: AssetKind) -> float:
    """SDF-weighted expected dividend growth per period, ``A^j``.

    Prices are finite if and only if the returned value is below one.
    """
    pair = growth_factors(params)
    growth = pair.gamma_ai if asset is AssetKind.AI else pair.gamma_n
    return params.discount_growth * (
        (1.0 - params.p)
        + params.p * (1.0 - params.xi) * (1.0 + params.eta) ** (-params.gamma)
        * params.phi ** (-params.gamma) * growth
    )


@dataclass(frozen=True)
class PDQuote:
    """Price-dividend valuation of one asset.

    ``pd`` is ``None`` whenever the pricing sum diverges (``finite`` False).
    """

    asset: AssetKind
    existence_factor: float
    pd: float | None
    finite: bool

    @classmethod
    def from_existence(cls, asset: AssetKind, a: float) -> "PDQuote":
        if a < 1.0:
            return cls(asset, a, a / (1.0 - a), True)
        return cls(asset, a, None, False)


def closed_form_pd(params: ModelParams, asset: AssetKind) -> PDQuote:
    """Stationary P/D ratio ``A / (1 - A)``.

    Exact for non-AI stocks.  For AI stocks the post-singularity P/D is
    approximated by the pre-singularity one, which overstates the value when
    ``delta_theta`` is large; see :func:`singularity_pricing.exact.exact_pd_ai`.
    """
    return PDQuote.from_existence(asset, existence_factor(params, asset))


def pd_ratio(ai: PDQuote, n: PDQuote) -> float:
    if not (ai.finite and n.finite):
        raise UndefinedRatioError(
            f"P/D ratio undefined: AI finite={ai.finite}, NonAI finite={n.finite}"
        )
    return ai.pd / n.pd


def round_half_away(x: float, ndigits: int = 1) -> float:
    """Round to ``ndigits`` decimals, ties away from zero (table display rule)."""
    q = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def with_effective_phi(params: ModelParams, phi: float) -> ModelParams:
    """Copy of ``params`` priced at displacement ``phi``, which may exceed one.

    Transfers can push the effective displacement factor above one; the
    pricing formulas stay valid there, so only positivity is required.
    """
    if not (math.isfinite(phi) and phi > 0.0):
        raise ParameterError("phi", phi, "effective displacement must be positive")
    out = replace(params)
    object.__setattr__(out, "phi", float(phi))
    return out
