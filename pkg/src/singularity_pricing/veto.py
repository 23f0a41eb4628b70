"""Veto versus development of AI under incomplete and complete markets.

The singularity is treated as a one-shot event: before it the household's
share is constant, and once it happens the economy grows deterministically
forever at the new share.  Extinction utility is normalised to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import bisect

from .model import ModelParams, ParameterError


class DivergentSumError(ArithmeticError):
    """The lifetime-utility geometric sum does not converge."""


class HypothesisError(ValueError):
    """phi (1 + eta) >= 1: no veto threshold is guaranteed."""


class Market(Enum):
    INCOMPLETE = "incomplete"
    COMPLETE = "complete"


@dataclass(frozen=True)
class VetoParams:
    """Model parameters plus the veto-extension inputs.

    ``q`` may be any probability in [0, 1]; the usual assumption that the
    positive singularity is more likely is reported by
    :attr:`positive_more_likely` but not enforced.
    """

    base: ModelParams
    alpha: float = 0.70
    q: float = 0.70
    kappa: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError("alpha", self.alpha, "must lie in (0, 1)")
        if not 0.0 <= self.q <= 1.0:
            raise ParameterError("q", self.q, "must lie in [0, 1]")
        if not 0.0 <= self.kappa < 1.0:
            raise ParameterError("kappa", self.kappa, "must lie in [0, 1)")

    @property
    def positive_more_likely(self) -> bool:
        return self.q > 0.5

    @property
    def alpha_plus(self) -> float:
        return min(1.0, self.alpha / self.base.phi)

    @property
    def socially_efficient(self) -> bool:
        # aggregate consumption rises in both singularity outcomes
        return 1.0 + self.base.eta > 1.0

    def with_gamma(self, gamma: float) -> "VetoParams":
        return VetoParams(self.base.with_(gamma=gamma), self.alpha, self.q, self.kappa)


# worked numerical example: incomplete markets veto, complete markets do not
VETO_EXAMPLE = VetoParams(
    ModelParams(beta=0.96, g=0.02, gamma=10.0, p=0.01, xi=0.05, eta=0.5, phi=0.5),
    alpha=0.70,
    q=0.70,
    kappa=0.01,
)


def crra_utility(c, gamma):
    return c ** (1.0 - gamma) / (1.0 - gamma)


def delta_u(vp: VetoParams) -> float:
    """Expected one-period utility change from a non-extinction singularity."""
    gamma = vp.base.gamma
    scale = 1.0 + vp.base.eta
    return (
        vp.q * crra_utility(vp.alpha_plus * scale, gamma)
        + (1.0 - vp.q) * crra_utility(vp.base.phi * vp.alpha * scale, gamma)
        - crra_utility(vp.alpha, gamma)
    )


def _deterministic_denominator(params: ModelParams) -> float:
    b = params.discount_growth
    if b >= 1.0:
        raise DivergentSumError(f"beta (1+g)^(1-gamma) = {b!r} >= 1")
    return 1.0 - b


def value_veto(vp: VetoParams, c0: float = 1.0) -> float:
    """Lifetime utility from consuming (1 - kappa) alpha C_t with no singularity."""
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    denom = _deterministic_denominator(vp.base)
    return crra_utility((1.0 - vp.kappa) * vp.alpha * c0, vp.base.gamma) / denom


def _post_singularity_value(share, params, c0, denom):
    c1 = share * (1.0 + params.eta) * (1.0 + params.g) * c0
    return crra_utility(c1, params.gamma) / denom


def value_develop(vp: VetoParams, market: Market = Market.INCOMPLETE, c0: float = 1.0) -> float:
    """Lifetime utility if AI is developed.

    Solves V = u(alpha c0) + beta[(1-p) (1+g)^(1-gamma) V + p (1-xi) EW]
    where EW is the expected value of deterministic growth after the
    singularity: at alpha_plus or phi*alpha under incomplete markets, at
    alpha with certainty under complete markets.
    """
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    params = vp.base
    denom = _deterministic_denominator(params)
    pre = 1.0 - params.beta * (1.0 - params.p) * (1.0 + params.g) ** (1.0 - params.gamma)
    if pre <= 0.0:
        raise DivergentSumError(f"beta (1-p) (1+g)^(1-gamma) = {1.0 - pre!r} >= 1")

    if market is Market.COMPLETE:
        ew = _post_singularity_value(vp.alpha, params, c0, denom)
    else:
        ew = vp.q * _post_singularity_value(vp.alpha_plus, params, c0, denom) + (
            1.0 - vp.q
        ) * _post_singularity_value(params.phi * vp.alpha, params, c0, denom)

    flow = crra_utility(vp.alpha * c0, params.gamma)
    return (flow + params.beta * params.p * (1.0 - params.xi) * ew) / pre


@dataclass(frozen=True)
class VetoReport:
    v_veto: float
    v_develop_im: float
    v_develop_cm: float
    vetoes_im: bool
    vetoes_cm: bool


def veto_report(vp: VetoParams, c0: float = 1.0) -> VetoReport:
    v_veto = value_veto(vp, c0)
    v_im = value_develop(vp, Market.INCOMPLETE, c0)
    v_cm = value_develop(vp, Market.COMPLETE, c0)
    return VetoReport(v_veto, v_im, v_cm, v_veto > v_im, v_veto > v_cm)


def veto_gap(vp: VetoParams, gamma: float, c0: float = 1.0) -> float:
    """V_veto - V_develop(incomplete) at risk aversion ``gamma``; positive means veto."""
    v = vp.with_gamma(gamma)
    return value_veto(v, c0) - value_develop(v, Market.INCOMPLETE, c0)


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of the risk-aversion threshold search.

    ``gamma_bar`` is the smallest gamma in range at which the household
    vetoes, or ``None`` when it never does.  ``crossings`` lists every sign
    change of the veto gap found by the scan, refined by bisection.
    """

    gamma_bar: float | None
    crossings: tuple[float, ...]

    @property
    def found(self) -> bool:
        return self.gamma_bar is not None

    @property
    def monotone(self) -> bool:
        return len(self.crossings) <= 1


def gamma_threshold(
    vp: VetoParams,
    gamma_lo: float = 1.01,
    gamma_hi: float = 50.0,
    tol: float = 1e-6,
    step: float = 0.25,
) -> ThresholdResult:
    """Scan gamma on a coarse grid, then bisect each sign change of the veto gap."""
    params = vp.base
    if params.phi * (1.0 + params.eta) >= 1.0:
        raise HypothesisError(
            f"phi (1 + eta) = {params.phi * (1.0 + params.eta)!r} >= 1; "
            "the household's consumption does not fall on a negative singularity"
        )
    if gamma_lo <= 1.0 or gamma_hi <= gamma_lo:
        raise ValueError("need 1 < gamma_lo < gamma_hi")

    n = max(1, math.ceil((gamma_hi - gamma_lo) / step))
    grid = np.linspace(gamma_lo, gamma_hi, n + 1)
    gaps = [veto_gap(vp, float(g)) for g in grid]

    crossings = []
    upward = []
    for lo, hi, f_lo, f_hi in zip(grid[:-1], grid[1:], gaps[:-1], gaps[1:]):
        if (f_lo > 0) == (f_hi > 0):
            continue
        if f_lo == 0.0:
            root = float(lo)
        else:
            root = bisect(lambda g: veto_gap(vp, g), lo, hi, xtol=tol)
        crossings.append(root)
        upward.append(f_hi > 0)

    if gaps[0] > 0:
        gamma_bar = float(grid[0])
    else:
        gamma_bar = next((c for c, up in zip(crossings, upward) if up), None)
    return ThresholdResult(gamma_bar, tuple(crossings))


def brute_force_crossings(vp: VetoParams, gamma_lo: float, gamma_hi: float, step: float = 0.01) -> list[float]:
    """Grid points just after each sign change of the veto gap at a fine step."""
    n = max(1, round((gamma_hi - gamma_lo) / step))
    grid = np.linspace(gamma_lo, gamma_hi, n + 1)
    signs = [veto_gap(vp, float(g)) > 0 for g in grid]
    return [float(grid[i]) for i in range(1, len(grid)) if signs[i] != signs[i - 1]]
