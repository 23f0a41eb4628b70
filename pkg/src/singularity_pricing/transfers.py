"""Government transfers to the household in the singularity state.

A tax ``tau`` on AI owners' post-singularity consumption is handed to the
household, with a fraction ``delta * tau`` of it wasted.  The household then
behaves as if its displacement factor were ``phi_eff`` instead of ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from scipy.optimize import bisect

from .exact import DEFAULT_EPSILON, exact_quote
from .model import (
    AssetKind,
    ModelParams,
    ParameterError,
    PDQuote,
    closed_form_pd,
    existence_factor,
    with_effective_phi,
)


@dataclass(frozen=True)
class TransferParams:
    base: ModelParams
    alpha: float = 0.70
    tau: float = 0.0
    delta: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.tau < 1.0:
            raise ParameterError("tau", self.tau, "must lie in [0, 1)")
        if self.delta < 0.0:
            raise ParameterError("delta", self.delta, "must be non-negative")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError("alpha", self.alpha, "must lie in (0, 1)")

    @property
    def net_transfer_fraction(self) -> float:
        """tau (1 - delta tau): share of AI owners' surplus reaching the household.

        Floored at zero: once delta tau > 1 the waste has consumed the whole
        transfer and the household keeps its untaxed share.
        """
        return _net_transfer(self.tau, self.delta)

    @property
    def waste_exceeds_transfer(self) -> bool:
        return self.delta * self.tau > 1.0

    def with_tau(self, tau: float) -> "TransferParams":
        return replace(self, tau=tau)


def _net_transfer(tau: float, delta: float) -> float:
    return max(0.0, tau * (1.0 - delta * tau))


def post_transfer_consumption(tp: TransferParams, c_t: float = 1.0) -> float:
    """Household consumption in a non-extinction singularity state, after transfers."""
    b = tp.base
    scale = (1.0 + b.eta) * c_t * (1.0 + b.g)
    return b.phi * tp.alpha * scale + tp.net_transfer_fraction * (1.0 - b.phi * tp.alpha) * scale


def phi_effective(tp: TransferParams) -> float:
    """Effective displacement factor, evaluated at the initial household share."""
    phi = tp.base.phi
    return phi + tp.net_transfer_fraction * (1.0 - phi * tp.alpha) / tp.alpha


def transfer_ratio(tp: TransferParams) -> float:
    """Post-transfer over no-transfer singularity-state consumption; free of eta."""
    pa = tp.base.phi * tp.alpha
    return 1.0 + tp.net_transfer_fraction * (1.0 - pa) / pa


@dataclass(frozen=True)
class TransferOutcome:
    """Pricing and consumption under a given tax rate.

    ``ai`` carries the exact (recursion) P/D with the closed-form existence
    factor; ``ai_closed`` is the closed form itself.  ``phi_eff`` is passed to
    pricing unclamped, so ``phi_eff_above_one`` flags the region where the
    singularity becomes a consumption gain for the household.
    """

    tau: float
    phi_eff: float
    consumption_multiple: float
    transfer_ratio: float
    ai: PDQuote
    ai_closed: PDQuote
    nonai: PDQuote

    @property
    def phi_eff_above_one(self) -> bool:
        return self.phi_eff > 1.0


def _priced_params(tp: TransferParams) -> ModelParams:
    return with_effective_phi(tp.base, phi_effective(tp))


def pd_with_transfers(tp: TransferParams, epsilon: float = DEFAULT_EPSILON) -> TransferOutcome:
    phi_eff = phi_effective(tp)
    params = _priced_params(tp)
    return TransferOutcome(
        tau=tp.tau,
        phi_eff=phi_eff,
        consumption_multiple=phi_eff * (1.0 + tp.base.eta),
        transfer_ratio=transfer_ratio(tp),
        ai=exact_quote(params, epsilon),
        ai_closed=closed_form_pd(params, AssetKind.AI),
        nonai=closed_form_pd(params, AssetKind.NON_AI),
    )


def ai_existence_at(tp: TransferParams) -> float:
    return existence_factor(_priced_params(tp), AssetKind.AI)


def admissible_tau_max(delta: float) -> float:
    """Upper end of the range where the net transfer rises with tau."""
    return 1.0 if delta <= 0.5 else 1.0 / (2.0 * delta)


def existence_frontier(tp: TransferParams, tol: float = 1e-12) -> float | None:
    """Smallest tax rate at which the AI closed-form existence factor drops below one.

    ``tp.tau`` is ignored.  Returns 0.0 when prices are already finite
    without transfers and ``None`` when no admissible rate restores
    existence.  The search stays where the net transfer is increasing in
    tau; past that peak the mapping is not monotone and nothing is returned
    from there.
    """

    def excess(tau):
        # tau = 1 lies outside the tax domain, but the formula extends continuously
        net = _net_transfer(tau, tp.delta)
        phi_eff = tp.base.phi + net * (1.0 - tp.base.phi * tp.alpha) / tp.alpha
        return existence_factor(with_effective_phi(tp.base, phi_eff), AssetKind.AI) - 1.0

    if excess(0.0) < 0.0:
        return 0.0
    hi = admissible_tau_max(tp.delta)
    if excess(hi) >= 0.0:
        return None
    return bisect(excess, 0.0, hi, xtol=tol)


def figure2_scenarios(stress: bool = False) -> dict[str, TransferParams]:
    """The baseline and large-singularity transfer settings.

    Both use alpha = 0.70, p = 0.5%, xi = 5% and the pricing parameters of
    the P/D table; ``stress`` raises the deadweight severity to 0.9.
    """
    common = ModelParams(p=0.005, xi=0.05)
    delta = 0.9 if stress else 0.5
    return {
        "baseline": TransferParams(common.with_(eta=0.5, phi=0.5), alpha=0.70, delta=delta),
        "large": TransferParams(common.with_(eta=9.0, phi=0.05), alpha=0.70, delta=delta),
    }


def default_tau_grid() -> list[float]:
    return [round(0.01 * i, 2) for i in range(51)]


@dataclass(frozen=True)
class Figure2Row:
    scenario: str
    tau: float
    pd_ai: float | None
    multiple: float
    phi_eff: float


def figure2_panels(
    taus: Iterable[float] | None = None,
    scenarios: dict[str, TransferParams] | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> list[Figure2Row]:
    """AI P/D (panel a) and consumption multiple (panel b) over a tax grid."""
    taus = default_tau_grid() if taus is None else list(taus)
    scenarios = figure2_scenarios() if scenarios is None else scenarios
    rows = []
    for name, tp in scenarios.items():
        for tau in taus:
            out = pd_with_transfers(tp.with_tau(tau), epsilon)
            rows.append(Figure2Row(name, tau, out.ai.pd, out.consumption_multiple, out.phi_eff))
    return rows
