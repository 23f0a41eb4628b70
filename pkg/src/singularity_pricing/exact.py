"""Exact AI price-dividend ratios by backward recursion over the theta chain.

Each non-extinction singularity moves the AI share to
``theta + delta_theta (1 - theta)``, so the AI growth factor, and therefore the
AI P/D ratio, depends on how many singularities have already happened.  The
Euler equation in state k reads

    v_k = A_no (v_k + 1) + A_sing(theta_k) (v_{k+1} + 1)

which is solved backwards from a terminal state close to theta = 1, where
the closed form becomes exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import (
    AssetKind,
    ModelParams,
    PDQuote,
    ai_growth_factor,
    closed_form_pd,
    pd_ratio,
)

DEFAULT_EPSILON = 1e-10
# weight on the terminal seed below which the rest of the chain cannot move v_0
DEFAULT_TAIL_CUTOFF = 1e-18

TABLE1_P = (0.001, 0.002, 0.005, 0.008, 0.010)
TABLE1_XI = (0.0, 0.05, 0.10, 0.20)


class ChainDegenerateError(ValueError):
    """delta_theta = 0 leaves theta fixed; the closed form is already exact."""


@dataclass(frozen=True)
class ThetaChain:
    thetas: tuple[float, ...]

    @property
    def terminal_gap(self) -> float:
        return 1.0 - self.thetas[-1]

    @property
    def n_steps(self) -> int:
        return len(self.thetas) - 1

    def __len__(self):
        return len(self.thetas)


def _check_chain_args(theta0, delta_theta, epsilon):
    if not 0.0 < theta0 < 1.0:
        raise ValueError(f"theta0={theta0!r} must lie in (0, 1)")
    if delta_theta == 0.0:
        raise ChainDegenerateError(
            "delta_theta = 0: theta never moves, use closed_form_pd instead"
        )
    if not 0.0 < delta_theta < 1.0:
        raise ValueError(f"delta_theta={delta_theta!r} must lie in (0, 1)")
    if not epsilon > 0.0:
        raise ValueError(f"epsilon={epsilon!r} must be positive")


def build_theta_chain(theta0: float, delta_theta: float, epsilon: float = DEFAULT_EPSILON) -> ThetaChain:
    """Shortest chain theta_0, theta_1, ... whose terminal gap 1 - theta_K <= epsilon."""
    _check_chain_args(theta0, delta_theta, epsilon)
    thetas = [theta0]
    theta = theta0
    while 1.0 - theta > epsilon:
        theta = theta + delta_theta * (1.0 - theta)
        thetas.append(theta)
    return ThetaChain(tuple(thetas))


@dataclass(frozen=True)
class RecursionResult:
    """Backward-recursion output.

    ``pd_by_state[k]`` is the AI P/D ratio after k singularities; it is
    empty when the recursion diverged, in which case ``diverged_at`` is the
    chain index at which the existence condition failed.
    """

    thetas: tuple[float, ...]
    pd_by_state: tuple[float, ...]
    finite: bool
    diverged_at: int | None = None

    @property
    def pd_initial(self) -> float | None:
        return self.pd_by_state[0] if self.finite else None


def exact_pd_ai(
    params: ModelParams,
    epsilon: float = DEFAULT_EPSILON,
    tail_cutoff: float | None = DEFAULT_TAIL_CUTOFF,
) -> RecursionResult:
    """Numerically exact AI P/D ratio at ``params.theta``.

    The chain is extended until its gap to theta = 1 is at most ``epsilon``
    and the terminal value is seeded with the closed form there.  When
    ``tail_cutoff`` is set, the chain also stops once the cumulative weight
    that v_0 places on the next state drops below it, since the seed can then
    no longer affect v_0 at double precision.  This keeps tiny delta_theta
    (millions of chain states) tractable; pass ``None`` for the full chain.
    """
    _check_chain_args(params.theta, params.delta_theta, epsilon)
    a_no = params.discount_growth * (1.0 - params.p)
    s = params.singularity_weight
    theta = params.theta
    if a_no >= 1.0:
        return RecursionResult((theta,), (), False, diverged_at=0)

    thetas = [theta]
    sing = []
    weight = 1.0
    while 1.0 - theta > epsilon:
        a_sing = s * ai_growth_factor(theta, params.delta_theta, params.eta)
        sing.append(a_sing)
        theta = theta + params.delta_theta * (1.0 - theta)
        thetas.append(theta)
        weight *= a_sing / (1.0 - a_no)
        if tail_cutoff is not None and weight < tail_cutoff:
            break

    # closed form at theta_K, the seed
    terminal = PDQuote.from_existence(
        AssetKind.AI, a_no + s * ai_growth_factor(theta, params.delta_theta, params.eta)
    )
    if not terminal.finite:
        return RecursionResult(tuple(thetas), (), False, diverged_at=len(thetas) - 1)

    values = [0.0] * len(thetas)
    v = terminal.pd
    values[-1] = v
    for k in range(len(thetas) - 2, -1, -1):
        v = (a_no + sing[k] * (v + 1.0)) / (1.0 - a_no)
        values[k] = v
    return RecursionResult(tuple(thetas), tuple(values), True)


def exact_quote(params: ModelParams, epsilon: float = DEFAULT_EPSILON) -> PDQuote:
    """AI quote carrying the exact P/D and the closed-form existence factor.

    With ``delta_theta = 0`` the closed form itself is returned.
    """
    closed = closed_form_pd(params, AssetKind.AI)
    if params.delta_theta == 0.0:
        return closed
    res = exact_pd_ai(params, epsilon)
    return PDQuote(AssetKind.AI, closed.existence_factor, res.pd_initial, res.finite)


@dataclass(frozen=True)
class Table1Row:
    p: float
    xi: float
    pd_ai: float | None
    pd_n: float | None
    ratio: float | None


def table1_grid(
    base: ModelParams,
    p_list: Sequence[float] = TABLE1_P,
    xi_list: Sequence[float] = TABLE1_XI,
    epsilon: float = DEFAULT_EPSILON,
) -> list[Table1Row]:
    """AI (exact) and non-AI (closed form) P/D ratios over a (p, xi) grid.

    Rows come in p-major order.  A divergent cell has ``None`` in the
    affected columns rather than raising.
    """
    rows = []
    for p in p_list:
        for xi in xi_list:
            params = base.with_(p=p, xi=xi)
            ai = exact_quote(params, epsilon)
            n = closed_form_pd(params, AssetKind.NON_AI)
            ratio = pd_ratio(ai, n) if ai.finite and n.finite else None
            rows.append(Table1Row(p, xi, ai.pd, n.pd, ratio))
    return rows

