"""Monte Carlo pricing oracle.

Simulates singularity arrivals, extinction, displacement of the household
and jumps of the AI share, and prices each asset as the sample mean of

    sum_{t=1}^{H} beta^t (c_t / c_0)^(-gamma) D_t / D_0

over independent paths.  It shares no code with the closed form or the
backward recursion beyond the parameter container.

Every path draws from its own Philox stream (key = seed, high counter word
= path index), so results do not depend on how paths are batched or on how
many worker threads run.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import AssetKind, ModelParams, existence_factor


class HorizonTooShortError(ValueError):
    def __init__(self, bound: float, allowed: float):
        self.bound = bound
        self.allowed = allowed
        super().__init__(
            f"truncation tail bound {bound:.3g} exceeds {allowed:.3g} "
            "(10% of the target tolerance); lengthen the horizon"
        )


@dataclass(frozen=True)
class PathConfig:
    """Simulation settings.

    ``target_tol`` is the P/D accuracy the run is meant to support; the
    truncated tail must stay below a tenth of it.
    """

    params: ModelParams
    seed: int = 20260419
    n_paths: int = 100_000
    horizon: int = 400
    target_tol: float = 0.01

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class MCPrice:
    asset: AssetKind
    mean_pd: float
    std_error: float
    n_effective: int


@dataclass(frozen=True)
class PathRecord:
    """Per-period outcomes of one simulated path (arrays of equal length).

    Growth factors are period-t over period-(t-1) values; levels start from
    C_0 = 1.  The arrays stop at the first extinction, whose period is the
    last entry (with zero levels).
    """

    singularity: np.ndarray
    extinct: np.ndarray
    household_growth: np.ndarray
    ai_growth: np.ndarray
    nonai_growth: np.ndarray
    theta: np.ndarray
    consumption: np.ndarray
    dividend_ai: np.ndarray
    dividend_nonai: np.ndarray


def max_existence_factor(params: ModelParams) -> float:
    # AI growth falls as theta rises, so theta_0 gives the largest factor on any path
    return max(existence_factor(params, AssetKind.AI), existence_factor(params, AssetKind.NON_AI))


def tail_bound(params: ModelParams, horizon: int) -> float:
    """Upper bound on the P/D mass beyond ``horizon``: A_max^H / (1 - A_max)."""
    a = max_existence_factor(params)
    if a >= 1.0:
        return math.inf
    return a**horizon / (1.0 - a)


def horizon_for(params: ModelParams, target_tol: float = 0.01) -> int:
    """Shortest horizon whose tail bound is below 10% of ``target_tol``."""
    a = max_existence_factor(params)
    if a >= 1.0:
        raise HorizonTooShortError(math.inf, 0.1 * target_tol)
    if a == 0.0:
        return 1
    h = math.log(0.1 * target_tol * (1.0 - a)) / math.log(a)
    h = max(1, math.ceil(h))
    while tail_bound(params, h) >= 0.1 * target_tol:
        h += 1
    return h


def _path_uniforms(seed: int, path_index: int, horizon: int) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, path_index])
    return np.random.Generator(bitgen).random(horizon)


def _events(u: np.ndarray, params: ModelParams):
    p_live = params.p * (1.0 - params.xi)
    sing = u < p_live
    ext = (u >= p_live) & (u < params.p)
    return sing, ext


def simulate_path(cfg: PathConfig, path_index: int) -> PathRecord:
    if not 0 <= path_index < cfg.n_paths:
        raise IndexError(f"path_index {path_index} outside [0, {cfg.n_paths})")
    prm = cfg.params
    sing, ext = _events(_path_uniforms(cfg.seed, path_index, cfg.horizon), prm)
    stop = int(np.argmax(ext)) + 1 if ext.any() else cfg.horizon
    sing, ext = sing[:stop], ext[:stop]

    theta = prm.theta
    c = 1.0
    cols = {k: [] for k in PathRecord.__dataclass_fields__ if k not in ("singularity", "extinct")}
    for s, e in zip(sing, ext):
        if e:
            hh = ai = na = 0.0
            c = 0.0
        elif s:
            hh = prm.phi * (1.0 + prm.g) * (1.0 + prm.eta)
            new_theta = theta + prm.delta_theta * (1.0 - theta)
            ai = new_theta / theta * (1.0 + prm.eta) * (1.0 + prm.g)
            na = (1.0 - new_theta) / (1.0 - theta) * (1.0 + prm.eta) * (1.0 + prm.g)
            theta = new_theta
            c *= (1.0 + prm.eta) * (1.0 + prm.g)
        else:
            hh = ai = na = 1.0 + prm.g
            c *= 1.0 + prm.g
        cols["household_growth"].append(hh)
        cols["ai_growth"].append(ai)
        cols["nonai_growth"].append(na)
        cols["theta"].append(theta)
        cols["consumption"].append(c)
        cols["dividend_ai"].append(theta * c)
        cols["dividend_nonai"].append((1.0 - theta) * c)
    return PathRecord(sing, ext, **{k: np.asarray(v, dtype=float) for k, v in cols.items()})


def _discounted_sums(cfg: PathConfig, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    prm = cfg.params
    u = np.stack([_path_uniforms(cfg.seed, i, cfg.horizon) for i in range(start, stop)])
    sing, ext = _events(u, prm)
    n = stop - start

    discount = prm.beta * (1.0 + prm.g) ** (1.0 - prm.gamma)
    jump_mu = (prm.phi * (1.0 + prm.eta)) ** (-prm.gamma) * (1.0 + prm.eta)
    theta = np.full(n, prm.theta)
    alive = np.ones(n, dtype=bool)
    w_ai = np.ones(n)
    w_na = np.ones(n)
    pd_ai = np.zeros(n)
    pd_na = np.zeros(n)
    for t in range(cfg.horizon):
        s = sing[:, t]
        alive &= ~ext[:, t]
        new_theta = np.where(s, theta + prm.delta_theta * (1.0 - theta), theta)
        step_ai = np.where(s, jump_mu * new_theta / theta, 1.0)
        step_na = np.where(s, jump_mu * (1.0 - new_theta) / (1.0 - theta), 1.0)
        theta = new_theta
        w_ai = w_ai * discount * step_ai * alive
        w_na = w_na * discount * step_na * alive
        pd_ai += w_ai
        pd_na += w_na
    return pd_ai, pd_na


def simulate_pd_samples(cfg: PathConfig, workers: int = 1, block: int = 8192) -> dict[AssetKind, np.ndarray]:
    """Per-path discounted dividend sums for both assets, in path order."""
    blocks = [(a, min(a + block, cfg.n_paths)) for a in range(0, cfg.n_paths, block)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda ab: _discounted_sums(cfg, *ab), blocks))
    else:
        parts = [_discounted_sums(cfg, a, b) for a, b in blocks]
    return {
        AssetKind.AI: np.concatenate([p[0] for p in parts]),
        AssetKind.NON_AI: np.concatenate([p[1] for p in parts]),
    }


def check_horizon(cfg: PathConfig) -> float:
    bound = tail_bound(cfg.params, cfg.horizon)
    allowed = 0.1 * cfg.target_tol
    if not bound < allowed:
        raise HorizonTooShortError(bound, allowed)
    return bound


def _summarise(asset, samples):
    n = samples.size
    if n == 1 or np.all(samples == samples[0]):
        se = 0.0
    else:
        se = float(samples.std(ddof=1) / math.sqrt(n))
    return MCPrice(asset, float(samples.mean()), se, n)


def mc_prices(cfg: PathConfig, workers: int = 1) -> dict[AssetKind, MCPrice]:
    check_horizon(cfg)
    samples = simulate_pd_samples(cfg, workers)
    return {asset: _summarise(asset, x) for asset, x in samples.items()}


def mc_price(cfg: PathConfig, asset: AssetKind, workers: int = 1) -> MCPrice:
    return mc_prices(cfg, workers)[asset]
