"""Command-line entry point: ``singularity-pricing <subcommand> [options]``.

Subcommands write data files into ``--out``; nothing is plotted.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Sequence

from .exact import DEFAULT_EPSILON, TABLE1_P, TABLE1_XI, Table1Row, exact_pd_ai, table1_grid
from .marketdata import MarketDataError, read_index, read_shiller, rebased_ratio, trailing_pd
from .model import AssetKind, ModelParams, ParameterError, closed_form_pd, round_half_away
from .montecarlo import HorizonTooShortError, PathConfig, horizon_for, mc_prices, tail_bound
from .transfers import (
    TransferParams,
    default_tau_grid,
    existence_frontier,
    figure2_panels,
    figure2_scenarios,
    pd_with_transfers,
)
from .veto import (
    VETO_EXAMPLE,
    HypothesisError,
    VetoParams,
    brute_force_crossings,
    delta_u,
    gamma_threshold,
    veto_report,
)

log = logging.getLogger("singularity_pricing")

DIVERGENT = "divergent"
TABLE1_HEADER = ["p", "xi", "pd_ai", "pd_n", "ratio"]
TRANSFERS_HEADER = ["scenario", "tau", "pd_ai", "multiple"]
MODEL_KEYS = {f.name for f in fields(ModelParams)}
TRANSFER_DEFAULT_MODEL = ModelParams(p=0.005, xi=0.05)
EXTRA_KEYS = {"alpha", "q", "kappa", "tau", "delta", "seed", "n_paths", "horizon", "target_tol", "epsilon"}


class ConfigError(ValueError):
    pass


def parse_config(path) -> dict[str, float]:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    path = Path(path)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key not in MODEL_KEYS | EXTRA_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: {key} = {value!r} is not a number") from None
    return out


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    veto: VetoParams | None = None
    transfer: TransferParams | None = None
    mc: PathConfig | None = None
    output_dir: Path = Path("out")
    format: str = "csv"
    epsilon: float = DEFAULT_EPSILON


def _model_from(values: dict, default: ModelParams) -> ModelParams:
    return replace(default, **{k: v for k, v in values.items() if k in MODEL_KEYS})


def build_run_config(command: str, values: dict, out: Path, fmt: str, seed: int | None) -> RunConfig:
    if command == "veto":
        model = _model_from(values, VETO_EXAMPLE.base)
        veto = VetoParams(
            model,
            alpha=values.get("alpha", VETO_EXAMPLE.alpha),
            q=values.get("q", VETO_EXAMPLE.q),
            kappa=values.get("kappa", VETO_EXAMPLE.kappa),
        )
        return RunConfig(model, veto=veto, output_dir=out, format=fmt)
    model = _model_from(values, TRANSFER_DEFAULT_MODEL if command == "transfers" else ModelParams())
    transfer = None
    if command == "transfers":
        transfer = TransferParams(
            model, alpha=values.get("alpha", 0.70), tau=values.get("tau", 0.0), delta=values.get("delta", 0.5)
        )
    mc = None
    if command == "mc-check":
        target = values.get("target_tol", 0.01)
        mc = PathConfig(
            model,
            seed=int(seed if seed is not None else values.get("seed", PathConfig.seed)),
            n_paths=int(values.get("n_paths", PathConfig.n_paths)),
            horizon=int(values.get("horizon", 0)) or horizon_for(model, target),
            target_tol=target,
        )
    return RunConfig(
        model, transfer=transfer, mc=mc, output_dir=out, format=fmt,
        epsilon=values.get("epsilon", DEFAULT_EPSILON),
    )


def _fmt(x) -> str:
    if x is None:
        return DIVERGENT
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _fmt1(x) -> str:
    return DIVERGENT if x is None else f"{round_half_away(x, 1):.1f}"


def write_table(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]], fmt: str) -> Path:
    path = path.with_suffix(".md" if fmt == "markdown" else ".csv")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            if fmt == "markdown":
                fh.write("| " + " | ".join(header) + " |\n")
                fh.write("|" + "|".join("---" for _ in header) + "|\n")
                for row in rows:
                    fh.write("| " + " | ".join(row) + " |\n")
            else:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(header)
                writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def _opt_float(text: str) -> float | None:
    return None if text == DIVERGENT else float(text)


def read_table1_csv(path) -> list[Table1Row]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        if next(reader) != TABLE1_HEADER:
            raise ValueError(f"{path}: unexpected header")
        return [
            Table1Row(float(p), float(xi), _opt_float(a), _opt_float(n), _opt_float(r))
            for p, xi, a, n, r in reader
        ]


def cmd_table1(cfg: RunConfig, p_list=TABLE1_P, xi_list=TABLE1_XI) -> list[Path]:
    rows = table1_grid(cfg.model, p_list, xi_list, cfg.epsilon)
    out = cfg.output_dir
    shown = [[_fmt(r.p), _fmt(r.xi), _fmt1(r.pd_ai), _fmt1(r.pd_n), _fmt1(r.ratio)] for r in rows]
    raw = [[_fmt(r.p), _fmt(r.xi), _fmt(r.pd_ai), _fmt(r.pd_n), _fmt(r.ratio)] for r in rows]
    return [
        write_table(out / "table1", TABLE1_HEADER, shown, cfg.format),
        write_table(out / "table1_unrounded", TABLE1_HEADER, raw, "csv"),
    ]


def cmd_veto(cfg: RunConfig, threshold: bool = False, sweep: tuple[float, float] | None = None) -> list[Path]:
    vp = cfg.veto
    rep = veto_report(vp)
    rows = [
        ("v_veto", rep.v_veto),
        ("v_develop_im", rep.v_develop_im),
        ("v_develop_cm", rep.v_develop_cm),
        ("vetoes_im", rep.vetoes_im),
        ("vetoes_cm", rep.vetoes_cm),
        ("delta_u", delta_u(vp)),
        ("socially_efficient", vp.socially_efficient),
        ("positive_more_likely", vp.positive_more_likely),
    ]
    if threshold or sweep:
        lo, hi = sweep or (1.01, 50.0)
        try:
            res = gamma_threshold(vp, lo, hi)
        except HypothesisError as exc:
            log.warning("gamma threshold skipped: %s", exc)
            rows.append(("hypothesis_violation", str(exc)))
        else:
            rows.append(("gamma_bar", res.gamma_bar))
            rows.append(("crossings", ";".join(repr(c) for c in res.crossings)))
            if sweep:
                brute = brute_force_crossings(vp, lo, hi, 0.01)
                rows.append(("bruteforce_crossings", ";".join(repr(c) for c in brute)))
                agree = len(brute) == len(res.crossings) and all(
                    b - 0.01 - 1e-9 <= c <= b + 1e-9 for b, c in zip(brute, res.crossings)
                )
                rows.append(("sweep_agrees", agree))
    body = [[k, "not-found" if v is None else _fmt(v)] for k, v in rows]
    return [write_table(cfg.output_dir / "veto", ["field", "value"], body, cfg.format)]


def cmd_transfers(cfg: RunConfig, taus=None, stress: bool = False) -> list[Path]:
    taus = default_tau_grid() if taus is None else taus
    shared = cfg.transfer or TransferParams(TRANSFER_DEFAULT_MODEL)
    # scenarios differ only in (eta, phi); everything else comes from the config
    scenarios = {
        name: replace(
            tp,
            base=shared.base.with_(eta=tp.base.eta, phi=tp.base.phi),
            alpha=shared.alpha,
            delta=0.9 if stress else shared.delta,
        )
        for name, tp in figure2_scenarios().items()
    }
    rows = figure2_panels(taus, scenarios, cfg.epsilon)
    for r in rows:
        if r.phi_eff > 1.0:
            log.warning("%s tau=%s: phi_eff=%.4f > 1 (singularity is a consumption gain)",
                        r.scenario, r.tau, r.phi_eff)
    body = [[r.scenario, _fmt(float(r.tau)), _fmt(r.pd_ai), _fmt(r.multiple)] for r in rows]
    frontier = [[name, _fmt(existence_frontier(tp))] for name, tp in scenarios.items()]
    return [
        write_table(cfg.output_dir / "transfers", TRANSFERS_HEADER, body, cfg.format),
        write_table(cfg.output_dir / "transfers_frontier", ["scenario", "tau_star"], frontier, cfg.format),
    ]


def mc_check_cells(model: ModelParams) -> dict[str, ModelParams]:
    return {
        "baseline": model,
        "p0": model.with_(p=0.0),
        "small_dtheta": model.with_(delta_theta=1e-6),
    }


MC_HEADER = ["cell", "asset", "closed_form", "recursion", "mc_mean", "mc_se", "tail_bound", "pass"]


def cmd_mc_check(cfg: RunConfig, workers: int = 1) -> list[Path]:
    mc = cfg.mc
    body = []
    for name, params in mc_check_cells(mc.params).items():
        try:
            cell_cfg = replace(mc, params=params, horizon=max(mc.horizon, horizon_for(params, mc.target_tol)))
            prices = mc_prices(cell_cfg, workers)
        except HorizonTooShortError as exc:
            log.error("%s: %s", name, exc)
            body.append([name, "", "", "", "", "", _fmt(exc.bound), "error"])
            continue
        bound = tail_bound(params, cell_cfg.horizon)
        for asset in (AssetKind.AI, AssetKind.NON_AI):
            closed = closed_form_pd(params, asset).pd
            if asset is AssetKind.AI and params.delta_theta > 0:
                recursion = exact_pd_ai(params, cfg.epsilon).pd_initial
            else:
                recursion = closed
            price = prices[asset]
            target = recursion if asset is AssetKind.AI else closed
            ok = target is not None and abs(price.mean_pd - target) <= 3 * price.std_error + bound
            body.append([name, asset.value, _fmt(closed), _fmt(recursion), _fmt(price.mean_pd),
                         _fmt(price.std_error), _fmt(bound), _fmt(ok)])
    return [write_table(cfg.output_dir / "mc_check", MC_HEADER, body, cfg.format)]


def cmd_figure1(cfg: RunConfig, shiller_csv, nasdaq_csv, spx_csv, rebase_month: str = "2015-01") -> list[Path]:
    prices, dividends = read_shiller(shiller_csv)
    pd_series = trailing_pd(prices, dividends)
    ratio = rebased_ratio(read_index(nasdaq_csv, "nasdaq"), read_index(spx_csv, "spx"), rebase_month)
    return [
        write_table(cfg.output_dir / "figure1_pd", ["month", "pd"],
                    [[m, _fmt(v)] for m, v in pd_series.observations], cfg.format),
        write_table(cfg.output_dir / "figure1_ratio", ["month", "ratio_rebased"],
                    [[m, _fmt(v)] for m, v in ratio.observations], cfg.format),
    ]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _tau_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive stop) or a comma list."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        n = round((stop - start) / step)
        return [round(start + i * step, 12) for i in range(n + 1)]
    return _float_list(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat 'key = value' parameter file")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
    common.add_argument("--format", choices=["csv", "markdown"], default="csv")
    common.add_argument("--seed", type=int, help="Monte Carlo seed (unsigned 64-bit)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="singularity-pricing",
        description="AI-singularity asset pricing: P/D tables, veto analysis, transfers, MC checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    t1 = sub.add_parser("table1", parents=[common], help="P/D grid for AI and non-AI stocks")
    t1.add_argument("--p", type=_float_list, help="comma-separated singularity probabilities")
    t1.add_argument("--xi", type=_float_list, help="comma-separated extinction probabilities")

    v = sub.add_parser("veto", parents=[common], help="veto vs develop value functions")
    v.add_argument("--gamma-threshold", action="store_true", help="search for the veto threshold in gamma")
    v.add_argument("--gamma-sweep", nargs=2, type=float, metavar=("LO", "HI"),
                   help="threshold search on [LO, HI] checked against a 0.01-step scan")

    tr = sub.add_parser("transfers", parents=[common], help="P/D and consumption under transfers")
    tr.add_argument("--tau-grid", type=_tau_grid, help="start:stop:step or comma list (default 0:0.5:0.01)")
    tr.add_argument("--stress", action="store_true", help="deadweight severity 0.9 instead of 0.5")

    mc = sub.add_parser("mc-check", parents=[common], help="Monte Carlo vs recursion vs closed form")
    mc.add_argument("--n-paths", type=int)
    mc.add_argument("--workers", type=int, default=1)

    f1 = sub.add_parser("figure1", parents=[common], help="market P/D and NASDAQ/S&P ratio series")
    f1.add_argument("--shiller", type=Path, required=True, help="month,price,dividend CSV")
    f1.add_argument("--nasdaq", type=Path, required=True, help="month,close CSV")
    f1.add_argument("--spx", type=Path, required=True, help="month,close CSV")
    f1.add_argument("--rebase-month", default="2015-01")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        values = parse_config(args.config) if args.config else {}
        if getattr(args, "n_paths", None):
            values["n_paths"] = args.n_paths
        cfg = build_run_config(args.command, values, args.out, args.format, args.seed)
        if args.command == "table1":
            paths = cmd_table1(cfg, args.p or TABLE1_P, args.xi or TABLE1_XI)
        elif args.command == "veto":
            paths = cmd_veto(cfg, args.gamma_threshold, tuple(args.gamma_sweep) if args.gamma_sweep else None)
        elif args.command == "transfers":
            paths = cmd_transfers(cfg, args.tau_grid, args.stress)
        elif args.command == "mc-check":
            paths = cmd_mc_check(cfg, args.workers)
        else:
            paths = cmd_figure1(cfg, args.shiller, args.nasdaq, args.spx, args.rebase_month)
    except (ConfigError, ParameterError, MarketDataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
