"""Batch front end: ingest evaluation tables, run test suites, emit reports.

Two subcommands:

* ``sdrank run INPUT`` ingests a k-model x N-metric x n-sample evaluation
  table (long CSV with header ``model,metric,sample_id,value``, or a JSON
  map model -> metric -> array), runs the configured dominance tests on the
  metrics portfolio and/or per metric with rank aggregation, adds mean win
  rate baselines and mean-risk summaries, and writes one JSON report plus a
  radar-ready ``mean_risk.csv``.

* ``sdrank validate`` runs the synthetic Gaussian power study and writes
  ``power.csv`` with one (n, test, tpr) row per size and test.

Options come from an optional TOML or JSON config file plus command-line
overrides (flags win).  Reports echo the fully resolved configuration, the
seed, and the library version; reruns with equal inputs are byte-identical
except for the timestamp field.  Ranking keys follow the "test@P" (portfolio)
and "RA(test@M)" (rank-aggregated per-metric) naming, e.g. "R-SSD@P" for the
relative second-order test on portfolio values.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import rankagg, risk, significance
from .empirical import EmpiricalDistribution
from .errors import (
    DomainError,
    DuplicateCell,
    InputError,
    NonFiniteValue,
    ParseError,
    RaggedTable,
)
from .portfolio import MetricsTable, build_portfolio, mwr, unify_polarity

_MODES = ("absolute", "relative")
_ORDERS = ("1", "2", "both")
_AGGREGATIONS = ("portfolio", "per_metric_rank_agg", "both")
_FORMATS = ("long_csv", "json")

_CSV_HEADER = ["model", "metric", "sample_id", "value"]


@dataclass(frozen=True)
class RunConfig:
    """Resolved options for one ``run`` invocation."""

    input: str
    format: str = "long_csv"
    mode: str = "relative"
    order: str = "both"
    aggregation: str = "both"
    eps0: float | None = None
    alpha: float = 0.05
    bootstrap: int = 1000
    seed: int = 0
    weights: tuple[float, ...] | None = None
    polarity: dict[str, str] = field(default_factory=dict)
    paired: bool = False
    out: str = "report.json"

    def __post_init__(self):
        if self.format not in _FORMATS:
            raise DomainError(f"format must be one of {_FORMATS}")
        if self.mode not in _MODES:
            raise DomainError(f"mode must be one of {_MODES}")
        if str(self.order) not in _ORDERS:
            raise DomainError(f"order must be one of {_ORDERS}")
        if self.aggregation not in _AGGREGATIONS:
            raise DomainError(f"aggregation must be one of {_AGGREGATIONS}")
        if self.mode == "absolute" and self.eps0 is None:
            raise DomainError("absolute mode needs eps0")
        object.__setattr__(self, "order", str(self.order))

    @property
    def orders(self) -> tuple[int, ...]:
        return (1, 2) if self.order == "both" else (int(self.order),)


def _parse_value(raw: str, where: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ParseError(f"non-numeric value {raw!r} at {where}") from None
    if not np.isfinite(v):
        raise NonFiniteValue(f"non-finite value {raw!r} at {where}")
    return v


def _ingest_long_csv(path: Path) -> tuple[list, list, dict]:
    cells: dict[tuple[str, str], dict[str, float]] = {}
    models: list[str] = []
    metrics: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != _CSV_HEADER:
            raise ParseError(
                f"{path}: expected header {','.join(_CSV_HEADER)!r}, got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ParseError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            model, metric, sample, raw = (c.strip() for c in row)
            where = f"model {model!r}, metric {metric!r}, sample {sample!r}"
            value = _parse_value(raw, where)
            if model not in models:
                models.append(model)
            if metric not in metrics:
                metrics.append(metric)
            group = cells.setdefault((model, metric), {})
            if sample in group:
                raise DuplicateCell(f"duplicate evaluation for {where}")
            group[sample] = value
    return models, metrics, cells


def _ingest_json(path: Path) -> tuple[list, list, dict]:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if not isinstance(data, dict) or not data:
        raise ParseError(f"{path}: expected a non-empty model -> metric -> array map")
    models = list(data)
    metrics: list[str] = []
    cells: dict[tuple[str, str], dict[str, float]] = {}
    for model, per_metric in data.items():
        if not isinstance(per_metric, dict):
            raise ParseError(f"model {model!r}: expected a metric -> array map")
        for metric, arr in per_metric.items():
            if metric not in metrics:
                metrics.append(metric)
            if not isinstance(arr, list) or not arr:
                raise ParseError(
                    f"model {model!r}, metric {metric!r}: expected a non-empty array"
                )
            group = {}
            for s, raw in enumerate(arr):
                where = f"model {model!r}, metric {metric!r}, sample {s!r}"
                if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                    raise ParseError(f"non-numeric value {raw!r} at {where}")
                if not np.isfinite(raw):
                    raise NonFiniteValue(f"non-finite value {raw!r} at {where}")
                # zero-padded keys keep sorted sample order == array position
                group[f"{s:09d}"] = float(raw)
            cells[(model, metric)] = group
    return models, metrics, cells


def ingest(path, format: str = "long_csv") -> MetricsTable:
    """Read a complete evaluation table; every (model, metric) pair must
    cover the identical sample set.

    Samples are ordered by sorted sample_id, so row order in the file never
    affects results (including paired resampling alignment).
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"input file not found: {path}")
    if format == "long_csv":
        models, metrics, cells = _ingest_long_csv(path)
    elif format == "json":
        models, metrics, cells = _ingest_json(path)
    else:
        raise DomainError(f"format must be one of {_FORMATS}")
    if not models or not metrics:
        raise ParseError(f"{path}: no evaluations found")
    ref_key = (models[0], metrics[0])
    ref_samples = set(cells.get(ref_key, {}))
    for model in models:
        for metric in metrics:
            got = set(cells.get((model, metric), {}))
            if got != ref_samples:
                diff = sorted(ref_samples ^ got)[0]
                raise RaggedTable(
                    f"model {model!r}, metric {metric!r}, sample {diff!r}: "
                    "sample sets differ across (model, metric) pairs"
                )
    sample_order = sorted(ref_samples)
    values = np.empty((len(models), len(metrics), len(sample_order)))
    for a, model in enumerate(models):
        for i, metric in enumerate(metrics):
            group = cells[(model, metric)]
            values[a, i] = [group[s] for s in sample_order]
    return MetricsTable.from_values(values, models=models, metrics=metrics)


def _apply_table_options(t: MetricsTable, cfg: RunConfig) -> MetricsTable:
    polarity = list(t.polarity)
    for name, p in cfg.polarity.items():
        if name not in t.metrics:
            raise DomainError(
                f"polarity names unknown metric {name!r}; table has {list(t.metrics)}"
            )
        polarity[t.metrics.index(name)] = p
    weights = (
        np.asarray(cfg.weights, dtype=np.float64)
        if cfg.weights is not None
        else t.weights
    )
    return MetricsTable(
        models=t.models,
        metrics=t.metrics,
        values=t.values,
        polarity=tuple(polarity),
        weights=weights,
    )


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _ranking_block(res: significance.MultiTestResult, models) -> dict:
    scores = res.ranking.borda_scores
    return {
        "order": [models[i] for i in res.ranking.order],
        "borda_scores": list(scores),
        "confidence": res.ranking.confidence,
        "tie": len(set(scores)) < len(scores),
    }


def _test_block(res: significance.MultiTestResult, models, order: int) -> dict:
    eps = res.ratios.eps1 if order == 1 else res.ratios.eps2
    return {
        "eps": eps.tolist(),
        "sigma_hat": res.sigma.tolist(),
        "eps_one_vs_all": res.eps_one.tolist(),
        "delta": res.delta.tolist(),
        "wins": res.win_matrix.wins.tolist(),
        "corrected_alpha": res.win_matrix.corrected_alpha,
        "ranking": _ranking_block(res, models),
    }


def _score_ranking(scores: np.ndarray, models) -> dict:
    """Best-first ranking by score (higher wins, ties by model index)."""
    order = sorted(range(len(models)), key=lambda i: (-scores[i], i))
    return {
        "order": [models[i] for i in order],
        "scores": [float(scores[i]) for i in order],
        "tie": len(set(scores.tolist())) < len(models),
    }


def _consensus_block(orderings, tie_flags, weights, models) -> dict:
    rs = rankagg.RankingSet(tuple(orderings), np.asarray(weights))
    consensus = rankagg.aggregate(rs)
    return {
        "order": [models[i] for i in consensus],
        "objective": rankagg.objective(rs, consensus),
        "tie": any(tie_flags),
    }


def _mean_risk_rows(models, dists) -> list[dict]:
    rows = []
    for model, d in zip(models, dists):
        s = risk.summarize(d)
        rows.append(
            {
                "model": model,
                "mu": s.mu,
                "sigma": s.sigma,
                "delta": s.delta,
                "gamma": s.gamma,
                **{f"tvar@{p}": v for p, v in s.tvar.items()},
                **{f"h@{p}": v for p, v in s.h.items()},
            }
        )
    return rows


def _write_mean_risk_csv(path: Path, rows: list[dict]) -> None:
    measures = [k for k in rows[0] if k != "model"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "measure", "value"])
        for row in rows:
            for m in measures:
                writer.writerow([row["model"], m, repr(row[m])])


def run(cfg: RunConfig) -> dict:
    """Execute the configured pipelines and return the report dictionary.

    Also writes the report JSON to cfg.out and the mean-risk table to a
    sibling mean_risk.csv.
    """
    table = _apply_table_options(ingest(cfg.input, cfg.format), cfg)
    unified = unify_polarity(table)
    models = list(unified.models)
    prefix = "R" if cfg.mode == "relative" else "A"
    order_name = {1: "FSD", 2: "SSD"}

    test_cfg = significance.TestConfig(
        order=cfg.orders[0],
        mode=cfg.mode,
        eps0=cfg.eps0,
        alpha=cfg.alpha,
        n_boot=cfg.bootstrap,
        seed=cfg.seed,
        paired=cfg.paired,
    )

    rankings: dict[str, dict] = {}
    report: dict = {
        "version": _version(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "models": models,
        "metrics": list(unified.metrics),
        "rankings": rankings,
    }

    do_portfolio = cfg.aggregation in ("portfolio", "both")
    do_per_metric = cfg.aggregation in ("per_metric_rank_agg", "both")

    if do_portfolio:
        port = build_portfolio(unified)
        battery = significance.run_battery(
            list(port.dists), test_cfg, orders=cfg.orders, modes=(cfg.mode,)
        )
        report["portfolio"] = {
            f"order_{o}": _test_block(battery[(o, cfg.mode)], models, o)
            for o in cfg.orders
        }
        for o in cfg.orders:
            key = f"{prefix}-{order_name[o]}@P"
            rankings[key] = _ranking_block(battery[(o, cfg.mode)], models)
        port_values = np.stack([d.values for d in port.dists])[:, None, :]
        port_table = MetricsTable.from_values(port_values, models=models)
        rankings["MWR@P"] = _score_ranking(mwr(port_table, "model"), models)
        report["mean_risk"] = _mean_risk_rows(models, port.dists)
        report["mwr"] = {
            "portfolio_model_level": dict(
                zip(models, mwr(port_table, "model").tolist())
            ),
            "model_level": dict(zip(models, mwr(unified, "model").tolist())),
            "sample_level": dict(zip(models, mwr(unified, "sample").tolist())),
        }

    if do_per_metric:
        per_metric: dict[str, dict] = {}
        test_orderings = {o: [] for o in cfg.orders}
        test_ties = {o: [] for o in cfg.orders}
        mwr_orderings, mwr_ties = [], []
        for i, metric in enumerate(unified.metrics):
            dists = [
                EmpiricalDistribution.from_samples(unified.values[a, i, :])
                for a in range(len(models))
            ]
            battery = significance.run_battery(
                dists, test_cfg, orders=cfg.orders, modes=(cfg.mode,)
            )
            per_metric[metric] = {
                f"order_{o}": _test_block(battery[(o, cfg.mode)], models, o)
                for o in cfg.orders
            }
            for o in cfg.orders:
                res = battery[(o, cfg.mode)]
                test_orderings[o].append(res.ranking.order)
                test_ties[o].append(
                    len(set(res.ranking.borda_scores)) < len(models)
                )
            metric_scores = mwr(
                MetricsTable.from_values(
                    unified.values[:, i : i + 1, :], models=models
                ),
                "model",
            )
            block = _score_ranking(metric_scores, models)
            mwr_orderings.append(tuple(models.index(m) for m in block["order"]))
            mwr_ties.append(block["tie"])
        report["per_metric"] = per_metric
        for o in cfg.orders:
            key = f"RA({prefix}-{order_name[o]}@M)"
            rankings[key] = _consensus_block(
                test_orderings[o], test_ties[o], unified.weights, models
            )
        rankings["RA(MWR@M)"] = _consensus_block(
            mwr_orderings, mwr_ties, unified.weights, models
        )
        if "mean_risk" not in report:
            pooled = [
                EmpiricalDistribution.from_samples(unified.values[a].ravel())
                for a in range(len(models))
            ]
            report["mean_risk"] = _mean_risk_rows(models, pooled)

    if "mean_risk" in report:
        report["mean_risk_notes"] = {"sigma": "not SSD-consistent"}
    report["config"] = {
        **dataclasses.asdict(cfg),
        "weights": unified.weights.tolist(),
        "polarity": dict(zip(unified.metrics, table.polarity)),
    }
    report["seed"] = cfg.seed

    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    _write_mean_risk_csv(out.parent / "mean_risk.csv", report["mean_risk"])
    return report


def _version() -> str:
    from . import __version__

    return __version__


def _load_config_file(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ParseError(f"config file not found: {p}")
    try:
        if p.suffix.lower() == ".toml":
            with open(p, "rb") as fh:
                return tomllib.load(fh)
        with open(p, encoding="utf-8") as fh:
            return json.load(fh)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{p}: {exc}") from None


def _parse_weights(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in raw.split(","))
    except ValueError:
        raise ParseError(f"weights must be comma-separated numbers, got {raw!r}") from None


def _parse_polarity(raw: str) -> dict[str, str]:
    out = {}
    for item in raw.split(","):
        name, sep, pol = item.partition("=")
        if not sep or not name or not pol:
            raise ParseError(
                f"polarity items must look like metric=lower_better, got {item!r}"
            )
        out[name.strip()] = pol.strip()
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdrank",
        description="Rank models by stochastic dominance with bootstrap significance.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="test and rank models from an evaluation table")
    p_run.add_argument("input", help="evaluation table (long CSV or JSON)")
    p_run.add_argument("--config", help="TOML or JSON config file (flags override)")
    p_run.add_argument("--format", choices=_FORMATS)
    p_run.add_argument("--mode", choices=_MODES)
    p_run.add_argument("--order", choices=_ORDERS)
    p_run.add_argument("--aggregation", choices=_AGGREGATIONS)
    p_run.add_argument("--eps0", type=float, help="tolerated violation for absolute mode")
    p_run.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    p_run.add_argument("--bootstrap", type=int, help="bootstrap iterations (default 1000)")
    p_run.add_argument("--seed", type=int, help="resampling seed (default 0)")
    p_run.add_argument("--weights", help="comma-separated metric weights, table order")
    p_run.add_argument("--polarity", help="comma-separated metric=polarity overrides")
    p_run.add_argument("--paired", action="store_true", default=None,
                       help="share resampling indices across models")
    p_run.add_argument("--out", help="report path (default report.json)")

    p_val = sub.add_parser("validate", help="synthetic Gaussian power study")
    p_val.add_argument("--sizes", default="100,250,500,1000,2000",
                       help="comma-separated sample sizes")
    p_val.add_argument("--trials", type=int, default=200)
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--alpha", type=float, default=0.05)
    p_val.add_argument("--tau", type=float, default=0.45,
                       help="tolerated violation for the absolute tests")
    p_val.add_argument("--bootstrap", type=int, default=1000)
    p_val.add_argument("--out", default="power.csv")
    return parser


def _run_config_from_args(args: argparse.Namespace) -> RunConfig:
    options: dict = {}
    if args.config:
        file_cfg = _load_config_file(args.config)
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(file_cfg) - known
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        options.update(file_cfg)
    for name in ("format", "mode", "order", "aggregation", "eps0", "alpha",
                 "bootstrap", "seed", "paired", "out"):
        v = getattr(args, name)
        if v is not None:
            options[name] = v
    if args.weights is not None:
        options["weights"] = _parse_weights(args.weights)
    if args.polarity is not None:
        options["polarity"] = _parse_polarity(args.polarity)
    if isinstance(options.get("weights"), list):
        options["weights"] = tuple(options["weights"])
    return RunConfig(input=args.input, **options)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = _run_config_from_args(args)
            report = run(cfg)
            ranked = ", ".join(sorted(report["rankings"]))
            print(f"wrote {cfg.out} (rankings: {ranked})")
        else:
            sizes = tuple(int(s) for s in args.sizes.split(","))
            rows = significance.validate_gaussian(
                sizes=sizes,
                trials=args.trials,
                seed=args.seed,
                alpha=args.alpha,
                tau=args.tau,
                n_boot=args.bootstrap,
            )
            out = Path(args.out)
            out.parent.mkdir(parents=True, exist_ok=True)
            with open(out, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["n", "test", "tpr"])
                for row in rows:
                    writer.writerow([row["n"], row["test"], repr(row["tpr"])])
            print(f"wrote {out}")
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
