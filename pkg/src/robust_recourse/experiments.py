"""Experiment harness: study runners, certification, and file outputs.

Each study trains per fold, computes recourse only for test instances that
the base scorer labels undesirable, averages metrics across instances and
folds, and writes a CSV (with a JSON schema alongside) plus an SVG chart
under ``<out>/<study>/``. Everything is deterministic given the config:
reruns produce byte-identical files.

The ``glm`` model path trains a logistic model per fold and gives every
instance the same base parameters. The ``mlp`` path loads fixed network
weights and fits a local linear surrogate per instance, so each instance
carries its own base parameters and model ball.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .adversary import AscentConfig, Neighborhood, worst_case_shared_model
from .data import (
    Dataset,
    SyntheticSpec,
    apply_norm,
    compute_norm_stats,
    generate_synthetic,
    ingest_csv,
    kfold,
    shifted_synthetic,
)
from .glm import ModelParams, RecourseQuery, eval_total_cost, logit, weighted_l1
from .models import (
    BlackBoxScorer,
    GlmScorer,
    MlpScorer,
    MlpWeights,
    predict_label,
    train_logistic,
)
from .roar import RoarConfig, roar_recourse, roar_recourse_batch
from .solver import (
    GridSpec,
    SolverConfig,
    consistent_recourse,
    minimax_oracle,
    optimal_robust_recourse,
)
from .surrogate import SurrogateConfig, fit_local_linear
from .svgplot import line_chart
from .tradeoff import TradeoffQuery, blended_recourse, consistency, robustness, validity

__all__ = [
    "ConfigError",
    "PredictionMode",
    "PredictionSetSpec",
    "ExperimentConfig",
    "StudyResult",
    "OracleReport",
    "generate_predictions",
    "run_tradeoff_study",
    "run_smoothness_study",
    "run_validity_study",
    "oracle_check",
]


class ConfigError(ValueError):
    """Bad experiment configuration (unknown keys, invalid values, missing files)."""


class PredictionMode(enum.Enum):
    CORNER = "corner"
    EPSILON = "epsilon"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class PredictionSetSpec:
    """How to build the set of predicted models handed to the learner."""

    mode: PredictionMode = PredictionMode.CORNER
    epsilon: float | None = None
    explicit: tuple = ()


DEFAULT_BETAS = tuple(round(0.1 * i, 1) for i in range(11))
DEFAULT_LAMBDAS = (0.05, 0.1, 0.2, 0.5, 0.7, 1.0)
DEFAULT_VALIDITY_ALPHAS = tuple(round(0.02 * i, 2) for i in range(1, 11))
DEFAULT_VALIDITY_LAMBDAS = (0.05, 0.1, 0.2)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "synthetic"
    model_kind: str = "glm"
    alpha: float = 0.5
    lambda_grid: tuple = DEFAULT_LAMBDAS
    beta_grid: tuple = DEFAULT_BETAS
    validity_alphas: tuple = DEFAULT_VALIDITY_ALPHAS
    validity_lambdas: tuple = DEFAULT_VALIDITY_LAMBDAS
    prediction: PredictionSetSpec = PredictionSetSpec()
    epsilon: float | None = None
    smoothness_alpha: float = 1.0
    smoothness_shift: float | None = None
    shifted_dataset: str | None = None
    n_points: int = 1000
    k_folds: int = 5
    seed: int = 0
    out_dir: str = "out"
    label_column: str = "label"
    positive_label: str = "1"
    mlp_weights: str | None = None
    mlp_weights_shifted: str | None = None
    surrogate: SurrogateConfig = SurrogateConfig()
    roar: RoarConfig = RoarConfig()

    def __post_init__(self) -> None:
        if self.model_kind not in ("glm", "mlp"):
            raise ConfigError(f"model_kind must be 'glm' or 'mlp', got {self.model_kind!r}")
        if self.alpha < 0.0 or self.smoothness_alpha < 0.0:
            raise ConfigError("alpha must be nonnegative")
        for name in ("lambda_grid", "beta_grid", "validity_alphas", "validity_lambdas"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be non-empty")
        if any(not 0.0 <= b <= 1.0 for b in self.beta_grid):
            raise ConfigError("beta_grid values must lie in [0, 1]")
        if self.k_folds < 1:
            raise ConfigError("k_folds must be at least 1")
        if self.model_kind == "mlp" and not self.mlp_weights:
            raise ConfigError("model_kind 'mlp' requires mlp_weights")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(raw)
        if "prediction" in kwargs and isinstance(kwargs["prediction"], dict):
            p = dict(kwargs["prediction"])
            try:
                mode = PredictionMode(p.pop("mode", "corner"))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            explicit = tuple(
                (tuple(item["weights"]), float(item.get("intercept", 0.0)))
                for item in p.pop("explicit", [])
            )
            extra = set(p) - {"epsilon"}
            if extra:
                raise ConfigError(f"unknown prediction keys: {sorted(extra)}")
            kwargs["prediction"] = PredictionSetSpec(
                mode=mode, epsilon=p.get("epsilon"), explicit=explicit
            )
        for key, typ in (("surrogate", SurrogateConfig), ("roar", RoarConfig)):
            if key in kwargs and isinstance(kwargs[key], dict):
                try:
                    kwargs[key] = typ(**kwargs[key])
                except TypeError as exc:
                    raise ConfigError(str(exc)) from None
        for key in ("lambda_grid", "beta_grid", "validity_alphas", "validity_lambdas"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_dict(raw)


@dataclass(frozen=True)
class StudyResult:
    rows: list
    csv_path: str
    svg_path: str | None
    extras: dict


@dataclass(frozen=True)
class OracleReport:
    n_instances: int
    n_pass: int
    max_over: float
    max_under: float
    elapsed_s: float

    @property
    def all_pass(self) -> bool:
        return self.n_pass == self.n_instances


def _clamp_into_ball(params: ModelParams, base: ModelParams, alpha: float) -> ModelParams:
    w = np.clip(params.weights, base.weights - alpha, base.weights + alpha)
    b = float(np.clip(params.intercept, base.intercept - alpha, base.intercept + alpha))
    return ModelParams(weights=w, intercept=b)


def _corner_patterns(d: int) -> list:
    if d == 2:
        return [np.array(p) for p in ((1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0))]
    alt = np.array([1.0 if i % 2 == 0 else -1.0 for i in range(d)])
    return [np.ones(d), -np.ones(d), alt, -alt]


def generate_predictions(
    spec: PredictionSetSpec,
    base: ModelParams,
    alpha: float,
    correct: ModelParams | None = None,
) -> list:
    """Named predicted models, each clamped into the ball around ``base``."""
    if spec.mode is PredictionMode.CORNER:
        preds = [("base", base)]
        for i, pat in enumerate(_corner_patterns(base.dim)):
            cand = ModelParams(weights=base.weights + alpha * pat, intercept=base.intercept)
            preds.append((f"corner{i}", _clamp_into_ball(cand, base, alpha)))
        return preds
    if spec.mode is PredictionMode.EPSILON:
        if correct is None:
            raise ConfigError("epsilon predictions need a correct-prediction model")
        eps = spec.epsilon
        if eps is None:
            diff = np.abs(correct.weights - base.weights)
            eps = max(float(diff.max()), abs(correct.intercept - base.intercept)) / 2.0
        out = []
        for name, delta in (
            ("correct", 0.0),
            ("+eps", eps),
            ("-eps", -eps),
            ("+2eps", 2.0 * eps),
            ("-2eps", -2.0 * eps),
        ):
            cand = ModelParams(
                weights=correct.weights + delta, intercept=correct.intercept + delta
            )
            out.append((name, _clamp_into_ball(cand, base, alpha)))
        return out
    preds = []
    for i, (weights, intercept) in enumerate(spec.explicit):
        cand = ModelParams(weights=np.asarray(weights, dtype=float), intercept=intercept)
        if (np.abs(cand.weights - base.weights) > alpha + 1e-9).any() or abs(
            cand.intercept - base.intercept
        ) > alpha + 1e-9:
            raise ConfigError(f"explicit prediction {i} lies outside the model ball")
        preds.append((f"pred{i}", cand))
    if not preds:
        raise ConfigError("explicit prediction mode needs at least one model")
    return preds


# ---------------------------------------------------------------------------
# fold preparation


@dataclass(frozen=True)
class _InstanceTask:
    x0: np.ndarray
    base: ModelParams  # per-instance base model (shared for glm, surrogate for mlp)


def _derived_seed(seed: int, *parts: int) -> int:
    h = seed & 0x7FFFFFFF
    for p in parts:
        h = (h * 1_000_003 + p + 1) & 0x7FFFFFFF
    return h


def _load_base_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.dataset == "synthetic":
        return generate_synthetic(SyntheticSpec(n_points=cfg.n_points, seed=cfg.seed))
    return ingest_csv(cfg.dataset, cfg.label_column, cfg.positive_label)


def _dataset_name(cfg: ExperimentConfig) -> str:
    if cfg.dataset == "synthetic":
        return "synthetic"
    return os.path.splitext(os.path.basename(cfg.dataset))[0]


def _fold_features(cfg, ds, plan, fold):
    tr = plan.train_indices(fold)
    te = plan.test_indices(fold)
    x_train, y_train = ds.features[tr], ds.labels[tr]
    x_test = ds.features[te]
    if cfg.dataset != "synthetic":
        stats = compute_norm_stats(x_train)
        x_train = apply_norm(stats, x_train)
        x_test = apply_norm(stats, x_test)
    return x_train, y_train, x_test


def _prepare_fold(cfg: ExperimentConfig, ds: Dataset, plan, fold: int):
    """Returns (scorer, tasks) where tasks cover undesirably-labeled test rows."""
    x_train, y_train, x_test = _fold_features(cfg, ds, plan, fold)
    if cfg.model_kind == "glm":
        theta0 = train_logistic(x_train, y_train)
        scorer: BlackBoxScorer = GlmScorer(theta0)
        tasks = [
            _InstanceTask(x0=x, base=theta0)
            for x in x_test
            if predict_label(scorer, x) == 0
        ]
        return scorer, tasks
    weights = _load_mlp(cfg.mlp_weights)
    scorer = MlpScorer(weights)
    tasks = []
    for i, x in enumerate(x_test):
        if predict_label(scorer, x) != 0:
            continue
        sur_cfg = dataclasses.replace(
            cfg.surrogate, seed=_derived_seed(cfg.seed, fold, i)
        )
        tasks.append(_InstanceTask(x0=x, base=fit_local_linear(scorer, x, sur_cfg)))
    return scorer, tasks


def _load_mlp(path: str) -> MlpWeights:
    try:
        with open(path, encoding="utf-8") as fh:
            return MlpWeights.from_json(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read MLP weights {path}: {exc}") from exc


def _select_lambda(scorer: BlackBoxScorer, tasks: list, grid: tuple) -> float:
    """Largest lambda maximizing consistent-recourse validity under the base scorer."""
    best_lam, best_val = None, -1.0
    for lam in sorted(grid):
        hits = 0
        for task in tasks:
            q = RecourseQuery(x0=task.x0, lam=lam)
            plan = consistent_recourse(q, task.base)
            hits += predict_label(scorer, plan.x_prime)
        val = hits / len(tasks)
        if val >= best_val:
            best_lam, best_val = lam, val
    return best_lam


# ---------------------------------------------------------------------------
# output writers


def _fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: str, fieldnames: list, rows: list) -> None:
    lines = [",".join(fieldnames)]
    for row in rows:
        lines.append(",".join(_fmt_cell(row[name]) for name in fieldnames))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_schema(path: str, columns: list) -> None:
    payload = {
        "columns": [
            {"name": name, "type": typ, "description": desc} for name, typ, desc in columns
        ]
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _study_paths(cfg: ExperimentConfig, study: str) -> tuple:
    base = os.path.join(cfg.out_dir, study)
    os.makedirs(base, exist_ok=True)
    stem = os.path.join(base, f"{_dataset_name(cfg)}_{cfg.model_kind}")
    return f"{stem}.csv", f"{stem}.svg", f"{stem}.schema.json"


# ---------------------------------------------------------------------------
# studies


def run_tradeoff_study(cfg: ExperimentConfig) -> StudyResult:
    """Robustness/consistency frontier per predicted model, plus the ROAR point."""
    ds = _load_base_dataset(cfg)
    plan = kfold(ds.n, cfg.k_folds, cfg.seed)
    sums: dict = {}
    roar_sums: dict = {}
    lambda_by_fold = []
    pred_names: list = []
    solver_cfg = SolverConfig()

    for fold in range(plan.k):
        scorer, tasks = _prepare_fold(cfg, ds, plan, fold)
        if not tasks:
            print(f"warning: fold {fold} has no undesirable instances; skipped", file=sys.stderr)
            continue
        lam = _select_lambda(scorer, tasks, cfg.lambda_grid)
        lambda_by_fold.append(lam)

        if cfg.model_kind == "glm":
            shared_n = Neighborhood(tasks[0].base, cfg.alpha)
            x0s = np.array([t.x0 for t in tasks])
            roar_points = roar_recourse_batch(x0s, lam, shared_n, cfg.roar)
        else:
            roar_points = np.array(
                [
                    roar_recourse(
                        RecourseQuery(x0=t.x0, lam=lam), Neighborhood(t.base, cfg.alpha), cfg.roar
                    ).x_prime
                    for t in tasks
                ]
            )

        for t_idx, task in enumerate(tasks):
            q = RecourseQuery(x0=task.x0, lam=lam)
            nbhd = Neighborhood(task.base, cfg.alpha)
            robust_plan = optimal_robust_recourse(q, nbhd, solver_cfg)
            preds = generate_predictions(cfg.prediction, task.base, cfg.alpha)
            if not pred_names:
                pred_names = [name for name, _ in preds]
            for pred_name, pred in preds:
                consistent_plan = consistent_recourse(q, pred, solver_cfg)
                for beta in cfg.beta_grid:
                    tq = TradeoffQuery(q, nbhd, pred, float(beta))
                    bp = blended_recourse(tq, cfg=solver_cfg)
                    key = (pred_name, float(beta))
                    acc = sums.setdefault(key, [0.0, 0.0, 0.0, 0])
                    acc[0] += robustness(q, nbhd, bp.x_prime, robust_plan)
                    acc[1] += consistency(q, pred, bp.x_prime, consistent_plan)
                    acc[2] += bp.l1_cost
                    acc[3] += 1
                racc = roar_sums.setdefault(pred_name, [0.0, 0.0, 0.0, 0])
                x_roar = roar_points[t_idx]
                racc[0] += robustness(q, nbhd, x_roar, robust_plan)
                racc[1] += consistency(q, pred, x_roar, consistent_plan)
                racc[2] += weighted_l1(q, x_roar)
                racc[3] += 1

    if not sums:
        raise ConfigError("no fold produced undesirable instances")

    rows = []
    for pred_name in pred_names:
        for beta in cfg.beta_grid:
            r, c, cost, n = sums[(pred_name, float(beta))]
            rows.append(
                {
                    "method": "blend",
                    "prediction": pred_name,
                    "beta": float(beta),
                    "robustness": r / n,
                    "consistency": c / n,
                    "l1_cost": cost / n,
                    "n_instances": n,
                }
            )
    for pred_name in pred_names:
        r, c, cost, n = roar_sums[pred_name]
        rows.append(
            {
                "method": "roar",
                "prediction": pred_name,
                "beta": 1.0,
                "robustness": r / n,
                "consistency": c / n,
                "l1_cost": cost / n,
                "n_instances": n,
            }
        )

    csv_path, svg_path, schema_path = _study_paths(cfg, "pareto")
    fields = ["method", "prediction", "beta", "robustness", "consistency", "l1_cost", "n_instances"]
    _write_csv(csv_path, fields, rows)
    _write_schema(
        schema_path,
        [
            ("method", "str", "blend (beta-weighted solver) or roar (gradient baseline)"),
            ("prediction", "str", "predicted-model identifier"),
            ("beta", "float", "trust parameter; 1.0 on roar rows (not applicable)"),
            ("robustness", "float", "mean excess worst-case total cost vs the robust optimum"),
            ("consistency", "float", "mean excess total cost under the prediction vs its optimum"),
            ("l1_cost", "float", "mean weighted L1 modification cost"),
            ("n_instances", "int", "instance count behind the averages"),
        ],
    )
    series = []
    for pred_name in pred_names:
        pts = [
            (row["robustness"], row["consistency"])
            for row in rows
            if row["method"] == "blend" and row["prediction"] == pred_name
        ]
        series.append((pred_name, [p[0] for p in pts], [p[1] for p in pts]))
    line_chart(svg_path, series, title="Robustness vs consistency", x_label="robustness",
               y_label="consistency")

    roar_mean_rob = (
        sum(v[0] for v in roar_sums.values()) / sum(v[3] for v in roar_sums.values())
    )
    extras = {
        "lambda_by_fold": lambda_by_fold,
        "predictions": pred_names,
        "roar_mean_robustness": roar_mean_rob,
    }
    return StudyResult(rows=rows, csv_path=csv_path, svg_path=svg_path, extras=extras)


def _correct_prediction_models(cfg: ExperimentConfig, ds: Dataset, plan, fold: int):
    """Per-fold source of the correct-prediction model for the smoothness study."""
    if cfg.model_kind == "mlp":
        if not cfg.mlp_weights_shifted:
            raise ConfigError("smoothness on mlp needs mlp_weights_shifted")
        return MlpScorer(_load_mlp(cfg.mlp_weights_shifted))
    if cfg.dataset == "synthetic":
        shift = cfg.smoothness_shift if cfg.smoothness_shift is not None else cfg.smoothness_alpha
        spec = SyntheticSpec(n_points=cfg.n_points, seed=cfg.seed)
        shifted = shifted_synthetic(spec, shift)
        x_train = shifted.features[plan.train_indices(fold)]
        y_train = shifted.labels[plan.train_indices(fold)]
        return train_logistic(x_train, y_train)
    if not cfg.shifted_dataset:
        raise ConfigError("smoothness on a csv dataset needs shifted_dataset")
    shifted = ingest_csv(cfg.shifted_dataset, cfg.label_column, cfg.positive_label)
    stats = compute_norm_stats(ds.features[plan.train_indices(fold)])
    return train_logistic(apply_norm(stats, shifted.features), shifted.labels)


def run_smoothness_study(cfg: ExperimentConfig) -> StudyResult:
    """Mean regret vs trust level, one curve per prediction accuracy."""
    ds = _load_base_dataset(cfg)
    plan = kfold(ds.n, cfg.k_folds, cfg.seed)
    alpha = cfg.smoothness_alpha
    sums: dict = {}
    pred_names: list = []
    lambda_by_fold = []
    eps_by_fold = []
    solver_cfg = SolverConfig()

    for fold in range(plan.k):
        scorer, tasks = _prepare_fold(cfg, ds, plan, fold)
        if not tasks:
            print(f"warning: fold {fold} has no undesirable instances; skipped", file=sys.stderr)
            continue
        lam = _select_lambda(scorer, tasks, cfg.lambda_grid)
        lambda_by_fold.append(lam)
        correct_src = _correct_prediction_models(cfg, ds, plan, fold)

        for t_idx, task in enumerate(tasks):
            base = task.base
            if isinstance(correct_src, ModelParams):
                correct_raw = correct_src
            else:
                sur_cfg = dataclasses.replace(
                    cfg.surrogate, seed=_derived_seed(cfg.seed, fold, t_idx, 7)
                )
                correct_raw = fit_local_linear(correct_src, task.x0, sur_cfg)
            correct = _clamp_into_ball(correct_raw, base, alpha)
            spec = dataclasses.replace(cfg.prediction, mode=PredictionMode.EPSILON,
                                       epsilon=cfg.epsilon)
            preds = generate_predictions(spec, base, alpha, correct=correct)
            if not pred_names:
                pred_names = [name for name, _ in preds]
            if t_idx == 0:
                diff = np.abs(correct.weights - base.weights)
                eps_by_fold.append(
                    max(float(diff.max()), abs(correct.intercept - base.intercept)) / 2.0
                )

            q = RecourseQuery(x0=task.x0, lam=lam)
            nbhd = Neighborhood(base, alpha)
            best_under_correct = consistent_recourse(q, correct, solver_cfg)
            for pred_name, pred in preds:
                for beta in cfg.beta_grid:
                    tq = TradeoffQuery(q, nbhd, pred, float(beta))
                    bp = blended_recourse(tq, cfg=solver_cfg)
                    realized = eval_total_cost(q, bp.x_prime, correct)
                    key = (pred_name, float(beta))
                    acc = sums.setdefault(key, [0.0, 0])
                    acc[0] += realized - best_under_correct.worst_case_total
                    acc[1] += 1

    if not sums:
        raise ConfigError("no fold produced undesirable instances")

    rows = []
    for pred_name in pred_names:
        for beta in cfg.beta_grid:
            s, n = sums[(pred_name, float(beta))]
            rows.append(
                {
                    "prediction": pred_name,
                    "beta": float(beta),
                    "smoothness": s / n,
                    "n_instances": n,
                }
            )

    csv_path, svg_path, schema_path = _study_paths(cfg, "smoothness")
    fields = ["prediction", "beta", "smoothness", "n_instances"]
    _write_csv(csv_path, fields, rows)
    _write_schema(
        schema_path,
        [
            ("prediction", "str", "correct model or its +/- epsilon perturbations"),
            ("beta", "float", "trust parameter"),
            ("smoothness", "float", "mean regret under the materialized model"),
            ("n_instances", "int", "instance count behind the averages"),
        ],
    )
    series = []
    for pred_name in pred_names:
        pts = [(row["beta"], row["smoothness"]) for row in rows if row["prediction"] == pred_name]
        series.append((pred_name, [p[0] for p in pts], [p[1] for p in pts]))
    line_chart(svg_path, series, title="Smoothness vs trust", x_label="beta", y_label="smoothness")

    extras = {
        "lambda_by_fold": lambda_by_fold,
        "epsilon_by_fold": eps_by_fold,
        "predictions": pred_names,
    }
    return StudyResult(rows=rows, csv_path=csv_path, svg_path=svg_path, extras=extras)


def run_validity_study(cfg: ExperimentConfig) -> StudyResult:
    """Worst-case validity vs mean cost for the exact solver and the ROAR baseline."""
    if cfg.model_kind != "glm":
        raise ConfigError("the validity study supports the glm model path only")
    ds = _load_base_dataset(cfg)
    plan = kfold(ds.n, cfg.k_folds, cfg.seed)
    sums: dict = {}

    for fold in range(plan.k):
        scorer, tasks = _prepare_fold(cfg, ds, plan, fold)
        if not tasks:
            print(f"warning: fold {fold} has no undesirable instances; skipped", file=sys.stderr)
            continue
        theta0 = tasks[0].base
        x0s = np.array([t.x0 for t in tasks])
        for a_idx, alpha in enumerate(cfg.validity_alphas):
            nbhd = Neighborhood(theta0, float(alpha))
            for l_idx, lam in enumerate(cfg.validity_lambdas):
                recs_alg = [
                    optimal_robust_recourse(RecourseQuery(x0=t.x0, lam=float(lam)), nbhd).x_prime
                    for t in tasks
                ]
                recs_roar = list(roar_recourse_batch(x0s, float(lam), nbhd, cfg.roar))
                for method, recs in (("alg", recs_alg), ("roar", recs_roar)):
                    ascent = AscentConfig(seed=_derived_seed(cfg.seed, fold, a_idx, l_idx))
                    wc_model = worst_case_shared_model(nbhd, recs, ascent)
                    val = validity(wc_model, recs)
                    cost = float(np.mean([np.abs(r - t.x0).sum() for r, t in zip(recs, tasks)]))
                    acc = sums.setdefault((method, float(alpha), float(lam)), [0.0, 0.0, 0])
                    acc[0] += val
                    acc[1] += cost
                    acc[2] += 1

    if not sums:
        raise ConfigError("no fold produced undesirable instances")

    rows = []
    for method in ("alg", "roar"):
        pts = []
        for alpha in cfg.validity_alphas:
            for lam in cfg.validity_lambdas:
                v, c, n = sums[(method, float(alpha), float(lam))]
                pts.append(
                    {
                        "method": method,
                        "alpha": float(alpha),
                        "lam": float(lam),
                        "validity": v / n,
                        "mean_cost": c / n,
                    }
                )
        for row in pts:
            row["pareto"] = not any(
                other["validity"] >= row["validity"]
                and other["mean_cost"] <= row["mean_cost"]
                and (
                    other["validity"] > row["validity"] or other["mean_cost"] < row["mean_cost"]
                )
                for other in pts
            )
        rows.extend(pts)

    csv_path, svg_path, schema_path = _study_paths(cfg, "validity")
    fields = ["method", "alpha", "lam", "validity", "mean_cost", "pareto"]
    _write_csv(csv_path, fields, rows)
    _write_schema(
        schema_path,
        [
            ("method", "str", "alg (exact solver) or roar (gradient baseline)"),
            ("alpha", "float", "model-ball radius"),
            ("lam", "float", "cost multiplier"),
            ("validity", "float", "fraction labeled desirable under the shared worst-case model"),
            ("mean_cost", "float", "mean L1 modification cost"),
            ("pareto", "bool", "not dominated within its method"),
        ],
    )
    series = []
    for method in ("alg", "roar"):
        front = sorted(
            (r for r in rows if r["method"] == method and r["pareto"]),
            key=lambda r: (r["mean_cost"], r["validity"]),
        )
        series.append((method, [r["mean_cost"] for r in front], [r["validity"] for r in front]))
    line_chart(svg_path, series, title="Worst-case validity vs cost", x_label="mean cost",
               y_label="validity")
    return StudyResult(rows=rows, csv_path=csv_path, svg_path=svg_path, extras={})


# ---------------------------------------------------------------------------
# certification


def _axis_points(d: int) -> int:
    return {1: 2001, 2: 201, 3: 41}[d]


def _displacement_bound(weights, intercept, x0, alpha, lam) -> float:
    """Safe per-coordinate movement bound for the certification grid."""
    s0 = float(x0 @ weights - alpha * np.abs(x0).sum() + intercept - alpha)
    worst = 0.0
    for j in range(len(weights)):
        bound = abs(x0[j])
        for a in (abs(weights[j] - alpha), abs(weights[j] + alpha)):
            if a > lam:
                target = logit(1.0 - lam / a)
                bound = max(bound, abs(x0[j]) + max(0.0, target - s0) / a)
        worst = max(worst, bound)
    return worst


def oracle_check(
    n_instances: int = 200,
    seed: int = 0,
    upper_tol: float = 1e-2,
    lower_tol: float = 1e-9,
) -> OracleReport:
    """Compare the exact solver against the grid oracle on random instances.

    Instances are drawn until their analytic movement bound fits a tractable
    grid; the bound caps how far any optimum can sit from the start point,
    so the rejection never hides a disagreement.
    """
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    n_pass = 0
    max_over = -np.inf
    max_under = -np.inf
    produced = 0
    while produced < n_instances:
        d = int(rng.integers(1, 4))
        alpha = float(rng.choice((0.1, 0.5)))
        lam = float(rng.choice((0.05, 0.3, 1.0)))
        weights = rng.uniform(-3.0, 3.0, d)
        intercept = float(rng.uniform(-1.0, 1.0))
        x0 = rng.uniform(-3.0, 3.0, d)
        bound = _displacement_bound(weights, intercept, x0, alpha, lam)
        if bound > 18.0:
            continue
        produced += 1

        q = RecourseQuery(x0=x0, lam=lam)
        nbhd = Neighborhood(ModelParams(weights=weights, intercept=intercept), alpha)
        plan = optimal_robust_recourse(q, nbhd)

        half = max(5.0, 1.1 * bound + 1.0)
        step = 2.0 * half / (_axis_points(d) - 1)
        levels = max(3, int(np.ceil(np.log10(step / 5e-6))))
        grid = GridSpec(half_range=half, step=step, refine_levels=levels)
        _, oracle_val = minimax_oracle(q, nbhd, grid)

        over = plan.worst_case_total - oracle_val
        under = oracle_val - plan.worst_case_total
        max_over = max(max_over, over)
        max_under = max(max_under, under)
        if over <= upper_tol and under <= lower_tol:
            n_pass += 1
    return OracleReport(
        n_instances=n_instances,
        n_pass=n_pass,
        max_over=float(max_over),
        max_under=float(max_under),
        elapsed_s=time.perf_counter() - start,
    )
