"""Training orchestration: alternate optimizer phases with distance
computation, noise elimination, and weight refresh; plus the multi-run
experiment sweep and its CSV schema.

A run starts from w = 0 with uniform weights 2/l and loops ``outer_iters``
times: (a) ``inner_iters`` optimizer steps over minibatches of the active
samples with the current weights, (b) signed distances of all active samples,
(c) when adaptive, wrong-side noise elimination (permanent for the run), and
(d) when adaptive, a weight refresh from the distances. Optimizer state
(counter, velocity, inverse-Hessian approximation) persists across outer
iterations. With ``adaptive=False`` the weights never move and the run is
bit-for-bit the bare optimizer under the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
import io

import numpy as np

from .data import Dataset, MinibatchSampler
from .metrics import EvalReport, confusion_from_predictions, report
from .model import LinearModel
from .objective import ObjectiveConfig, loss
from .optimizers import (QuasiNewtonState, ScheduleKind, StepSchedule,
                         obfgs_step, onaq_step, sgd_step)
from .weighting import NoiseMode, detect_noise, init_weights, update_weights


class Optimizer(Enum):
    SGD = "sgd"
    OBFGS = "obfgs"
    ONAQ = "onaq"


class TrainingError(RuntimeError):
    """Training cannot proceed (e.g. noise elimination emptied a class)."""


@dataclass(frozen=True)
class TrainConfig:
    optimizer: Optimizer = Optimizer.SGD
    adaptive: bool = True
    outer_iters: int = 10
    inner_iters: int = 10
    batch_size: int = 64
    objective: ObjectiveConfig = field(default_factory=ObjectiveConfig)
    sigma: float = 1.0
    alpha0: float = 1.0
    tau: float = 10.0
    mu: float = 0.1
    damping: float = 0.2
    eps_h: float = 1.0
    noise_mode: NoiseMode = NoiseMode.SIGNED_SIDE
    seed: int = 0

    def __post_init__(self) -> None:
        if self.outer_iters < 1 or self.inner_iters < 1:
            raise ValueError("outer_iters and inner_iters must be >= 1")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def method_name(self) -> str:
        base = self.optimizer.value
        return f"aw+{base}" if self.adaptive else base

    def schedule(self) -> StepSchedule:
        if self.optimizer is Optimizer.SGD:
            return StepSchedule(ScheduleKind.CONSTANT, alpha0=self.alpha0)
        if self.optimizer is Optimizer.OBFGS:
            return StepSchedule(ScheduleKind.TAU_DECAY, alpha0=self.alpha0, tau=self.tau)
        return StepSchedule(ScheduleKind.SQRT_DECAY, alpha0=self.alpha0)


@dataclass(frozen=True)
class HistoryRecord:
    test_report: EvalReport
    train_loss: float
    n_noise: int
    alpha_min: float
    alpha_mean: float
    alpha_max: float

    @property
    def test_accuracy(self) -> float:
        return self.test_report.accuracy


@dataclass
class TrainHistory:
    records: list[HistoryRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def test_accuracy(self) -> list[float]:
        return [r.test_accuracy for r in self.records]

    @property
    def train_loss(self) -> list[float]:
        return [r.train_loss for r in self.records]


def train(train_ds: Dataset, eval_ds: Dataset, cfg: TrainConfig) -> tuple[LinearModel, TrainHistory]:
    """Run the full training loop; deterministic under ``cfg.seed``."""
    if train_ds.n_pos == 0 or train_ds.n_neg == 0:
        raise TrainingError("training set must contain both classes")
    X = train_ds.to_matrix(augment=True)
    y = train_ds.labels()
    X_raw = X[:, :-1]
    X_eval = eval_ds.to_matrix(dim=train_ds.dim, augment=True)
    y_eval = eval_ds.labels()
    n, d_aug = X.shape

    w = np.zeros(d_aug)
    ws = init_weights(n, sigma=cfg.sigma)
    sampler = MinibatchSampler(cfg.batch_size, cfg.seed)
    schedule = cfg.schedule()
    qn = None
    if cfg.optimizer is not Optimizer.SGD:
        qn = QuasiNewtonState.initial(d_aug, eps_h=cfg.eps_h, damping=cfg.damping, mu=cfg.mu)
    sgd_k = 1

    history = TrainHistory()
    active_idx = np.where(ws.active)[0]
    for _ in range(cfg.outer_iters):
        for _ in range(cfg.inner_iters):
            bidx = sampler.next_batch(active_idx)
            Xb, yb, ab = X[bidx], y[bidx], ws.alpha[bidx]
            if cfg.optimizer is Optimizer.SGD:
                w = sgd_step(w, Xb, yb, ab, cfg.objective, schedule, sgd_k)
                sgd_k += 1
            elif cfg.optimizer is Optimizer.OBFGS:
                w = obfgs_step(w, qn, Xb, yb, ab, cfg.objective, schedule)
            else:
                w = onaq_step(w, qn, Xb, yb, ab, cfg.objective, schedule)

        if cfg.adaptive:
            geo_norm = float(np.linalg.norm(w[:-1]))
            if geo_norm > 0.0:
                dist = np.asarray(X @ w).ravel() / geo_norm
                flagged = detect_noise(dist, y, ws.active, cfg.noise_mode, X=X_raw)
                if flagged.size:
                    next_active = ws.active.copy()
                    next_active[flagged] = False
                    for cls in (1, -1):
                        if not np.any(next_active & (y == cls)):
                            raise TrainingError(
                                f"noise elimination removed every class-{cls:+d} sample")
                    ws.active = next_active
                    ws.alpha[flagged] = 0.0
                    active_idx = np.where(ws.active)[0]
                update_weights(ws, dist)
            # a zero geometric norm leaves distances undefined; keep the
            # current weights and mask for this round

        model = LinearModel.from_augmented(w, label_map=train_ds.label_map)
        preds = np.where(np.asarray(X_eval @ w).ravel() >= 0.0, 1, -1)
        rep = report(confusion_from_predictions(y_eval, preds))
        a_act = ws.alpha[ws.active]
        history.records.append(HistoryRecord(
            test_report=rep,
            train_loss=loss(w, X[active_idx], y[active_idx], ws.alpha[active_idx], cfg.objective),
            n_noise=int(np.sum(~ws.active)),
            alpha_min=float(a_act.min()),
            alpha_mean=float(a_act.mean()),
            alpha_max=float(a_act.max()),
        ))

    return LinearModel.from_augmented(w, label_map=train_ds.label_map), history


RESULTS_COLUMNS = ["dataset", "method", "seed", "outer_iter", "accuracy", "precision",
                   "recall", "specificity", "f1", "gmean", "train_loss", "n_noise"]


@dataclass(frozen=True)
class RunFailure:
    dataset: str
    method: str
    seed: int
    error: str


@dataclass
class ExperimentResults:
    rows: list[dict] = field(default_factory=list)
    failures: list[RunFailure] = field(default_factory=list)

    def final_rows(self) -> list[dict]:
        return [r for r in self.rows if r["outer_iter"] == "final"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(RESULTS_COLUMNS) + "\n")
        for row in self.rows:
            buf.write(",".join(_format_cell(row[c]) for c in RESULTS_COLUMNS) + "\n")
        return buf.getvalue()

    def summary(self) -> list[dict]:
        """Mean of the final metrics over seeds, one entry per (dataset, method)."""
        groups: dict[tuple[str, str], list[dict]] = {}
        order: list[tuple[str, str]] = []
        for row in self.final_rows():
            key = (row["dataset"], row["method"])
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(row)
        out = []
        for key in order:
            rows = groups[key]
            entry = {"dataset": key[0], "method": key[1], "n_seeds": len(rows)}
            for col in ("accuracy", "precision", "recall", "specificity", "f1", "gmean"):
                entry[col] = float(np.mean([r[col] for r in rows]))
            out.append(entry)
        return out


def _format_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _result_row(dataset: str, method: str, seed: int, outer_iter, rep: EvalReport,
                train_loss: float, n_noise: int) -> dict:
    return {
        "dataset": dataset, "method": method, "seed": seed, "outer_iter": outer_iter,
        "accuracy": rep.accuracy, "precision": rep.precision, "recall": rep.recall,
        "specificity": rep.specificity, "f1": rep.f1, "gmean": rep.gmean,
        "train_loss": train_loss, "n_noise": n_noise,
    }


def run_cell(name: str, train_ds: Dataset, eval_ds: Dataset, cfg: TrainConfig, seed: int) -> list[dict]:
    """All result rows (per-iteration plus final) for one sweep cell."""
    cell_cfg = replace(cfg, seed=seed)
    model, history = train(train_ds, eval_ds, cell_cfg)
    rows = []
    for i, rec in enumerate(history.records, start=1):
        rows.append(_result_row(name, cfg.method_name, seed, i, rec.test_report,
                                rec.train_loss, rec.n_noise))
    last = history.records[-1]
    rows.append(_result_row(name, cfg.method_name, seed, "final", last.test_report,
                            last.train_loss, last.n_noise))
    return rows


def run_experiment(datasets: list[tuple[str, Dataset, Dataset]],
                   methods: list[TrainConfig],
                   seeds: list[int],
                   jobs: int = 1) -> ExperimentResults:
    """Sweep datasets x methods x seeds; per-cell failures are recorded and do
    not abort the sweep. Output ordering is independent of ``jobs``."""
    cells = [(name, tr, ev, cfg, seed)
             for name, tr, ev in datasets for cfg in methods for seed in seeds]
    results = ExperimentResults()
    outputs = [None] * len(cells)

    def compute(i: int) -> None:
        name, tr, ev, cfg, seed = cells[i]
        try:
            outputs[i] = run_cell(name, tr, ev, cfg, seed)
        except Exception as exc:  # noqa: BLE001 - sweep must survive any cell
            outputs[i] = RunFailure(name, cfg.method_name, seed, str(exc))

    if jobs > 1 and len(cells) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(compute, range(len(cells))))
    else:
        for i in range(len(cells)):
            compute(i)

    for out in outputs:
        if isinstance(out, RunFailure):
            results.failures.append(out)
        else:
            results.rows.extend(out)
    return results
