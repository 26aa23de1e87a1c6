"""Adult benchmark: DLN vs. min-max network with validation-tuned step size and steps.

Protocol: the UCI train file is split at random into 26,065 training and
6,496 validation rows; hyperparameters and the number of training steps are
chosen on validation accuracy; the UCI test file (16,281 rows) is scored
once per model.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .data import ingest_csv, load_schema, split_train_validation
from .grid import GridResult, grid_search
from .network import MonotonicityReport, check_monotonicity
from .serialization import save_model
from .trainer import evaluate

ADULT_TRAIN_ROWS = 26065
DLN_ARCH = "cal:100 - lin:350/70m - cal:100 - ens:70x5 - cal:100 - lin:1/1m"
DLN_GRID = {"step_size": [1e-3, 3e-3], "num_steps": [3000]}
MINMAX_GRID = {"step_size": [1e-3, 3e-3], "num_steps": [4000]}
MINMAX_SHAPE = (70, 9)


def schema_path() -> Path:
    return Path(str(resources.files("monolat") / "schemas" / "adult.schema"))


@dataclass
class ModelResult:
    name: str
    grid: GridResult
    val_accuracy: float
    test_accuracy: float
    num_params: int
    seconds: float

    @property
    def model(self):
        return self.grid.best_model


@dataclass
class AdultResult:
    dln: ModelResult
    minmax: ModelResult
    monotonicity: MonotonicityReport
    sizes: dict = field(default_factory=dict)

    def summary(self) -> str:
        lines = [f"rows: {self.sizes}"]
        for r in (self.dln, self.minmax):
            lines.append(
                f"{r.name:10s} val {100 * r.val_accuracy:.2f}%  test {100 * r.test_accuracy:.2f}%  "
                f"params {r.num_params}  best {r.grid.best.params} step {r.grid.best.best_step}  ({r.seconds:.0f}s)"
            )
        lines.append(
            f"monotonicity check: {self.monotonicity.num_pairs} pairs, {len(self.monotonicity)} violations"
        )
        return "\n".join(lines)


def load_adult(data_dir, seed: int = 0):
    data_dir = Path(data_dir)
    schema = load_schema(schema_path())
    full = ingest_csv(data_dir / "train.csv", schema)
    test = ingest_csv(data_dir / "test.csv", schema, full.vocabulary)
    train, val = split_train_validation(full, seed=seed, train_size=ADULT_TRAIN_ROWS)
    return schema, full, train, val, test


def _run(name, model_type, grid, model_kwargs, train, val, test, seed) -> ModelResult:
    t0 = time.time()
    res = grid_search(model_type, train, val, grid, {"seed": seed, "batch_size": 256}, 500, model_kwargs)
    model = res.best_model
    return ModelResult(
        name, res, evaluate(model, val.X, val.y), evaluate(model, test.X, test.y),
        model.num_params(), time.time() - t0,
    )


def reproduce(data_dir="data/adult", seed: int = 0, out_dir=None, monotonicity_pairs: int = 100_000) -> AdultResult:
    schema, full, train, val, test = load_adult(data_dir, seed)
    dln = _run("DLN", "dln", DLN_GRID, {"arch": DLN_ARCH}, train, val, test, seed)
    g, s = MINMAX_SHAPE
    minmax = _run("min-max", "minmax", MINMAX_GRID, {"num_groups": g, "group_size": s}, train, val, test, seed)
    report = check_monotonicity(dln.model, monotonicity_pairs, seed=seed, X=full.X)
    result = AdultResult(dln, minmax, report, {"train": len(train), "validation": len(val), "test": len(test)})
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in (dln, minmax):
            save_model(r.model, out / f"adult_{r.grid.best_model.model_type}.json",
                       schema=schema, vocabulary=full.vocabulary)
        summary = {
            r.name: {"val_accuracy": r.val_accuracy, "test_accuracy": r.test_accuracy,
                     "num_params": r.num_params, "best": r.grid.best.params, "best_step": r.grid.best.best_step}
            for r in (dln, minmax)
        }
        summary["monotonicity_violations"] = len(report)
        (out / "adult_summary.json").write_text(json.dumps(summary, indent=1) + "\n", encoding="utf-8")
    return result
