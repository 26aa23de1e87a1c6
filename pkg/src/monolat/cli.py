"""Command line interface: ``monolat train|eval|predict|grid|adult``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .data import DatasetSchema, SchemaError, ingest_csv, load_schema, split_train_validation
from .estimators import DEFAULT_ARCH, MODEL_TYPES
from .grid import fit_one, grid_search
from .serialization import ModelFileError, load_model_file, model_from_dict, save_model
from .trainer import TrainingDiverged, evaluate

logger = logging.getLogger("monolat")


class CLIError(Exception):
    pass


def _add_common(p):
    p.add_argument("--schema", required=True, type=Path, help="schema sidecar file")
    p.add_argument("--data", required=True, type=Path, help="training CSV (header row required)")
    p.add_argument("--model", choices=MODEL_TYPES, default="dln", help="model family")
    p.add_argument("--arch", default=DEFAULT_ARCH, help="DLN architecture string")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=3000)
    p.add_argument("--batch", type=int, default=256)
    p.add_argument("--step-size", type=float, default=3e-3)
    p.add_argument("--groups", type=int, default=70, help="min-max groups G")
    p.add_argument("--group-size", type=int, default=9, help="min-max units per group S")
    p.add_argument("--hidden", default="100", help="monotonic DNN hidden widths, comma separated")
    p.add_argument("--all-calibrators-monotone", action="store_true")
    p.add_argument("--validation-fraction", type=float, default=0.0,
                   help="hold out this fraction of --data to choose the step count")
    p.add_argument("--train-size", type=int, default=None, help="exact number of training rows after the split")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--eval-every", type=int, default=500)
    p.add_argument("--model-file", required=True, type=Path, help="where to write the trained model")
    p.add_argument("--log", type=Path, default=None, help="write the step,loss[,val_metric] log here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monolat", description="Monotone deep lattice networks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model and save it")
    _add_common(p)

    p = sub.add_parser("eval", help="report accuracy or MSE of a saved model")
    p.add_argument("--model-file", required=True, type=Path)
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--schema", type=Path, default=None, help="must match the schema the model was trained with")

    p = sub.add_parser("predict", help="write one score per row")
    p.add_argument("--model-file", required=True, type=Path)
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--schema", type=Path, default=None)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("grid", help="validation-set grid search")
    _add_common(p)
    p.add_argument("--grid", required=True, type=Path, help="JSON file mapping hyperparameter -> list of values")

    p = sub.add_parser("adult", help="reproduce the Adult benchmark comparison")
    p.add_argument("--data-dir", type=Path, default=Path("data/adult"))
    p.add_argument("--out-dir", type=Path, default=None)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _datasets(args):
    schema = load_schema(args.schema)
    data = ingest_csv(args.data, schema)
    if args.validation_fraction > 0 or args.train_size is not None:
        train_ds, val_ds = split_train_validation(
            data, 1.0 - args.validation_fraction, args.split_seed, args.train_size
        )
    else:
        train_ds, val_ds = data, None
    if args.model == "dln" and schema.label.positive is None:
        logger.info("regression label: training with squared loss")
    return schema, data, train_ds, val_ds


def _params(args, schema) -> dict:
    return {
        "step_size": args.step_size,
        "num_steps": args.steps,
        "batch_size": args.batch,
        "seed": args.seed,
        "loss": "logistic" if schema.is_classification else "squared",
    }


def _model_kwargs(args) -> dict:
    kw = {"arch": args.arch, "all_calibrators_monotone": args.all_calibrators_monotone}
    if args.model == "minmax":
        kw.update(num_groups=args.groups, group_size=args.group_size)
    if args.model == "mono-dnn":
        kw["hidden"] = tuple(int(h) for h in args.hidden.split(",") if h)
    return kw


def _save(model, args, schema, data, params, log):
    save_model(model, args.model_file, schema=schema, vocabulary=data.vocabulary, train_config=params)
    if args.log is not None:
        args.log.write_text(log.to_csv(), encoding="utf-8")


def cmd_train(args) -> int:
    schema, data, train_ds, val_ds = _datasets(args)
    params = _params(args, schema)
    model, log, _ = fit_one(args.model, train_ds, val_ds, params, args.eval_every, _model_kwargs(args))
    _save(model, args, schema, data, params, log)
    metric = "accuracy" if schema.is_classification else "mse"
    print(f"train {metric}: {evaluate(model, train_ds.X, train_ds.y, metric):.6f}")
    if val_ds is not None and len(val_ds):
        print(f"validation {metric}: {evaluate(model, val_ds.X, val_ds.y, metric):.6f} (step {log.best_step})")
    return 0


def cmd_grid(args) -> int:
    schema, data, train_ds, val_ds = _datasets(args)
    if val_ds is None:
        raise CLIError("grid search needs --validation-fraction or --train-size to hold out validation data")
    grid = json.loads(args.grid.read_text(encoding="utf-8"))
    params = _params(args, schema)
    result = grid_search(args.model, train_ds, val_ds, grid, params, args.eval_every, _model_kwargs(args))
    print(result.report())
    best = {**params, **result.best.params}
    _save(result.best_model, args, schema, data, best, result.best_log)
    print(f"best: {result.best.params} validation {result.metric} {result.best.val_metric:.6f}")
    return 0


def _load_for_data(args):
    d = load_model_file(args.model_file)
    model = model_from_dict(d)
    if "schema" not in d:
        raise CLIError(f"{args.model_file} has no schema snapshot")
    saved = DatasetSchema.from_dict(d["schema"])
    if args.schema is not None:
        given = load_schema(args.schema)
        if given.to_dict() != saved.to_dict():
            raise SchemaError(f"schema {args.schema} does not match the schema stored in {args.model_file}")
    data = ingest_csv(args.data, saved, d.get("vocabulary", {}))
    if data.num_features != model.num_inputs:
        raise SchemaError(f"data encodes to {data.num_features} features, model expects {model.num_inputs}")
    return model, saved, data


def cmd_eval(args) -> int:
    model, schema, data = _load_for_data(args)
    metric = "accuracy" if schema.is_classification else "mse"
    print(f"{metric}: {evaluate(model, data.X, data.y, metric):.6f}")
    return 0


def cmd_predict(args) -> int:
    model, _, data = _load_for_data(args)
    scores = model.predict(data.X)
    with open(args.out, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["score"])
        w.writerows([repr(float(s))] for s in scores)
    print(f"wrote {len(scores)} predictions to {args.out}")
    return 0


def cmd_adult(args) -> int:
    from .adult import reproduce

    res = reproduce(args.data_dir, seed=args.seed, out_dir=args.out_dir)
    print(res.summary())
    return 0


COMMANDS = {"train": cmd_train, "eval": cmd_eval, "predict": cmd_predict, "grid": cmd_grid, "adult": cmd_adult}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (CLIError, SchemaError, ModelFileError, TrainingDiverged, FileNotFoundError, ValueError) as exc:
        print(f"monolat {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
