"""CSV ingestion driven by a small schema sidecar file.

Schema files list one column per line::

    # name  kind  [option=value ...]
    age            numeric  range=0:100
    workclass      categorical
    fnlwgt         ignore
    sex            numeric  map=Female:0,Male:1  monotone=increasing
    capital-gain   numeric  monotone=increasing  range=0:100000
    income         label    positive=>50K,>50K.  negative=<=50K,<=50K.

Kinds are ``numeric``, ``categorical``, ``label`` and ``ignore``.  Numeric
options: ``monotone=increasing|decreasing``, ``range=lo:hi`` (input range of
the feature's calibrator) and ``map=text:value,...``.  A label with
``positive=`` is binary (1 for the listed values, 0 for ``negative=`` values or
anything else when ``negative`` is omitted); otherwise it is parsed as a real
number for regression.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    pass


KINDS = ("numeric", "categorical", "label", "ignore")


@dataclass(frozen=True)
class Column:
    name: str
    kind: str
    monotone: str | None = None  # "increasing" | "decreasing"
    input_range: tuple[float, float] | None = None
    mapping: tuple[tuple[str, float], ...] | None = None
    positive: tuple[str, ...] | None = None
    negative: tuple[str, ...] | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "kind": self.kind}
        for key in ("monotone", "input_range", "mapping", "positive", "negative"):
            value = getattr(self, key)
            if value is not None:
                d[key] = [list(v) for v in value] if key == "mapping" else (list(value) if isinstance(value, tuple) else value)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Column":
        return cls(
            d["name"],
            d["kind"],
            d.get("monotone"),
            tuple(d["input_range"]) if d.get("input_range") is not None else None,
            tuple((k, float(v)) for k, v in d["mapping"]) if d.get("mapping") is not None else None,
            tuple(d["positive"]) if d.get("positive") is not None else None,
            tuple(d["negative"]) if d.get("negative") is not None else None,
        )


@dataclass(frozen=True)
class DatasetSchema:
    columns: tuple[Column, ...]

    def __post_init__(self):
        labels = [c for c in self.columns if c.kind == "label"]
        if len(labels) != 1:
            raise SchemaError(f"schema needs exactly one label column, found {len(labels)}")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate column names in schema")
        for c in self.columns:
            if c.kind not in KINDS:
                raise SchemaError(f"column {c.name!r}: unknown kind {c.kind!r}")
            if c.monotone is not None and c.kind != "numeric":
                raise SchemaError(f"column {c.name!r}: only numeric columns can be monotone")
            if c.monotone not in (None, "increasing", "decreasing"):
                raise SchemaError(f"column {c.name!r}: monotone must be increasing or decreasing")
            if c.input_range is not None and not c.input_range[0] < c.input_range[1]:
                raise SchemaError(f"column {c.name!r}: empty range {c.input_range}")

    @property
    def label(self) -> Column:
        return next(c for c in self.columns if c.kind == "label")

    @property
    def is_classification(self) -> bool:
        return self.label.positive is not None

    def to_dict(self) -> dict:
        return {"columns": [c.to_dict() for c in self.columns]}

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetSchema":
        return cls(tuple(Column.from_dict(c) for c in d["columns"]))


def parse_schema(text: str) -> DatasetSchema:
    cols = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, kind, *opts = line.split()
        kw: dict = {}
        for opt in opts:
            key, sep, value = opt.partition("=")
            if not sep:
                raise SchemaError(f"line {lineno}: option {opt!r} is not key=value")
            if key == "monotone":
                kw["monotone"] = value
            elif key == "range":
                lo, _, hi = value.partition(":")
                try:
                    kw["input_range"] = (float(lo), float(hi))
                except ValueError:
                    raise SchemaError(f"line {lineno}: bad range {value!r}") from None
            elif key == "map":
                pairs = []
                for item in value.split(","):
                    k, _, v = item.rpartition(":")
                    pairs.append((k, float(v)))
                kw["mapping"] = tuple(pairs)
            elif key in ("positive", "negative"):
                kw[key] = tuple(value.split(","))
            else:
                raise SchemaError(f"line {lineno}: unknown option {key!r}")
        cols.append(Column(name, kind, **kw))
    return DatasetSchema(tuple(cols))


def load_schema(path) -> DatasetSchema:
    return parse_schema(Path(path).read_text(encoding="utf-8"))


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str]
    monotone: np.ndarray
    input_ranges: np.ndarray  # (F, 2); NaN where the column declares no range
    vocabulary: dict[str, list[str]] = field(default_factory=dict)

    def __len__(self):
        return len(self.y)

    @property
    def num_features(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx], self.feature_names, self.monotone, self.input_ranges, self.vocabulary)

    def ranges_or(self, default: tuple[float, float]) -> np.ndarray:
        r = self.input_ranges.copy()
        missing = np.isnan(r).any(axis=1)
        r[missing] = default
        return r


def read_rows(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f, skipinitialspace=True)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file, a header row is required") from None
        rows = [[v.strip() for v in row] for row in reader if row and any(v.strip() for v in row)]
    return header, rows


def ingest_csv(path, schema: DatasetSchema, vocabulary: dict[str, list[str]] | None = None) -> Dataset:
    """Read a CSV file into a feature matrix following ``schema``.

    Categorical columns are one-hot encoded against ``vocabulary``; when it is
    ``None`` the vocabulary is built from this file (sorted category values),
    so pass the training set's vocabulary when reading validation or test
    data.  Unseen categories encode as all zeros.  Decreasing-monotone
    features are negated so the model can treat them as increasing.
    """
    header, rows = read_rows(path)
    return encode_rows(header, rows, schema, vocabulary, source=str(path))


def encode_rows(header, rows, schema: DatasetSchema, vocabulary=None, source="<rows>") -> Dataset:
    pos = {name: i for i, name in enumerate(header)}
    for c in schema.columns:
        if c.name not in pos:
            raise SchemaError(f"{source}: missing column {c.name!r}")
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise SchemaError(f"{source}: row {r + 2} has {len(row)} fields, header has {len(header)}")

    fit_vocab = vocabulary is None
    vocabulary = {} if fit_vocab else {k: list(v) for k, v in vocabulary.items()}
    blocks, names, mono, ranges = [], [], [], []
    y = None
    for c in schema.columns:
        values = [row[pos[c.name]] for row in rows]
        if c.kind == "ignore":
            continue
        if c.kind == "label":
            y = _encode_label(c, values, source)
        elif c.kind == "numeric":
            col = _encode_numeric(c, values, source)
            rng = c.input_range
            if c.monotone == "decreasing":
                col = -col
                rng = (-rng[1], -rng[0]) if rng is not None else None
            blocks.append(col[:, None])
            names.append(c.name)
            mono.append(c.monotone is not None)
            ranges.append(rng if rng is not None else (np.nan, np.nan))
        else:
            if fit_vocab:
                vocabulary[c.name] = sorted(set(values))
            if c.name not in vocabulary:
                raise SchemaError(f"no vocabulary for categorical column {c.name!r}")
            cats = vocabulary[c.name]
            index = {v: i for i, v in enumerate(cats)}
            onehot = np.zeros((len(values), len(cats)))
            for r, v in enumerate(values):
                j = index.get(v)
                if j is not None:
                    onehot[r, j] = 1.0
            blocks.append(onehot)
            names.extend(f"{c.name}={v}" for v in cats)
            mono.extend([False] * len(cats))
            ranges.extend([(np.nan, np.nan)] * len(cats))
    X = np.hstack(blocks) if blocks else np.zeros((len(rows), 0))
    return Dataset(
        X, y, names, np.array(mono, dtype=bool), np.array(ranges, dtype=float).reshape(-1, 2), vocabulary
    )


def _encode_numeric(c: Column, values, source) -> np.ndarray:
    mapping = dict(c.mapping) if c.mapping else {}
    out = np.empty(len(values))
    for r, v in enumerate(values):
        if v in mapping:
            out[r] = mapping[v]
            continue
        try:
            out[r] = float(v)
        except ValueError:
            raise SchemaError(f"{source}: row {r + 2}, column {c.name!r}: non-numeric value {v!r}") from None
        if not np.isfinite(out[r]):
            raise SchemaError(f"{source}: row {r + 2}, column {c.name!r}: non-finite value {v!r}")
    return out


def _encode_label(c: Column, values, source) -> np.ndarray:
    if c.positive is None:
        return _encode_numeric(c, values, source)
    pos, neg = set(c.positive), set(c.negative or ())
    out = np.empty(len(values))
    for r, v in enumerate(values):
        if v in pos:
            out[r] = 1.0
        elif not neg or v in neg:
            out[r] = 0.0
        else:
            raise SchemaError(f"{source}: row {r + 2}: unknown label {v!r}")
    return out


def split_train_validation(dataset: Dataset, fraction: float = 0.8, seed: int = 0, train_size: int | None = None):
    """Seeded random split into disjoint, exhaustive train and validation parts.

    ``train_size`` overrides ``fraction`` when an exact row count is wanted.
    """
    n = len(dataset)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    n_train = int(round(fraction * n)) if train_size is None else int(train_size)
    if not 0 <= n_train <= n:
        raise ValueError(f"train size {n_train} out of range for {n} rows")
    perm = np.random.default_rng(seed).permutation(n)
    return dataset.subset(np.sort(perm[:n_train])), dataset.subset(np.sort(perm[n_train:]))
