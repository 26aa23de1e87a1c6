"""Versioned JSON model files.

Floats are written with ``repr`` precision, so loading a file reproduces the
model's evaluations bit for bit.  Files contain no timestamps: saving the
same model twice gives identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .baselines import MinMaxNet, MonotonicDNN
from .lattice import VERTEX_INDEXING
from .network import (
    CalibrationLayer,
    EnsembleLayer,
    LinearLayer,
    Network,
    NetworkSpec,
    parse_arch,
)

FORMAT = "monolat-model"
FORMAT_VERSION = 1


class ModelFileError(ValueError):
    pass


def _arr(a) -> dict:
    a = np.asarray(a)
    return {"shape": list(a.shape), "data": a.ravel().tolist()}


def _unarr(d, dtype=float) -> np.ndarray:
    return np.asarray(d["data"], dtype=dtype).reshape(d["shape"])


def model_to_dict(model, schema=None, vocabulary=None, train_config=None) -> dict:
    out = {
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        "vertex_indexing": VERTEX_INDEXING,
        "model_type": model.model_type,
        "num_inputs": int(model.num_inputs),
        "monotone_inputs": [bool(v) for v in model.monotone_inputs],
        "seed": model.seed,
    }
    if isinstance(model, Network):
        out["architecture"] = model.arch
        out["all_calibrators_monotone"] = bool(model.spec.all_calibrators_monotone)
        layers = []
        for layer in model.layers:
            d = {"kind": layer.kind}
            if isinstance(layer, CalibrationLayer):
                d.update(num_keypoints=layer.num_keypoints, a_min=_arr(layer.a_min), a_max=_arr(layer.a_max))
            elif isinstance(layer, LinearLayer):
                d.update(out_dim=layer.out_dim, mono_out_dim=layer.mono_out_dim, cross=layer.cross)
            elif isinstance(layer, EnsembleLayer):
                d.update(
                    num_lattices=layer.num_lattices,
                    lattice_dim=layer.lattice_dim,
                    permutation=layer.permutation.tolist(),
                    interpolation=layer.interpolation,
                )
            d["params"] = {name: _arr(layer.params[name]) for name in layer.param_names}
            layers.append(d)
        out["layers"] = layers
    else:
        out["input_shift"] = _arr(model.input_shift)
        out["input_scale"] = _arr(model.input_scale)
        if isinstance(model, MinMaxNet):
            out.update(num_groups=model.num_groups, group_size=model.group_size)
        elif isinstance(model, MonotonicDNN):
            out["hidden"] = list(model.hidden)
        out["params"] = {name: _arr(model.params[name]) for name in model.param_names}
    if schema is not None:
        out["schema"] = schema.to_dict()
    if vocabulary is not None:
        out["vocabulary"] = vocabulary
    if train_config is not None:
        out["train_config"] = train_config
    return out


def model_from_dict(d: dict):
    if d.get("format") != FORMAT:
        raise ModelFileError("not a monolat model file")
    if d.get("format_version") != FORMAT_VERSION:
        raise ModelFileError(f"unsupported model file version {d.get('format_version')}")
    if d.get("vertex_indexing") != VERTEX_INDEXING:
        raise ModelFileError(f"unsupported vertex indexing {d.get('vertex_indexing')!r}")
    kind = d["model_type"]
    mono = np.asarray(d["monotone_inputs"], dtype=bool)
    if kind == "dln":
        return _network_from_dict(d, mono)
    if kind == "minmax":
        model = MinMaxNet(d["num_inputs"], d["num_groups"], d["group_size"], mono, seed=d["seed"])
    elif kind == "mono-dnn":
        model = MonotonicDNN(d["num_inputs"], d["hidden"], seed=d["seed"])
    else:
        raise ModelFileError(f"unknown model type {kind!r}")
    model.input_shift = _unarr(d["input_shift"])
    model.input_scale = _unarr(d["input_scale"])
    for name in model.param_names:
        model.params[name] = _unarr(d["params"][name])
    return model


def _network_from_dict(d, mono) -> Network:
    all_mono = bool(d.get("all_calibrators_monotone", False))
    specs = parse_arch(d["architecture"])
    if len(specs) != len(d["layers"]):
        raise ModelFileError("architecture string and layer list disagree")
    layers = []
    wires = mono
    for ld in d["layers"]:
        k = ld["kind"]
        if k == "cal":
            rng = np.stack([_unarr(ld["a_min"]), _unarr(ld["a_max"])], axis=1)
            layer = CalibrationLayer(wires, ld["num_keypoints"], rng, all_mono)
        elif k == "lin":
            layer = LinearLayer(wires, ld["out_dim"], ld["mono_out_dim"], ld["cross"])
        elif k == "ens":
            layer = EnsembleLayer(
                wires, ld["num_lattices"], ld["lattice_dim"], ld["permutation"], ld.get("interpolation", "multilinear")
            )
        else:
            raise ModelFileError(f"unknown layer kind {k!r}")
        for name in layer.param_names:
            arr = _unarr(ld["params"][name])
            if arr.shape != layer.params[name].shape:
                raise ModelFileError(f"layer {k}: parameter {name} has shape {arr.shape}, expected {layer.params[name].shape}")
            layer.params[name] = arr
        layers.append(layer)
        wires = layer.out_mono
    first = layers[0]
    ranges = np.stack([first.a_min, first.a_max], axis=1) if isinstance(first, CalibrationLayer) else None
    spec = NetworkSpec(specs, int(d["num_inputs"]), mono, all_mono, ranges)
    return Network(spec, layers, d.get("seed"))


def dumps(model, **extra) -> str:
    return json.dumps(model_to_dict(model, **extra), indent=1) + "\n"


def save_model(model, path, **extra) -> None:
    Path(path).write_text(dumps(model, **extra), encoding="utf-8")


def load_model_file(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: invalid JSON ({exc})") from None


def load_model(path):
    return model_from_dict(load_model_file(path))
