"""Binary checkpoint format with byte-exact round trips.

Layout: 8-byte magic, u32 format version, u64 header length, canonical-JSON
header, then the raw little-endian tensor payload. The header carries the
model config, run metadata, optimizer scalars, and a tensor directory with
names, shapes, groups, and payload offsets.
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from gazekit.autodiff import Tensor
from gazekit.errors import DataError
from gazekit.model import ModelConfig, init_params
from gazekit.training.optim import OptimState

MAGIC = b"GZKTCKPT"
FORMAT_VERSION = 1

_DTYPE_TAGS = {"float64": "<f8", "float32": "<f4"}


@dataclass
class Checkpoint:
    """Deserialized model snapshot: config, weights, optimizer state, step."""

    config: ModelConfig
    params: dict
    step: int = 0
    optim: Optional[OptimState] = None
    meta: dict = field(default_factory=dict)

    @property
    def dtype(self):
        return next(iter(self.params.values())).dtype

    def to_tensors(self) -> dict:
        return {k: Tensor(v.copy(), requires_grad=True) for k, v in self.params.items()}

    @staticmethod
    def from_tensors(config: ModelConfig, params: dict, step: int = 0, optim: Optional[OptimState] = None, meta: Optional[dict] = None) -> "Checkpoint":
        return Checkpoint(
            config=config,
            params={k: p.data.copy() for k, p in params.items()},
            step=step,
            optim=optim,
            meta=dict(meta or {}),
        )


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dtype_name = str(ckpt.dtype)
    if dtype_name not in _DTYPE_TAGS:
        raise DataError(f"save_checkpoint: unsupported dtype {dtype_name}")
    tag = _DTYPE_TAGS[dtype_name]

    entries = []
    blobs = []
    offset = 0

    def push(group, name, arr):
        nonlocal offset
        raw = np.ascontiguousarray(arr, dtype=tag).tobytes()
        entries.append(
            {"name": name, "group": group, "shape": list(arr.shape), "offset": offset, "nbytes": len(raw)}
        )
        blobs.append(raw)
        offset += len(raw)

    for name in sorted(ckpt.params):
        push("param", name, ckpt.params[name])
    optim_header = None
    if ckpt.optim is not None:
        st = ckpt.optim
        optim_header = {
            "step": st.step,
            "beta1": st.beta1,
            "beta2": st.beta2,
            "eps": st.eps,
            "weight_decay": st.weight_decay,
            "decoupled": st.decoupled,
        }
        for name in sorted(st.m):
            push("m", name, st.m[name])
        for name in sorted(st.v):
            push("v", name, st.v[name])

    header = {
        "format_version": FORMAT_VERSION,
        "dtype": dtype_name,
        "step": ckpt.step,
        "model_config": ckpt.config.to_dict(),
        "optim": optim_header,
        "meta": ckpt.meta,
        "tensors": entries,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<Q", len(header_bytes)))
        fh.write(header_bytes)
        for raw in blobs:
            fh.write(raw)


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise DataError(f"checkpoint not found: {path}")
    blob = path.read_bytes()
    if len(blob) < len(MAGIC) + 12 or blob[: len(MAGIC)] != MAGIC:
        raise DataError(f"{path}: not a gazekit checkpoint (bad magic)")
    (version,) = struct.unpack_from("<I", blob, len(MAGIC))
    if version != FORMAT_VERSION:
        raise DataError(f"{path}: checkpoint format version {version}, expected {FORMAT_VERSION}")
    (header_len,) = struct.unpack_from("<Q", blob, len(MAGIC) + 4)
    header_start = len(MAGIC) + 12
    payload_start = header_start + header_len
    if payload_start > len(blob):
        raise DataError(f"{path}: truncated checkpoint (header)")
    try:
        header = json.loads(blob[header_start:payload_start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: corrupted checkpoint header: {exc}") from exc

    dtype_name = header["dtype"]
    if dtype_name not in _DTYPE_TAGS:
        raise DataError(f"{path}: unsupported payload dtype {dtype_name}")
    tag = _DTYPE_TAGS[dtype_name]
    config = ModelConfig.from_dict(header["model_config"])

    groups = {"param": {}, "m": {}, "v": {}}
    for entry in header["tensors"]:
        start = payload_start + entry["offset"]
        end = start + entry["nbytes"]
        if end > len(blob):
            raise DataError(f"{path}: truncated checkpoint (tensor {entry['name']!r})")
        arr = np.frombuffer(blob[start:end], dtype=tag).reshape(entry["shape"])
        groups[entry["group"]][entry["name"]] = arr.astype(dtype_name, copy=True)

    expected = {name: p.data.shape for name, p in init_params(config, seed=0).items()}
    if set(groups["param"]) != set(expected):
        missing = sorted(set(expected) - set(groups["param"]))
        extra = sorted(set(groups["param"]) - set(expected))
        raise DataError(f"{path}: parameter names do not match config (missing {missing}, unexpected {extra})")
    for name, arr in groups["param"].items():
        if arr.shape != expected[name]:
            raise DataError(
                f"{path}: tensor {name!r} has shape {arr.shape}, config expects {expected[name]}"
            )

    optim = None
    if header.get("optim") is not None:
        oh = header["optim"]
        optim = OptimState(
            m=groups["m"],
            v=groups["v"],
            step=oh["step"],
            beta1=oh["beta1"],
            beta2=oh["beta2"],
            eps=oh["eps"],
            weight_decay=oh["weight_decay"],
            decoupled=oh["decoupled"],
        )
    return Checkpoint(config=config, params=groups["param"], step=header["step"], optim=optim, meta=header.get("meta", {}))
