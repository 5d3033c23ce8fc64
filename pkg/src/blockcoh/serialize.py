"""JSON schemas shared across the package and the command-line tool.

A matrix is an array of rows; each entry is a two-element array [re, im] of
floats.  A state file is {"dim": d, "matrix": [...]}.  A Kraus-set file is
{"dim": d, "partition": [d_1, ...], "kraus": [matrix, ...]}.  A POVM file is
{"dim": d, "effects": [matrix, ...]}.  Partitions on the command line are
comma-separated positive integers, e.g. "2,3".
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .blockcore import BlockPartition
from .channels import KrausSet
from .naimark import Povm


class SchemaError(ValueError):
    """Input does not match the documented JSON schema."""


def matrix_to_json(mat) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in mat]


def matrix_from_json(obj, what: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{what} must be a nonempty array of rows")
    width = None
    rows = []
    for r, row in enumerate(obj):
        if not isinstance(row, list) or (width is not None and len(row) != width):
            raise SchemaError(f"{what} row {r} is not a row of the expected width")
        width = len(row)
        vals = []
        for c, entry in enumerate(row):
            if not (isinstance(entry, list) and len(entry) == 2):
                raise SchemaError(f"{what} entry ({r}, {c}) is not a [re, im] pair")
            try:
                vals.append(complex(float(entry[0]), float(entry[1])))
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{what} entry ({r}, {c}) is not numeric: {exc}") from exc
        rows.append(vals)
    return np.array(rows, dtype=complex)


def parse_partition(text: str) -> BlockPartition:
    try:
        dims = [int(x) for x in str(text).split(",") if x.strip()]
        return BlockPartition(dims)
    except ValueError as exc:
        raise SchemaError(f"bad partition {text!r}: {exc}") from exc


def partition_from_json(obj) -> BlockPartition:
    if not isinstance(obj, list):
        raise SchemaError("partition must be an array of positive integers")
    try:
        return BlockPartition([int(x) for x in obj])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad partition {obj!r}: {exc}") from exc


def state_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise SchemaError('state file must be an object with "dim" and "matrix"')
    mat = matrix_from_json(obj["matrix"], "state matrix")
    dim = int(obj.get("dim", mat.shape[0]))
    if mat.shape != (dim, dim):
        raise SchemaError(f"state matrix is {mat.shape[0]}x{mat.shape[1]}, expected {dim}x{dim}")
    return mat


def kraus_to_json(ks: KrausSet) -> dict:
    return {
        "dim": ks.dim,
        "partition": list(ks.partition.dims),
        "kraus": [matrix_to_json(op) for op in ks.operators],
    }


def kraus_from_json(obj) -> KrausSet:
    if not isinstance(obj, dict) or "kraus" not in obj or "partition" not in obj:
        raise SchemaError('Kraus file must be an object with "dim", "partition" and "kraus"')
    partition = partition_from_json(obj["partition"])
    dim = int(obj.get("dim", partition.total))
    if dim != partition.total:
        raise SchemaError(f"dim {dim} does not match partition total {partition.total}")
    if not isinstance(obj["kraus"], list) or not obj["kraus"]:
        raise SchemaError('"kraus" must be a nonempty array of matrices')
    ops = []
    for n, raw in enumerate(obj["kraus"]):
        op = matrix_from_json(raw, f"operator {n}")
        if op.shape != (dim, dim):
            raise SchemaError(
                f"operator {n} is {op.shape[0]}x{op.shape[1]}, expected {dim}x{dim}"
            )
        ops.append(op)
    return KrausSet(partition, np.array(ops))


def povm_to_json(povm: Povm) -> dict:
    return {"dim": povm.dim, "effects": [matrix_to_json(e) for e in povm.effects]}


def povm_from_json(obj) -> Povm:
    if not isinstance(obj, dict) or "effects" not in obj:
        raise SchemaError('POVM file must be an object with "dim" and "effects"')
    if not isinstance(obj["effects"], list) or not obj["effects"]:
        raise SchemaError('"effects" must be a nonempty array of matrices')
    effects = []
    dim = obj.get("dim")
    for i, raw in enumerate(obj["effects"]):
        e = matrix_from_json(raw, f"effect {i}")
        if dim is not None and e.shape != (int(dim), int(dim)):
            raise SchemaError(f"effect {i} is {e.shape[0]}x{e.shape[1]}, expected {dim}x{dim}")
        effects.append(e)
    try:
        return Povm(np.array(effects))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def write_json_atomic(path: str, obj):
    """Serialize to a sibling temp file, then rename over the target."""
    text = dumps(obj)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".blockcoh-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
