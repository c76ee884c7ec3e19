"""Delimited and binary output formats.

CSV files start with ``# key=value`` header lines (order ``n``, triple,
stream label, random-stream algorithm) and write floats with ``repr`` so
values round-trip exactly.  The binary minor layout is ``n`` as a
little-endian unsigned 64-bit integer followed by ``n*n`` little-endian
IEEE-754 doubles in row-major order.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidInputError
from .matdist import DistanceMinor


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _header(meta: Mapping) -> list[str]:
    return [f"# {k}={fmt(v)}" for k, v in meta.items()]


def _write_lines(path: Path, lines: Iterable[str]) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        for line in lines:
            fh.write(line + "\n")
    return path


def read_header(path) -> dict[str, str]:
    meta = {}
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if line.startswith("# ") and "=" in line:
                k, _, v = line[2:].rstrip("\n").partition("=")
                meta[k] = v
    return meta


def _data_lines(path) -> list[str]:
    with open(path, encoding="ascii") as fh:
        return [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]


# -- minors -----------------------------------------------------------------


def write_minor_csv(path, m: DistanceMinor, **meta) -> Path:
    head = {"n": m.n, "triple": m.triple_name, "seed": m.seed, **meta}
    rows = (",".join(fmt(v) for v in row) for row in m.entries)
    return _write_lines(path, [*_header(head), *rows])


def read_minor_csv(path) -> DistanceMinor:
    meta = read_header(path)
    rows = [[float(v) for v in ln.split(",")] for ln in _data_lines(path)]
    a = np.array(rows, dtype=float)
    if "n" in meta and a.shape != (int(meta["n"]), int(meta["n"])):
        raise InvalidInputError(f"{path}: header says n={meta['n']} but found {a.shape}")
    return DistanceMinor(a, meta.get("triple", ""), meta.get("seed") or None)


def write_minor_bin(path, m: DistanceMinor) -> Path:
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", m.n))
        fh.write(np.ascontiguousarray(m.entries, dtype="<f8").tobytes())
    return path


def read_minor_bin(path, triple_name: str = "") -> DistanceMinor:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise InvalidInputError(f"{path}: truncated header")
    (n,) = struct.unpack_from("<Q", data, 0)
    if len(data) != 8 + 8 * n * n:
        raise InvalidInputError(f"{path}: expected {8 + 8 * n * n} bytes, found {len(data)}")
    a = np.frombuffer(data, dtype="<f8", offset=8).reshape(n, n).astype(float)
    return DistanceMinor(a, triple_name)


# -- spectra ----------------------------------------------------------------


def write_spectrum_csv(path, atoms, footer: Mapping | None = None, **meta) -> Path:
    lines = [*_header(meta), "eigenvalue", *(fmt(float(x)) for x in atoms)]
    if footer:
        lines += _header(footer)
    return _write_lines(path, lines)


def read_spectrum_csv(path) -> np.ndarray:
    lines = _data_lines(path)
    return np.array([float(x) for x in lines[1:]])


def write_operator_csv(path, spectrum, **meta) -> Path:
    rows = [
        ",".join([str(i + 1), fmt(float(v)), spectrum.method, str(spectrum.resolution)])
        for i, v in enumerate(spectrum.eigenvalues)
    ]
    return _write_lines(path, [*_header(meta), "rank,eigenvalue,method,resolution", *rows])


# -- tables and JSON --------------------------------------------------------


def write_table_csv(path, columns: list[str], rows: Iterable[Iterable], **meta) -> Path:
    body = [",".join(fmt(v) for v in row) for row in rows]
    return _write_lines(path, [*_header(meta), ",".join(columns), *body])


def read_table_csv(path) -> list[dict[str, str]]:
    lines = _data_lines(path)
    return list(csv.DictReader(lines))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def write_json(path, obj: Mapping) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="ascii")
    return path
