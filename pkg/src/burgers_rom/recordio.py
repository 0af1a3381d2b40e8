"""Shared on-disk convention: a ``key = value`` text header plus a raw
little-endian float64 data file.

A dataset ``base`` is stored as ``base.header`` and ``base.f64``. The header
is line oriented, one ``key = value`` pair per line, ``#`` starts a comment.
The data file is a flat sequence of IEEE-754 little-endian 64-bit floats;
record boundaries are implied by the header fields.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigError

HEADER_SUFFIX = ".header"
DATA_SUFFIX = ".f64"


def header_path(base: str) -> str:
    return str(base) + HEADER_SUFFIX


def data_path(base: str) -> str:
    return str(base) + DATA_SUFFIX


def exists(base: str) -> bool:
    return os.path.exists(header_path(base)) and os.path.exists(data_path(base))


def write_header(base: str, fields: dict) -> None:
    with open(header_path(base), "w") as fh:
        for key, value in fields.items():
            fh.write(f"{key} = {value}\n")


def read_header(base: str) -> dict:
    """Return the header as a str->str dict; callers convert types."""
    fields = {}
    try:
        fh = open(header_path(base))
    except OSError as exc:
        raise ConfigError(f"cannot read {header_path(base)}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{header_path(base)}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            fields[key.strip()] = value.strip().strip("'\"")
    return fields


def write_floats(base: str, array) -> None:
    np.ascontiguousarray(array, dtype="<f8").tofile(data_path(base))


def read_floats(base: str, count: int) -> np.ndarray:
    try:
        data = np.fromfile(data_path(base), dtype="<f8")
    except OSError as exc:
        raise ConfigError(f"cannot read {data_path(base)}: {exc}") from exc
    if data.size != count:
        raise ConfigError(
            f"{data_path(base)}: expected {count} float64 values, found {data.size}"
        )
    return data
