# -*- coding: utf-8 -*-
"""Comma-separated tables with a header row."""
import os
from typing import Any, Sequence

import numpy as np


def write_table(
    path: str,
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
) -> None:
    """Write rows of mixed values as CSV. Floats keep full precision.

    Args:
        path (`str`):
            The file to write, parent directories are created.
        header (`Sequence[str]`):
            The column names.
        rows (`Sequence[Sequence[Any]]`):
            The rows, each as long as the header.
    """
    dirname = os.path.dirname(path)
    if dirname:
        os.makedirs(dirname, exist_ok=True)

    cells = np.array(
        [
            [repr(float(_)) if isinstance(_, float) else str(_) for _ in row]
            for row in rows
        ],
        dtype=object,
    ).reshape(len(rows), len(header))
    np.savetxt(
        path,
        cells,
        fmt="%s",
        delimiter=",",
        header=",".join(header),
        comments="",
    )


def read_table(path: str) -> np.ndarray:
    """Read a table written by `write_table` as a structured array with
    the header as verbatim field names."""
    return np.genfromtxt(
        path,
        delimiter=",",
        names=True,
        deletechars="",
        dtype=None,
        encoding="utf-8",
    )
