# utils/datasets.py
"""CSV datasets and JSON documents, written atomically.

Real components are written with 17 significant digits and read back with
pandas' round-trip float parser, so a reload is bit-identical.
"""

import json
import logging
import os
import tempfile
from typing import Any, Dict, Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

POTENTIAL_COLUMNS = ("x", "re_v", "im_v")
PROPAGATOR_COLUMNS = ("x", "y", "t", "method", "re_k", "im_k", "err_est", "flag")
EVOLVE_COLUMNS = ("t", "x", "re_phi", "im_phi", "method")


def _atomic_write(path: str, write) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.splitext(path)[1])
    try:
        with os.fdopen(handle, "w", newline="") as stream:
            write(stream)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_dataset(frame: pd.DataFrame, path: str, columns: Sequence[str]) -> None:
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ValueError(f"dataset is missing columns {missing}")
    _atomic_write(path, lambda stream: frame.loc[:, list(columns)].to_csv(
        stream, index=False, float_format=FLOAT_FORMAT, na_rep="NaN", lineterminator="\n"))
    logger.debug("wrote %d rows to %s", len(frame), path)


def read_dataset(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip", keep_default_na=False,
                       na_values={"re_k": ["NaN"], "im_k": ["NaN"], "err_est": ["NaN"]})


def complex_columns(values, prefix: str) -> Dict[str, np.ndarray]:
    values = np.asarray(values, dtype=complex)
    return {f"re_{prefix}": values.real, f"im_{prefix}": values.imag}


def write_json(document: Dict[str, Any], path: str) -> None:
    _atomic_write(path, lambda stream: stream.write(json.dumps(document, indent=2, sort_keys=False) + "\n"))
