"""
Utility functions for reading inputs and writing CSV/JSON results.
"""

import json
import math
import sys
from typing import Any, Optional

import numpy as np
import pandas as pd

from chains import StochasticMatrix, validate_stochastic
from errors import ValidationError
from graph import probability_vector

SIGNIFICANT_DIGITS = 12
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"
INFINITY = "Infinity"


def format_number(x: float) -> str:
    """12 significant digits; +inf prints as 'inf'."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FORMAT % x


def distribution_frame(pmf) -> pd.DataFrame:
    """One row per state: index, p."""
    pmf = np.asarray(pmf, dtype=float)
    return pd.DataFrame({"index": np.arange(pmf.size), "p": pmf})


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _jsonable(value: Any) -> Any:
    """Round floats to 12 significant digits and spell +inf as 'Infinity'."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if math.isinf(value):
            return INFINITY if value > 0 else "-" + INFINITY
        return float(format_number(float(value)))
    return value


def to_json(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def frame_to_json(frame: pd.DataFrame) -> str:
    return to_json(frame.to_dict(orient="records"))


def emit(text: str, path: Optional[str] = None):
    """Write text to a file, or to stdout when no path is given."""
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(text)


def read_channel_matrix(path: str) -> StochasticMatrix:
    """
    Load a channel matrix: one row per line, comma-separated probabilities.

    Args:
        path: CSV file without header

    Returns:
        Validated StochasticMatrix
    """
    frame = pd.read_csv(path, header=None, skip_blank_lines=True, comment="#")
    try:
        values = frame.to_numpy(dtype=float)
    except ValueError:
        raise ValidationError(f"{path}: channel matrix entries must be numbers") from None
    return validate_stochastic(values)


def read_pmf(path: str) -> np.ndarray:
    """
    Load an initial distribution.

    Accepts the 'index,p' CSV written by the steady command, or bare numbers
    separated by commas and/or newlines.
    """
    try:
        frame = pd.read_csv(path, comment="#", skipinitialspace=True)
        if "p" in frame.columns:
            frame = frame[["p"]]
        else:
            frame = pd.read_csv(path, header=None, comment="#", skipinitialspace=True)
        values = frame.apply(pd.to_numeric).to_numpy(dtype=float).ravel()
    except ValueError:
        raise ValidationError(f"{path}: distribution entries must be numbers") from None
    return probability_vector(values[~np.isnan(values)])
