"""Input checks shared by the estimator and the CLI."""
import numbers

import numpy as np
from sklearn.utils import check_array

from .linops import DecimationFactors


def check_image(X, name="X"):
    """2-D, finite, float64 copy-free view of ``X``."""
    X = check_array(X, dtype=np.float64, ensure_2d=True, input_name=name)
    return np.ascontiguousarray(X)


def check_decimation(decimation):
    """Accept an int, a ``(d_r, d_c)`` pair or a :class:`DecimationFactors`."""
    if isinstance(decimation, DecimationFactors):
        return decimation
    if isinstance(decimation, numbers.Integral):
        return DecimationFactors(int(decimation), int(decimation))
    try:
        d_r, d_c = decimation
    except (TypeError, ValueError):
        raise ValueError(f"decimation must be an int or a pair, got {decimation!r}") from None
    return DecimationFactors(d_r, d_c)


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)
