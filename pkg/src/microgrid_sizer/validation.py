"""Small input checks shared by the model classes and the estimators.

Each helper returns the (possibly coerced) value so it can be used inline in
``__post_init__`` or ``fit``; failures raise ``ValueError`` subclasses with the
offending name in the message.
"""

import math
from numbers import Integral, Real

import numpy as np

from .exceptions import ConfigError


def check_scalar(value, name, *, lo=None, hi=None, lo_open=False, hi_open=False,
                 error=ValueError):
    """Validate a finite real scalar against optional (half-)open bounds."""
    if isinstance(value, bool) or not isinstance(value, Real):
        raise error(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise error(f"{name} must be finite, got {value!r}")
    below = lo is not None and (value < lo or (lo_open and value == lo))
    above = hi is not None and (value > hi or (hi_open and value == hi))
    if below or above:
        interval = "{}{}, {}{}".format(
            "(" if lo_open or lo is None else "[",
            "-inf" if lo is None else lo,
            "inf" if hi is None else hi,
            ")" if hi_open or hi is None else "]",
        )
        raise error(f"{name}={value!r} out of range: must be in {interval}")
    return value


def check_int(value, name, *, lo=None, hi=None, error=ValueError):
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise error(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if lo is not None and value < lo:
        raise error(f"{name}={value} out of range: must be >= {lo}")
    if hi is not None and value > hi:
        raise error(f"{name}={value} out of range: must be <= {hi}")
    return value


def check_array(values, name, *, nonnegative=False, min_length=1, error=ValueError):
    """Coerce to a 1-d float64 array and check finiteness."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise error(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise error(f"{name} must have at least {min_length} value(s)")
    bad = ~np.isfinite(arr)
    if bad.any():
        raise error(f"{name} has a non-finite value at index {int(np.argmax(bad))}")
    if nonnegative and (arr < 0).any():
        raise error(f"{name} has a negative value at index {int(np.argmax(arr < 0))}")
    return arr


def check_objectives(points, name="objectives"):
    """Return an (n, m) float array; all rows must have the same length m >= 1."""
    rows = [list(p) for p in points]
    if rows and len({len(r) for r in rows}) > 1:
        raise ValueError(f"{name}: mismatched objective vector lengths {sorted({len(r) for r in rows})}")
    arr = np.asarray(rows, dtype=np.float64)
    if arr.size == 0:
        return arr.reshape(0, 0)
    if not np.isfinite(arr).all():
        raise ValueError(f"{name}: objective values must be finite")
    return arr


def check_config_value(value, name, **bounds):
    """``check_scalar`` variant that raises :class:`ConfigError`."""
    return check_scalar(value, name, error=ConfigError, **bounds)


def check_compositions(X):
    """Accept Composition objects or integer (wind, solar, battery) triples."""
    from .simulate import Composition

    out = []
    for row in X:
        if isinstance(row, Composition):
            out.append(row)
            continue
        genes = list(np.asarray(row).tolist())
        if len(genes) != 3:
            raise ValueError(f"composition rows need 3 integers, got {row!r}")
        out.append(Composition(*(int(g) if float(g).is_integer() else g for g in genes)))
    return out


def check_front(front):
    """Accept a ParetoFront or a plain sequence of objective points."""
    points = list(getattr(front, "points", front))
    if not points:
        raise ValueError("empty Pareto front")
    if not all(hasattr(p, "objectives") and hasattr(p, "composition") for p in points):
        raise TypeError("front entries must be ObjectivePoint-like (composition, objectives)")
    return points
