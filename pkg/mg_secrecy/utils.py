import math

import numpy as np


def toLinear(db):
    """
    Converts a value in dB to linear scale.

    Params
    --
    db: [float or array] Value(s) in dB

    Returns
    --
    10^(db/10), with the same shape as the input
    """
    if np.ndim(db) == 0:
        return 10.0 ** (float(db) / 10.0)
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def mapping(x, in_min: float, in_max: float, out_min: float, out_max: float):
    """
    Maps a value from one range to another range.
    Used to move Gauss-Legendre nodes from [-1, 1] onto an integration interval.

    Params
    --
    x: [float or array] Value to map
    in_min: [float] Lower bound of the input range
    in_max: [float] Upper bound of the input range
    out_min: [float] Lower bound of the output range
    out_max: [float] Upper bound of the output range

    Returns
    --
    Mapped value
    """
    return (x - in_min) * (out_max - out_min) / (in_max - in_min) + out_min


def asScalarOrArray(values, like):
    """
    Returns a python float when `like` was a scalar, otherwise the array itself
    """
    if np.ndim(like) == 0:
        return float(np.asarray(values).reshape(-1)[0])
    return values


def formatFloat(value) -> str:
    """
    Fixed representation used in every output file so that re-runs are byte-identical
    """
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)
