import math

import numpy as np

LN2 = math.log(2.0)


def logcosh(x):
    """log(cosh(x)) without overflow for large |x|."""
    ax = np.abs(x)
    out = ax + np.log1p(np.exp(-2.0 * ax)) - LN2
    return float(out) if np.ndim(out) == 0 else out
