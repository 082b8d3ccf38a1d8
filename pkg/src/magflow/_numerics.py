"""Cancellation-free trigonometric kernels used by the closed forms."""
import math

import numpy as np

_SERIES_CUT = 0.3
# (x - sin x)/x^3 = sum_k (-1)^k x^(2k) / (2k+3)!
_CYC_COEFFS = tuple((-1) ** k / math.factorial(2 * k + 3) for k in range(7))


def sinc(x):
    """sin(x)/x with the removable singularity filled."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def versine_ratio(x):
    """(1 - cos x)/x**2."""
    s = sinc(0.5 * np.asarray(x, dtype=float))
    return 0.5 * s * s


def cycloid_ratio(x):
    """(x - sin x)/x**3, by series near zero."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    acc = np.full_like(x2, _CYC_COEFFS[-1])
    for c in _CYC_COEFFS[-2::-1]:
        acc *= x2
        acc += c
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (x - np.sin(x)) / (x2 * x)
    return np.where(np.abs(x) < _SERIES_CUT, acc, direct)


def is_integer(x, rtol=1e-9):
    x = np.asarray(x, dtype=float)
    r = np.rint(x)
    return np.abs(x - r) <= rtol * np.maximum(1.0, np.abs(x))


def strictly_greater(a, b, rtol=1e-9):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a - b > rtol * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))


def close(a, b, rtol=1e-9):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.abs(a - b) <= rtol * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
