"""Small numeric helpers: open-circuit markers, phase wrapping,
parallel impedance combination and a golden-section line search."""

import math

import numpy as np

from .errors import InputError

# Explicit marker for an impedance pole / removed branch.  Comparing
# floats against this is avoided; use is_at_infinity instead.
AT_INFINITY = complex(math.inf, math.inf)


def is_at_infinity(z):
    """True when ``z`` represents an open circuit (any infinite part)."""
    z = complex(z)
    return math.isinf(z.real) or math.isinf(z.imag)


def parallel(z1, z2):
    """Parallel combination of two complex impedances.

    An at-infinity branch drops out; two zero branches are degenerate.
    """
    if is_at_infinity(z1):
        return complex(z2)
    if is_at_infinity(z2):
        return complex(z1)
    z1 = complex(z1)
    z2 = complex(z2)
    den = z1 + z2
    if den == 0:
        raise InputError("degenerate parallel combination: branch impedances cancel")
    return z1 * z2 / den


def wrap_phase(angle):
    """Wrap an angle (radians) to the principal interval (-pi, pi]."""
    wrapped = np.mod(np.asarray(angle, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    # np.mod lands on [-pi, pi); fold the open end onto +pi
    wrapped = np.where(wrapped == -np.pi, np.pi, wrapped)
    if np.ndim(angle) == 0:
        return float(wrapped)
    return wrapped


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_maximize(fun, lo, hi, tol):
    """Golden-section search for the maximizer of ``fun`` on [lo, hi].

    Assumes the function is unimodal on the bracket; on multimodal
    input it still terminates and returns a local result.  Returns
    (x, fun(x)).  Fully deterministic for identical inputs.
    """
    if hi < lo:
        lo, hi = hi, lo
    a, b = float(lo), float(hi)
    if b - a <= tol:
        x = 0.5 * (a + b)
        return x, fun(x)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = fun(c)
    fd = fun(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)
