"""Deterministic reductions and truncation-trend verdicts."""

import math

import numpy as np

CONVERGING = "converging"
DIVERGING = "diverging"
INCONCLUSIVE = "inconclusive"


def fsum(values):
    """Correctly rounded sum of an array; independent of summation order."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def cumulative(terms):
    """Running sums; entry ``i`` is the correctly rounded sum of ``terms[:i+1]``."""
    t = np.asarray(terms, dtype=float).tolist()
    return np.array([math.fsum(t[: i + 1]) for i in range(len(t))])


def trend_verdict(terms, window=5, converge=0.95, diverge=0.98, floor=1e-15):
    """Classify a sequence of truncation increments by the ratios of its tail.

    The last ``window`` terms give ``window - 1`` consecutive ratios.  All
    ratios below ``converge`` means geometric decay; all ratios at or above
    ``diverge`` (with every term above ``floor``) means the increments do not
    decay.  Anything in between is reported as inconclusive.
    """
    t = np.asarray(terms, dtype=float)
    if t.size < window:
        return INCONCLUSIVE
    tail = t[-window:]
    if not np.all(np.isfinite(tail)):
        return DIVERGING
    if np.all(tail < floor):
        return CONVERGING
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = tail[1:] / tail[:-1]
    if np.all(tail >= floor) and np.all(ratios >= diverge):
        return DIVERGING
    if np.all(ratios < converge):
        return CONVERGING
    return INCONCLUSIVE


def tail_ratios(terms, start, stop):
    """Consecutive ratios terms[i]/terms[i-1] for i in start+1..stop (inclusive)."""
    t = np.asarray(terms, dtype=float)
    return t[start + 1 : stop + 1] / t[start:stop]
