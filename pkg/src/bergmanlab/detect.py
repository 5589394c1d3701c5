"""Shared divergence and growth detectors.

All finiteness decisions in the laboratory go through the same two
calibrated detectors: a layer detector for integrals split into dyadic
boundary layers, and a log-log growth fit for sup-functional profiles and
truncation scans.  The in-scope divergences are all of power or log type,
which these detect reliably at the configured thresholds.
"""

from dataclasses import dataclass

import numpy as np

GROWTH_EXPONENT = 0.05
LAYER_WINDOW = 5
LAYER_GROWTH = 0.10


def layers_diverge(contribs, window=LAYER_WINDOW, growth=LAYER_GROWTH):
    """True when the last ``window`` dyadic-layer contributions are
    non-decreasing and grew the cumulative sum by more than ``growth``."""
    contribs = np.asarray(contribs, dtype=float)
    contribs = contribs[: _last_nonzero(contribs) + 1]
    if len(contribs) < window + 1:
        return False
    tail = contribs[-window:]
    if np.any(np.diff(tail) < -1e-12 * np.max(tail)):
        return False
    total = contribs.sum()
    return tail.sum() > growth * total


def _last_nonzero(a):
    nz = np.nonzero(a)[0]
    return int(nz[-1]) if len(nz) else 0


@dataclass(frozen=True)
class GrowthFit:
    exponent: float
    intercept: float
    points: int

    @property
    def growing(self):
        return self.exponent > GROWTH_EXPONENT

    @property
    def decaying(self):
        return self.exponent < -GROWTH_EXPONENT


def fit_exponent(scales, values, window=LAYER_WINDOW):
    """Least-squares slope of log(values) against log(scales).

    ``scales`` is the divergence parameter (1/(1-a) for boundary profiles,
    N for truncation scans); the fit uses the last ``window`` points with
    nonzero values.  A profile that is identically zero fits exponent 0.
    """
    scales = np.asarray(scales, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = values > 0
    if keep.sum() < 2:
        return GrowthFit(0.0, -np.inf, int(keep.sum()))
    x = np.log(scales[keep][-window:])
    y = np.log(values[keep][-window:])
    slope, intercept = np.polyfit(x, y, 1)
    return GrowthFit(float(slope), float(intercept), len(x))


def sup_verdicts(scales, values, window=LAYER_WINDOW):
    """(bounded_verdict, vanishing_verdict, fit) for a boundary profile.

    bounded: the profile does not grow toward the boundary.
    vanishing: the profile decays to zero there.
    """
    fit = fit_exponent(scales, values, window=window)
    values = np.asarray(values, dtype=float)
    if not np.any(values > 0):
        return "holds", "holds", fit
    bounded = "fails" if fit.growing else "holds"
    vanishing = "holds" if fit.decaying else "fails"
    if bounded == "fails":
        vanishing = "fails"
    return bounded, vanishing, fit
