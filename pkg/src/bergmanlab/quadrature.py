"""Radial quadrature with dyadic boundary clustering.

Every derived quantity of a radial density (tail integrals, log-kernel
moments, high-order moments) concentrates near r = 1, so all radial rules
here are composite Gauss-Legendre panels between dyadic breakpoints
1 - 2^-m, with matching clustering toward the origin for integrands that
pick up a logarithm there.  Mass beyond the last dyadic breakpoint is
integrated after the substitution u = e^(1-x) (u = 1 - t), which turns
boundary power/log tails into geometrically convergent panel sums in x.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_DEPTH = 40
DEFAULT_ORDER = 24
TAIL_ORDER = 16


@lru_cache(maxsize=32)
def gauss_legendre_01(order):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def panel_rule(breaks, order=DEFAULT_ORDER):
    """Composite Gauss-Legendre rule over consecutive breakpoints."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre_01(order)
    lo = breaks[:-1]
    h = np.diff(breaks)
    nodes = (lo[:, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


def dyadic_breaks(lo=0.0, depth=DEFAULT_DEPTH, cluster_origin=False):
    """Breakpoints of [lo, 1 - 2^-depth] with dyadic boundary refinement.

    With ``cluster_origin`` the panels also refine toward 0, which resolves
    integrands with a logarithmic singularity there.
    """
    pts = [1.0 - 2.0 ** (-m) for m in range(1, depth + 1)]
    if cluster_origin:
        pts += [2.0 ** (-m) for m in range(2, depth + 1)]
    pts = sorted(p for p in set(pts) if p > lo)
    return np.array([lo] + pts)


@dataclass(frozen=True)
class RadialRule:
    """Nodes/weights for integrals of the form int_lo^1 f(r) dr.

    ``gap`` is the untouched boundary gap 1 - last_break; callers append a
    tail integral over it (see :func:`boundary_tail`).
    """

    nodes: np.ndarray
    weights: np.ndarray
    lo: float
    gap: float

    def integrate_values(self, values):
        return float(np.dot(self.weights, values))


def radial_rule(lo=0.0, depth=DEFAULT_DEPTH, order=DEFAULT_ORDER,
                cluster_origin=False):
    breaks = dyadic_breaks(lo=lo, depth=depth, cluster_origin=cluster_origin)
    nodes, weights = panel_rule(breaks, order=order)
    return RadialRule(nodes, weights, lo, 1.0 - breaks[-1])


def tail_integral_x(g, x0, rel_tol=1e-15, abs_floor=0.0, x_max=1e140,
                    max_panels=4000):
    """int_{x0}^inf g(x) dx for the substituted boundary variable x.

    Under u = e^(1-x) a boundary tail int_{1-gap}^1 f(t) dt becomes exactly
    this with g(x) = u * f(1-u); power tails of f decay exponentially in x
    and logarithmic tails decay polynomially, so geometric panels reach any
    relative tolerance.  Each panel is accepted only when embedded GL-8 and
    GL-16 estimates agree, splitting otherwise, which keeps wide panels
    honest on rapidly decaying integrands.  ``abs_floor`` is the error a
    caller considers negligible against the rest of its integral; without
    it a vanishing tail would be chased to pointless relative precision.
    """
    x8, w8 = gauss_legendre_01(8)
    x16, w16 = gauss_legendre_01(16)

    def panel(a, b):
        h = b - a
        v16 = float(h * np.dot(w16, g(a + h * x16)))
        v8 = float(h * np.dot(w8, g(a + h * x8)))
        return v16, abs(v16 - v8)

    total = 0.0
    stack = []
    left = x0
    quiet = 0
    panels = 0
    while left < x_max and panels < max_panels:
        right = max(left * 2.0, left + 1.0)
        stack.append((left, right))
        contributed = 0.0
        while stack and panels < max_panels:
            a, b = stack.pop()
            val, err = panel(a, b)
            panels += 1
            tol = max(rel_tol * max(abs(total), abs(val)), abs_floor, 1e-300)
            # the width floor stops noise-limited splitting: smooth
            # integrands converge far above it, cancellation noise never
            if err > tol and b - a > 1e-2 * b:
                mid = 0.5 * (a + b)
                stack.append((mid, b))
                stack.append((a, mid))
            else:
                total += val
                contributed += abs(val)
        if contributed <= max(rel_tol * abs(total), abs_floor, 1e-300):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
        left = right
    return total


def boundary_tail(fn, gap, rel_tol=1e-15):
    """int over [1-gap, 1] of fn(t, u) dt, u = 1 - t the boundary gap.

    ``fn`` receives both t and u so densities singular at the boundary can
    be evaluated from u without cancellation.  Gaps below 1e-280 are
    treated as massless, which callers with genuinely heavy tails avoid by
    integrating their own stable mass function through
    :func:`tail_integral_x`.
    """
    if gap <= 0.0:
        return 0.0

    def g(x):
        u = np.exp(1.0 - x)
        keep = u > 1e-280
        out = np.zeros_like(u)
        if keep.any():
            out[keep] = fn(1.0 - u[keep], u[keep]) * u[keep]
        return out

    return tail_integral_x(g, 1.0 - np.log(gap), rel_tol=rel_tol)


def tanh_sinh_ball_breaks(lo, hi, depth=30):
    """Breakpoints of [lo, hi] refined geometrically toward both ends.

    Used for integrals over chords of Euclidean disks, where the angular
    aperture has a square-root kink at both endpoints.
    """
    if hi <= lo:
        return np.array([lo, hi])
    h = hi - lo
    left = [lo + h * 2.0 ** (-m) for m in range(2, depth + 1)]
    right = [hi - h * 2.0 ** (-m) for m in range(2, depth + 1)]
    pts = sorted(set(p for p in left + right if lo < p < hi))
    return np.array([lo] + pts + [hi])


def layer_contributions(nodes, weights, values, depth=DEFAULT_DEPTH):
    """Split a radial integral into dyadic-layer contributions.

    Layer m collects the mass with 1 - 2^-m <= r < 1 - 2^-(m+1) (layer 0
    is r < 1/2).  Used by the divergence detectors.
    """
    m = np.floor(-np.log2(np.clip(1.0 - nodes, 1e-300, 1.0))).astype(int)
    m = np.clip(m, 0, depth)
    contrib = np.zeros(depth + 1)
    np.add.at(contrib, m, weights * values)
    return contrib
