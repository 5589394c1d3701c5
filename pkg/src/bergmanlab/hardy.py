"""The Hardy space specialization.

H^2 carries the inner product sum_j c_j conj(d_j), so the monomials are
already orthonormal and the reproducing kernel is 1/(1 - conj(z) w).  All
operator assembly reduces to the weighted machinery with the basis norms
replaced by 1, exposed here through the ``space="hardy"`` hooks of the
operators module.  The exact derivative identity on H^2 under unit disk
area reads

    norm(f)^2 = |f(0)|^2 + 2 int |f'|^2 log(1/|z|) dA(z),

which plays the role the star identity plays on the weighted spaces.
"""

import math
from dataclasses import dataclass

import numpy as np

from bergmanlab import series as S
from bergmanlab.detect import layers_diverge
from bergmanlab.exceptions import ParameterError
from bergmanlab.operators import (
    OperatorMatrix,
    assemble_toeplitz,
    assemble_volterra,
)
from bergmanlab.quadrature import dyadic_breaks, gauss_legendre_01, panel_rule


def hardy_norm_sq_coeff(f):
    return float(np.sum(np.abs(f.coeffs) ** 2))


def hardy_norm(f, p, max_depth=14, rel_tol=1e-9):
    """Supremum of circle means at radii increasing toward the boundary.

    p = 2 uses the exact coefficient formula.  Other p evaluate the circle
    integral at radii 1 - 2^-m on 4096 angles (trapezoid, exact for the
    band-limited even powers) until the radii stabilize or the growth
    detector flags divergence; divergent norms return inf.
    """
    if p <= 0:
        raise ParameterError("norm exponent must be positive")
    if p == 2.0:
        return math.sqrt(hardy_norm_sq_coeff(f))
    n_ang = max(4096, 1 << int(math.ceil(math.log2(len(f.coeffs) + 1))))
    depth = min(max_depth, S.reliable_depth(f))
    radii = 1.0 - 2.0 ** -np.arange(1.0, depth + 1.0)
    if f.tail.kind == "exact":
        radii = np.concatenate([radii, [1.0]])  # polynomials reach the circle
    means = S.circle_power_means(f, radii, n_ang, p)
    if len(means) > 6 and layers_diverge(np.diff(means, prepend=0.0)):
        return math.inf
    return float(means.max()) ** (1.0 / p)


def gk_norm(f, p, k=1, n_angles=256, radial_order=24):
    """Angular norm of the square-function of order k.

    The square-function at angle t is the radial integral of
    |f^(k)(r e^(it))|^2 (1-r)^(2k-1); its p-th power is averaged over the
    circle and the p-th root taken.  Requires the first k coefficients to
    vanish, matching the identity's normalization.
    """
    if p <= 0 or k < 1:
        raise ParameterError("need p > 0 and k >= 1")
    if np.any(np.abs(f.coeffs[:k]) > 1e-300):
        raise ParameterError("square-function norm needs the first k "
                             "coefficients to vanish")
    fk = S.derivative(f, k)
    breaks = dyadic_breaks(lo=0.0, depth=30)
    nodes, weights = panel_rule(breaks, order=radial_order)
    n_ang = max(n_angles, len(fk.coeffs))
    n_ang = 1 << int(math.ceil(math.log2(n_ang)))
    vals = S.eval_on_circles(fk, nodes, n_ang)       # (radii, angles)
    gk_sq = ((1.0 - nodes) ** (2 * k - 1))[:, None] * np.abs(vals) ** 2
    g_theta = weights @ gk_sq                        # per-angle integral
    return float(np.mean(g_theta ** (p / 2.0))) ** (1.0 / p)


def hardy_littlewood_paley(f):
    """|f(0)|^2 + 2 int |f'|^2 log(1/|z|) dA, equal to the square norm."""
    fp = S.derivative(f, 1)
    j = np.arange(len(fp.coeffs), dtype=float)
    # int r^(2j+1) log(1/r) dr = 1/(2j+2)^2 exactly
    radial = 1.0 / (2.0 * j + 2.0) ** 2
    return abs(f.coeffs[0]) ** 2 + 2.0 * 2.0 * float(
        np.dot(np.abs(fp.coeffs) ** 2, radial))


def assemble_hardy_volterra(g, n, k, N, max_rows=None):
    return assemble_volterra(g, None, n, k, N, space="hardy",
                             max_rows=max_rows)


def assemble_hardy_toeplitz(mu, k, N):
    return assemble_toeplitz(mu, None, k, N, space="hardy")


def hardy_kernel(z, truncation):
    """Truncated reproducing kernel as a coefficient vector in w."""
    j = np.arange(truncation + 1)
    return S.from_coeffs(np.conj(z) ** j)


def hardy_inner(f, g):
    n = min(len(f.coeffs), len(g.coeffs))
    return complex(np.dot(f.coeffs[:n], np.conj(g.coeffs[:n])))


@dataclass(frozen=True)
class HardySpaceTag:
    """Marker carrying the Hardy-side conventions for shared evaluators.

    ``hat`` is identically one in the Carleson quotients, and the metric
    ball measures integrate plain area against the density.
    """

    label: str = "hardy"

    @staticmethod
    def hat(_r):
        return 1.0
