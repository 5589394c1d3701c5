"""Space norms and seminorms over the weighted disk.

The p = 2 theory is exact: the square norm equals the coefficient sum
sum_j |c_j|^2 * 2 moment(2j+1), and equals the derivative form

    area(w) |f(0)|^2 + 4 int |f'|^2 star(|z|) dA(z)

identically for every radial weight (not merely up to constants), which
this module exploits as a cross-check everywhere.  General p norms are
polar-grid quadratures: layered Gauss-Legendre radially, uniform angles
via FFT evaluation, exact for band-limited integrands.
"""

import math
from dataclasses import dataclass

import numpy as np

from bergmanlab import series as S
from bergmanlab.detect import layers_diverge
from bergmanlab.exceptions import ParameterError
from bergmanlab.geometry import weighted_square_measure
from bergmanlab.quadrature import (
    dyadic_breaks,
    gauss_legendre_01,
    layer_contributions,
    panel_rule,
)

_MAX_ANGLES = 32768


@dataclass(frozen=True)
class DiskQuadrature:
    """Polar product rule: layered radial nodes times uniform angles."""

    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    n_angles: int
    depth: int

    @classmethod
    def build(cls, max_coeff_degree, p=2.0, depth=24, order=16):
        """Rule resolving |f|^p for truncations up to max_coeff_degree.

        The angular count exceeds the trigonometric degree of |f|^p for
        even integer p (making the angular trapezoid exact); other p are
        oversampled to the same count.
        """
        depth = int(depth)
        breaks = dyadic_breaks(lo=0.0, depth=depth, cluster_origin=True)
        nodes, weights = panel_rule(breaks, order=order)
        bandwidth = int(max(2, math.ceil(max(p, 2.0))) * max(max_coeff_degree,
                                                             1))
        n_ang = 64
        while n_ang <= bandwidth and n_ang < _MAX_ANGLES:
            n_ang *= 2
        return cls(nodes, weights, n_ang, depth)

    @property
    def last_break(self):
        return 1.0 - 2.0 ** -self.depth


class NormResult(float):
    """float with quadrature diagnostics attached."""

    def __new__(cls, value, notes=(), layers=None, diverging=False):
        obj = float.__new__(cls, value)
        obj.notes = tuple(notes)
        obj.layers = layers
        obj.diverging = diverging
        return obj


def coefficient_norm_sq(f, w):
    """Exact square norm sum_j |c_j|^2 * 2 moment(2j+1)."""
    mom = w.odd_moments(len(f.coeffs))
    return float(np.dot(np.abs(f.coeffs) ** 2, 2.0 * mom))


def _weight_rule(w, depth):
    """The weight's own gap-exact panels, trimmed at depth.

    Reusing the panels that compute moments keeps polar norms consistent
    with the coefficient formulas to quadrature precision and avoids the
    1 - t cancellation in deep layers.
    """
    _, order, nodes, weights, dens = w._panels()
    lim = 1.0 - 2.0 ** -depth
    mask = nodes <= lim
    return nodes[mask], weights[mask], dens[mask], lim


def _bergman_power(f, w, p, quad=None):
    """int |f|^p w dA with dyadic-layer bookkeeping."""
    if quad is None:
        quad = DiskQuadrature.build(f.truncation, p=p,
                                    depth=min(40, S.reliable_depth(f) + 14))
    r, rw, dens, lim = _weight_rule(w, quad.depth)
    prof = S.circle_power_means(f, r, quad.n_angles, p)
    integrand = prof * dens * 2.0 * r
    core = float(np.dot(rw, integrand))
    # boundary mass beyond the last panel: |f|^p extends continuously, so
    # weight it by its exact boundary-circle mean
    edge = float(S.circle_power_means(f, np.array([1.0]), quad.n_angles,
                                      p)[0])
    tail = edge * 2.0 * w.integral(phi=lambda s: s, lo=lim)
    layers = layer_contributions(r, rw, integrand, depth=quad.depth)
    layers[-1] += tail
    notes = []
    if p == 2.0:
        coeff = coefficient_norm_sq(f, w)
        if coeff > 0 and abs(core + tail - coeff) > 1e-8 * coeff:
            notes.append(
                f"p=2 quadrature {core + tail:.12e} deviates from "
                f"coefficient sum {coeff:.12e}")
    cap = S.reliable_depth(f)
    if f.tail.kind == "unknown" and quad.depth > cap:
        notes.append(f"truncated tail unreliable beyond layer {cap}")
    return core + tail, layers, notes


def bergman_norm(f, w, p, quad=None):
    """Norm of f in the weighted p-space by polar quadrature.

    The p = 2 result is cross-checked against the coefficient formula; a
    disagreement beyond 1e-8 attaches an accuracy note instead of failing.
    """
    if p <= 0:
        raise ParameterError("norm exponent must be positive")
    value_p, layers, notes = _bergman_power(f, w, p, quad)
    return NormResult(value_p ** (1.0 / p), notes=notes, layers=layers,
                      diverging=layers_diverge(layers))


def bergman_norm_membership(f, w, p):
    """(finite, norm_or_inf, layers), deciding by layer divergence."""
    cap = S.reliable_depth(f)
    quad = DiskQuadrature.build(f.truncation, p=p, depth=min(24, cap))
    value_p, layers, _ = _bergman_power(f, w, p, quad)
    if layers_diverge(layers):
        return False, math.inf, layers
    return True, value_p ** (1.0 / p), layers


def littlewood_paley_p2(f, w):
    """area(w) |f(0)|^2 + 4 int |f'|^2 star(|z|) dA.

    The derivative square has radial angular mean sum_j |j c_j|^2 r^(2j-2)
    (Parseval), leaving one radial quadrature against star, whose node
    values are memoized on the weight.
    """
    _, nodes, weights, starv = _star_rule(w)
    j = np.arange(1, len(f.coeffs), dtype=float)
    cj = np.abs(f.coeffs[1:]) ** 2 * j * j
    deriv_term = 0.0
    if len(cj):
        with np.errstate(divide="ignore"):
            logr = np.log(np.clip(nodes, 1e-320, None))
        prof = np.zeros_like(nodes)
        block = 512
        for b in range(0, len(cj), block):
            jj = j[b: b + block]
            prof += np.exp(np.outer(logr, 2.0 * (jj - 1.0))) @ cj[b: b + block]
        deriv_term = 4.0 * float(np.dot(weights, prof * starv * 2.0 * nodes))
    return w.area() * abs(f.coeffs[0]) ** 2 + deriv_term


def _star_rule(w):
    """(breaks, nodes, weights, exact star values) memoized on the weight."""
    with w._lock:
        cached = w._cache.get("starrule")
    if cached is None:
        breaks = dyadic_breaks(lo=0.0, depth=40, cluster_origin=True)
        nodes, weights = panel_rule(breaks, order=16)
        starv = np.array([w.star(r) if 0.0 < r < 1.0 else 0.0
                          for r in nodes])
        cached = (breaks, nodes, weights, starv)
        with w._lock:
            w._cache["starrule"] = cached
    return cached


def star_interp(w, rs):
    """Fast approximate star via cached interpolants.

    Two regimes: near the boundary, star is a power of the gap times a
    slowly varying factor, so log star is interpolated against log(1-r);
    near the origin it grows like a multiple of log(1/r), which is linear
    against log r.
    """
    with w._lock:
        cached = w._cache.get("starinterp")
    if cached is None:
        gaps = np.exp(np.linspace(math.log(1e-14), math.log(0.55), 280))
        bvals = np.array([w.star(1.0 - g) for g in gaps])
        keep = bvals > 0
        inner_r = np.exp(np.linspace(math.log(1e-10), math.log(0.46), 160))
        ivals = np.array([w.star(r) for r in inner_r])
        cached = (np.log(gaps[keep]), np.log(bvals[keep]),
                  np.log(inner_r), ivals)
        with w._lock:
            w._cache["starinterp"] = cached
    lgap, lval, lri, vi = cached
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    out = np.empty(rs.shape)
    near = rs > 0.45
    if near.any():
        out[near] = np.exp(np.interp(np.log(np.clip(1.0 - rs[near], 1e-14,
                                                    None)), lgap, lval))
    if (~near).any():
        out[~near] = np.interp(np.log(np.clip(rs[~near], 1e-10, None)),
                               lri, vi)
    return out


def nontangential_norm(f, w, p, depth=10, cone_radial=24, cone_angular=7):
    """Grid approximation of the maximal-function norm.

    For each grid point z the cone maximum sup_{u in cone(z)} |f(u)| is
    sampled over radial fractions and admissible angles, together with z
    itself (which lies in the cone closure, making the result >= the plain
    norm on shared grids).  Equivalent, not equal, to the space norm.
    """
    if p <= 0:
        raise ParameterError("norm exponent must be positive")
    t = np.linspace(0.0, 1.0, cone_radial + 1)[1:]
    gl_x, gl_w = gauss_legendre_01(6)
    total = 0.0
    last_mean = 0.0
    for m in range(depth + 1):
        lo = 1.0 - 2.0 ** -m
        hi = 1.0 - 2.0 ** -(m + 1)
        radii = lo + (hi - lo) * gl_x
        n_ang = int(2 ** (min(m // 2 + 4, 8)))
        ang = 2.0 * math.pi * np.arange(n_ang) / n_ang
        z = radii[:, None] * np.exp(1j * ang)[None, :]
        phi = (np.linspace(-0.5, 0.5, cone_angular)[None, None, :, None]
               * (1.0 - t)[None, None, None, :])
        u = (t[None, None, None, :] * np.abs(z)[:, :, None, None]
             * np.exp(1j * (np.angle(z)[:, :, None, None] + phi)))
        cone_max = np.abs(S.evaluate(f, u.reshape(len(radii), n_ang, -1))
                          ).max(axis=2)
        cone_max = np.maximum(cone_max, np.abs(S.evaluate(f, z)))
        dens = w.density(radii)
        means = (cone_max ** p).mean(axis=1)
        total += float(np.dot((hi - lo) * gl_w, means * dens * 2.0 * radii))
        last_mean = float(means[-1])
    total += last_mean * 2.0 * w.integral(phi=lambda s: s,
                                          lo=1.0 - 2.0 ** -(depth + 1))
    return total ** (1.0 / p)


@dataclass(frozen=True)
class BlochSeminorm:
    value: float
    order: int
    profile: np.ndarray          # per-depth maxima of (1-|z|^2)^m |g^(m)|
    radii: np.ndarray
    lower_bound_only: bool

    def __float__(self):
        return self.value


def bloch_seminorm(g, m=1, max_depth=20, rel_tol=1e-4):
    """sup over the disk of (1-|z|^2)^m |g^(m)(z)|.

    Evaluated on dyadic radii 1 - 2^-d with angular counts growing with
    depth, then radially bisected around the running argmax until the sup
    is stable to ``rel_tol``.  When the series tail is unknown the grid is
    cut at the truncation's reliable depth and the result flagged as a
    lower bound.
    """
    if m < 1:
        raise ParameterError("seminorm order must be >= 1")
    if m > g.truncation:
        raise ParameterError("order exceeds truncation")
    gm = S.derivative(g, m)
    cap = S.reliable_depth(g)
    flagged = g.tail.kind == "unknown" and cap < max_depth
    depth = min(max_depth, cap)

    n_ang = max(64, 2 ** (depth // 2 + 4), len(gm.coeffs))
    n_ang = 1 << int(math.ceil(math.log2(n_ang)))

    def ring_max(rs):
        vals = np.abs(S.eval_on_circles(gm, rs, n_ang)).max(axis=1)
        return (1.0 - rs * rs) ** m * vals

    radii = 1.0 - 2.0 ** -np.arange(0.0, depth + 1.0)
    maxima = ring_max(radii)
    per_depth = maxima.copy()
    order = np.argsort(radii)
    radii, maxima = radii[order], maxima[order]
    for _ in range(40):
        best = maxima.max()
        i = int(maxima.argmax())
        new_r = []
        if i > 0:
            new_r.append(0.5 * (radii[i - 1] + radii[i]))
        if i + 1 < len(radii):
            new_r.append(0.5 * (radii[i] + radii[i + 1]))
        if not new_r:
            break
        new_r = np.array(new_r)
        new_m = ring_max(new_r)
        radii = np.concatenate([radii, new_r])
        maxima = np.concatenate([maxima, new_m])
        order = np.argsort(radii)
        radii, maxima = radii[order], maxima[order]
        if maxima.max() <= best * (1.0 + rel_tol) and \
                maxima.max() >= best * (1.0 - rel_tol):
            if len(radii) > depth + 7:
                break
    return BlochSeminorm(float(maxima.max()), m, per_depth,
                         1.0 - 2.0 ** -np.arange(0.0, depth + 1.0), flagged)


def c1_star_functional(g, w, apexes, radial_order=16, angular_order=32):
    """Carleson-square averages of |g'|^2 star against the square measure.

    Returns (profile, sup, notes): profile holds (apex, quotient) pairs,
    the quotient being int over the square of |g'|^2 star dA divided by
    the weighted square measure.  Apexes inside the 1e-8 core excluded
    around the star singularity are skipped with a note.
    """
    gp = S.derivative(g, 1)
    profile = []
    notes = []
    x, wq = gauss_legendre_01(radial_order)
    ax, aw = gauss_legendre_01(angular_order)
    for apex in np.atleast_1d(np.asarray(apexes, dtype=complex)):
        ra = abs(apex)
        if ra < 1e-8:
            notes.append(f"apex {apex} skipped: inside excluded core")
            continue
        arg = math.atan2(apex.imag, apex.real)
        depth = max(6, min(30, int(-math.log2(1.0 - ra)) + 12))
        breaks = ra + (1.0 - ra) * (1.0 - 2.0 ** -np.arange(depth + 1.0))
        lo = breaks[:-1]
        h = np.diff(breaks)
        radii = (lo[:, None] + h[:, None] * x[None, :]).ravel()
        rw = (h[:, None] * wq[None, :]).ravel()
        width = 1.0 - ra
        ang = arg + width * (ax - 0.5)
        z = radii[:, None] * np.exp(1j * ang)[None, :]
        dv = np.abs(S.evaluate(gp, z.ravel())).reshape(z.shape) ** 2
        inner = (dv * aw[None, :]).sum(axis=1) * width
        integral = float(np.dot(rw, inner * star_interp(w, radii) * radii)) \
            / math.pi
        profile.append((complex(apex), integral /
                        weighted_square_measure(w, apex)))
    sup = max((q for _, q in profile), default=0.0)
    return profile, sup, notes


@dataclass(frozen=True)
class BesovSeminorm:
    value: float                 # inf when divergent
    finite: bool
    layers: np.ndarray = None
    reason: str = ""

    def __float__(self):
        return self.value


def besov_seminorm(g, p, m):
    """(int |g^(m)|^p (1-|z|)^(mp-2) dA)^(1/p) with divergence detection.

    For mp <= 1 the space degenerates: only symbols with vanishing m-th
    derivative belong, so anything else is flagged infinite outright.
    Boundary layers whose contributions keep growing flag the integral as
    infinite too.
    """
    if p <= 0 or m < 1:
        raise ParameterError("need p > 0 and m >= 1")
    gm = S.derivative(g, m) if m <= g.truncation else S.from_coeffs([0.0])
    if m * p <= 1.0:
        if np.any(np.abs(gm.coeffs) > 1e-300):
            return BesovSeminorm(math.inf, False,
                                 reason="degenerate range mp <= 1")
        return BesovSeminorm(0.0, True, reason="derivative vanishes")
    depth = min(20, S.reliable_depth(g))
    quad = DiskQuadrature.build(max(gm.truncation, 1), p=p, depth=depth)
    if p == 2.0:
        j = np.arange(len(gm.coeffs), dtype=float)
        cj = np.abs(gm.coeffs) ** 2
        with np.errstate(divide="ignore"):
            logr = np.log(np.clip(quad.radial_nodes, 1e-320, None))
        prof = np.zeros_like(quad.radial_nodes)
        for b in range(0, len(cj), 512):
            jj = j[b: b + 512]
            prof += np.exp(np.outer(logr, 2.0 * jj)) @ cj[b: b + 512]
    else:
        prof = S.circle_power_means(gm, quad.radial_nodes, quad.n_angles, p)
    r = quad.radial_nodes
    integrand = prof * (1.0 - r) ** (m * p - 2.0) * 2.0 * r
    layers = layer_contributions(r, quad.radial_weights, integrand,
                                 depth=depth)
    if layers_diverge(layers):
        return BesovSeminorm(math.inf, False, layers,
                             reason="non-decreasing boundary layers")
    value = float(np.dot(quad.radial_weights, integrand))
    # boundary sliver beyond the last panel, integrated in closed form
    gap = 1.0 - quad.last_break
    value += float(prof[-1]) * 2.0 * gap ** (m * p - 1.0) / (m * p - 1.0)
    return BesovSeminorm(value ** (1.0 / p), True, layers)
