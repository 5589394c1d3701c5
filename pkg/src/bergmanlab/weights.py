"""Radial weights on the unit disk and their derived quantities.

A weight is a positive integrable radial density w(r) on [0, 1).  The
derived quantities implemented here are

    hat(r)    = int_r^1 w(s) ds                  (tail mass)
    star(r)   = int_r^1 s w(s) log(s/r) ds       (log-kernel tail moment)
    moment(j) = int_0^1 t^j w(t) dt

under the convention that the normalized area of the disk is 1, so the
total weighted area is 2 * moment(1).

Four kinds are supported: the standard power densities (1-r^2)^alpha, the
logarithmic densities 1/((1-r) log(e/(1-r))^beta), the deliberately
non-doubling exponentials exp(-c/(1-r)), and tabulated densities that
interpolate log-density piecewise linearly in r.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np

from bergmanlab.exceptions import DomainError, ParameterError
from bergmanlab.quadrature import (
    dyadic_breaks,
    gauss_legendre_01,
    tail_integral_x,
)

_TAB_DEPTH = 30          # dyadic layers tabulated by the moment transform
_TAB_LOG_TOL = 4e-10     # target interpolation error of the log-density


class Weight:
    """A radial weight with memoized derived quantities.

    Instances are immutable; the internal caches are lock-guarded so values
    can be shared freely across threads.
    """

    def __init__(self, kind, params):
        self.kind = kind
        self.params = params
        self._lock = threading.Lock()
        self._moments = {}
        self._hat_dyadic = {}
        self._cache = {}

    # -- constructors -------------------------------------------------

    @classmethod
    def standard(cls, alpha):
        if alpha <= -1:
            raise ParameterError("standard weight needs alpha > -1")
        return cls("std", {"alpha": float(alpha)})

    @classmethod
    def log_doubling(cls, beta):
        if beta <= 1:
            raise ParameterError("log weight needs beta > 1")
        return cls("log", {"beta": float(beta)})

    @classmethod
    def exponential(cls, c):
        if c <= 0:
            raise ParameterError("exponential weight needs c > 0")
        return cls("exp", {"c": float(c)})

    @classmethod
    def tabulated(cls, radii, densities):
        radii = np.asarray(radii, dtype=float)
        densities = np.asarray(densities, dtype=float)
        if radii.ndim != 1 or radii.shape != densities.shape:
            raise ParameterError("tabulated weight needs matching 1-d samples")
        order = np.argsort(radii)
        radii = radii[order]
        densities = densities[order]
        if radii[0] < 0.0 or radii[-1] >= 1.0:
            raise ParameterError("tabulated radii must lie in [0, 1)")
        if np.any(densities <= 0.0):
            raise ParameterError("tabulated densities must be positive")
        if len(radii) < 2:
            raise ParameterError("tabulated weight needs at least 2 samples")
        return cls("tab", {"radii": radii, "logd": np.log(densities)})

    @property
    def label(self):
        if self.kind == "std":
            return f"std:alpha={self.params['alpha']:g}"
        if self.kind == "log":
            return f"log:beta={self.params['beta']:g}"
        if self.kind == "exp":
            return f"exp:c={self.params['c']:g}"
        return f"tab:n={len(self.params['radii'])}"

    def __repr__(self):
        return f"Weight({self.label})"

    # -- density ------------------------------------------------------

    def density(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0.0) or np.any(r >= 1.0):
            raise DomainError("density is defined on [0, 1)")
        if self.kind == "std":
            out = (1.0 - r * r) ** self.params["alpha"]
        elif self.kind == "log":
            beta = self.params["beta"]
            out = 1.0 / ((1.0 - r) * np.log(np.e / (1.0 - r)) ** beta)
        elif self.kind == "exp":
            out = np.exp(-self.params["c"] / (1.0 - r))
        else:
            out = np.exp(self._tab_logd(r))
        return out if out.ndim else float(out)

    def _tab_logd(self, r):
        radii = self.params["radii"]
        logd = self.params["logd"]
        r = np.asarray(r, dtype=float)
        out = np.interp(r, radii, logd)
        # extend the last segment's slope beyond the final knot
        mask = r > radii[-1]
        if np.any(mask):
            slope = (logd[-1] - logd[-2]) / (radii[-1] - radii[-2])
            out = np.where(mask, logd[-1] + slope * (r - radii[-1]), out)
        return out

    def density_from_gap(self, u):
        """Density at t = 1 - u evaluated from the boundary gap u.

        Avoids the cancellation of 1 - t at gaps near machine epsilon.
        """
        u = np.asarray(u, dtype=float)
        if self.kind == "std":
            out = (u * (2.0 - u)) ** self.params["alpha"]
        elif self.kind == "log":
            out = 1.0 / (u * (1.0 - np.log(u)) ** self.params["beta"])
        elif self.kind == "exp":
            out = np.exp(-self.params["c"] / u)
        else:
            out = np.exp(self._tab_logd(1.0 - u))
        return out

    def tail_mass_x(self, x, phi=None):
        """u * w(1-u) [* phi(1-u)] at u = e^(1-x), stable per kind.

        This is the integrand of a boundary tail after the substitution
        u = e^(1-x); evaluating it directly in x sidesteps both the
        cancellation in 1 - u and under/overflow of the bare density.  For
        the logarithmic weights it is exactly x^(-beta), whose slow decay
        carries real mass at gaps far below machine epsilon.
        """
        x = np.asarray(x, dtype=float)
        u = np.exp(1.0 - x)
        if self.kind == "std":
            alpha = self.params["alpha"]
            vals = np.exp((alpha + 1.0) * (1.0 - x)) * (2.0 - u) ** alpha
        elif self.kind == "log":
            vals = x ** (-self.params["beta"])
        elif self.kind == "exp":
            c = self.params["c"]
            with np.errstate(over="ignore"):
                vals = np.exp((1.0 - x) - c * np.exp(np.minimum(x - 1.0,
                                                                709.0)))
        else:
            t = np.minimum(1.0 - u, 1.0 - 1e-16)
            vals = u * np.exp(self._tab_logd(t))
        if phi is not None:
            vals = vals * phi(1.0 - u)
        return vals

    # -- panel structure ----------------------------------------------

    def _panels(self):
        """(edges, order, nodes, node_weights, density_at_nodes), panel-major.

        ``edges`` has one more entry than there are panels; the nodes of
        panel k occupy a contiguous slice of length ``order``.  Panels in
        the boundary half are constructed in the gap variable u = 1 - t so
        node gaps are exact and the density never sees the cancellation of
        1 - t.
        """
        with self._lock:
            cached = self._cache.get("panels")
        if cached is not None:
            return cached
        if self.kind == "tab":
            edges = self.params["radii"]
            order = 4
            x, wq = gauss_legendre_01(order)
            lo = edges[:-1]
            h = np.diff(edges)
            nodes = (lo[:, None] + h[:, None] * x[None, :]).ravel()
            weights = (h[:, None] * wq[None, :]).ravel()
            dens = self.density(nodes)
        else:
            edges = dyadic_breaks(lo=0.0, cluster_origin=True)
            order = 24
            x, wq = gauss_legendre_01(order)
            split = np.searchsorted(edges, 0.5, side="right")  # edges > 1/2
            lo = edges[: split - 1] if split > 1 else edges[:0]
            h = np.diff(edges[:split])
            t_nodes = (lo[:, None] + h[:, None] * x[None, :]).ravel()
            t_weights = (h[:, None] * wq[None, :]).ravel()
            t_dens = self.density(t_nodes)
            # boundary panels, exact in the gap variable
            g_edges = 1.0 - edges[split - 1:]
            g_hi = g_edges[:-1]
            g_h = -np.diff(g_edges)
            u_nodes = (g_hi[:, None] - g_h[:, None] * x[None, :]).ravel()
            u_weights = (g_h[:, None] * wq[None, :]).ravel()
            nodes = np.concatenate([t_nodes, 1.0 - u_nodes])
            weights = np.concatenate([t_weights, u_weights])
            dens = np.concatenate([t_dens, self.density_from_gap(u_nodes)])
        cached = (edges, order, nodes, weights, dens)
        with self._lock:
            self._cache["panels"] = cached
        return cached

    def integral(self, phi=None, lo=0.0):
        """int_lo^1 phi(t) w(t) dt (phi defaults to 1).

        Split as a partial panel at lo, whole panels through the last
        edge, and the substituted boundary tail beyond it.
        """
        if lo >= 1.0:
            return 0.0
        edges, order, nodes, weights, dens = self._panels()
        k = np.searchsorted(edges, lo, side="right")  # lo < edges[k]
        if k >= len(edges):
            core = 0.0
            part = 0.0
        else:
            sl = slice(k * order, None)
            vals = dens[sl] if phi is None else dens[sl] * phi(nodes[sl])
            core = float(np.dot(weights[sl], vals))
            part = self._partial(phi, lo, edges[k]) if edges[k] > lo else 0.0
        gap = 1.0 - max(edges[-1], lo)
        if gap <= 0.0:
            tail = 0.0
        else:
            floor = 1e-14 * (abs(core) + abs(part))
            tail = tail_integral_x(lambda x: self.tail_mass_x(x, phi),
                                   1.0 - math.log(gap), abs_floor=floor)
        return part + core + tail

    def _partial(self, phi, a, b):
        x, wq = gauss_legendre_01(8)
        if 1.0 - b < 1e-6 and self.kind != "tab":
            # work in the gap variable to keep deep panels cancellation-free
            ua, ub = 1.0 - a, 1.0 - b
            pu = ub + (ua - ub) * x
            pv = self.density_from_gap(pu)
            if phi is not None:
                pv = pv * phi(1.0 - pu)
            return float((ua - ub) * np.dot(wq, pv))
        pn = a + (b - a) * x
        pv = self.density(pn)
        if phi is not None:
            pv = pv * phi(pn)
        return float((b - a) * np.dot(wq, pv))

    # -- derived quantities --------------------------------------------

    def hat(self, r):
        """Tail mass int_r^1 w(s) ds; zero exactly at r = 1."""
        if r < 0.0 or r > 1.0:
            raise DomainError("hat is defined on [0, 1]")
        if r == 1.0:
            return 0.0
        return self.integral(lo=r)

    def hat_dyadic(self, m):
        with self._lock:
            if m in self._hat_dyadic:
                return self._hat_dyadic[m]
        val = self.hat(1.0 - 2.0 ** (-m))
        with self._lock:
            self._hat_dyadic[m] = val
        return val

    def star(self, r):
        """Log-kernel tail moment int_r^1 s w(s) log(s/r) ds."""
        if r <= 0.0 or r >= 1.0:
            raise DomainError("star is defined on (0, 1)")
        return self.integral(phi=lambda s: s * np.log(s / r), lo=r)

    def moment(self, j):
        """int_0^1 t^j w(t) dt, memoized."""
        if j < 0 or int(j) != j:
            raise ParameterError("moment index must be a nonnegative integer")
        j = int(j)
        with self._lock:
            if j in self._moments:
                return self._moments[j]
        edges, order, nodes, weights, dens = self._panels()
        with self._lock:
            cached = self._cache.get("momentbase")
        if cached is None:
            with np.errstate(divide="ignore"):
                logn = np.log(np.clip(nodes, 1e-320, None))
            cached = (weights * dens, logn)
            with self._lock:
                self._cache["momentbase"] = cached
        wd, logn = cached
        if j == 0:
            core = float(wd.sum())
        else:
            core = float(np.dot(wd, np.exp(j * logn)))
        gap = 1.0 - edges[-1]
        tail = tail_integral_x(
            lambda x: self.tail_mass_x(x, phi=lambda t: _safe_pow(t, j)),
            1.0 - math.log(gap), abs_floor=1e-14 * abs(core)) \
            if gap > 0.0 else 0.0
        val = core + tail
        with self._lock:
            self._moments[j] = val
        return val

    def odd_moments(self, count):
        """Array of moment(2j+1) for j = 0..count-1."""
        return np.array([self.moment(2 * j + 1) for j in range(count)])

    def area(self):
        """Weighted area of the disk: 2 * moment(1)."""
        return 2.0 * self.moment(1)

    def regular_ratio_profile(self, rs):
        """hat(r) / ((1-r) w(r)) sampled over rs.

        Bounded profiles away from the boundary characterize the weights
        whose tail mass tracks (1-r) times the density.
        """
        rs = np.asarray(rs, dtype=float)
        dens = self.density(rs)
        return np.array([self.hat(r) for r in rs]) / ((1.0 - rs) * dens)


def _safe_pow(t, j):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.exp(j * np.log(np.clip(t, 1e-320, None)))
    return np.where(t > 0.0, out, 0.0 if j else 1.0)


# -- spec-level operations ----------------------------------------------


def eval_weight(w, r):
    return w.density(r)


def hat(w, r):
    return w.hat(r)


def star(w, r):
    return w.star(r)


def moment(w, j):
    return w.moment(j)


@dataclass(frozen=True)
class DoublingProfile:
    ratios: np.ndarray
    max_ratio: float
    verdict: str             # "doubling-like" | "non-doubling"
    truncated: bool


def doubling_profile(w, depth, factor=1.2, window=5):
    """Dyadic tail-mass ratios hat(1-2^-m)/hat(1-2^-(m+1)) for m < depth.

    The verdict is ``non-doubling`` when the ratio sequence is still
    increasing by at least ``factor`` over the last ``window`` consecutive
    depths, which separates the exponential densities from every power or
    logarithmic example by depth 12.  Underflowing tails truncate the
    sequence and set the flag.
    """
    if depth < 2:
        raise ParameterError("doubling profile needs depth >= 2")
    ratios = []
    truncated = False
    prev = w.hat_dyadic(0)
    for m in range(depth):
        nxt = w.hat_dyadic(m + 1)
        if nxt <= 0.0 or not math.isfinite(prev / nxt):
            truncated = True
            break
        ratios.append(prev / nxt)
        prev = nxt
    ratios = np.array(ratios)
    verdict = "doubling-like"
    if len(ratios) >= window:
        tail = ratios[-window:]
        if np.all(np.diff(tail) > 0) and tail[-1] / tail[0] >= factor:
            verdict = "non-doubling"
    if truncated and len(ratios) >= 2 and np.all(np.diff(ratios) > 0):
        # tail mass underflowed while the ratios were still exploding
        verdict = "non-doubling"
    return DoublingProfile(ratios, float(ratios.max(initial=0.0)), verdict,
                           truncated)


# -- kernel-derivative moment transform ----------------------------------


def upsilon_transform(w, k):
    """Weight v with 2 v_{2(j-k)+1} = (j-k)!/j! * 2 w_{2j+1} for j >= k.

    Realized by iterating v(t) = 2 int_t^1 s w(s) ds, which shifts the odd
    moment ladder by one; the result is tabulated log-linearly on a grid
    dense enough that the identity survives to relative 1e-9.
    """
    if k < 0 or int(k) != k:
        raise ParameterError("transform order must be a nonnegative integer")
    cur = w
    for _ in range(int(k)):
        cur = _upsilon_once(cur)
    return cur


def _upsilon_once(w):
    tail_fn = _s_tail_function(w)

    # probe the curvature of log v per dyadic layer to budget the knots
    edges = [0.0, 0.5] + [1.0 - 2.0 ** (-m) for m in range(2, _TAB_DEPTH + 1)]
    knots = [np.array([0.0])]
    for lo, hi in zip(edges[:-1], edges[1:]):
        probes = np.linspace(lo, hi, 9)
        v = np.maximum(tail_fn(probes), 1e-300)
        logv = np.log(v)
        h = probes[1] - probes[0]
        curv = np.abs(np.diff(logv, 2)) / h / h
        cmax = float(curv.max(initial=0.0)) * 1.15
        n = int(np.ceil((hi - lo) * math.sqrt(max(cmax, 1.0) /
                                              (8.0 * _TAB_LOG_TOL))))
        n = min(max(n, 16), 40000)
        knots.append(np.linspace(lo, hi, n + 1)[1:])
    grid = np.concatenate(knots)
    dens = 2.0 * tail_fn(grid)
    keep = dens > 0.0
    return Weight.tabulated(grid[keep], dens[keep])


def _s_tail_function(w):
    """F with F(t) = int_t^1 s w(s) ds, vectorized over sorted or not ts.

    Panel-exact: whole panels beyond t are taken from suffix sums of the
    per-panel integrals; the partial panel containing t is integrated
    fresh, and the boundary gap is handled by the substituted tail rule.
    """
    edges, order, nodes, weights, dens = w._panels()
    seg = (weights * nodes * dens).reshape(-1, order).sum(axis=1)
    suffix = np.concatenate([
        np.cumsum(seg[::-1].astype(np.longdouble))[::-1], [0.0]
    ]).astype(float)
    gap = 1.0 - edges[-1]
    tail = tail_integral_x(lambda x: w.tail_mass_x(x, phi=lambda t: t),
                           1.0 - math.log(gap),
                           abs_floor=1e-14 * float(suffix[0])) \
        if gap > 0.0 else 0.0
    x, wq = gauss_legendre_01(8)

    def F(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        k = np.searchsorted(edges, ts, side="right")  # ts < edges[k]
        k = np.minimum(k, len(edges) - 1)
        out = suffix[np.minimum(k, len(seg))] + tail
        hi = np.where(ts <= edges[-1], edges[k], ts)
        h = np.maximum(hi - ts, 0.0)
        pn = ts[:, None] + h[:, None] * x[None, :]
        pv = pn * w.density(np.clip(pn, 0.0, 1.0 - 1e-16))
        out = out + (h[:, None] * wq[None, :] * pv).sum(axis=1)
        return out

    return F


# -- parsing ---------------------------------------------------------------


def parse_weight(text):
    """Weight grammar: std:alpha=A | log:beta=B | exp:c=C | file:PATH."""
    head, _, rest = text.partition(":")
    if head == "std":
        return Weight.standard(_kv(rest, "alpha"))
    if head == "log":
        return Weight.log_doubling(_kv(rest, "beta"))
    if head == "exp":
        return Weight.exponential(_kv(rest, "c"))
    if head == "file":
        data = np.loadtxt(rest)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ParameterError("weight file needs two columns")
        return Weight.tabulated(data[:, 0], data[:, 1])
    raise ParameterError(f"unknown weight kind {head!r}")


def _kv(text, key):
    for item in text.split(","):
        k, _, v = item.partition("=")
        if k == key:
            return float(v)
    raise ParameterError(f"missing {key}= in weight spec")
