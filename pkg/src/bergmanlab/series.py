"""Analytic functions as truncated Taylor series.

The integral operator I f(z) = int_0^z f(t) dt and its iterates combine
with coefficient-wise derivatives and Cauchy products to realize the
generalized integration operators

    T[g, n, k] f = I^n (f^(k) g^(n-k)),    0 <= k < n

entirely on coefficients.  Tail metadata tracks what is known about the
neglected coefficients: ``exact`` (a polynomial), ``geometric`` (bounded
by M q^j), or ``unknown``.
"""

import math
from dataclasses import dataclass

import numpy as np

from bergmanlab.exceptions import ParameterError

DEFAULT_TRUNCATION = 512


@dataclass(frozen=True)
class Tail:
    kind: str                 # "exact" | "geometric" | "unknown"
    ratio: float = 0.0
    bound: float = 0.0

    @classmethod
    def exact(cls):
        return cls("exact")

    @classmethod
    def geometric(cls, ratio, bound):
        return cls("geometric", float(ratio), float(bound))

    @classmethod
    def unknown(cls):
        return cls("unknown")


@dataclass(frozen=True)
class AnalyticFn:
    coeffs: np.ndarray        # complex128, index j = j-th Taylor coefficient
    tail: Tail

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           np.asarray(self.coeffs, dtype=complex))

    @property
    def truncation(self):
        return len(self.coeffs) - 1

    def tail_coefficient_bound(self, j):
        """Upper bound for |coefficient j| beyond the truncation."""
        if self.tail.kind == "exact":
            return 0.0
        if self.tail.kind == "geometric":
            return self.tail.bound * self.tail.ratio ** j
        return math.inf


def from_coeffs(coeffs, tail=None):
    return AnalyticFn(np.asarray(coeffs, dtype=complex),
                      tail or Tail.exact())


def derivative(f, k):
    """k-th derivative: coefficient j becomes (j+k)!/j! * c_{j+k}."""
    if k < 0:
        raise ParameterError("derivative order must be nonnegative")
    if k == 0:
        return f
    n = f.truncation
    if k > n:
        if f.tail.kind == "exact":
            return AnalyticFn(np.zeros(1, dtype=complex), Tail.exact())
        raise ParameterError(f"derivative order {k} exceeds truncation {n}")
    j = np.arange(n - k + 1, dtype=float)
    fac = np.exp(_lgamma(j + k + 1) - _lgamma(j + 1))
    tail = f.tail
    if tail.kind == "geometric":
        # (j+k)^k growth is absorbed by nudging the ratio toward 1
        q = (1.0 + tail.ratio) / 2.0
        jj = np.arange(0, 4 * (n + k) + 64)
        m = tail.bound * np.max(np.exp(
            _lgamma(jj + k + 1) - _lgamma(jj + 1)
            + jj * (math.log(tail.ratio) - math.log(q)) + k * math.log(q)))
        tail = Tail.geometric(q, m)
    return AnalyticFn(f.coeffs[k:] * fac, tail)


def integrate(f, n):
    """n-fold primitive vanishing at 0: coefficient m moves to m + n."""
    if n < 1:
        raise ParameterError("integration order must be at least 1")
    m = np.arange(len(f.coeffs), dtype=float)
    fac = np.exp(_lgamma(m + 1) - _lgamma(m + n + 1))
    out = np.concatenate([np.zeros(n, dtype=complex), f.coeffs * fac])
    return AnalyticFn(out, f.tail)


def cauchy_product(f, g):
    """Coefficient-wise product.

    Exact factors keep the full degree; a non-exact factor caps the valid
    prefix at its own truncation, since deeper product coefficients would
    need its unknown tail.
    """
    conv = np.convolve(f.coeffs, g.coeffs)
    cuts = [h.truncation for h in (f, g) if h.tail.kind != "exact"]
    if not cuts:
        return AnalyticFn(conv, Tail.exact())
    cut = min(cuts)
    return AnalyticFn(conv[: cut + 1], Tail.unknown())


def add(f, g, alpha=1.0, beta=1.0):
    n = max(f.truncation, g.truncation)
    out = np.zeros(n + 1, dtype=complex)
    out[: len(f.coeffs)] += alpha * f.coeffs
    out[: len(g.coeffs)] += beta * g.coeffs
    if f.tail.kind == "exact" and g.tail.kind == "exact":
        tail = Tail.exact()
    else:
        tail = Tail.unknown()
    return AnalyticFn(out, tail)


def apply_tgnk(g, f, n, k):
    """T[g, n, k] f = I^n (f^(k) g^(n-k)) on truncated coefficients."""
    if not 0 <= k < n:
        raise ParameterError("need 0 <= k < n")
    return integrate(cauchy_product(derivative(f, k), derivative(g, n - k)),
                     n)


def evaluate(f, z):
    """Horner evaluation, vectorized over z."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z, dtype=complex)
    for c in f.coeffs[::-1]:
        out = out * z + c
    return out if out.ndim else complex(out)


def eval_on_circles(f, radii, n_angles):
    """Values on the polar grid radii x (2 pi k / n_angles) via FFT.

    Exact whenever n_angles exceeds the truncation (no aliasing); the
    returned array has shape (len(radii), n_angles).
    """
    radii = np.asarray(radii, dtype=float)
    ncoef = len(f.coeffs)
    if n_angles < ncoef:
        raise ParameterError("angular grid must resolve the truncation")
    out = np.empty((len(radii), n_angles), dtype=complex)
    block = max(1, int(2e6 // n_angles))
    for i0 in range(0, len(radii), block):
        r = radii[i0: i0 + block]
        scaled = f.coeffs[None, :] * _radial_powers(r, ncoef)
        buf = np.zeros((len(r), n_angles), dtype=complex)
        buf[:, :ncoef] = scaled
        out[i0: i0 + block] = np.fft.ifft(buf, axis=1) * n_angles
    return out


def circle_power_means(f, radii, n_angles, p):
    """Angular means of |f|^p on circles, chunked to bound memory."""
    radii = np.asarray(radii, dtype=float)
    ncoef = len(f.coeffs)
    if n_angles < ncoef:
        raise ParameterError("angular grid must resolve the truncation")
    out = np.empty(len(radii))
    block = max(1, int(4e6 // n_angles))
    for i0 in range(0, len(radii), block):
        r = radii[i0: i0 + block]
        buf = np.zeros((len(r), n_angles), dtype=complex)
        buf[:, :ncoef] = f.coeffs[None, :] * _radial_powers(r, ncoef)
        vals = np.fft.ifft(buf, axis=1) * n_angles
        out[i0: i0 + block] = np.mean(np.abs(vals) ** p, axis=1)
    return out


def _radial_powers(r, ncoef):
    with np.errstate(divide="ignore"):
        logr = np.log(np.clip(r, 1e-320, None))
    p = np.exp(np.outer(logr, np.arange(ncoef)))
    p[r == 0.0] = 0.0
    p[r == 0.0, 0] = 1.0
    return p


def rotate(f, phi):
    """Coefficients of z -> f(e^(i phi) z)."""
    j = np.arange(len(f.coeffs))
    return AnalyticFn(f.coeffs * np.exp(1j * phi * j), f.tail)


def _lgamma(x):
    return np.array([math.lgamma(v) for v in np.atleast_1d(x)])


# -- symbol families --------------------------------------------------------


def symbol(family, truncation=DEFAULT_TRUNCATION, **params):
    """Standard test symbols as truncated series.

    families: ``log`` (log(1/(1-z))), ``pow`` ((1-z)^-s, s > 0),
    ``carleson`` (((1-|a|)/(1-conj(a) z))^gamma), ``poly`` (coefficients),
    ``lacunary`` (sum of z^(2^j)).
    """
    N = int(truncation)
    j = np.arange(N + 1, dtype=float)
    if family == "log":
        c = np.zeros(N + 1)
        c[1:] = 1.0 / j[1:]
        return AnalyticFn(c, Tail.unknown())
    if family == "pow":
        s = float(params["s"])
        if s <= 0:
            raise ParameterError("power symbol needs s > 0")
        c = np.exp(_lgamma(j + s) - _lgamma(j + 1) - math.lgamma(s))
        return AnalyticFn(c, Tail.unknown())
    if family == "carleson":
        a = complex(params["a"])
        gamma = float(params["gamma"])
        if abs(a) >= 1:
            raise ParameterError("carleson symbol needs |a| < 1")
        if gamma <= 0:
            raise ParameterError("carleson symbol needs gamma > 0")
        if abs(a) == 0:
            return AnalyticFn(np.array([1.0 + 0j]), Tail.exact())
        binom = np.exp(_lgamma(j + gamma) - _lgamma(j + 1)
                       - math.lgamma(gamma))
        c = (1 - abs(a)) ** gamma * binom * np.conj(a) ** j.astype(int)
        q = (1.0 + abs(a)) / 2.0
        jj = np.arange(4 * N + 64, dtype=float)
        bound = (1 - abs(a)) ** gamma * np.max(np.exp(
            _lgamma(jj + gamma) - _lgamma(jj + 1) - math.lgamma(gamma)
            + jj * (math.log(abs(a)) - math.log(q))))
        return AnalyticFn(c, Tail.geometric(q, bound))
    if family == "poly":
        c = np.asarray(params["coeffs"], dtype=complex)
        return AnalyticFn(c, Tail.exact())
    if family == "lacunary":
        c = np.zeros(N + 1)
        p = 1
        while p <= N:
            c[p] = 1.0
            p *= 2
        return AnalyticFn(c, Tail.unknown())
    raise ParameterError(f"unknown symbol family {family!r}")


def parse_symbol(text, truncation=DEFAULT_TRUNCATION):
    """Symbol grammar: log | pow:s=S | carleson:a=A,gamma=G | poly:c0,c1,...
    | lacunary."""
    head, _, rest = text.partition(":")
    if head == "log":
        return symbol("log", truncation)
    if head == "pow":
        return symbol("pow", truncation, s=_get(rest, "s"))
    if head == "carleson":
        return symbol("carleson", truncation, a=_get(rest, "a"),
                      gamma=_get(rest, "gamma"))
    if head == "poly":
        coeffs = [complex(tok) for tok in rest.split(",") if tok]
        if not coeffs:
            raise ParameterError("poly symbol needs coefficients")
        return symbol("poly", coeffs=coeffs)
    if head == "lacunary":
        return symbol("lacunary", truncation)
    raise ParameterError(f"unknown symbol {head!r}")


def _get(text, key):
    for item in text.split(","):
        k, _, v = item.partition("=")
        if k == key:
            return float(v)
    raise ParameterError(f"missing {key}= in symbol spec")


def reliable_depth(f, slack=7.0):
    """Deepest dyadic layer where the truncated series still tracks the
    function it approximates.

    For exact tails every layer is fine; otherwise the truncation error of
    a boundary-singular series is roughly r^N, so layers are trusted while
    N (1-r) >= slack.
    """
    if f.tail.kind == "exact":
        return 60
    n = max(f.truncation, 1)
    return max(2, int(math.floor(math.log2(n / slack))))
