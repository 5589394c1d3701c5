"""Truncated matrix realizations of the integral and Toeplitz operators.

Matrices act on the orthonormal basis e_j = z^j / sqrt(2 moment(2j+1)) of
the weighted square space (or e_j = z^j on the Hardy space).  Volterra
columns are computed exactly on coefficients, with rows covering the full
image of the truncated data, so a truncation is a genuine compression and
truncated norms grow monotonically toward the operator norm.  Toeplitz
matrices are built from mixed measure moments int w^a conj(w)^b dmu.
"""

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from bergmanlab import series as S
from bergmanlab._kernels import jacobi_singular_values
from bergmanlab.detect import GROWTH_EXPONENT, fit_exponent
from bergmanlab.exceptions import AssemblyError, ParameterError
from bergmanlab.norms import star_interp
from bergmanlab.quadrature import dyadic_breaks, gauss_legendre_01, panel_rule

DROP_TOLERANCE = 1e-6


# -- measures ---------------------------------------------------------------


@dataclass(frozen=True)
class AtomMeasure:
    """Finitely many point masses."""

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points",
                           np.asarray(self.points, dtype=complex))
        object.__setattr__(self, "masses",
                           np.asarray(self.masses, dtype=float))
        if np.any(self.masses <= 0):
            raise ParameterError("atom masses must be positive")

    @property
    def label(self):
        return f"atoms:{len(self.points)}"


@dataclass(frozen=True)
class RadialDensity:
    """dmu = profile(|w|) dA for a nonnegative radial profile."""

    profile: object
    label: str = "radial"


@dataclass(frozen=True)
class SymbolSquareDensity:
    """dmu = |g^(n-k)(w)|^2 (1-|w|)^beta * squaremeasure(w) dA.

    The square-measure factor is the weighted Carleson square measure at
    w, so the measure couples the symbol's boundary growth to the weight.
    """

    g: S.AnalyticFn
    beta: float
    n: int
    k: int
    label: str = "symbol-square"


@dataclass(frozen=True)
class StarDensity:
    """The measure matching the adjoint product of a Volterra operator.

    On the weighted space: 2^(2n) |g^(n-k)(w)|^2 star_n(|w|) dA, where
    star_n is the n-fold iterated star of the weight.  On the Hardy space
    the same role is played by 2^(2n-1) |g^(n-k)|^2 tau_(n-1), with tau =
    log(1/|w|) and tau_(m) its m-fold star iterate.
    """

    g: S.AnalyticFn
    n: int
    k: int
    label: str = "star-density"


MeasureSpec = (AtomMeasure, RadialDensity, SymbolSquareDensity, StarDensity)


def parse_measure(text, truncation=S.DEFAULT_TRUNCATION):
    """Measure grammar: atom:re=..,im=..,mass=..[;...] |
    star:g=SYM,n=..,k=.. | sq:g=SYM,beta=..,n=..,k=.. | power:beta=.. |
    tau."""
    head, _, rest = text.partition(":")
    if head == "atom":
        pts, ms = [], []
        for chunk in text.split(";"):
            kv = _kvmap(chunk.partition(":")[2])
            pts.append(complex(float(kv.get("re", 0.0)),
                               float(kv.get("im", 0.0))))
            ms.append(float(kv.get("mass", 1.0)))
        return AtomMeasure(np.array(pts), np.array(ms))
    if head == "star":
        kv = _kvmap(rest)
        g = S.parse_symbol(kv["g"], truncation)
        return StarDensity(g, int(float(kv["n"])), int(float(kv["k"])))
    if head == "sq":
        kv = _kvmap(rest)
        g = S.parse_symbol(kv["g"], truncation)
        return SymbolSquareDensity(g, float(kv["beta"]),
                                   int(float(kv["n"])), int(float(kv["k"])))
    if head == "power":
        beta = float(_kvmap(rest)["beta"])
        return RadialDensity(lambda s, b=beta: (1.0 - s) ** b,
                             label=f"power:beta={beta:g}")
    if head == "tau":
        return RadialDensity(lambda s: np.log(1.0 / np.clip(s, 1e-300, None)),
                             label="tau")
    raise ParameterError(f"unknown measure {head!r}")


def _kvmap(text):
    """k=v pairs separated by commas; values may themselves hold commas
    (symbol specs), which re-attach to the previous key."""
    out = {}
    last = None
    for tok in text.split(","):
        if "=" in tok:
            k, _, v = tok.partition("=")
            out[k] = v
            last = k
        elif last is not None:
            out[last] += "," + tok
    return out


# -- operator matrices -------------------------------------------------------


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray          # (rows, cols) complex, rows >= cols
    degree: int                  # domain truncation: columns 0..degree
    space: str                   # "bergman" | "hardy"
    weight: object               # Weight or None for hardy
    provenance: str
    dropped_mass: float = 0.0
    notes: tuple = field(default=())

    @property
    def cols(self):
        return self.entries.shape[1]

    def to_csv(self, path):
        flat = np.column_stack([self.entries.real.ravel(),
                                self.entries.imag.ravel()])
        idx = np.indices(self.entries.shape).reshape(2, -1).T
        np.savetxt(path, np.column_stack([idx, flat]), delimiter=",",
                   header="row,col,re,im", comments="")

    def to_binary(self, path):
        """Dimension header then row-major little-endian complex pairs."""
        with open(path, "wb") as fh:
            fh.write(struct.pack("<II", *self.entries.shape))
            fh.write(self.entries.astype("<c16").tobytes())

    @classmethod
    def from_binary(cls, path, space="bergman"):
        with open(path, "rb") as fh:
            rows, cols = struct.unpack("<II", fh.read(8))
            data = np.frombuffer(fh.read(), dtype="<c16").reshape(rows, cols)
        return cls(data.astype(complex), cols - 1, space, None,
                   provenance=f"binary:{path}")


def basis_scales(w, count, space):
    """Norms of the monomials z^j in the ambient square space."""
    if space == "hardy":
        return np.ones(count)
    return np.sqrt(2.0 * w.odd_moments(count))


def assemble_volterra(g, w, n, k, N, space="bergman", max_rows=None):
    """Matrix of f -> I^n(f^(k) g^(n-k)) on the degree-N basis.

    Rows cover the full image of the truncated data; with ``max_rows`` the
    deeper rows are cut and their orthonormal mass recorded, which
    suppresses growth verdicts downstream when significant.
    """
    if not 0 <= k < n:
        raise ParameterError("need 0 <= k < n")
    if N < n:
        raise ParameterError("truncation must be at least the order n")
    cols = []
    max_len = 0
    for j in range(N + 1):
        ej = np.zeros(j + 1, dtype=complex)
        ej[j] = 1.0
        if j < k:
            out = np.zeros(1, dtype=complex)
        else:
            out = S.apply_tgnk(g, S.from_coeffs(ej), n, k).coeffs
        cols.append(out)
        max_len = max(max_len, len(out))
    scales = basis_scales(w, max_len, space)
    full = np.zeros((max_len, N + 1), dtype=complex)
    for j, c in enumerate(cols):
        full[: len(c), j] = c * scales[: len(c)] / scales[j]
    rows = max_len if max_rows is None else min(max_len, max_rows)
    dropped = float(np.linalg.norm(full[rows:])) if rows < max_len else 0.0
    notes = []
    if g.tail.kind == "unknown":
        notes.append("symbol tail unknown: deep rows reflect the truncated "
                     "symbol only")
    elif g.tail.kind == "geometric":
        notes.append(f"symbol tail bounded by {g.tail.bound:.3g} * "
                     f"{g.tail.ratio:.4f}^j beyond degree {g.truncation}")
    return OperatorMatrix(full[:rows], N, space, w,
                          provenance=f"volterra:n={n},k={k}",
                          dropped_mass=dropped, notes=tuple(notes))


# -- radial moments of densities ---------------------------------------------


def _density_rule():
    breaks = dyadic_breaks(lo=0.0, depth=40, cluster_origin=True)
    return panel_rule(breaks, order=16)


def _star_rule_values(w):
    from bergmanlab.norms import _star_rule
    return _star_rule(w)


def _nested_log_kernel(breaks, nodes, weights, values, r, order=16):
    """int_r^1 s * v(s) * log(s/r) ds from panel-aligned node values.

    Whole panels above r come from the cached rule; the partial panel
    containing r is integrated fresh with the values interpolated in
    log-gap, whose share of the total keeps the interpolation error small.
    """
    kp = int(np.searchsorted(breaks, r, side="right"))
    per = len(nodes) // (len(breaks) - 1)
    start = kp * per
    total = 0.0
    if start < len(nodes):
        sl = slice(start, None)
        total += float(np.dot(weights[sl], nodes[sl] * values[sl]
                              * np.log(nodes[sl] / r)))
        hi = breaks[kp]
    else:
        hi = 1.0
    if hi > r:
        x, wq = gauss_legendre_01(order)
        pn = r + (hi - r) * x
        keep = values > 0
        pv = np.exp(np.interp(np.log(1.0 - pn),
                              np.log(1.0 - nodes[keep])[::-1],
                              np.log(values[keep])[::-1])) \
            if keep.any() else np.zeros_like(pn)
        total += float((hi - r) * np.dot(wq, pn * pv * np.log(pn / r)))
    return total


def star_n_values(w, n, nodes):
    """Iterated star at the given radii (n <= 3).

    n = 1 reads the exact memoized rule values when the radii coincide
    with the standard rule, else the two-regime interpolant; n = 2 nests
    panel-aligned quadrature over exact node values; n = 3 goes through a
    tabulated intermediate and is approximate by star_n's contract.
    """
    breaks, rn, rw, starv = _star_rule_values(w)
    nodes = np.asarray(nodes, dtype=float)
    if n == 1:
        if len(nodes) == len(rn) and np.array_equal(nodes, rn):
            return starv.copy()
        return star_interp(w, nodes)
    if n == 2:
        return np.array([_nested_log_kernel(breaks, rn, rw, starv, r)
                         for r in nodes])
    if n == 3:
        star2 = star_n_values(w, 2, rn)
        return np.array([_nested_log_kernel(breaks, rn, rw, star2, r)
                         for r in nodes])
    raise ParameterError("iterated star supported for n <= 3")


def star_n(w, n, r):
    """Pointwise iterated star; n <= 3.

    n <= 2 nests exact quadratures (n = 2 on a fresh rule rooted at r);
    n = 3 integrates a tabulated intermediate and is labeled approximate.
    """
    if not 0.0 < r < 1.0:
        raise ParameterError("radius must lie in (0, 1)")
    if n < 1:
        raise ParameterError("need n >= 1")
    if n == 1:
        return w.star(r)
    if n == 2:
        breaks = np.concatenate([[r], dyadic_breaks(lo=r, depth=40)[1:]])
        nodes, weights = panel_rule(breaks, order=16)
        starv = np.array([w.star(s) for s in nodes])
        return float(np.dot(weights, nodes * starv * np.log(nodes / r)))
    if n == 3:
        return float(star_n_values(w, 3, np.array([r]))[0])
    raise ParameterError("iterated star supported for n <= 3")


def hardy_tau_values(nodes, iterations):
    """tau = log(1/r) iterated ``iterations`` times under star."""
    vals = np.log(1.0 / np.clip(nodes, 1e-300, None))
    if iterations == 0:
        return vals
    breaks = dyadic_breaks(lo=0.0, depth=40, cluster_origin=True)
    rn, rw = panel_rule(breaks, order=16)
    base = np.log(1.0 / np.clip(rn, 1e-300, None))
    for _ in range(iterations):
        vals = np.array([_nested_log_kernel(breaks, rn, rw, base, r)
                         for r in nodes])
        base = np.array([_nested_log_kernel(breaks, rn, rw, base, r)
                         for r in rn])
    return vals


def radial_density_profile(mu, w, nodes, space="bergman"):
    """Radial factor of the measure's density at the given radii.

    For a symbol-square or star measure this is everything except the
    |g^(n-k)|^2 angular factor; for a plain radial measure it is the whole
    density.  Returns None when the measure has atoms.
    """
    if isinstance(mu, RadialDensity):
        return mu.profile(nodes)
    if isinstance(mu, SymbolSquareDensity):
        from bergmanlab.weights import _s_tail_function
        stail = _s_tail_function(w)
        square = (1.0 - nodes) / math.pi * stail(nodes)
        return (1.0 - nodes) ** mu.beta * square
    if isinstance(mu, StarDensity):
        if space == "hardy":
            if mu.n == 1:
                prof = np.log(1.0 / np.clip(nodes, 1e-300, None))
            else:
                prof = hardy_tau_values(nodes, mu.n - 1)
            return 2.0 ** (2 * mu.n - 1) * prof
        return 2.0 ** (2 * mu.n) * star_n_values(w, mu.n, nodes)
    return None


def measure_symbol_factor(mu):
    """The analytic factor G with |G|^2 appearing in the density."""
    if isinstance(mu, (SymbolSquareDensity, StarDensity)):
        return S.derivative(mu.g, mu.n - mu.k)
    return None


def radial_moments(mu, w, count, space="bergman"):
    """R_m = 2 int_0^1 s^(2m+1) rho(s) ds for the radial factor rho.

    Star-type densities are integrated on the standard rule whose exact
    star values are memoized on the weight, so these moments carry the
    full quadrature accuracy of the underlying star evaluations.
    """
    if isinstance(mu, StarDensity) and space != "hardy":
        _, nodes, weights, _ = _star_rule_values(w)
    else:
        nodes, weights = _density_rule()
    rho = radial_density_profile(mu, w, nodes, space)
    if rho is None:
        raise AssemblyError("measure has no radial density factor")
    if not np.all(np.isfinite(rho)):
        raise AssemblyError("density profile not finite on the disk")
    base = 2.0 * weights * nodes * rho
    with np.errstate(divide="ignore"):
        logn = np.log(np.clip(nodes, 1e-320, None))
    out = np.empty(count)
    for m in range(count):
        out[m] = float(np.dot(base, np.exp((2 * m) * logn)))
    return out


def mixed_moments(mu, w, count, space="bergman"):
    """Matrix of int w^a conj(w)^b dmu for a, b < count.

    For densities |G|^2 rho(|w|) the angular integral couples powers with
    a + s = b + t, so the (a-b)-th diagonal is a correlation of the
    coefficient products of G against the radial moments; a monomial G
    yields an exactly diagonal matrix.
    """
    if isinstance(mu, AtomMeasure):
        j = np.arange(count)
        p = mu.points[:, None] ** j[None, :]
        return np.einsum("l,la,lb->ab", mu.masses, p, np.conj(p))
    G = measure_symbol_factor(mu)
    if G is None:
        return np.diag(radial_moments(mu, w, count, space)).astype(complex)
    gamma = G.coeffs
    radial = radial_moments(mu, w, count + len(gamma), space)
    out = np.zeros((count, count), dtype=complex)
    for d in range(count):
        # entries M[b+d, b] = sum_s gamma_s conj(gamma_{s+d}) R_{b+d+s}
        prods = gamma[: len(gamma) - d] * np.conj(gamma[d:])
        if not np.any(prods):
            continue
        for b in range(count - d):
            a = b + d
            out[a, b] = np.dot(prods, radial[a: a + len(prods)])
    out = out + np.conj(out.T)
    out[np.diag_indices(count)] /= 2.0
    return out


def assemble_toeplitz(mu, w, k, N, space="bergman"):
    """Matrix of f -> int f^(k)(w) conj(D^k kernel)(w) dmu(w).

    Entry (i, j), both >= k, is D(i,k) D(j,k) Mom[j-k, i-k] divided by the
    basis norms of z^i and z^j, with D(i,k) = i!/(i-k)! and Mom the mixed
    measure moments; rows and columns below k vanish identically.
    """
    if k < 0:
        raise ParameterError("derivative order must be nonnegative")
    if N < k:
        raise ParameterError("truncation must reach the derivative order")
    count = N + 1 - k
    mom = mixed_moments(mu, w, count, space)
    i = np.arange(k, N + 1, dtype=float)
    dfac = np.exp(_lgamma_vec(i + 1) - _lgamma_vec(i - k + 1))
    scales = basis_scales(w, N + 1, space)
    block = (dfac[:, None] * dfac[None, :]) * mom.T \
        / (scales[k:, None] * scales[None, k:])
    out = np.zeros((N + 1, N + 1), dtype=complex)
    out[k:, k:] = block
    return OperatorMatrix(out, N, space, w,
                          provenance=f"toeplitz:k={k},mu={mu.label}")


def _lgamma_vec(x):
    return np.array([math.lgamma(v) for v in np.atleast_1d(x)])


# -- spectra ------------------------------------------------------------------


def singular_values(M):
    """All singular values, descending.

    Exactly-diagonal square matrices short-circuit to their diagonal; the
    general path is the one-sided Jacobi kernel (compiled when available).
    """
    a = M.entries if isinstance(M, OperatorMatrix) else np.asarray(M)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    if a.shape[0] == a.shape[1]:
        off = a - np.diag(np.diag(a))
        if not np.any(off):
            sv = np.abs(np.diag(a)).astype(float)
            sv.sort()
            return sv[::-1].copy()
    return jacobi_singular_values(a)


def schatten_norm(M, p):
    """(sum of singular values^p)^(1/p)."""
    if p <= 0:
        raise ParameterError("Schatten exponent must be positive")
    sv = singular_values(M)
    return float(np.sum(sv ** p) ** (1.0 / p))


def schatten_series_verdict(sv, p, margin=0.07):
    """Convergence verdict for sum sv^p from the spectral tail exponent.

    The truncated singular values of the in-scope operators decay like a
    power j^(-e); the p-series converges iff p e > 1.  Fitting e on the
    last decade of the spectrum decides the threshold robustly even when
    partial sums converge too slowly for ratio tests (slow zeta-like
    series).  Returns (verdict, exponent).
    """
    sv = np.asarray(sv, dtype=float)
    sv = sv[sv > 1e-13 * sv.max(initial=0.0)] if sv.size else sv
    if sv.size < 8:
        return ("converges", math.inf)  # finite-rank spectrum
    j = np.arange(1, len(sv) + 1, dtype=float)
    lo = max(1, int(len(sv) / 10))
    slope, _ = np.polyfit(np.log(j[lo:]), np.log(sv[lo:]), 1)
    e = -float(slope)
    if p * e > 1.0 + margin:
        return ("converges", e)
    if p * e < 1.0 - margin:
        return ("diverges", e)
    return ("inconclusive", e)


@dataclass(frozen=True)
class GrowthScan:
    ns: tuple
    values: tuple
    verdict: str                 # saturating | growing | inconclusive
    fit_exponent: float
    suppressed: bool = False
    notes: tuple = ()


def growth_scan(assembler, ns, statistic="operator-norm", p=None):
    """Statistic of the truncated family along increasing truncations.

    saturating: the last increment ratio stays below 1.05.
    growing: the values fit a power/log growth with exponent above 0.05.
    Verdicts are suppressed when a truncation drops more than 1e-6 of its
    matrix norm in cut rows.
    """
    ns = list(ns)
    if len(ns) < 3 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ParameterError("need at least 3 increasing truncations")
    values = []
    suppressed = False
    notes = []
    for n in ns:
        M = assembler(n)
        sv = singular_values(M)
        if statistic == "operator-norm":
            values.append(float(sv[0]) if len(sv) else 0.0)
        elif statistic == "schatten":
            values.append(float(np.sum(sv ** p) ** (1.0 / p)))
        else:
            raise ParameterError(f"unknown statistic {statistic!r}")
        top = float(sv[0]) if len(sv) else 0.0
        if math.isfinite(M.dropped_mass) and top > 0 and \
                M.dropped_mass > DROP_TOLERANCE * top:
            suppressed = True
            notes.append(f"N={n}: dropped mass {M.dropped_mass:.3e} "
                         f"exceeds {DROP_TOLERANCE:g} of the norm")
    fit = fit_exponent(ns, values)
    if values[-2] == 0.0:
        verdict = "saturating" if values[-1] == 0.0 else "growing"
    elif values[-1] / values[-2] < 1.05:
        verdict = "saturating"
    elif fit.exponent > GROWTH_EXPONENT:
        verdict = "growing"
    else:
        verdict = "inconclusive"
    return GrowthScan(tuple(ns), tuple(values), verdict, fit.exponent,
                      suppressed, tuple(notes))
