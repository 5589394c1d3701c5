"""Geometry of the unit disk: metrics, Carleson regions, lattices.

Points are complex numbers with |z| < 1.  The two metrics are the
pseudohyperbolic distance rho(z, w) = |z - w| / |1 - conj(z) w| and the
hyperbolic (Bergman) distance beta = artanh(rho); a "Bergman disk" here is
always a beta-ball, the same metric the lattice definition uses.
"""

import math
from dataclasses import dataclass

import numpy as np

from bergmanlab.exceptions import ConstructionError, DomainError, ParameterError
from bergmanlab.quadrature import gauss_legendre_01, tanh_sinh_ball_breaks


def pseudohyperbolic(z, w):
    """|z - w| / |1 - conj(z) w|, vectorized over either argument."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    out = np.abs(z - w) / np.abs(1.0 - np.conj(z) * w)
    return out if out.ndim else float(out)


def bergman_distance(z, w):
    """artanh of the pseudohyperbolic distance."""
    rho = pseudohyperbolic(z, w)
    return np.arctanh(rho) if np.ndim(rho) else float(np.arctanh(rho))


# -- regions ---------------------------------------------------------------


@dataclass(frozen=True)
class CarlesonSquare:
    """{r e^(i t): |apex| < r < 1, |arg apex - t| < (1 - |apex|) / 2}."""

    apex: complex


@dataclass(frozen=True)
class Cone:
    """{r e^(i t): |t - arg vertex| < (1 - r/|vertex|) / 2}; |vertex| <= 1."""

    vertex: complex


@dataclass(frozen=True)
class Tent:
    """Points whose cone contains the base: {z: base in Cone(z)}."""

    base: complex


@dataclass(frozen=True)
class BergmanDisk:
    center: complex
    radius: float


def _angle_gap(a, b):
    d = np.abs(np.angle(np.exp(1j * (a - b))))
    return d


def region_contains(region, z):
    """Membership predicate, vectorized over z."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if isinstance(region, CarlesonSquare):
        a = complex(region.apex)
        if a == 0:
            raise DomainError("Carleson square needs a nonzero apex")
        ra = abs(a)
        out = (r > ra) & (r < 1.0) & (
            _angle_gap(np.angle(z), math.atan2(a.imag, a.real))
            < (1.0 - ra) / 2.0)
    elif isinstance(region, Cone):
        v = complex(region.vertex)
        if v == 0:
            raise DomainError("cone needs a nonzero vertex")
        rv = abs(v)
        if rv > 1.0 + 1e-14:
            raise DomainError("cone vertex must lie in the closed disk")
        out = _angle_gap(np.angle(z), math.atan2(v.imag, v.real)) \
            < 0.5 * (1.0 - r / rv)
    elif isinstance(region, Tent):
        u = complex(region.base)
        # z in T_u means u in Cone(z); same inequality with roles swapped
        ru = abs(u)
        with np.errstate(invalid="ignore"):
            out = _angle_gap(math.atan2(u.imag, u.real), np.angle(z)) \
                < 0.5 * (1.0 - ru / np.where(r > 0, r, np.nan))
        out = np.where(r > 0, out, False)
    elif isinstance(region, BergmanDisk):
        out = pseudohyperbolic(region.center, z) < math.tanh(region.radius)
    else:
        raise ParameterError(f"unknown region {region!r}")
    return out if np.ndim(out) else bool(out)


def weighted_square_measure(w, a):
    """Weighted area of the Carleson square at a.

    Under unit disk area this is (1-|a|)/pi * int_|a|^1 s w(s) ds.
    """
    a = complex(a)
    if a == 0:
        raise DomainError("Carleson square needs a nonzero apex")
    ra = abs(a)
    return (1.0 - ra) / math.pi * w.integral(phi=lambda s: s, lo=ra)


# -- Euclidean form of metric balls ----------------------------------------


def euclidean_ball(center, radius):
    """(euclidean center, euclidean radius) of a beta-ball.

    A pseudohyperbolic ball of radius t = tanh(radius) around a is the
    Euclidean disk with center a (1-t^2) / (1 - t^2 |a|^2) and radius
    t (1-|a|^2) / (1 - t^2 |a|^2).
    """
    a = complex(center)
    t = math.tanh(radius)
    den = 1.0 - t * t * abs(a) ** 2
    return a * (1.0 - t * t) / den, t * (1.0 - abs(a) ** 2) / den


def ball_angular_aperture(s, c, R):
    """Angle measure of {t: s e^(i t) in disk(center c >= 0, radius R)}.

    For radially symmetric integrands this reduces ball integrals to one
    radial integral; the full circle (2 pi) is returned when the circle of
    radius s lies inside the ball.
    """
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        cosv = (s * s + c * c - R * R) / (2.0 * s * c)
    cosv = np.where(s * c > 0, cosv, np.where(c <= R, -1.0, 1.0))
    return 2.0 * np.arccos(np.clip(cosv, -1.0, 1.0))


def ball_measure_radial(profile, center, radius, order=24):
    """Measure of the beta-ball against a radial density.

    ``profile(s)`` is the density at modulus s (with respect to normalized
    area); the ball is reduced to a radial integral against the angular
    aperture, with panels clustered at the chord endpoints where the
    aperture has square-root kinks.
    """
    c, R = euclidean_ball(center, radius)
    c = abs(c)
    lo = max(c - R, 0.0)
    hi = min(c + R, 1.0)
    if hi <= lo:
        return 0.0
    breaks = tanh_sinh_ball_breaks(lo, hi)
    x, wq = gauss_legendre_01(order)
    a = breaks[:-1]
    h = np.diff(breaks)
    nodes = (a[:, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * wq[None, :]).ravel()
    vals = profile(nodes) * nodes * ball_angular_aperture(nodes, c, R)
    return float(np.dot(weights, vals)) / math.pi


# -- lattices ---------------------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    """Ring lattice: beta-separated points whose 5r-balls cover the disk.

    Rings sit at hyperbolic radii m * step; ring m carries ``counts[m]``
    equally spaced points with a deterministic phase stagger.  Points are
    materialized lazily because deep rings are large; ``points(limit)``
    yields the first points ordered by modulus.
    """

    r: float
    step: float
    radii: np.ndarray
    counts: np.ndarray
    phases: np.ndarray

    @property
    def size(self):
        return int(self.counts.sum())

    @property
    def rings(self):
        return len(self.radii)

    def ring_points(self, m):
        n = int(self.counts[m])
        ang = self.phases[m] + 2.0 * math.pi * np.arange(n) / n
        return self.radii[m] * np.exp(1j * ang)

    def points(self, limit=None):
        out = []
        got = 0
        for m in range(self.rings):
            pts = self.ring_points(m)
            out.append(pts)
            got += len(pts)
            if limit is not None and got >= limit:
                break
        allpts = np.concatenate(out) if out else np.zeros(0, complex)
        return allpts[:limit] if limit is not None else allpts

    def nearest_distance(self, z):
        """beta-distance from each sample to the lattice (exact per ring)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        d = np.arctanh(np.clip(np.abs(z), 0.0, 1.0 - 1e-300))
        best = np.full(z.shape, np.inf)
        theta = np.angle(z)
        for m in range(self.rings):
            # candidate = nearest angular point of ring m
            n = int(self.counts[m])
            k = np.round((theta - self.phases[m]) * n / (2.0 * math.pi))
            ang = self.phases[m] + 2.0 * math.pi * k / n
            cand = self.radii[m] * np.exp(1j * ang)
            best = np.minimum(best, bergman_distance(z, cand))
            # rings beyond the sample by more than the best found are useless
            if m * self.step > d.max() + best.max():
                break
        return best if best.ndim else float(best)

    def to_csv(self, path, max_points=100000):
        rows = []
        got = 0
        for m in range(self.rings):
            pts = self.ring_points(m)
            for p in pts[: max(0, max_points - got)]:
                rows.append((p.real, p.imag, abs(p), m))
            got += len(pts)
            if got >= max_points:
                break
        arr = np.array(rows)
        np.savetxt(path, arr, delimiter=",", header="re,im,modulus,ring",
                   comments="")
        return min(got, max_points)


def _ring_count(R, sep_rho):
    """Points on the circle of radius R with adjacent pseudohyperbolic
    separation at least sep_rho."""
    if R == 0.0:
        return 1
    x = sep_rho * (1.0 - R * R) / (2.0 * R * math.sqrt(1.0 - sep_rho ** 2))
    if x >= 1.0:
        return 1
    phi = 2.0 * math.asin(x)
    return max(1, int(math.floor(2.0 * math.pi / phi)))


def make_lattice(r, cutoff=1e-6, kappa=1.02):
    """Deterministic ring lattice with separation kappa * r / 5.

    Rings at hyperbolic radii m * kappa * r/5 keep any two points on
    distinct rings at least the ring gap apart; per-ring counts are chosen
    so adjacent points on a ring are at least that far apart as well.
    Construction stops once 1 - radius < cutoff.
    """
    if not 0.0 < r <= 2.0:
        raise ParameterError("lattice parameter must lie in (0, 2]")
    step = kappa * r / 5.0
    radii = [0.0]
    counts = [1]
    phases = [0.0]
    sep_rho = math.tanh(step)
    m = 1
    while True:
        R = math.tanh(m * step)
        if 1.0 - R < cutoff:
            break
        radii.append(R)
        counts.append(_ring_count(R, sep_rho))
        phases.append((m % 2) * math.pi / max(counts[-1], 1))
        m += 1
        if m > 200000:
            raise ConstructionError("lattice construction did not terminate")
    if len(radii) < 2:
        raise ConstructionError("lattice cutoff leaves no rings")
    return Lattice(r=float(r), step=step, radii=np.array(radii),
                   counts=np.array(counts, dtype=np.int64),
                   phases=np.array(phases))


def quasi_random_disk(n, seed=1):
    """Kronecker low-discrepancy samples, uniform in disk area."""
    i = np.arange(1, n + 1)
    u = (i * math.sqrt(2)) % 1.0
    v = (i * math.sqrt(3)) % 1.0
    rng = np.random.default_rng(seed)
    u = (u + rng.random()) % 1.0
    v = (v + rng.random()) % 1.0
    return np.sqrt(u) * np.exp(2j * math.pi * v)


def check_separation(lat, limit=500):
    """Minimum pairwise beta-distance among the first ``limit`` points."""
    pts = lat.points(limit)
    z = pts[:, None]
    w = pts[None, :]
    rho = np.abs(z - w) / np.abs(1.0 - np.conj(z) * w)
    iu = np.triu_indices(len(pts), k=1)
    return float(np.arctanh(rho[iu]).min())


def check_covering(lat, n_samples=10000, seed=7):
    """Largest beta-distance from quasi-random samples to the lattice."""
    z = quasi_random_disk(n_samples, seed=seed)
    return float(lat.nearest_distance(z).max())
