"""One-sided Jacobi singular values, numpy fallback.

Same algorithm as the compiled kernel: cyclic sweeps over column pairs,
each pair orthogonalized by a complex plane rotation.  The fallback
vectorizes a round-robin schedule of disjoint pairs so every step updates
many column pairs with a handful of numpy calls instead of looping pairs
in Python.
"""

import numpy as np


class JacobiNonConvergence(RuntimeError):
    """Raised when sweeps hit the iteration cap; carries the residual."""

    def __init__(self, residual, sweeps):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"one-sided Jacobi did not converge: residual {residual:.3e} "
            f"after {sweeps} sweeps"
        )


def _round_robin_pairs(n):
    """Round-robin pairings of range(n): n-1 steps of disjoint pairs."""
    m = n + (n % 2)
    idx = list(range(m))
    steps = []
    for _ in range(m - 1):
        half = m // 2
        left = idx[:half]
        right = idx[half:][::-1]
        pairs = [(i, j) for i, j in zip(left, right) if i < n and j < n]
        steps.append(np.array(pairs, dtype=np.intp))
        idx = [idx[0]] + [idx[-1]] + idx[1:-1]
    return steps


def jacobi_singular_values(a, tol=1e-15, max_sweeps=60):
    """All singular values of a (tall or square) matrix, descending.

    Works column-wise, so the result has ``a.shape[1]`` values.
    """
    cols = np.array(a, dtype=np.complex128, order="F", copy=True)
    n = cols.shape[1]
    if n == 0:
        return np.zeros(0)
    if n == 1:
        return np.array([np.linalg.norm(cols[:, 0])])

    steps = _round_robin_pairs(n)
    residual = np.inf
    for sweep in range(max_sweeps):
        off = 0.0
        for pairs in steps:
            i = pairs[:, 0]
            j = pairs[:, 1]
            ci = cols[:, i]
            cj = cols[:, j]
            aa = np.einsum("ki,ki->i", ci.real, ci.real) + np.einsum(
                "ki,ki->i", ci.imag, ci.imag
            )
            bb = np.einsum("ki,ki->i", cj.real, cj.real) + np.einsum(
                "ki,ki->i", cj.imag, cj.imag
            )
            gam = np.einsum("ki,ki->i", ci.conj(), cj)
            scale = np.sqrt(aa * bb)
            active = scale > 0.0
            rel = np.zeros_like(scale)
            rel[active] = np.abs(gam[active]) / scale[active]
            off = max(off, rel.max(initial=0.0))
            rot = active & (rel > tol)
            if not rot.any():
                continue
            gr = gam[rot]
            absg = np.abs(gr)
            phase = gr / absg
            tau = (bb[rot] - aa[rot]) / (2.0 * absg)
            t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(tau == 0.0, 1.0, t)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            dj = cj[:, rot] * np.conj(phase)
            ci_r = cols[:, i[rot]]
            cols[:, i[rot]] = c * ci_r - s * dj
            cols[:, j[rot]] = (s * ci_r + c * dj) * phase
        residual = off
        if off <= tol:
            break
    else:
        raise JacobiNonConvergence(residual, max_sweeps)

    sv = np.linalg.norm(cols, axis=0)
    sv.sort()
    return sv[::-1].copy()
