# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""One-sided Jacobi singular values, compiled kernel.

Classic cyclic row ordering over column pairs; each pair is orthogonalized
with a complex plane rotation computed from the 2x2 Gram block.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def jacobi_singular_values(a, double tol=1e-15, int max_sweeps=60):
    """All singular values of a (tall or square) matrix, descending."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="fortran"] cols = \
        np.array(a, dtype=np.complex128, order="F", copy=True)
    cdef Py_ssize_t m = cols.shape[0]
    cdef Py_ssize_t n = cols.shape[1]
    if n == 0:
        return np.zeros(0)

    cdef double complex[::1, :] C = cols
    cdef Py_ssize_t i, j, k, sweep
    cdef double aa, bb, absg, scale, rel, off, tau, t, c, s, residual
    cdef double complex gam, phase, xi, xj, dj

    residual = 0.0
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                aa = 0.0
                bb = 0.0
                gam = 0.0
                for k in range(m):
                    xi = C[k, i]
                    xj = C[k, j]
                    aa += xi.real * xi.real + xi.imag * xi.imag
                    bb += xj.real * xj.real + xj.imag * xj.imag
                    gam += xi.conjugate() * xj
                scale = sqrt(aa * bb)
                if scale <= 0.0:
                    continue
                absg = sqrt(gam.real * gam.real + gam.imag * gam.imag)
                rel = absg / scale
                if rel > off:
                    off = rel
                if rel <= tol:
                    continue
                phase = gam / absg
                tau = (bb - aa) / (2.0 * absg)
                if tau == 0.0:
                    t = 1.0
                elif tau > 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for k in range(m):
                    xi = C[k, i]
                    dj = C[k, j] * phase.conjugate()
                    C[k, i] = c * xi - s * dj
                    C[k, j] = (s * xi + c * dj) * phase
        residual = off
        if off <= tol:
            break
    else:
        from bergmanlab._kernels._jacobi_py import JacobiNonConvergence
        raise JacobiNonConvergence(residual, max_sweeps)

    sv = np.linalg.norm(cols, axis=0)
    sv.sort()
    return sv[::-1].copy()
