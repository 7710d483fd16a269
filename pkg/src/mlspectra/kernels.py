"""Hot numeric kernels: cyclic complex Jacobi and a simplex pivot.

Each kernel exists twice: a scalar-loop version compiled with numba and a
vectorised numpy version.  Both are always importable so the benchmark and
the tests can compare them; the public names dispatch on
``mlspectra._accel.USE_NUMBA``.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, optional_njit

__all__ = [
    "jacobi_hermitian",
    "jacobi_hermitian_numba",
    "jacobi_hermitian_numpy",
    "pivot",
    "pivot_numba",
    "pivot_numpy",
]


def _rotation_py(app, aqq, apq):
    """Unitary 2x2 block (vpp, vpq, vqp, vqq) annihilating ``apq``.

    The phase of ``apq`` is removed with diag(1, e^{-i phi}) and the
    remaining real symmetric block is handled by the classical rotation.
    """
    mag = abs(apq)
    phase = apq / mag
    theta = (aqq - app) / (2.0 * mag)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    ph = phase.conjugate()
    return c + 0j, s + 0j, -s * ph, c * ph


def _offdiag_norm_py(a):
    n = a.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j].real ** 2 + a[i, j].imag ** 2
    return math.sqrt(acc)


def _jacobi_loops(h, tol, max_sweeps):
    n = h.shape[0]
    a = h.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j].real ** 2 + a[i, j].imag ** 2
    scale = math.sqrt(scale)
    w = np.empty(n)
    sweeps = 0
    converged = scale == 0.0
    while not converged:
        if _offdiag_norm(a) <= tol * scale:
            converged = True
            break
        if sweeps == max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0:
                    continue
                vpp, vpq, vqp, vqq = _rotation(a[p, p].real, a[q, q].real, apq)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * vpp + akq * vqp
                    a[k, q] = akp * vpq + akq * vqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = vpp.conjugate() * apk + vqp.conjugate() * aqk
                    a[q, k] = vpq.conjugate() * apk + vqq.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * vpp + vkq * vqp
                    v[k, q] = vkp * vpq + vkq * vqq
    for i in range(n):
        w[i] = a[i, i].real
    if not converged:
        sweeps = -1
    return w, v, sweeps


# the loop kernel resolves these globals at compile time
_rotation = optional_njit(cache=True)(_rotation_py) or _rotation_py
_offdiag_norm = optional_njit(cache=True)(_offdiag_norm_py) or _offdiag_norm_py


def jacobi_hermitian_numpy(h, tol, max_sweeps):
    """Cyclic Jacobi on a complex Hermitian matrix, numpy row/column updates.

    Returns ``(w, v, sweeps)`` with unsorted eigenvalues ``w``, eigenvectors
    in the columns of ``v`` and ``sweeps == -1`` on non-convergence.
    """
    a = np.array(h, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return a.diagonal().real.copy(), v, 0
    offmask = ~np.eye(n, dtype=bool)
    sweeps = 0
    while True:
        off = math.sqrt(float(np.sum(np.abs(a[offmask]) ** 2)))
        if off <= tol * scale:
            return a.diagonal().real.copy(), v, sweeps
        if sweeps == max_sweeps:
            return a.diagonal().real.copy(), v, -1
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0:
                    continue
                vpp, vpq, vqp, vqq = _rotation_py(a[p, p].real, a[q, q].real, apq)
                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = cp * vpp + cq * vqp
                a[:, q] = cp * vpq + cq * vqq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = np.conj(vpp) * rp + np.conj(vqp) * rq
                a[q, :] = np.conj(vpq) * rp + np.conj(vqq) * rq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = vp * vpp + vq * vqp
                v[:, q] = vp * vpq + vq * vqq


def _pivot_loops(tab, row, col):
    m, n = tab.shape
    piv = tab[row, col]
    for j in range(n):
        tab[row, j] /= piv
    for i in range(m):
        if i == row:
            continue
        f = tab[i, col]
        if f == 0.0:
            continue
        for j in range(n):
            tab[i, j] -= f * tab[row, j]
        tab[i, col] = 0.0
    tab[row, col] = 1.0


def pivot_numpy(tab, row, col):
    """Gauss-Jordan pivot of a simplex tableau in place."""
    tab[row] /= tab[row, col]
    f = tab[:, col].copy()
    f[row] = 0.0
    tab -= np.outer(f, tab[row])
    tab[:, col] = 0.0
    tab[row, col] = 1.0


jacobi_hermitian_numba = optional_njit(cache=True)(_jacobi_loops)
pivot_numba = optional_njit(cache=True)(_pivot_loops)

if USE_NUMBA:
    jacobi_hermitian = jacobi_hermitian_numba
    pivot = pivot_numba
else:
    jacobi_hermitian = jacobi_hermitian_numpy
    pivot = pivot_numpy
