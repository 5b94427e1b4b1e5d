# cython: language_level=3
"""Compiled batched propagation of the layered encoding circuit.

Same entry points and conventions as the numpy fallback in `_batched`; see
that module for the math. Loops run per sample over raw amplitude buffers.
"""

import numpy as np


ctypedef double complex cplx

cdef double INV_SQRT2 = 0.70710678118654752440084436210485
cdef cplx NEG_J = -1j
cdef cplx NEG_HALF_J = -0.5j


cdef void _h(cplx* a, int q, int dim) noexcept nogil:
    cdef int step = 1 << q
    cdef int base = 0
    cdef int i
    cdef cplx x0, x1
    while base < dim:
        for i in range(base, base + step):
            x0 = a[i]
            x1 = a[i + step]
            a[i] = (x0 + x1) * INV_SQRT2
            a[i + step] = (x0 - x1) * INV_SQRT2
        base += 2 * step


cdef void _ry(cplx* a, int q, double c, double s, int dim) noexcept nogil:
    cdef int step = 1 << q
    cdef int base = 0
    cdef int i
    cdef cplx x0, x1
    while base < dim:
        for i in range(base, base + step):
            x0 = a[i]
            x1 = a[i + step]
            a[i] = c * x0 - s * x1
            a[i + step] = s * x0 + c * x1
        base += 2 * step


cdef void _rx(cplx* a, int q, double c, double s, int dim) noexcept nogil:
    cdef int step = 1 << q
    cdef int base = 0
    cdef int i
    cdef cplx x0, x1
    while base < dim:
        for i in range(base, base + step):
            x0 = a[i]
            x1 = a[i + step]
            a[i] = c * x0 + NEG_J * s * x1
            a[i + step] = NEG_J * s * x0 + c * x1
        base += 2 * step


cdef void _diag(cplx* a, const cplx* phase, int dim) noexcept nogil:
    cdef int i
    for i in range(dim):
        a[i] = a[i] * phase[i]


cdef void _inject_x(cplx* jac, const cplx* psi, int q, int dim) noexcept nogil:
    # jac += -i * X_q * psi
    cdef int step = 1 << q
    cdef int base = 0
    cdef int i
    while base < dim:
        for i in range(base, base + step):
            jac[i] = jac[i] + NEG_J * psi[i + step]
            jac[i + step] = jac[i + step] + NEG_J * psi[i]
        base += 2 * step


def _prep(x, betas, gammas):
    x = np.ascontiguousarray(x, dtype=np.float64)
    betas = np.ascontiguousarray(betas, dtype=np.float64).reshape(-1)
    gammas = np.ascontiguousarray(gammas, dtype=np.float64).reshape(-1)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D input batch, got shape {x.shape}")
    if betas.shape != gammas.shape or betas.shape[0] < 1:
        raise ValueError("betas and gammas must be equal-length and non-empty")
    d = x.shape[1]
    idx = np.arange(1 << d)
    zsum = np.zeros(1 << d, dtype=np.float64)
    for q in range(d - 1):
        equal = ((idx >> q) & 1) == ((idx >> (q + 1)) & 1)
        zsum += np.where(equal, 1.0, -1.0)
    # chain sublayer phases per layer; identity when d == 1
    phases = np.exp(-0.5j * np.outer(gammas, zsum))
    return (
        x,
        np.cos(x / 2.0),
        np.sin(x / 2.0),
        np.cos(betas),
        np.sin(betas),
        np.ascontiguousarray(phases),
        zsum,
    )


def ansatz_states(x, betas, gammas):
    """Rows of W(x_i)|0...0> for every input row, shape (n, 2**d)."""
    x, ch_a, sh_a, cb_a, sb_a, ph_a, _ = _prep(x, betas, gammas)
    cdef int n = x.shape[0]
    cdef int d = x.shape[1]
    cdef int depth = cb_a.shape[0]
    cdef int dim = 1 << d
    out = np.zeros((n, dim), dtype=np.complex128)
    out[:, 0] = 1.0
    cdef cplx[:, ::1] psi = out
    cdef double[:, ::1] ch = ch_a
    cdef double[:, ::1] sh = sh_a
    cdef double[::1] cb = cb_a
    cdef double[::1] sb = sb_a
    cdef cplx[:, ::1] ph = ph_a
    cdef int nn, p, q
    cdef cplx* a
    with nogil:
        for nn in range(n):
            a = &psi[nn, 0]
            for q in range(d):
                _h(a, q, dim)
            for p in range(depth):
                for q in range(d):
                    _ry(a, q, ch[nn, q], sh[nn, q], dim)
                if d > 1:
                    _diag(a, &ph[p, 0], dim)
                for q in range(d):
                    _rx(a, q, cb[p], sb[p], dim)
    return out


def ansatz_states_with_jacobian(x, betas, gammas):
    """States plus per-parameter derivative states.

    Returns (states, jac) with states (n, 2**d) and jac (n, 2*depth, 2**d);
    jac rows 0..depth-1 are d/dbeta_p, rows depth..2*depth-1 are d/dgamma_p.
    """
    x, ch_a, sh_a, cb_a, sb_a, ph_a, zs_a = _prep(x, betas, gammas)
    cdef int n = x.shape[0]
    cdef int d = x.shape[1]
    cdef int depth = cb_a.shape[0]
    cdef int dim = 1 << d
    cdef int nparams = 2 * depth
    states = np.zeros((n, dim), dtype=np.complex128)
    states[:, 0] = 1.0
    jac = np.zeros((n, nparams, dim), dtype=np.complex128)
    cdef cplx[:, ::1] st = states
    cdef cplx[:, :, ::1] jc = jac
    cdef double[:, ::1] ch = ch_a
    cdef double[:, ::1] sh = sh_a
    cdef double[::1] cb = cb_a
    cdef double[::1] sb = sb_a
    cdef cplx[:, ::1] ph = ph_a
    cdef double[::1] zs = zs_a
    cdef int nn, p, q, l, i, gslot
    cdef cplx* a
    cdef cplx* jrow
    with nogil:
        for nn in range(n):
            a = &st[nn, 0]
            for q in range(d):
                _h(a, q, dim)
            for p in range(depth):
                # beta slots 0..p-1 and gamma slots depth..depth+p-1 hold
                # earlier injections; later slots are still all zero
                for q in range(d):
                    _ry(a, q, ch[nn, q], sh[nn, q], dim)
                    for l in range(p):
                        _ry(&jc[nn, l, 0], q, ch[nn, q], sh[nn, q], dim)
                        _ry(&jc[nn, depth + l, 0], q, ch[nn, q], sh[nn, q], dim)
                if d > 1:
                    _diag(a, &ph[p, 0], dim)
                    for l in range(p):
                        _diag(&jc[nn, l, 0], &ph[p, 0], dim)
                        _diag(&jc[nn, depth + l, 0], &ph[p, 0], dim)
                    gslot = depth + p
                    jrow = &jc[nn, gslot, 0]
                    for i in range(dim):
                        jrow[i] = jrow[i] + NEG_HALF_J * zs[i] * a[i]
                for q in range(d):
                    _rx(a, q, cb[p], sb[p], dim)
                    for l in range(p):
                        _rx(&jc[nn, l, 0], q, cb[p], sb[p], dim)
                    for l in range(p + 1):
                        _rx(&jc[nn, depth + l, 0], q, cb[p], sb[p], dim)
                for q in range(d):
                    _inject_x(&jc[nn, p, 0], a, q, dim)
    return states, jac
