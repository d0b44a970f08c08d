# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hardware kernels: bit-identical twin of _kernel_py.

Every floating-point expression matches _kernel_py's evaluation order;
the build uses -ffp-contract=off so no FMA contraction can change
results.  Keep the two files in sync (tests pin bitwise agreement).
"""

from libc.math cimport M_PI, atan2, cos, sin, sqrt, tan

cdef double SQRT_HALF = sqrt(0.5)
cdef double QUARTER_PI = M_PI / 4.0


cdef double _jacobi_step(double* a, int n, int i, int j) noexcept nogil:
    cdef double aij, x, y, phi, c, s, t, ari, arj, u, v
    cdef int r
    aij = a[i * n + j]
    if aij == 0.0:
        return 0.0
    x = a[i * n + i] - a[j * n + j]
    if x == 0.0:
        if aij > 0.0:
            phi = QUARTER_PI
            t = 1.0
            c = SQRT_HALF
            s = SQRT_HALF
        else:
            phi = -QUARTER_PI
            t = -1.0
            c = SQRT_HALF
            s = -SQRT_HALF
    else:
        y = 2.0 * aij
        if x > 0.0:
            phi = 0.5 * atan2(y, x)
        else:
            phi = 0.5 * atan2(-y, -x)
        c = cos(phi)
        s = sin(phi)
        t = tan(phi)
    a[i * n + i] = a[i * n + i] + t * aij
    a[j * n + j] = a[j * n + j] - t * aij
    a[i * n + j] = 0.0
    a[j * n + i] = 0.0
    for r in range(n):
        if r != i and r != j:
            ari = a[r * n + i]
            arj = a[r * n + j]
            u = c * ari + s * arj
            v = c * arj - s * ari
            a[r * n + i] = u
            a[i * n + r] = u
            a[r * n + j] = v
            a[j * n + r] = v
    return phi


cdef double _off_norm(double* a, int n) noexcept nogil:
    cdef double total = 0.0
    cdef double v
    cdef int r, s
    for r in range(n):
        for s in range(r + 1, n):
            v = a[r * n + s]
            total = total + v * v
    return sqrt(total)


cdef inline double _neg(double v) noexcept nogil:
    return -v if v != 0.0 else 0.0


cdef void _t_step(double* a, double* phi, double* psi) noexcept nogil:
    cdef double x01, x02, x03, x12, x13, x23, x00, x11, x22, x33, n01, n12, n13
    phi[0] = _jacobi_step(a, 4, 0, 2)
    psi[0] = _jacobi_step(a, 4, 1, 3)
    x01 = a[1]
    x02 = a[2]
    x03 = a[3]
    x12 = a[6]
    x13 = a[7]
    x23 = a[11]
    x00 = a[0]
    x11 = a[5]
    x22 = a[10]
    x33 = a[15]
    a[0] = x00
    a[5] = x22
    a[10] = x33
    a[15] = x11
    a[1] = x02
    a[4] = x02
    a[2] = x03
    a[8] = x03
    n01 = _neg(x01)
    a[3] = n01
    a[12] = n01
    a[6] = x23
    a[9] = x23
    n12 = _neg(x12)
    a[7] = n12
    a[13] = n12
    n13 = _neg(x13)
    a[11] = n13
    a[14] = n13


def jacobi_step_flat(double[::1] a, int n, int i, int j):
    return _jacobi_step(&a[0], n, i, j)


def off_norm_flat(double[::1] a, int n):
    return _off_norm(&a[0], n)


def t_step_flat(double[::1] a):
    cdef double phi, psi
    _t_step(&a[0], &phi, &psi)
    return phi, psi


def sweep_batch(double[:, ::1] mats, int n, long long[:, ::1] pairs,
                int nsteps, int start=0):
    cdef Py_ssize_t trials = mats.shape[0]
    cdef int npairs = <int>pairs.shape[0]
    cdef Py_ssize_t t
    cdef int k, idx
    with nogil:
        for t in range(trials):
            for k in range(nsteps):
                idx = (start + k) % npairs
                _jacobi_step(&mats[t, 0], n, <int>pairs[idx, 0],
                             <int>pairs[idx, 1])


def offnorm_batch(double[:, ::1] mats, int n, double[::1] out):
    cdef Py_ssize_t trials = mats.shape[0]
    cdef Py_ssize_t t
    with nogil:
        for t in range(trials):
            out[t] = _off_norm(&mats[t, 0], n)


def t_run_batch(double[:, ::1] mats, int kmax,
                double[:, ::1] s, double[:, ::1] b13, double[:, ::1] b24,
                double[:, ::1] b14, double[:, ::1] b23, double[:, ::1] bq,
                double[:, ::1] phi, double[:, ::1] psi):
    cdef Py_ssize_t trials = mats.shape[0]
    cdef Py_ssize_t t
    cdef int k
    cdef double ph, ps
    cdef double* a
    with nogil:
        for t in range(trials):
            a = &mats[t, 0]
            for k in range(kmax + 1):
                s[t, k] = _off_norm(a, 4)
                b13[t, k] = a[2]
                b24[t, k] = a[7]
                b14[t, k] = a[3]
                b23[t, k] = a[6]
                bq[t, k] = a[0] - a[5] - a[10] + a[15]
                if k < kmax:
                    _t_step(a, &ph, &ps)
                    phi[t, k] = ph
                    psi[t, k] = ps
