# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled decomposition kernel.

Same contract as ``_pykernel``: all values in nats, slot layout defined in
``dopid.kernel``. Accumulations use Neumaier compensated summation in
x-major order.
Log ratios are taken as differences of logs so that products of tiny
marginals cannot underflow.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs, INFINITY

cnp.import_array()

N_SOURCE_TERMS = 15
N_SHANNON_TERMS = 5


cdef struct Acc:
    double s
    double c


cdef inline void acc_add(Acc* a, double v) noexcept nogil:
    cdef double t = a.s + v
    if fabs(a.s) >= fabs(v):
        a.c += (a.s - t) + v
    else:
        a.c += (v - t) + a.s
    a.s = t


cdef inline double acc_val(Acc* a) noexcept nogil:
    return a.s + a.c


cdef inline void acc_zero(Acc* a) noexcept nogil:
    a.s = 0.0
    a.c = 0.0


cdef inline double neg_plogp(double p) noexcept nogil:
    if p > 0.0:
        return -p * log(p)
    return 0.0


def source_terms(const double[:, :, ::1] p):
    """Terms for the X-source direction: family conditioned on axis 1."""
    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1], nz = p.shape[2]
    cdef Py_ssize_t x, y, yy, z
    cdef double v, w, m, sc
    cdef Acc acc, a_un, a_avg_h, a_avg_hc, a_hzy, a_tmp, a_tmp2

    out_arr = np.zeros(N_SOURCE_TERMS)
    joint_arr = np.zeros((nx, ny))
    cdef double[::1] out = out_arr
    cdef double[:, ::1] joint = joint_arr

    cdef double[:, ::1] pxz = np.zeros((nx, nz))
    cdef double[:, ::1] pyz = np.zeros((ny, nz))
    cdef double[::1] px = np.zeros(nx)
    cdef double[::1] py = np.zeros(ny)
    cdef double[::1] pz = np.zeros(nz)
    cdef double[::1] c = np.zeros(nz)
    cdef double[::1] scale = np.zeros(nz)
    cdef unsigned char[::1] exact = np.zeros(nz, dtype=np.uint8)
    cdef double[:, ::1] mxz = np.zeros((nx, nz))
    cdef double[::1] cm = np.zeros(nz)
    cdef double[::1] a = np.zeros(nx)
    cdef double[::1] row_h = np.zeros(ny)
    cdef double[::1] agg_x = np.zeros(nx)
    cdef double[::1] agg_y = np.zeros(ny)

    cdef double do_total = 0.0, do_margin = 0.0, do_min = INFINITY
    cdef double h_a, h_ac, i_ac, total, row_resid, h_x, h_x_given_z, i_xz

    # pairwise marginals, each cell summed in x-major order
    for x in range(nx):
        for z in range(nz):
            acc_zero(&acc)
            for y in range(ny):
                acc_add(&acc, p[x, y, z])
            pxz[x, z] = acc_val(&acc)
    for y in range(ny):
        for z in range(nz):
            acc_zero(&acc)
            for x in range(nx):
                acc_add(&acc, p[x, y, z])
            pyz[y, z] = acc_val(&acc)
    for x in range(nx):
        acc_zero(&acc)
        for z in range(nz):
            acc_add(&acc, pxz[x, z])
        px[x] = acc_val(&acc)
    for y in range(ny):
        acc_zero(&acc)
        for z in range(nz):
            acc_add(&acc, pyz[y, z])
        py[y] = acc_val(&acc)
    for z in range(nz):
        acc_zero(&acc)
        for x in range(nx):
            acc_add(&acc, pxz[x, z])
        pz[z] = acc_val(&acc)

    acc_zero(&acc)
    for x in range(nx):
        acc_add(&acc, neg_plogp(px[x]))
    h_x = acc_val(&acc)
    acc_zero(&acc)
    acc_zero(&a_tmp)
    for x in range(nx):
        for z in range(nz):
            v = pxz[x, z]
            if v > 0.0:
                acc_add(&acc, -v * (log(v) - log(pz[z])))
                acc_add(&a_tmp, v * (log(v) - log(px[x]) - log(pz[z])))
    h_x_given_z = acc_val(&acc)
    i_xz = acc_val(&a_tmp)

    acc_zero(&a_un)
    acc_zero(&a_avg_h)
    acc_zero(&a_avg_hc)
    acc_zero(&a_hzy)
    for y in range(ny):
        w = py[y]
        if w <= 0.0:
            continue
        for z in range(nz):
            c[z] = pyz[y, z] / w
            # c / pz overflows for subnormal pz; fall back to (p / pz) * c there
            scale[z] = c[z] / pz[z] if pz[z] > 0.0 else 0.0
            exact[z] = scale[z] != INFINITY
            cm[z] = 0.0
        # member tensor, never materialized: m = p[x, yy, z] * scale[z]
        acc_zero(&acc)
        for x in range(nx):
            for z in range(nz):
                acc_zero(&a_tmp)
                sc = scale[z]
                for yy in range(ny):
                    m = p[x, yy, z] * sc if exact[z] else p[x, yy, z] / pz[z] * c[z]
                    if m < do_min:
                        do_min = m
                    acc_add(&a_tmp, m)
                    acc_add(&acc, m)
                mxz[x, z] = acc_val(&a_tmp)
        total = acc_val(&acc)
        if fabs(total - 1.0) > do_total:
            do_total = fabs(total - 1.0)
        for z in range(nz):
            acc_zero(&a_tmp)
            for x in range(nx):
                acc_add(&a_tmp, mxz[x, z])
            cm[z] = acc_val(&a_tmp)
            if fabs(cm[z] - c[z]) > do_margin:
                do_margin = fabs(cm[z] - c[z])
        for x in range(nx):
            acc_zero(&a_tmp)
            for z in range(nz):
                acc_add(&a_tmp, mxz[x, z])
            a[x] = acc_val(&a_tmp)
        acc_zero(&a_tmp)
        for x in range(nx):
            acc_add(&a_tmp, neg_plogp(a[x]))
        h_a = acc_val(&a_tmp)
        acc_zero(&a_tmp)
        acc_zero(&a_tmp2)
        for x in range(nx):
            for z in range(nz):
                m = mxz[x, z]
                if m > 0.0:
                    acc_add(&a_tmp, -m * (log(m) - log(cm[z])))
                    acc_add(&a_tmp2, m * (log(m) - log(a[x]) - log(cm[z])))
        h_ac = acc_val(&a_tmp)
        i_ac = acc_val(&a_tmp2)
        acc_add(&a_un, w * i_ac)
        acc_add(&a_avg_h, w * h_a)
        acc_add(&a_avg_hc, w * h_ac)
        acc_zero(&a_tmp)
        for z in range(nz):
            acc_add(&a_tmp, neg_plogp(c[z]))
        acc_add(&a_hzy, w * acc_val(&a_tmp))
        for x in range(nx):
            joint[x, y] = w * a[x]
        row_h[y] = h_a

    for x in range(nx):
        acc_zero(&acc)
        for y in range(ny):
            acc_add(&acc, joint[x, y])
        agg_x[x] = acc_val(&acc)
    for y in range(ny):
        acc_zero(&acc)
        for x in range(nx):
            acc_add(&acc, joint[x, y])
        agg_y[y] = acc_val(&acc)

    row_resid = 0.0
    for y in range(ny):
        if py[y] > 0.0:
            acc_zero(&acc)
            for x in range(nx):
                acc_add(&acc, neg_plogp(joint[x, y] / agg_y[y]))
            v = fabs(acc_val(&acc) - row_h[y])
            if v > row_resid:
                row_resid = v

    out[0] = acc_val(&a_un)
    out[1] = acc_val(&a_avg_h)
    out[2] = acc_val(&a_avg_hc)
    out[3] = h_x
    out[4] = h_x_given_z
    out[5] = i_xz
    out[6] = acc_val(&a_hzy)
    acc_zero(&acc)
    for x in range(nx):
        acc_add(&acc, neg_plogp(agg_x[x]))
    out[7] = acc_val(&acc)
    acc_zero(&acc)
    for x in range(nx):
        for y in range(ny):
            v = joint[x, y]
            if v > 0.0:
                acc_add(&acc, v * (log(v) - log(agg_x[x]) - log(agg_y[y])))
    out[8] = acc_val(&acc)
    out[9] = do_total
    out[10] = do_margin
    out[11] = do_min if do_min != INFINITY else 0.0
    v = 0.0
    for x in range(nx):
        if fabs(agg_x[x] - px[x]) > v:
            v = fabs(agg_x[x] - px[x])
    out[12] = v
    out[13] = row_resid
    v = 0.0
    for y in range(ny):
        if fabs(agg_y[y] - py[y]) > v:
            v = fabs(agg_y[y] - py[y])
    out[14] = v
    return out_arr, joint_arr


def shannon_terms(const double[:, :, ::1] p):
    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1], nz = p.shape[2]
    cdef Py_ssize_t x, y, z
    cdef double v
    cdef Acc acc, a1, a2, a3, a4
    cdef double[:, ::1] pxy = np.zeros((nx, ny))
    cdef double[:, ::1] pxz = np.zeros((nx, nz))
    cdef double[:, ::1] pyz = np.zeros((ny, nz))
    cdef double[::1] px = np.zeros(nx)
    cdef double[::1] py = np.zeros(ny)
    cdef double[::1] pz = np.zeros(nz)
    out_arr = np.zeros(N_SHANNON_TERMS)
    cdef double[::1] out = out_arr

    for x in range(nx):
        for y in range(ny):
            acc_zero(&acc)
            for z in range(nz):
                acc_add(&acc, p[x, y, z])
            pxy[x, y] = acc_val(&acc)
        for z in range(nz):
            acc_zero(&acc)
            for y in range(ny):
                acc_add(&acc, p[x, y, z])
            pxz[x, z] = acc_val(&acc)
    for y in range(ny):
        for z in range(nz):
            acc_zero(&acc)
            for x in range(nx):
                acc_add(&acc, p[x, y, z])
            pyz[y, z] = acc_val(&acc)
    for x in range(nx):
        acc_zero(&acc)
        for y in range(ny):
            acc_add(&acc, pxy[x, y])
        px[x] = acc_val(&acc)
    for y in range(ny):
        acc_zero(&acc)
        for x in range(nx):
            acc_add(&acc, pxy[x, y])
        py[y] = acc_val(&acc)
    for z in range(nz):
        acc_zero(&acc)
        for x in range(nx):
            acc_add(&acc, pxz[x, z])
        pz[z] = acc_val(&acc)

    acc_zero(&a1)
    acc_zero(&a2)
    acc_zero(&a3)
    acc_zero(&a4)
    for x in range(nx):
        for y in range(ny):
            for z in range(nz):
                v = p[x, y, z]
                if v > 0.0:
                    acc_add(&a1, v * (log(v) - log(pxy[x, y]) - log(pz[z])))
                    acc_add(&a2, v * (log(v) + log(py[y]) - log(pxy[x, y]) - log(pyz[y, z])))
                    acc_add(&a3, v * (log(v) + log(px[x]) - log(pxy[x, y]) - log(pxz[x, z])))
                    acc_add(&a4, -v * (log(v) - log(pxy[x, y])))
    out[0] = acc_val(&a1)
    out[1] = acc_val(&a2)
    out[2] = acc_val(&a3)
    out[3] = acc_val(&a4)
    acc_zero(&acc)
    for z in range(nz):
        acc_add(&acc, neg_plogp(pz[z]))
    out[4] = acc_val(&acc)
    return out_arr
