# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernels; see _kernels_py for the layout contract."""

from libc.stdint cimport int64_t, int8_t


def schwarz_sweep_kernel(double[::1] r,
                         double[::1] tau0,
                         double[::1] alpha_total,
                         double[::1] inv_w,
                         int64_t[::1] cyc_ptr,
                         int64_t[::1] cyc_edge,
                         double[::1] cyc_coef,
                         int64_t[::1] sub_ptr,
                         int64_t[::1] sub_cyc,
                         int64_t[::1] fac_ptr,
                         double[::1] fac_data,
                         int8_t[::1] fac_kind,
                         int64_t[::1] order,
                         double[::1] b_buf,
                         double[::1] alpha_buf):
    cdef double decrease = 0.0
    cdef double s, a, upd
    cdef Py_ssize_t oi, j, t, c, p, q, d, lo, base
    cdef int64_t e
    for oi in range(order.shape[0]):
        j = order[oi]
        lo = sub_ptr[j]
        d = sub_ptr[j + 1] - lo
        if d == 0:
            continue
        for t in range(d):
            c = sub_cyc[lo + t]
            s = 0.0
            for p in range(cyc_ptr[c], cyc_ptr[c + 1]):
                e = cyc_edge[p]
                s += r[e] * inv_w[e] * cyc_coef[p]
            b_buf[t] = s
        base = fac_ptr[j]
        if fac_kind[j] == 0:
            # forward substitution with the lower factor, then back
            # substitution with its transpose, both read row-major
            for p in range(d):
                s = b_buf[p]
                for q in range(p):
                    s -= fac_data[base + p * d + q] * alpha_buf[q]
                alpha_buf[p] = s / fac_data[base + p * d + p]
            for p in range(d - 1, -1, -1):
                s = alpha_buf[p]
                for q in range(p + 1, d):
                    s -= fac_data[base + q * d + p] * alpha_buf[q]
                alpha_buf[p] = s / fac_data[base + p * d + p]
        else:
            for p in range(d):
                s = 0.0
                for q in range(d):
                    s += fac_data[base + p * d + q] * b_buf[q]
                alpha_buf[p] = s
        for t in range(d):
            decrease += b_buf[t] * alpha_buf[t]
            a = alpha_buf[t]
            if a == 0.0:
                continue
            c = sub_cyc[lo + t]
            alpha_total[c] += a
            for p in range(cyc_ptr[c], cyc_ptr[c + 1]):
                e = cyc_edge[p]
                upd = a * cyc_coef[p]
                r[e] -= upd
                tau0[e] += upd
    return decrease


def gauss_seidel_kernel(double[::1] v,
                        double[::1] f,
                        int64_t[::1] adj_ptr,
                        int64_t[::1] adj_other,
                        double[::1] adj_weight,
                        double[::1] wdeg):
    cdef Py_ssize_t i, k
    cdef double s
    for i in range(v.shape[0]):
        s = f[i]
        for k in range(adj_ptr[i], adj_ptr[i + 1]):
            s += adj_weight[k] * v[adj_other[k]]
        v[i] = s / wdeg[i]
