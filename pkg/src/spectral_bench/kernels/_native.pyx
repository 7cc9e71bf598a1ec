# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot inner loops.

Plain C loops over typed memoryviews; compiled with -O3. The dispatching
wrappers in ``kernels/__init__.py`` guarantee C-contiguous float64 inputs.
Results agree with the ``_numpy`` backend to floating-point rounding.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def conv1d_forward(double[:, :, ::1] x, double[:, :, ::1] w, double[::1] b):
    cdef Py_ssize_t nb = x.shape[0], ci = x.shape[1], length = x.shape[2]
    cdef Py_ssize_t co = w.shape[0], k = w.shape[2]
    cdef Py_ssize_t t_out = length - k + 1
    y_arr = np.empty((nb, co, t_out))
    cdef double[:, :, ::1] y = y_arr
    cdef Py_ssize_t ib, io, ii, it, ik
    cdef double acc
    for ib in range(nb):
        for io in range(co):
            for it in range(t_out):
                acc = b[io]
                for ii in range(ci):
                    for ik in range(k):
                        acc += w[io, ii, ik] * x[ib, ii, it + ik]
                y[ib, io, it] = acc
    return y_arr


def conv1d_backward(double[:, :, ::1] x, double[:, :, ::1] w,
                    double[:, :, ::1] gy):
    cdef Py_ssize_t nb = x.shape[0], ci = x.shape[1], length = x.shape[2]
    cdef Py_ssize_t co = w.shape[0], k = w.shape[2]
    cdef Py_ssize_t t_out = gy.shape[2]
    gx_arr = np.zeros((nb, ci, length))
    gw_arr = np.zeros((co, ci, k))
    gb_arr = np.zeros(co)
    cdef double[:, :, ::1] gx = gx_arr
    cdef double[:, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t ib, io, ii, it, ik
    cdef double g
    for ib in range(nb):
        for io in range(co):
            for it in range(t_out):
                g = gy[ib, io, it]
                gb[io] += g
                for ii in range(ci):
                    for ik in range(k):
                        gw[io, ii, ik] += g * x[ib, ii, it + ik]
                        gx[ib, ii, it + ik] += g * w[io, ii, ik]
    return gx_arr, gw_arr, gb_arr


def maxpool1d_forward(double[:, :, ::1] x, Py_ssize_t pool):
    cdef Py_ssize_t nb = x.shape[0], c = x.shape[1], length = x.shape[2]
    cdef Py_ssize_t t_out = length // pool
    y_arr = np.empty((nb, c, t_out))
    arg_arr = np.empty((nb, c, t_out), dtype=np.int64)
    cdef double[:, :, ::1] y = y_arr
    cdef cnp.int64_t[:, :, ::1] arg = arg_arr
    cdef Py_ssize_t ib, ic, it, ip, best_i
    cdef double best, v
    for ib in range(nb):
        for ic in range(c):
            for it in range(t_out):
                best = x[ib, ic, it * pool]
                best_i = 0
                for ip in range(1, pool):
                    v = x[ib, ic, it * pool + ip]
                    if v > best:  # strict: first maximum wins
                        best = v
                        best_i = ip
                y[ib, ic, it] = best
                arg[ib, ic, it] = best_i
    return y_arr, arg_arr


def maxpool1d_backward(double[:, :, ::1] gy, cnp.int64_t[:, :, ::1] arg,
                       Py_ssize_t pool, Py_ssize_t length):
    cdef Py_ssize_t nb = gy.shape[0], c = gy.shape[1], t_out = gy.shape[2]
    gx_arr = np.zeros((nb, c, length))
    cdef double[:, :, ::1] gx = gx_arr
    cdef Py_ssize_t ib, ic, it
    for ib in range(nb):
        for ic in range(c):
            for it in range(t_out):
                gx[ib, ic, it * pool + arg[ib, ic, it]] = gy[ib, ic, it]
    return gx_arr


def pairwise_sq_dists(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], p = x.shape[1]
    d_arr = np.zeros((n, n))
    cdef double[:, ::1] d = d_arr
    cdef Py_ssize_t i, j, m
    cdef double acc, diff
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for m in range(p):
                diff = x[i, m] - x[j, m]
                acc += diff * diff
            d[i, j] = acc
            d[j, i] = acc
    return d_arr
