# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched Ricci / scalar curvature kernel.

Same index conventions as ``engine.py``; the caller supplies the inverse metric.
"""
from libc.stdlib cimport malloc, free

import numpy as np


def ricci_scalar_batch(double[:, :, ::1] gi, double[:, :, :, ::1] dg, double[:, :, :, :, ::1] d2g):
    cdef Py_ssize_t P = gi.shape[0]
    cdef Py_ssize_t n = gi.shape[1]
    ric_arr = np.empty((P, n, n))
    scal_arr = np.empty(P)
    cdef double[:, :, ::1] ric = ric_arr
    cdef double[::1] scal = scal_arr
    cdef Py_ssize_t n2 = n * n, n3 = n * n * n
    cdef double *G1 = <double *> malloc(n3 * sizeof(double))
    cdef double *gam = <double *> malloc(n3 * sizeof(double))
    cdef double *T = <double *> malloc(n3 * sizeof(double))
    cdef double *dgi = <double *> malloc(n3 * sizeof(double))
    cdef double *dgam = <double *> malloc(n3 * n * sizeof(double))
    cdef Py_ssize_t q, i, j, k, l, p, a, b, r
    cdef double s, acc, tr
    if not (G1 and gam and T and dgi and dgam):
        free(G1); free(gam); free(T); free(dgi); free(dgam)
        raise MemoryError()
    try:
        with nogil:
            for q in range(P):
                # first-kind symbols G1[p,i,j]
                for p in range(n):
                    for i in range(n):
                        for j in range(n):
                            G1[(p * n + i) * n + j] = 0.5 * (dg[q, j, p, i] + dg[q, i, p, j] - dg[q, i, j, p])
                # second kind
                for l in range(n):
                    for i in range(n):
                        for j in range(n):
                            s = 0.0
                            for p in range(n):
                                s = s + gi[q, l, p] * G1[(p * n + i) * n + j]
                            gam[(l * n + i) * n + j] = s
                # derivative of the inverse metric: dgi[l,p,k] = -g^la d_k g_ab g^bp
                for a in range(n):
                    for p in range(n):
                        for k in range(n):
                            s = 0.0
                            for b in range(n):
                                s = s + dg[q, a, b, k] * gi[q, b, p]
                            T[(a * n + p) * n + k] = s
                for l in range(n):
                    for p in range(n):
                        for k in range(n):
                            s = 0.0
                            for a in range(n):
                                s = s + gi[q, l, a] * T[(a * n + p) * n + k]
                            dgi[(l * n + p) * n + k] = -s
                # dgam[l,i,j,k] = d_k Gamma^l_ij
                for l in range(n):
                    for i in range(n):
                        for j in range(n):
                            for k in range(n):
                                s = 0.0
                                for p in range(n):
                                    s = s + dgi[(l * n + p) * n + k] * G1[(p * n + i) * n + j]
                                    s = s + gi[q, l, p] * 0.5 * (d2g[q, j, p, i, k] + d2g[q, i, p, j, k]
                                                                  - d2g[q, i, j, p, k])
                                dgam[((l * n + i) * n + j) * n + k] = s
                # Ric_ik = d_j G^j_ik - d_i G^j_jk + G^j_jr G^r_ik - G^j_ir G^r_jk
                tr = 0.0
                for i in range(n):
                    for k in range(n):
                        acc = 0.0
                        for j in range(n):
                            acc = acc + dgam[((j * n + i) * n + k) * n + j] - dgam[((j * n + j) * n + k) * n + i]
                            for r in range(n):
                                acc = acc + gam[(j * n + j) * n + r] * gam[(r * n + i) * n + k] \
                                    - gam[(j * n + i) * n + r] * gam[(r * n + j) * n + k]
                        ric[q, i, k] = acc
                        tr = tr + gi[q, i, k] * acc
                scal[q] = tr
    finally:
        free(G1); free(gam); free(T); free(dgi); free(dgam)
    return ric_arr, scal_arr
