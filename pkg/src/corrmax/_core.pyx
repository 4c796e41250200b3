# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same call signatures as :mod:`corrmax._fallback`."""

from libc.stdint cimport int64_t, uint64_t

cdef extern from "_kernels.h" nogil:
    void cm_hash_block(uint64_t key, int64_t r0, int64_t c0, int64_t rows,
                       int64_t cols, uint64_t *out)
    void cm_col_sum(const double *X, int64_t p, int64_t r0, int64_t r1, double *out)
    void cm_col_sqdev(const double *X, int64_t p, int64_t r0, int64_t r1,
                      const double *center, double *out)
    int cm_gram_tile(const double *A, int64_t lda, const double *B, int64_t ldb,
                     int64_t i0, int64_t i1, int64_t j0, int64_t j1,
                     int64_t r0, int64_t r1, const double *sa, const double *sb,
                     double *out)
    double cm_reduce_abs(const double *C, int64_t rows, int64_t cols, int64_t ldc,
                         int64_t i0, int64_t j0, int mode, int64_t *bi, int64_t *bj)
    double cm_reduce_corr(const double *C, int64_t rows, int64_t cols, int64_t ldc,
                          int64_t i0, int64_t j0, double n, const double *di,
                          const double *dj, const double *si, const double *sj,
                          int64_t *bi, int64_t *bj)

NAME = "compiled"


def hash_block(uint64_t key, int64_t r0, int64_t c0, uint64_t[:, ::1] out):
    with nogil:
        cm_hash_block(key, r0, c0, out.shape[0], out.shape[1], &out[0, 0])


def col_sum(const double[:, ::1] X, int64_t r0, int64_t r1, double[::1] out):
    if X.shape[1] == 0:
        return
    with nogil:
        cm_col_sum(&X[0, 0], X.shape[1], r0, r1, &out[0])


def col_sqdev(const double[:, ::1] X, int64_t r0, int64_t r1,
              const double[::1] center, double[::1] out):
    if X.shape[1] == 0:
        return
    with nogil:
        cm_col_sqdev(&X[0, 0], X.shape[1], r0, r1, &center[0], &out[0])


def gram_tile(const double[:, ::1] A, const double[:, ::1] B,
              int64_t i0, int64_t i1, int64_t j0, int64_t j1,
              int64_t r0, int64_t r1, const double[::1] sa, const double[::1] sb,
              double[:, ::1] out):
    cdef int rc
    if r1 <= r0:
        out[:, :] = 0.0
        return
    with nogil:
        rc = cm_gram_tile(&A[0, 0], A.shape[1], &B[0, 0], B.shape[1],
                          i0, i1, j0, j1, r0, r1, &sa[0], &sb[0], &out[0, 0])
    if rc != 0:
        raise MemoryError("gram_tile: allocation failed")


def reduce_abs(const double[:, :] C, int64_t i0, int64_t j0, int mode):
    cdef int64_t bi, bj
    cdef double v
    if C.shape[0] == 0 or C.shape[1] == 0:
        return -1.0, -1, -1
    if C.strides[1] != sizeof(double):
        raise ValueError("reduce_abs needs unit column stride")
    with nogil:
        v = cm_reduce_abs(&C[0, 0], C.shape[0], C.shape[1],
                          C.strides[0] // sizeof(double), i0, j0, mode, &bi, &bj)
    return v, bi, bj


def reduce_corr(const double[:, :] C, int64_t i0, int64_t j0, double n,
                const double[::1] di, const double[::1] dj,
                const double[::1] si, const double[::1] sj):
    cdef int64_t bi, bj
    cdef double v
    if C.shape[0] == 0 or C.shape[1] == 0:
        return -1.0, -1, -1
    if C.strides[1] != sizeof(double):
        raise ValueError("reduce_corr needs unit column stride")
    with nogil:
        v = cm_reduce_corr(&C[0, 0], C.shape[0], C.shape[1],
                           C.strides[0] // sizeof(double), i0, j0, n,
                           &di[0], &dj[0], &si[0], &sj[0], &bi, &bj)
    return v, bi, bj
