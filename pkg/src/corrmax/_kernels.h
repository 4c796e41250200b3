/* Hot loops for corrmax. Compiled into corrmax._core via Cython.
 *
 * Every routine is single-threaded and reentrant; parallelism is applied by
 * the Python caller over independent tiles, so results never depend on the
 * worker count.
 */
#ifndef CORRMAX_KERNELS_H
#define CORRMAX_KERNELS_H

#include <math.h>
#include <stdint.h>
#include <stdlib.h>
#include <string.h>

#define CM_MR 4
#define CM_NR 16
#define CM_KC 256

static const uint64_t CM_GOLDEN = 0x9E3779B97F4A7C15ULL;

static inline uint64_t cm_mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

static void cm_hash_block(uint64_t key, int64_t r0, int64_t c0, int64_t rows,
                          int64_t cols, uint64_t *out) {
    for (int64_t r = 0; r < rows; ++r) {
        uint64_t base = ((uint64_t)(r0 + r) << 32) + (uint64_t)c0 + 1ULL;
        uint64_t *o = out + r * cols;
        for (int64_t c = 0; c < cols; ++c)
            o[c] = cm_mix64(key + (base + (uint64_t)c) * CM_GOLDEN);
    }
}

/* Column statistics must match the numpy fallback bit for bit, so no
 * contraction into fused multiply-adds here. */
#pragma GCC push_options
#pragma GCC optimize("fp-contract=off")

/* Neumaier-compensated column sums of X[r0:r1, :] (row-major, ld = p). */
static void cm_col_sum(const double *X, int64_t p, int64_t r0, int64_t r1,
                       double *out) {
    double *comp = (double *)calloc((size_t)p, sizeof(double));
    for (int64_t i = 0; i < p; ++i) out[i] = 0.0;
    for (int64_t k = r0; k < r1; ++k) {
        const double *row = X + k * p;
        for (int64_t i = 0; i < p; ++i) {
            double s = out[i], x = row[i], t = s + x;
            if (fabs(s) >= fabs(x)) comp[i] += (s - t) + x;
            else comp[i] += (x - t) + s;
            out[i] = t;
        }
    }
    for (int64_t i = 0; i < p; ++i) out[i] += comp[i];
    free(comp);
}

/* Compensated sums of squared deviations from `center`. */
static void cm_col_sqdev(const double *X, int64_t p, int64_t r0, int64_t r1,
                         const double *center, double *out) {
    double *comp = (double *)calloc((size_t)p, sizeof(double));
    for (int64_t i = 0; i < p; ++i) out[i] = 0.0;
    for (int64_t k = r0; k < r1; ++k) {
        const double *row = X + k * p;
        for (int64_t i = 0; i < p; ++i) {
            double d = row[i] - center[i];
            double x = d * d;
            double s = out[i], t = s + x;
            if (fabs(s) >= fabs(x)) comp[i] += (s - t) + x;
            else comp[i] += (x - t) + s;
            out[i] = t;
        }
    }
    for (int64_t i = 0; i < p; ++i) out[i] += comp[i];
    free(comp);
}

#pragma GCC pop_options

/* acc[MR][NR] += sum_k a[k][:] (x) b[k][:], k sequential. */
static inline void cm_micro(const double *restrict ap, const double *restrict bp,
                            int64_t kc, double *restrict c, int64_t ldc) {
    double acc[CM_MR][CM_NR];
    for (int ii = 0; ii < CM_MR; ++ii)
        for (int jj = 0; jj < CM_NR; ++jj) acc[ii][jj] = c[ii * ldc + jj];
    for (int64_t k = 0; k < kc; ++k) {
        const double *a = ap + k * CM_MR;
        const double *b = bp + k * CM_NR;
#pragma GCC unroll 4
        for (int ii = 0; ii < CM_MR; ++ii) {
            double av = a[ii];
#pragma GCC unroll 16
            for (int jj = 0; jj < CM_NR; ++jj) acc[ii][jj] += av * b[jj];
        }
    }
    for (int ii = 0; ii < CM_MR; ++ii)
        for (int jj = 0; jj < CM_NR; ++jj) c[ii * ldc + jj] = acc[ii][jj];
}

static void cm_pack(const double *X, int64_t ld, int64_t k0, int64_t kc,
                    int64_t c0, int64_t c1, const double *shift, int64_t w,
                    int64_t strips, double *buf) {
    for (int64_t k = 0; k < kc; ++k) {
        const double *row = X + (k0 + k) * ld;
        for (int64_t s = 0; s < strips; ++s) {
            double *dst = buf + s * CM_KC * w + k * w;
            for (int64_t q = 0; q < w; ++q) {
                int64_t col = c0 + s * w + q;
                dst[q] = col < c1 ? row[col] - shift[col] : 0.0;
            }
        }
    }
}

/* out[i - i0][j - j0] = sum_{k=r0}^{r1-1} (A[k,i] - sa[i]) (B[k,j] - sb[j])
 * for i in [i0, i1), j in [j0, j1). Each entry is accumulated in row order
 * k = r0, r0+1, ... regardless of tile geometry. Returns 0, or -1 on OOM. */
static int cm_gram_tile(const double *A, int64_t lda, const double *B,
                        int64_t ldb, int64_t i0, int64_t i1, int64_t j0,
                        int64_t j1, int64_t r0, int64_t r1, const double *sa,
                        const double *sb, double *out) {
    int64_t ta = i1 - i0, tb = j1 - j0;
    int64_t sa_n = (ta + CM_MR - 1) / CM_MR, sb_n = (tb + CM_NR - 1) / CM_NR;
    int64_t ldc = sb_n * CM_NR;
    double *ap = (double *)malloc(sizeof(double) * CM_KC * CM_MR * sa_n);
    double *bp = (double *)malloc(sizeof(double) * CM_KC * CM_NR * sb_n);
    double *c = (double *)calloc((size_t)(sa_n * CM_MR * ldc), sizeof(double));
    if (!ap || !bp || !c) {
        free(ap); free(bp); free(c);
        return -1;
    }
    for (int64_t k0 = r0; k0 < r1; k0 += CM_KC) {
        int64_t kc = r1 - k0 < CM_KC ? r1 - k0 : CM_KC;
        cm_pack(A, lda, k0, kc, i0, i1, sa, CM_MR, sa_n, ap);
        cm_pack(B, ldb, k0, kc, j0, j1, sb, CM_NR, sb_n, bp);
        for (int64_t s = 0; s < sa_n; ++s)
            for (int64_t t = 0; t < sb_n; ++t)
                cm_micro(ap + s * CM_KC * CM_MR, bp + t * CM_KC * CM_NR, kc,
                         c + s * CM_MR * ldc + t * CM_NR, ldc);
    }
    for (int64_t i = 0; i < ta; ++i)
        memcpy(out + i * tb, c + i * ldc, sizeof(double) * tb);
    free(ap); free(bp); free(c);
    return 0;
}

/* Max |C| over a tile with global offsets; mode 0 keeps i < j, mode 1 keeps
 * i != j, mode 2 keeps everything. Row-major scan with strict '>' yields the
 * lexicographically smallest argmax. */
static double cm_reduce_abs(const double *C, int64_t rows, int64_t cols,
                            int64_t ldc, int64_t i0, int64_t j0, int mode, int64_t *bi,
                            int64_t *bj) {
    double best = -1.0;
    *bi = -1; *bj = -1;
    for (int64_t i = 0; i < rows; ++i) {
        int64_t gi = i0 + i;
        for (int64_t j = 0; j < cols; ++j) {
            int64_t gj = j0 + j;
            if ((mode == 0 && gi >= gj) || (mode == 1 && gi == gj)) continue;
            double v = fabs(C[i * ldc + j]);
            if (v > best) { best = v; *bi = gi; *bj = gj; }
        }
    }
    return best;
}

/* Max |r| over a tile, r = (C - (n di) dj) / sqrt(si sj) clamped to 1,
 * restricted to global i < j. */
static double cm_reduce_corr(const double *C, int64_t rows, int64_t cols,
                             int64_t ldc, int64_t i0, int64_t j0, double n,
                             const double *di, const double *dj,
                             const double *si, const double *sj,
                             int64_t *bi, int64_t *bj) {
    double best = -1.0;
    *bi = -1; *bj = -1;
    for (int64_t i = 0; i < rows; ++i) {
        int64_t gi = i0 + i;
        double ndi = n * di[i];
        for (int64_t j = 0; j < cols; ++j) {
            int64_t gj = j0 + j;
            if (gi >= gj) continue;
            double v = fabs(C[i * ldc + j] - ndi * dj[j]) / sqrt(si[i] * sj[j]);
            if (v > 1.0) v = 1.0;
            if (v > best) { best = v; *bi = gi; *bj = gj; }
        }
    }
    return best;
}

#endif
