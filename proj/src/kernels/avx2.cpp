#include "navsim/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>
#endif

namespace navsim::kernels::detail {

#if defined(__x86_64__) && defined(__AVX2__)

// Mul/add only, same association as the scalar kernel; inputs are finite.

void batch_margin_avx2(const double* cx, const double* cy, const double* cz,
                       const double* rr, std::size_t n,
                       double x, double y, double z, double* out) {
    const __m256d vx = _mm256_set1_pd(x);
    const __m256d vy = _mm256_set1_pd(y);
    std::size_t j = 0;
    if (cz) {
        const __m256d vz = _mm256_set1_pd(z);
        for (; j + 4 <= n; j += 4) {
            const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(cx + j));
            const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(cy + j));
            const __m256d dz = _mm256_sub_pd(vz, _mm256_loadu_pd(cz + j));
            __m256d s = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
            s = _mm256_add_pd(s, _mm256_mul_pd(dz, dz));
            _mm256_storeu_pd(out + j, _mm256_sub_pd(s, _mm256_loadu_pd(rr + j)));
        }
        for (; j < n; ++j) {
            const double dx = x - cx[j];
            const double dy = y - cy[j];
            const double dz = z - cz[j];
            out[j] = ((dx * dx + dy * dy) + dz * dz) - rr[j];
        }
    } else {
        for (; j + 4 <= n; j += 4) {
            const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(cx + j));
            const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(cy + j));
            const __m256d s = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
            _mm256_storeu_pd(out + j, _mm256_sub_pd(s, _mm256_loadu_pd(rr + j)));
        }
        for (; j < n; ++j) {
            const double dx = x - cx[j];
            const double dy = y - cy[j];
            out[j] = (dx * dx + dy * dy) - rr[j];
        }
    }
}

MinResult min_element_avx2(const double* v, std::size_t n) {
    if (n == 0) return {0.0, -1};
    std::size_t j = 0;
    double m = v[0];
    if (n >= 4) {
        __m256d vm = _mm256_loadu_pd(v);
        for (j = 4; j + 4 <= n; j += 4) {
            vm = _mm256_min_pd(vm, _mm256_loadu_pd(v + j));
        }
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, vm);
        m = lanes[0];
        for (int k = 1; k < 4; ++k) {
            if (lanes[k] < m) m = lanes[k];
        }
    } else {
        j = 1;
    }
    for (; j < n; ++j) {
        if (v[j] < m) m = v[j];
    }
    // First index attaining the min, same tie rule as the scalar kernel.
    for (std::size_t k = 0; k < n; ++k) {
        if (v[k] <= m) return {v[k], static_cast<std::ptrdiff_t>(k)};
    }
    return {m, -1};  // unreachable for finite input
}

std::size_t count_leq_avx2(const double* v, std::size_t n, double threshold) {
    const __m256d vt = _mm256_set1_pd(threshold);
    std::size_t c = 0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d cmp = _mm256_cmp_pd(_mm256_loadu_pd(v + j), vt, _CMP_LE_OQ);
        c += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(cmp)));
    }
    for (; j < n; ++j) {
        if (v[j] <= threshold) ++c;
    }
    return c;
}

#else  // non-x86 or AVX2 not compiled in: alias the scalar kernels

void batch_margin_avx2(const double* cx, const double* cy, const double* cz,
                       const double* rr, std::size_t n,
                       double x, double y, double z, double* out) {
    batch_margin_scalar(cx, cy, cz, rr, n, x, y, z, out);
}

MinResult min_element_avx2(const double* v, std::size_t n) {
    return min_element_scalar(v, n);
}

std::size_t count_leq_avx2(const double* v, std::size_t n, double threshold) {
    return count_leq_scalar(v, n, threshold);
}

#endif

}  // namespace navsim::kernels::detail
